"""Batch command-line front end.

Subcommands
    eval       point values of the one-sided maximal operators
    envelope   compile and dump the exact piecewise envelope
    constant   weight constants with witnesses
    decompose  level-set transcript with halving chains
    verify     claim suites over the deterministic corpus
    sweep      sharpness exponent sweep

Inputs are step functions in the JSON dialect of stepfn (``{"breakpoints":
[...], "values": [...]}``); Young functions are inline JSON objects like
``{"kind": "power", "r": 2.0}``. Outputs are JSON documents (CSV for
verify) written to --out or standard output, byte-identical across runs
given the same inputs and seed.

Exit codes: 0 success; 2 malformed input or failed precondition, with a
diagnostic on standard error naming the violated invariant; 3 failing
claim, with the serialized replay instance on standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields, replace
from typing import Optional, Sequence

import numpy as np

from .claims import ClaimFailure
from .decomp import build_transcript
from .maximal import (
    FractionalParams,
    QuadratureError,
    compile_envelope,
    malpha_at,
    mplus_at,
)
from .orlicz import YoungFunction, bump_constants
from .stepfn import StepFunction
from .verify import CorpusSpec, run_suite, sweep_sharpness, write_report
from .weights import (
    ainf_oneside,
    ap_oneside,
    ap_star,
    apq_star,
    restricted_minus,
    testing_splus,
)

__all__ = ["Config", "run", "main"]


@dataclass(frozen=True)
class Config:
    """Run-wide defaults; every field can be overridden by a flag."""

    quadrature_tol: float = 1e-8
    bisection_tol: float = 1e-10
    claim_tol: float = 1e-9
    refine: int = 8
    lam: float = 2.0
    seed: int = 0xC0FFEE

    def validate(self) -> "Config":
        if not (
            self.quadrature_tol > 0.0
            and self.bisection_tol > 0.0
            and self.claim_tol > 0.0
        ):
            raise ValueError("config invariant violated: tolerances must be positive")
        if self.refine < 1:
            raise ValueError("config invariant violated: refinement must be >= 1")
        if not self.lam > 1.0:
            raise ValueError("config invariant violated: lambda must exceed 1")
        return self

    @staticmethod
    def from_file(path: str) -> "Config":
        obj = _load_json(path)
        if not isinstance(obj, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        base = Config()
        kw = {}
        alias = {"lambda": "lam"}
        names = {f.name for f in fields(Config)}
        for key, val in obj.items():
            name = alias.get(key, key)
            if name not in names:
                raise ValueError(f"config file {path}: unknown key {key!r}")
            kw[name] = int(val) if name in ("refine", "seed") else float(val)
        return replace(base, **kw).validate()


def _load_json(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}")


def _load_step(path: str) -> StepFunction:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}")
    return StepFunction.from_json(text)


def _young(text: str) -> YoungFunction:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"Young function spec is not valid JSON: {exc}")
    phi = YoungFunction.from_jsonable(obj)
    phi.validate()
    return phi


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _config_of(ns: argparse.Namespace) -> Config:
    cfg = Config.from_file(ns.config) if ns.config else Config()
    over = {}
    if getattr(ns, "refine", None) is not None:
        over["refine"] = ns.refine
    if getattr(ns, "lam", None) is not None:
        over["lam"] = ns.lam
    if getattr(ns, "seed", None) is not None:
        over["seed"] = ns.seed
    if over:
        cfg = replace(cfg, **over)
    return cfg.validate()


def _require(ns: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(ns, n, None) is None]
    if missing:
        raise ValueError(
            "missing required flag(s): " + " ".join("--" + n for n in missing)
        )


# ---------------------------------------------------------------------------
# handlers: Namespace + Config -> output text


def _cmd_eval(ns: argparse.Namespace, cfg: Config) -> str:
    f = _load_step(ns.fn)
    side = "plus" if ns.op in ("mplus", "malpha+") else "minus"
    if ns.op in ("mplus", "mminus"):
        val = mplus_at(f, ns.x, side=side)
    else:
        _require(ns, "alpha", "p", "q")
        fp = FractionalParams(ns.alpha, ns.p, ns.q)
        val = malpha_at(f, fp, ns.x, side=side)
    return f"{val!r}\n"


def _cmd_envelope(ns: argparse.Namespace, cfg: Config) -> str:
    f = _load_step(ns.fn)
    env = compile_envelope(f, ns.side)
    return _dump({"side": ns.side, "pieces": env.to_jsonable()})


def _cmd_constant(ns: argparse.Namespace, cfg: Config) -> str:
    w = _load_step(ns.weight)
    R = cfg.refine
    kind = ns.kind
    tol = ns.tol
    if kind in ("ap+", "ap-"):
        _require(ns, "p")
        rep = ap_oneside(w, ns.p, "plus" if kind == "ap+" else "minus", R=R)
    elif kind in ("ainf+", "ainf-"):
        rep = ainf_oneside(w, "plus" if kind == "ainf+" else "minus", R=R)
    elif kind in ("ap*", "ap*~"):
        _require(ns, "p")
        rep = ap_star(w, ns.p, R=R, tilde=kind.endswith("~"))
    elif kind in ("apq*", "apq*~"):
        _require(ns, "p", "q")
        rep = apq_star(w, ns.p, ns.q, R=R, tilde=kind.endswith("~"))
    elif kind == "restricted-":
        _require(ns, "p")
        rep = restricted_minus(w, ns.p, R=R)
    elif kind == "testing+":
        _require(ns, "p", "sigma")
        sig = _load_step(ns.sigma)
        rep = testing_splus(w, sig, ns.p, R=R, tol=tol or 1e-13)
    else:  # wp-bump / ap-bump
        _require(ns, "p", "sigma", "phi", "phibar")
        sig = _load_step(ns.sigma)
        wp, ap = bump_constants(
            w,
            sig,
            _young(ns.phi),
            _young(ns.phibar),
            ns.p,
            R=R,
            tol=tol or cfg.bisection_tol,
        )
        rep = wp if kind == "wp-bump" else ap
    return _dump(rep.to_jsonable())


def _cmd_decompose(ns: argparse.Namespace, cfg: Config) -> str:
    f = _load_step(ns.fn)
    if (ns.kmin is None) != (ns.kmax is None):
        raise ValueError("--kmin and --kmax must be given together")
    krange = None if ns.kmin is None else (ns.kmin, ns.kmax)
    if ns.sigma is not None:
        sigma = _load_step(ns.sigma)
    else:
        t = f.breakpoints
        sigma = StepFunction(
            np.array([float(t[0]), float(t[-1])]), np.array([1.0])
        )
    transcript = build_transcript(f, cfg.lam, krange, sigma, halving_depth=ns.depth)
    return _dump(transcript.to_jsonable())


def _cmd_verify(ns: argparse.Namespace, cfg: Config) -> str:
    if ns.corpus == "default":
        spec = CorpusSpec(seed=cfg.seed)
    else:
        spec = CorpusSpec.from_jsonable(_load_json(ns.corpus))
        if ns.seed is not None:
            spec = replace(spec, seed=ns.seed)
    results = run_suite(
        ns.suite, spec, jobs=ns.jobs, R=cfg.refine, tol=ns.tol or cfg.claim_tol
    )
    return write_report(results)


def _cmd_sweep(ns: argparse.Namespace, cfg: Config) -> str:
    _require(ns, "p")
    kw = {}
    if ns.deltas is not None:
        try:
            kw["deltas"] = tuple(float(d) for d in ns.deltas.split(","))
        except ValueError:
            raise ValueError("--deltas must be a comma-separated list of numbers")
    res = sweep_sharpness(
        ns.p,
        n_pieces=ns.pieces,
        R=cfg.refine,
        quad_tol=ns.tol or cfg.quadrature_tol,
        **kw,
    )
    return _dump(res.to_jsonable())


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="onesided",
        description="One-sided maximal operators, weight constants, and "
        "machine-checked inequalities on step functions.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument(
            "--refine", type=int, help="subdivisions per piece in the candidate grid"
        )
        p.add_argument(
            "--lambda", dest="lam", type=float, help="level-set ratio (> 1)"
        )
        p.add_argument("--tol", type=float, help="dominant tolerance override")
        p.add_argument("--seed", type=int, help="corpus seed")

    p = sub.add_parser("eval", help="point value of a maximal operator")
    common(p)
    p.add_argument(
        "--op",
        required=True,
        choices=["mplus", "mminus", "malpha+", "malpha-"],
        help="operator; malpha variants need --alpha/--p/--q",
    )
    p.add_argument("--fn", required=True, help="step function JSON file")
    p.add_argument("--x", type=float, required=True, help="evaluation point")
    p.add_argument("--alpha", type=float, help="fractional order in [0, 1)")
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("envelope", help="exact piecewise envelope as JSON")
    common(p)
    p.add_argument("--fn", required=True, help="step function JSON file")
    p.add_argument("--side", default="plus", choices=["plus", "minus"])
    p.set_defaults(handler=_cmd_envelope)

    p = sub.add_parser("constant", help="weight constant with witness")
    common(p)
    p.add_argument(
        "--kind",
        required=True,
        choices=[
            "ap+",
            "ap-",
            "ainf+",
            "ainf-",
            "ap*",
            "ap*~",
            "apq*",
            "apq*~",
            "restricted-",
            "testing+",
            "wp-bump",
            "ap-bump",
        ],
    )
    p.add_argument("--weight", required=True, help="weight JSON file")
    p.add_argument("--sigma", help="second weight (testing+/bump kinds)")
    p.add_argument("--p", type=float, help="exponent (r for restricted-)")
    p.add_argument("--q", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--phi", help='inline Young function JSON, e.g. {"kind":"power","r":2}')
    p.add_argument("--phibar", help="inline Young function JSON (conjugate)")
    p.set_defaults(handler=_cmd_constant)

    p = sub.add_parser("decompose", help="level-set transcript as JSON")
    common(p)
    p.add_argument("--fn", required=True, help="step function JSON file")
    p.add_argument("--sigma", help="chain measure (default: Lebesgue on the hull)")
    p.add_argument("--kmin", type=int, help="lowest scale (with --kmax)")
    p.add_argument("--kmax", type=int, help="highest scale (with --kmin)")
    p.add_argument("--depth", type=int, default=4, help="halving chain depth")
    p.set_defaults(handler=_cmd_decompose)

    p = sub.add_parser("verify", help="run a claim suite; CSV report")
    common(p)
    p.add_argument(
        "--suite",
        required=True,
        choices=["strong", "mixed", "frac", "2w", "all"],
    )
    p.add_argument(
        "--corpus",
        default="default",
        help='"default" or a CorpusSpec JSON file',
    )
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("sweep", help="sharpness exponent sweep as JSON")
    common(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--deltas", help="comma-separated exponents")
    p.add_argument("--pieces", type=int, default=64, help="family resolution")
    p.set_defaults(handler=_cmd_sweep)

    return top


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return int(exc.code or 0)
    try:
        cfg = _config_of(ns)
        text = ns.handler(ns, cfg)
    except ClaimFailure as exc:
        sys.stderr.write(f"claim failure: {exc}\n")
        sys.stderr.write(json.dumps(exc.replay, sort_keys=True) + "\n")
        return 3
    except (ValueError, QuadratureError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    if ns.out:
        try:
            with open(ns.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            sys.stderr.write(f"error: cannot write {ns.out}: {exc}\n")
            return 2
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
