"""Exact one-sided maximal operators, weight constants, and inequality checks.

The package works on nonnegative step functions with finitely many pieces.
Everything downstream of that representation is exact or carries an explicit
error budget: envelopes of one-sided maximal functions are compiled to closed
form, weight constants are suprema over finite candidate families evaluated
in closed form, and the verification layer replays inequalities on corpora
with machine-checkable slack.
"""

from .stepfn import (
    Interval,
    StepFunction,
    HalvingChain,
    integrate,
    dual_weight,
    lorentz_norms,
    weak_l1inf_on,
    lp_norm,
    halving_chain,
)
from .maximal import (
    Envelope,
    FractionalParams,
    QuadratureError,
    compile_envelope,
    mplus_at,
    malpha_at,
    integrate_power_weight,
    integrate_mminus_exact,
    integrate_mplus_exact,
)
from .weights import (
    WeightConstantReport,
    ap_oneside,
    ainf_oneside,
    ap_star,
    apq_star,
    restricted_minus,
    testing_splus,
    evaluate_witness,
)
from .claims import ClaimResult, ClaimFailure
from .orlicz import (
    YoungFunction,
    ConjugatePair,
    LuxemburgResult,
    power_pair,
    log_bump_pair,
    luxemburg_norm,
    orlicz_mplus_at,
    orlicz_mplus_many,
    bump_constants,
    holder_check,
)
from .decomp import (
    LevelComponents,
    DecompTranscript,
    level_components,
    build_transcript,
    verify_key_lemma,
    verify_rwtype,
)
from .verify import (
    CorpusSpec,
    Instance,
    SweepResult,
    REGRESSION_GATES,
    generate_corpus,
    buckley_minus_pair,
    buckley_plus_pair,
    weak_one_norm,
    weak_pq_direct,
    check_strong,
    check_mixed,
    check_mixed_frac,
    check_2w,
    sweep_sharpness,
    run_suite,
    write_report,
)

__version__ = "0.1.0"

__all__ = [
    "Interval",
    "StepFunction",
    "HalvingChain",
    "integrate",
    "dual_weight",
    "lorentz_norms",
    "weak_l1inf_on",
    "lp_norm",
    "halving_chain",
    "Envelope",
    "FractionalParams",
    "QuadratureError",
    "compile_envelope",
    "mplus_at",
    "malpha_at",
    "integrate_power_weight",
    "integrate_mminus_exact",
    "integrate_mplus_exact",
    "WeightConstantReport",
    "ap_oneside",
    "ainf_oneside",
    "ap_star",
    "apq_star",
    "restricted_minus",
    "testing_splus",
    "evaluate_witness",
    "ClaimResult",
    "ClaimFailure",
    "YoungFunction",
    "ConjugatePair",
    "LuxemburgResult",
    "power_pair",
    "log_bump_pair",
    "luxemburg_norm",
    "orlicz_mplus_at",
    "orlicz_mplus_many",
    "bump_constants",
    "holder_check",
    "LevelComponents",
    "DecompTranscript",
    "level_components",
    "build_transcript",
    "verify_key_lemma",
    "verify_rwtype",
    "CorpusSpec",
    "Instance",
    "SweepResult",
    "REGRESSION_GATES",
    "generate_corpus",
    "buckley_minus_pair",
    "buckley_plus_pair",
    "weak_one_norm",
    "weak_pq_direct",
    "check_strong",
    "check_mixed",
    "check_mixed_frac",
    "check_2w",
    "sweep_sharpness",
    "run_suite",
    "write_report",
    "__version__",
]
