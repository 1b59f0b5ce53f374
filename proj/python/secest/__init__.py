"""Secure state estimation under sparse sensor and channel attacks."""

from ._core import (
    ConfigError,
    DimensionError,
    Infeasible,
    IOFailure,
    ParamFileMissing,
    RankDeficient,
    SecestError,
    TooLarge,
    certify_recoverability,
    check_window_recoverability,
    compute_annihilator,
    correctable_bound,
    decode,
    l0_bruteforce,
    l1_minimize,
    reduced_admittance,
    run_simulation,
    secure_estimate_linear,
)

__all__ = [name for name in dir() if not name.startswith("_")]
