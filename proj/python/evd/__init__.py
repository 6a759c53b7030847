"""Evidence estimators for doubly intractable models."""

from ._evd import (
    ConfigError,
    NumericalAbort,
    ess,
    geometric_log_evidence,
    ising_log_evidence,
    ising_log_z,
    ising_savis,
    log_sum_exp,
    poisson_log_evidence,
    precision_log_evidence,
    prop1_sweep,
    resample,
    run_experiment,
    summarise,
)

__all__ = [
    "ConfigError",
    "NumericalAbort",
    "ess",
    "geometric_log_evidence",
    "ising_log_evidence",
    "ising_log_z",
    "ising_savis",
    "log_sum_exp",
    "poisson_log_evidence",
    "precision_log_evidence",
    "prop1_sweep",
    "resample",
    "run_experiment",
    "summarise",
]
