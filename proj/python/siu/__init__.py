"""Saturated innovation update (SIU) for resilient distributed estimation.

Thin Python layer over the C++ core in :mod:`siu._core`.
"""

from ._core import (  # noqa: F401
    DivergenceError,
    GammaState,
    Graph,
    InvariantViolation,
    ScheduleConfig,
    SiuError,
    SpectralSummary,
    ValidationError,
    alpha,
    attack_set,
    beta,
    diagnostics,
    gain,
    gamma_advance,
    gamma_initial,
    gamma_total,
    is_connected,
    laplacian,
    lemma,
    measure,
    parse_edge_list,
    random_geometric,
    run,
    sample_theta,
    siu_step,
    spectral_bounds,
    sweep_resilience,
    validate,
)

__version__ = "0.1.0"
