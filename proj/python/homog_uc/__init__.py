"""Python bindings for the homog-uc C++ core.

Polynomials are plain dicts mapping exponent tuples to coefficients, e.g.
``{(2, 0): 1.0, (0, 2): -1.0}`` for x1^2 - x2^2.
"""

import json as _json

from ._core import (
    AHarmonicPolynomial,
    CoefficientField,
    ConfigError,
    ContractViolation,
    CorrectorTable,
    FormatError,
    HeterogeneousPolynomial,
    HomogenizedOperator,
    SolverError,
    a_harmonic_dim,
    apply_S,
    build_A_harmonic,
    build_heterogeneous,
    compute_correctors,
    harmonic_basis,
    harmonic_dim,
    laplacian,
    mean_l2_norm_ellipsoid,
    read_corrector_table,
    three_ellipsoid_ratio,
)
from ._core import run_scaling_study as _run_scaling_study


def run_scaling_study(table, m_list, r_list, theta=0.5, rng_seed=20240601, negative_control=False):
    """Returns (csv_text, summary_dict)."""
    csv, summary = _run_scaling_study(table, list(m_list), [float(r) for r in r_list], theta, rng_seed,
                                      negative_control)
    return csv, _json.loads(summary)


__all__ = [name for name in dir() if not name.startswith("_")]
