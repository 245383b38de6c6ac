"""Process-wide defaults and environment overrides."""

import os

#: Coefficients below this magnitude are dropped from PauliSum arithmetic.
PRUNE_TOL = 1e-14
#: Relative singular-value cut used for every "numerical dimension" decision.
RANK_TOL = 1e-9
#: Relative eigenvalue grouping tolerance for spectral projectors.
GROUP_TOL_REL = 1e-8
#: Tolerance for Hermitian / anti-Hermitian / unitary role checks.
ROLE_TOL = 1e-10
#: Dimension cap for commutant computations (d x d operators, d**2 unknowns).
COMMUTANT_DIM_LIMIT = 64
#: Hard cap on d for the doubled commutant (d**4 unknowns).
DOUBLED_COMMUTANT_DIM_LIMIT = 8
#: Registers up to this many qubits use the lookup-table closure kernel.
TABLE_KERNEL_MAX_QUBITS = 12


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def dense_qubit_limit():
    """Largest register (in qubits) that may be materialized densely.

    Read on every call so tests and the CLI can override it through
    ``LIEFORGE_DENSE_LIMIT`` without re-importing the package.
    """
    return _env_int("LIEFORGE_DENSE_LIMIT", 12)


def numba_disabled():
    return os.environ.get("LIEFORGE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
