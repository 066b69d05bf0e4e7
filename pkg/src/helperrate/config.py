"""Central numerical tolerances and size caps.

Every threshold used by the package lives here so tests and the CLI can
override them in one place.  ``TOL`` is the process-wide instance; mutate its
fields (or call :func:`apply_overrides`) to change behaviour globally.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass
class Tolerances:
    # state / measurement validation
    hermitian_state: float = 1e-10      # hermiticity defect allowed in density matrices
    psd_state: float = 1e-10            # most negative eigenvalue tolerated before NotPSD
    trace_one: float = 1e-10
    unit_norm: float = 1e-10
    povm_completeness: float = 1e-9

    # operator functions
    hermitian_input: float = 1e-8       # eig_hermitian precondition
    eig_reconstruction: float = 1e-9
    psd_sqrt_fail: float = 1e-6         # psd_sqrt raises below -this; above it, clip to 0
    isometry: float = 1e-9
    rank_cutoff: float = 1e-12          # eigenvalues below this do not count toward rank

    # probabilities and entropies
    distribution_sum: float = 1e-9
    distribution_floor: float = 1e-12   # entries above -this are clipped to 0
    entropy_floor: float = 1e-12        # eigenvalues/probabilities below this add exactly 0
    outcome_floor: float = 1e-12        # measurement outcomes below this are dropped

    # structure detection and curve bookkeeping
    commutator: float = 1e-9
    witness_match: float = 1e-9
    membership: float = 1e-9
    pareto: float = 1e-12

    # size caps
    kron_dim_cap: int = 4096
    enum_cap: float = 1e8
    synthesis_exact_cap: float = 1e7
    binning_cap: float = 1e7


TOL = Tolerances()

_FIELD_NAMES = {f.name for f in fields(Tolerances)}


def apply_overrides(overrides: dict, tol: Tolerances = TOL) -> None:
    """Set tolerance fields by name; unknown names are rejected."""
    for key, value in overrides.items():
        if key not in _FIELD_NAMES:
            raise KeyError(f"unknown tolerance '{key}'")
        current = getattr(tol, key)
        setattr(tol, key, type(current)(value))
