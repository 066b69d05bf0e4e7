"""Entropic functionals in bits (base-2 logarithms throughout)."""

from __future__ import annotations

import numpy as np

from . import linalg
from .config import TOL
from .errors import DimMismatch, InvalidDistribution, InvalidEnsemble


def as_distribution(p) -> np.ndarray:
    """Validate and return a probability vector (clipping round-off negatives)."""
    a = np.asarray(p, dtype=float).ravel()
    if a.size == 0 or not np.all(np.isfinite(a)):
        raise InvalidDistribution("probabilities must be a nonempty finite vector")
    if float(a.min()) < -TOL.distribution_floor:
        raise InvalidDistribution(f"negative probability {float(a.min()):.3e}")
    a = np.clip(a, 0.0, None)
    total = float(a.sum())
    if abs(total - 1.0) > TOL.distribution_sum:
        raise InvalidDistribution(f"probabilities sum to {total!r}")
    return a


def _plogp(values: np.ndarray) -> float:
    """-sum p log2 p over entries above the entropy floor (0 log 0 := 0)."""
    v = values[values > TOL.entropy_floor]
    if v.size == 0:
        return 0.0
    return float(-(v * np.log2(v)).sum())


def shannon(p) -> float:
    """Shannon entropy of a distribution, in bits."""
    return _plogp(as_distribution(p))


def spectrum(rho) -> np.ndarray:
    """Eigenvalues of a density matrix, descending, clipped at zero."""
    w, _ = linalg.eig_hermitian(linalg.check_density(rho))
    return np.clip(w, 0.0, None)


def von_neumann(rho) -> float:
    """Von Neumann entropy of a density matrix, in bits."""
    return _plogp(spectrum(rho))


def _split_dims(dims, part_a):
    dims = [int(d) for d in dims]
    n = len(dims)
    part = sorted({int(i) for i in part_a})
    if not part or part[0] < 0 or part[-1] >= n:
        raise DimMismatch(f"subsystem indices {part} out of range for {n} parts")
    rest = [i for i in range(n) if i not in part]
    return dims, part, rest


def cond_vn(rho_ab, dims, part_a) -> float:
    """Conditional entropy H(A|B) = H(AB) - H(B) of a bipartition."""
    a = linalg.check_density(rho_ab)
    dims, part, rest = _split_dims(dims, part_a)
    if not rest:
        raise DimMismatch("conditioning system is empty")
    h_ab = von_neumann(a)
    h_b = von_neumann(linalg.partial_trace(a, dims, rest))
    return h_ab - h_b


def mutual_info(rho_ab, dims, part_a) -> float:
    """Mutual information I(A;B) = H(A) + H(B) - H(AB), clipped at zero."""
    a = linalg.check_density(rho_ab)
    dims, part, rest = _split_dims(dims, part_a)
    if not rest:
        raise DimMismatch("second subsystem is empty")
    h_a = von_neumann(linalg.partial_trace(a, dims, part))
    h_b = von_neumann(linalg.partial_trace(a, dims, rest))
    value = h_a + h_b - von_neumann(a)
    return max(value, 0.0)


def holevo(ensemble) -> float:
    """Holevo quantity chi = H(sum p rho) - sum p H(rho) of an ensemble."""
    pairs = list(ensemble)
    if not pairs:
        raise InvalidEnsemble("empty ensemble")
    probs = as_distribution([p for p, _ in pairs])
    states = [linalg.check_density(rho, context=f"ensemble[{i}]") for i, (_, rho) in enumerate(pairs)]
    d = states[0].shape[0]
    if any(s.shape[0] != d for s in states):
        raise InvalidEnsemble("ensemble states have mixed dimensions")
    avg = sum(p * s for p, s in zip(probs, states))
    chi = von_neumann(avg) - sum(p * von_neumann(s) for p, s in zip(probs, states) if p > TOL.entropy_floor)
    return max(chi, 0.0)


# ---------------------------------------------------------------------------
# classical joint helpers (used by rate computations and oracles)

def check_joint(p_xy) -> np.ndarray:
    """Validate a joint probability matrix."""
    a = np.asarray(p_xy, dtype=float)
    if a.ndim != 2 or a.size == 0 or not np.all(np.isfinite(a)):
        raise InvalidDistribution("joint must be a finite 2-D array")
    if float(a.min()) < -TOL.distribution_floor:
        raise InvalidDistribution(f"negative joint probability {float(a.min()):.3e}")
    a = np.clip(a, 0.0, None)
    total = float(a.sum())
    if abs(total - 1.0) > TOL.distribution_sum:
        raise InvalidDistribution(f"joint probabilities sum to {total!r}")
    return a


def classical_conditional_entropy(p_xy, given_axis: int) -> float:
    """H(other | given) of a joint matrix, in bits."""
    a = check_joint(p_xy)
    marg = a.sum(axis=1 - given_axis)
    return _plogp(a.ravel()) - _plogp(marg)


def classical_mutual_information(p_xy) -> float:
    """I(X;Y) of a joint matrix, in bits, clipped at zero."""
    a = check_joint(p_xy)
    h_x = _plogp(a.sum(axis=1))
    h_y = _plogp(a.sum(axis=0))
    return max(h_x + h_y - _plogp(a.ravel()), 0.0)


def pure_subsystem_entropy(amplitudes, dims, keep) -> float:
    """Entropy of a subsystem of a pure state given its amplitude tensor."""
    amps = np.asarray(amplitudes, dtype=complex).ravel()
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != amps.size:
        raise DimMismatch(f"prod{tuple(dims)} != vector length {amps.size}")
    n = len(dims)
    kept = sorted({int(k) for k in keep})
    if not kept or kept[0] < 0 or kept[-1] >= n:
        raise DimMismatch(f"keep indices {kept} out of range")
    rest = [i for i in range(n) if i not in kept]
    t = amps.reshape(dims).transpose(kept + rest)
    d_keep = int(np.prod([dims[i] for i in kept]))
    m = t.reshape(d_keep, -1)
    # spectrum of the reduced state = spectrum of the smaller Gram matrix
    if m.shape[0] <= m.shape[1]:
        gram = m @ np.conj(m.T)
    else:
        gram = np.conj(m.T) @ m
    w = np.linalg.eigvalsh((gram + np.conj(gram.T)) / 2.0)
    return _plogp(np.clip(w, 0.0, None))
