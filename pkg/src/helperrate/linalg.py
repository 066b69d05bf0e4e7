"""Dense complex linear algebra on small matrices.

Everything operates on plain numpy ``complex128`` arrays and is a pure
function of its inputs; random constructions take an explicit seed.  Matrix
dimensions stay small (a few dozen), so explicit contracts win over
asymptotic cleverness throughout.
"""

from __future__ import annotations

import numpy as np

from .config import TOL
from .errors import (
    BadDims,
    DimensionOverflow,
    DimMismatch,
    InvalidPovm,
    InvalidState,
    NoConvergence,
    NotHermitian,
    NotPSD,
)


def as_complex_matrix(mat) -> np.ndarray:
    """Coerce to a square complex matrix with finite entries."""
    a = np.asarray(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise BadDims(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise BadDims("matrix entries must be finite")
    return a


def dagger(mat: np.ndarray) -> np.ndarray:
    return np.conj(mat.T)


def hermiticity_defect(mat: np.ndarray) -> float:
    """Max-norm distance from the Hermitian part."""
    return float(np.max(np.abs(mat - np.conj(mat.T))))


def eig_hermitian(mat, hermitian_tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.

    Returns ``(w, v)`` with ``v @ diag(w) @ v†`` reconstructing the input and
    the columns of ``v`` orthonormal.  Raises :class:`NotHermitian` when the
    hermiticity defect exceeds the tolerance and :class:`NoConvergence` when
    the underlying iteration fails.
    """
    a = as_complex_matrix(mat)
    tol = TOL.hermitian_input if hermitian_tol is None else hermitian_tol
    defect = hermiticity_defect(a)
    if defect > tol:
        raise NotHermitian(f"hermiticity defect {defect:.3e} exceeds {tol:.1e}")
    try:
        w, v = np.linalg.eigh((a + dagger(a)) / 2.0)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def psd_sqrt(mat) -> np.ndarray:
    """Positive square root of a PSD matrix.

    Round-off negatives are clipped to zero before the root; eigenvalues below
    ``-TOL.psd_sqrt_fail`` raise :class:`NotPSD`.
    """
    w, v = eig_hermitian(mat)
    lo = float(w.min())
    if lo < -TOL.psd_sqrt_fail:
        raise NotPSD(f"min eigenvalue {lo:.3e} below -{TOL.psd_sqrt_fail:.1e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ dagger(v)


def kron(a, b, dim_cap: int | None = None) -> np.ndarray:
    x = as_complex_matrix(a)
    y = as_complex_matrix(b)
    cap = TOL.kron_dim_cap if dim_cap is None else dim_cap
    out_dim = x.shape[0] * y.shape[0]
    if out_dim > cap:
        raise DimensionOverflow(f"kron output dimension {out_dim} exceeds cap {cap}")
    return np.kron(x, y)


def partial_trace(mat, dims, keep) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    ``dims`` lists the subsystem dimensions in tensor order; ``keep`` is a set
    of subsystem indices.  The kept subsystems stay in their original order.
    """
    a = as_complex_matrix(mat)
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise BadDims(f"invalid subsystem dimensions {dims}")
    if int(np.prod(dims)) != a.shape[0]:
        raise DimMismatch(f"prod{tuple(dims)} != matrix dimension {a.shape[0]}")
    n = len(dims)
    kept = sorted({int(k) for k in keep})
    if not kept or kept[0] < 0 or kept[-1] >= n:
        raise DimMismatch(f"keep indices {kept} out of range for {n} subsystems")

    row = [chr(ord("a") + i) for i in range(n)]
    col = [row[i].upper() if i in kept else row[i] for i in range(n)]
    out = "".join(row[i] for i in kept) + "".join(row[i].upper() for i in kept)
    sub = "".join(row) + "".join(col) + "->" + out
    kept_dim = int(np.prod([dims[i] for i in kept]))
    return np.einsum(sub, a.reshape(dims + dims)).reshape(kept_dim, kept_dim)


def conjugate_std(mat) -> np.ndarray:
    """Entrywise complex conjugation in the standard basis."""
    return np.conj(as_complex_matrix(mat))


def check_density(mat, context: str = "") -> np.ndarray:
    """Validate a density matrix (Hermitian, PSD, unit trace); return it."""
    a = as_complex_matrix(mat)
    prefix = f"{context}: " if context else ""
    defect = hermiticity_defect(a)
    if defect > TOL.hermitian_state:
        raise NotHermitian(f"{prefix}hermiticity defect {defect:.3e}")
    w = np.linalg.eigvalsh((a + dagger(a)) / 2.0)
    if float(w.min()) < -TOL.psd_state:
        raise NotPSD(f"{prefix}min eigenvalue {float(w.min()):.3e}")
    tr = complex(np.trace(a))
    if abs(tr - 1.0) > TOL.trace_one:
        raise InvalidState(f"{prefix}trace {tr} differs from 1")
    return a


def check_povm(elements, context: str = "") -> np.ndarray:
    """Validate POVM elements (Hermitian, PSD, complete); return a (k, d, d) stack."""
    prefix = f"{context}: " if context else ""
    mats = [as_complex_matrix(e) for e in elements]
    if not mats:
        raise InvalidPovm(f"{prefix}empty POVM")
    d = mats[0].shape[0]
    for i, m in enumerate(mats):
        if m.shape[0] != d:
            raise DimMismatch(f"{prefix}element {i} has dimension {m.shape[0]}, expected {d}")
        defect = hermiticity_defect(m)
        if defect > TOL.hermitian_state:
            raise NotHermitian(f"{prefix}element {i} hermiticity defect {defect:.3e}")
        w = np.linalg.eigvalsh((m + dagger(m)) / 2.0)
        if float(w.min()) < -TOL.psd_state:
            raise NotPSD(f"{prefix}element {i} min eigenvalue {float(w.min()):.3e}")
    total = np.sum(mats, axis=0)
    residual = float(np.max(np.abs(total - np.eye(d))))
    if residual > TOL.povm_completeness:
        raise InvalidPovm(f"{prefix}completeness residual {residual:.3e}")
    return np.stack(mats)


def check_isometry(mat, context: str = "") -> np.ndarray:
    """Validate V†V = I for a (possibly rectangular) matrix; return it."""
    prefix = f"{context}: " if context else ""
    v = np.asarray(mat, dtype=complex)
    if v.ndim != 2 or v.shape[0] < v.shape[1]:
        raise BadDims(f"{prefix}isometry needs shape (d_out >= d_in), got {v.shape}")
    residual = float(np.max(np.abs(dagger(v) @ v - np.eye(v.shape[1]))))
    if residual > TOL.isometry:
        raise InvalidState(f"{prefix}isometry residual {residual:.3e}")
    return v


def purify(rho) -> tuple[np.ndarray, tuple[int, int]]:
    """Purify a density matrix onto system (x) reference.

    Returns ``(amplitudes, (d, r))`` where ``r`` is the rank of ``rho``
    (eigenvalue cutoff ``TOL.rank_cutoff``) and ``amplitudes[s*r + i]`` is the
    coefficient of ``|s> (x) |i>``.
    """
    a = check_density(rho)
    w, v = eig_hermitian(a)
    keep = w > TOL.rank_cutoff
    lam = w[keep]
    vecs = v[:, keep]
    amps = (vecs * np.sqrt(lam)).reshape(-1)
    return amps, (a.shape[0], int(lam.size))


def _inv_sqrt_psd(m: np.ndarray, floor: float) -> np.ndarray:
    """M^{-1/2} for PSD M with eigenvalues floored at ``floor``."""
    d = m.shape[0]
    if d == 2:
        # closed form: sqrt(M) = (M + sqrt(det) I) / sqrt(tr + 2 sqrt(det)),
        # then invert the 2x2 via its adjugate
        a = m[0, 0].real
        dd = m[1, 1].real
        b = m[0, 1]
        det = max(a * dd - (b.real * b.real + b.imag * b.imag), floor * floor)
        s = np.sqrt(det)
        denom = np.sqrt(max(a + dd + 2.0 * s, floor))
        q00 = (a + s) / denom
        q11 = (dd + s) / denom
        q01 = b / denom
        out = np.empty((2, 2), dtype=complex)
        out[0, 0] = q11 / s
        out[1, 1] = q00 / s
        out[0, 1] = -q01 / s
        out[1, 0] = -np.conj(q01) / s
        return out
    w, v = np.linalg.eigh((m + dagger(m)) / 2.0)
    w = np.clip(w, max(floor, 1e-300), None)
    return (v / np.sqrt(w)) @ dagger(v)


def povm_from_factors(factors, regularizer: float = 1e-12) -> np.ndarray:
    """Map unconstrained factor matrices to a complete POVM.

    ``Lam_u = M^{-1/2} (A_u† A_u + (reg/k) I) M^{-1/2}`` with
    ``M = sum_u A_u† A_u + reg I``; the regulariser is spread over the
    outcomes so the elements sum to the identity exactly even when the
    factors vanish.
    """
    a = np.asarray(factors, dtype=complex)
    if a.ndim != 3 or a.shape[1] != a.shape[2] or a.shape[0] < 1:
        raise BadDims(f"expected factor stack (k, d, d), got {a.shape}")
    k, d = a.shape[0], a.shape[1]
    gram = np.einsum("uji,ujk->uik", a.conj(), a)
    m = gram.sum(axis=0)
    if regularizer:
        m = m + regularizer * np.eye(d)
        gram = gram + (regularizer / k) * np.eye(d)[None, :, :]
    inv_sqrt = _inv_sqrt_psd(m, regularizer)
    out = np.einsum("ij,ujk,kl->uil", inv_sqrt, gram, inv_sqrt)
    return (out + np.conj(np.transpose(out, (0, 2, 1)))) / 2.0


def random_density(dim: int, seed: int) -> np.ndarray:
    """Full-support random density matrix (normalised Wishart)."""
    if dim < 1:
        raise BadDims(f"dim must be >= 1, got {dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_povm(dim: int, n_outcomes: int, seed: int) -> np.ndarray:
    """Random complete POVM with ``n_outcomes`` full-support elements."""
    if dim < 1 or n_outcomes < 1:
        raise BadDims(f"dim={dim}, n_outcomes={n_outcomes} must be >= 1")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n_outcomes, dim, dim)) + 1j * rng.standard_normal((n_outcomes, dim, dim))
    return povm_from_factors(a)


def qr_isometry(mat) -> np.ndarray:
    """Orthonormalise the columns of a tall matrix (QR with positive-diagonal R)."""
    g = np.asarray(mat, dtype=complex)
    if g.ndim != 2 or g.shape[0] < g.shape[1]:
        raise BadDims(f"need shape (d_out >= d_in), got {g.shape}")
    q, r = np.linalg.qr(g, mode="reduced")
    diag = np.diagonal(r).copy()
    diag[np.abs(diag) < 1e-300] = 1.0
    return q * np.conj(diag / np.abs(diag))


def random_isometry(d_in: int, d_out: int, seed: int) -> np.ndarray:
    """Haar-random isometry V (d_out x d_in) with V†V = I."""
    if d_in < 1 or d_out < d_in:
        raise BadDims(f"need d_out >= d_in >= 1, got d_in={d_in}, d_out={d_out}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))
    return qr_isometry(g)


def random_projective_povm(dim: int, seed: int) -> np.ndarray:
    """Rank-1 projective POVM onto a Haar-random orthonormal basis."""
    u = random_isometry(dim, dim, seed)
    return np.stack([np.outer(u[:, i], np.conj(u[:, i])) for i in range(dim)])
