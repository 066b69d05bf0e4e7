"""Statistics a measurement attaches to a classical-quantum source.

A measurement on the helper side induces (i) a classical joint between the
source symbol and the outcome, and (ii) a post-measurement classical-quantum
state pairing each outcome with a renormalised, conjugated residual state
``conj(sqrt(rho_B) Lam_u sqrt(rho_B)) / p(u)``.  The helper's rate is the
outcome/helper mutual information of that state.

Note: the same rate can equivalently be obtained as the mutual information
between the outcome and a purifying reference of the helper marginal.  The
two expressions agree identically; only the post-measurement form is
computed here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .config import TOL
from .entropy import _plogp
from .errors import DimMismatch
from .sources import ClassicalJoint, CQSource, helper_marginal


@dataclass(frozen=True)
class PostMeasurementState:
    """Outcome distribution and conjugated residual states (zero-probability
    outcomes dropped)."""

    p_u: np.ndarray
    states: tuple[np.ndarray, ...]
    kept: tuple[int, ...]


def _element_stack(src: CQSource, povm, validate: bool) -> np.ndarray:
    if validate:
        stack = linalg.check_povm(povm)
    else:
        stack = np.asarray(povm, dtype=complex)
    if stack.shape[1] != src.dim:
        raise DimMismatch(f"POVM dimension {stack.shape[1]} != helper dimension {src.dim}")
    return stack


def induced_joint(src: CQSource, povm, validate: bool = True) -> ClassicalJoint:
    """Joint P(x, u) = p(x) Tr[Lam_u rho_x] between symbol and outcome."""
    lam = _element_stack(src, povm, validate)
    rho = np.stack(src.states)
    cond = np.einsum("uij,xji->xu", lam, rho).real
    p = src.p_x[:, None] * np.clip(cond, 0.0, None)
    return ClassicalJoint(p)


def post_measurement_cq(src: CQSource, povm, validate: bool = True) -> PostMeasurementState:
    """Outcome probabilities and residual states of a measured helper."""
    lam = _element_stack(src, povm, validate)
    rho_b = helper_marginal(src)
    root = linalg.psd_sqrt(rho_b)
    p_u = np.einsum("uij,ji->u", lam, rho_b).real
    kept = [u for u in range(lam.shape[0]) if p_u[u] > TOL.outcome_floor]
    states = []
    for u in kept:
        g = root @ lam[u] @ root
        states.append(np.conj(g) / p_u[u])
    return PostMeasurementState(np.asarray(p_u[kept]), tuple(states), tuple(kept))


def rate_pair_qhelper(src: CQSource, povm, validate: bool = True) -> tuple[float, float]:
    """(H(X|U), I(U;B)) achieved by measuring the helper with ``povm``."""
    lam = _element_stack(src, povm, validate)
    ev = Evaluator(src)
    return ev.pair(lam)


def _eigvals_2x2_batch(g: np.ndarray) -> np.ndarray:
    """Eigenvalues of a stack of Hermitian 2x2 matrices, closed form."""
    a = g[:, 0, 0].real
    d = g[:, 1, 1].real
    b = g[:, 0, 1]
    mid = 0.5 * (a + d)
    rad = np.sqrt(np.maximum(0.25 * (a - d) ** 2 + b.real ** 2 + b.imag ** 2, 0.0))
    return np.stack([mid - rad, mid + rad], axis=1)


class Evaluator:
    """Precomputed quantities for repeated rate-pair evaluation on one source.

    ``pair`` skips input validation and the explicit conjugation (which does
    not move spectra); it returns exactly what the public functions compute.
    Qubit helpers take a closed-form eigenvalue path.
    """

    def __init__(self, src: CQSource):
        self.p_x = src.p_x
        self.rho = np.stack(src.states)
        self.rho_b = helper_marginal(src)
        self.root = linalg.psd_sqrt(self.rho_b)
        self.dim = src.dim

    def pair(self, lam: np.ndarray) -> tuple[float, float]:
        # symbol rate: H(X|U) from the induced joint
        cond = np.einsum("uij,xji->xu", lam, self.rho).real
        joint = self.p_x[:, None] * np.clip(cond, 0.0, None)
        p_u = joint.sum(axis=0)
        r1 = _plogp(joint.ravel()) - _plogp(p_u)

        # helper rate: I(U;B) = H(mix) - sum_u p_u H(rho_u) on the
        # post-measurement state; eigenvalues of p_u * rho_u are used directly
        # so the whole outcome stack goes through one batched solve.
        g = np.einsum("ij,ujk,kl->uil", self.root, lam, self.root)
        p_out = np.einsum("uii->u", g).real
        keep = p_out > TOL.outcome_floor
        g = g[keep]
        p_kept = p_out[keep]
        if g.shape[0] == 0:
            return r1, 0.0
        mix = g.sum(axis=0)
        if self.dim == 2:
            w = _eigvals_2x2_batch(g)
            w_mix = _eigvals_2x2_batch(mix[None, :, :])[0]
        else:
            w = np.linalg.eigvalsh((g + np.conj(np.transpose(g, (0, 2, 1)))) / 2.0)
            w_mix = np.linalg.eigvalsh((mix + np.conj(mix.T)) / 2.0)
        w = np.clip(w, 0.0, None)
        w_mix = np.clip(w_mix, 0.0, None)
        # sum_u p_u H(rho_u) = -sum w log2 w + sum p log2 p  with w = p * spec(rho_u)
        h_cond = _plogp(w.ravel()) - _plogp(p_kept)
        r2 = _plogp(w_mix) - h_cond
        return r1, max(r2, 0.0)
