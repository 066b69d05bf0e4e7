"""Brute-force reference computations for qubit-sized instances.

These sweep explicit witness families on a grid and report exact rate pairs,
independently of the optimiser in :mod:`helperrate.regions`.  The qubit sweep
covers real-plane projective measurements plus a coarse symmetric three-
outcome scan; it is exhaustive for the bundled real-amplitude ensembles, and
a documented under-estimate for ensembles with complex amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import BadDims, CapExceeded, DimMismatch
from .measurement import Evaluator
from .regions import (
    BoundaryCurve,
    ChannelWitness,
    PovmWitness,
    RatePoint,
    TestChannel,
    pareto_filter,
    rate_point_chelper,
)
from .sources import ClassicalJoint, CQSource


@dataclass(frozen=True)
class GridSpec:
    angle_step: float = 0.01      # radians, projective sweep
    trine_step: float = 0.05      # radians, 3-outcome orientation sweep
    prob_step: float = 0.05       # simplex pitch, classical channels
    enum_cap: float = 1e8

    def __post_init__(self):
        if self.angle_step <= 0 or self.trine_step <= 0 or self.prob_step <= 0:
            raise BadDims("grid steps must be positive")
        if self.enum_cap <= 0:
            raise BadDims("enumeration cap must be positive")


def _projector(theta: float) -> np.ndarray:
    ket = np.array([np.cos(theta), np.sin(theta)], dtype=complex)
    return np.outer(ket, ket.conj())


def grid_search_qubit_povm(src: CQSource, grid: GridSpec = GridSpec()) -> BoundaryCurve:
    """Exact rate pairs over real-plane qubit measurements.

    Sweeps two-outcome projective measurements at ``angle_step`` over
    [0, pi), symmetric trine measurements at ``trine_step`` over [0, pi/3),
    and always includes the uninformative measurement.
    """
    if src.dim != 2:
        raise DimMismatch(f"qubit oracle needs d_B = 2, got {src.dim}")
    thetas = np.arange(0.0, np.pi, grid.angle_step)
    trine_thetas = np.arange(0.0, np.pi / 3, grid.trine_step)
    count = thetas.size + trine_thetas.size + 1
    if count > grid.enum_cap:
        raise CapExceeded(f"{count} grid points exceed cap {grid.enum_cap}")

    ev = Evaluator(src)
    points: list[RatePoint] = []
    idx = 0
    for theta in thetas:
        lam = np.stack([_projector(theta), _projector(theta + np.pi / 2)])
        r1, r2 = ev.pair(lam)
        points.append(RatePoint(r1, r2, PovmWitness(tuple(lam)), None, 0, idx))
        idx += 1
    for theta in trine_thetas:
        lam = np.stack([(2.0 / 3.0) * _projector(theta + k * 2 * np.pi / 3) for k in range(3)])
        r1, r2 = ev.pair(lam)
        points.append(RatePoint(r1, r2, PovmWitness(tuple(lam)), None, 0, idx))
        idx += 1
    flat = np.stack([np.eye(2, dtype=complex) / 2] * 2)
    r1, r2 = ev.pair(flat)
    points.append(RatePoint(r1, r2, PovmWitness(tuple(flat)), None, 0, idx))

    filtered = pareto_filter(points)
    meta = {"family": "qubit-oracle", "angle_step": grid.angle_step,
            "trine_step": grid.trine_step, "points_swept": count}
    return BoundaryCurve(tuple(filtered), meta)


def _simplex_grid(num_u: int, step: float) -> np.ndarray:
    """All probability vectors over ``num_u`` outcomes with entries k*step."""
    m = int(round(1.0 / step))
    if abs(m * step - 1.0) > 1e-9:
        raise BadDims(f"prob_step {step} must divide 1")

    def rec(remaining: int, parts: int):
        if parts == 1:
            yield (remaining,)
            return
        for k in range(remaining + 1):
            for rest in rec(remaining - k, parts - 1):
                yield (k,) + rest

    return np.asarray(list(rec(m, num_u)), dtype=float) / m


def grid_search_chelper(joint: ClassicalJoint, grid: GridSpec = GridSpec(),
                        num_u: int | None = None) -> BoundaryCurve:
    """Exact rate pairs over all grid test channels p(u|y).

    Enumerates each channel column on the probability simplex at
    ``prob_step``; restricted to |Y| <= 3 and |U| <= 4.
    """
    num_y = joint.num_y
    if num_y > 3:
        raise BadDims(f"classical oracle needs |Y| <= 3, got {num_y}")
    n_u = min(num_y + 1, 4) if num_u is None else int(num_u)
    if n_u < 1 or n_u > 4:
        raise BadDims(f"classical oracle needs 1 <= |U| <= 4, got {n_u}")
    columns = _simplex_grid(n_u, grid.prob_step)
    count = float(columns.shape[0]) ** num_y
    if count > grid.enum_cap:
        raise CapExceeded(f"~{count:.3g} channels exceed cap {grid.enum_cap}")

    p_xy = joint.p_xy
    p_y = joint.p_y
    points: list[RatePoint] = []
    idx = np.zeros(num_y, dtype=int)
    n_cols = columns.shape[0]
    total = n_cols ** num_y
    from .entropy import _plogp  # local import to keep module top uncluttered

    h_py = _plogp(p_y)
    for flat in range(total):
        rem = flat
        for y in range(num_y):
            idx[y] = rem % n_cols
            rem //= n_cols
        w = columns[idx].T  # (num_u, num_y)
        p_xu = p_xy @ w.T
        p_u = p_xu.sum(axis=0)
        r1 = _plogp(p_xu.ravel()) - _plogp(p_u)
        p_uy = w * p_y[None, :]
        r2 = max(_plogp(p_u) + h_py - _plogp(p_uy.ravel()), 0.0)
        points.append(RatePoint(r1, r2, ChannelWitness(TestChannel(w)), None, 0, flat))

    filtered = pareto_filter(points)
    meta = {"family": "classical-oracle", "prob_step": grid.prob_step,
            "num_u": n_u, "points_swept": total}
    return BoundaryCurve(tuple(filtered), meta)


def exact_tv(p, q) -> float:
    """Total variation distance (1/2) sum |p - q| between two distributions."""
    a = np.asarray(p, dtype=float).ravel()
    b = np.asarray(q, dtype=float).ravel()
    if a.shape != b.shape:
        raise DimMismatch(f"distribution shapes differ: {a.shape} vs {b.shape}")
    if a.size > TOL.enum_cap:
        raise CapExceeded(f"support size {a.size} exceeds cap {TOL.enum_cap}")
    return float(0.5 * np.abs(a - b).sum())
