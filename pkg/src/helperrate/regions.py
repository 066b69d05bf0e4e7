"""Rate-region boundary tracing for the three helper settings.

The achievable regions are convex (time sharing), so their lower-left
boundaries are traced by minimising the weighted sum ``r2 + mu * r1`` over a
grid of weights.  Each minimisation is a derivative-free multi-start local
search in an unconstrained parameterisation of the witness:

* classical helper   - test-channel columns through a softmax,
* quantum helper     - POVM factor matrices ``A_u`` with
                       ``Lam_u = M^{-1/2} A_u† A_u M^{-1/2}``,
* fully quantum      - channel isometries through column-wise QR.

Deterministic anchor witnesses (uninformative, basis measurements, identity /
discard channels) and the previous weight's winner are always included among
the candidate starts, followed by ``restarts`` seeded random starts.  Every
emitted point carries the witness that achieves it, so curves can be
re-checked without the optimiser.

Traced curves are inner bounds.  For the fully quantum setting no output
dimension bound is known, so curves record the swept output dimensions and
make no optimality claim.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .config import TOL
from .entropy import (
    _plogp,
    classical_conditional_entropy,
    classical_mutual_information,
    pure_subsystem_entropy,
    shannon,
)
from .errors import BadDims, DimMismatch, InvalidDistribution
from .measurement import Evaluator, induced_joint, post_measurement_cq
from .sources import BipartiteSource, ClassicalJoint, CQSource

DEFAULT_RESTARTS = 32
DEFAULT_EVALS = 2000
MU_INFINITY = 1e6

ACHIEVABLE = "achievable"
NOT_DOMINATED = "not_dominated"
UNKNOWN = "unknown"


def default_mu_grid() -> list[float]:
    """33 log-spaced weights in [1e-3, 1e3] plus the endpoints 0 and 1e6."""
    return [0.0] + list(np.logspace(-3.0, 3.0, 33)) + [MU_INFINITY]


# ---------------------------------------------------------------------------
# witnesses and rate points

@dataclass(frozen=True)
class TestChannel:
    """Conditional distribution p(u|y) as a column-stochastic (|U|, |Y|) matrix."""

    p_u_given_y: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.p_u_given_y, dtype=float)
        if a.ndim != 2 or a.size == 0 or not np.all(np.isfinite(a)):
            raise InvalidDistribution("test channel must be a finite 2-D array")
        if float(a.min()) < -TOL.distribution_floor:
            raise InvalidDistribution(f"negative channel entry {float(a.min()):.3e}")
        a = np.clip(a, 0.0, None)
        sums = a.sum(axis=0)
        if np.max(np.abs(sums - 1.0)) > TOL.distribution_sum:
            raise InvalidDistribution(f"channel columns sum to {sums!r}")
        a.setflags(write=False)
        object.__setattr__(self, "p_u_given_y", a)

    @property
    def num_u(self) -> int:
        return self.p_u_given_y.shape[0]

    @property
    def num_y(self) -> int:
        return self.p_u_given_y.shape[1]


@dataclass(frozen=True)
class PovmWitness:
    elements: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class ChannelWitness:
    channel: TestChannel


@dataclass(frozen=True)
class IsometryWitness:
    v: np.ndarray
    dims: tuple[int, int, int]  # (d_B, d_C, d_E)


Witness = PovmWitness | ChannelWitness | IsometryWitness


@dataclass(frozen=True)
class RatePoint:
    r1: float
    r2: float
    witness: Witness
    mu: float | None = None
    seed: int = 0
    restart: int = 0


@dataclass(frozen=True)
class BoundaryCurve:
    points: tuple[RatePoint, ...]
    meta: dict = field(default_factory=dict)

    def r1_values(self) -> np.ndarray:
        return np.asarray([p.r1 for p in self.points])

    def r2_values(self) -> np.ndarray:
        return np.asarray([p.r2 for p in self.points])


# ---------------------------------------------------------------------------
# rate points from explicit witnesses

def rate_point_chelper(joint: ClassicalJoint, channel: TestChannel,
                       mu: float | None = None, seed: int = 0, restart: int = 0) -> RatePoint:
    """(H(X|U), I(U;Y)) for a classical helper processed through ``channel``."""
    if channel.num_y != joint.num_y:
        raise DimMismatch(f"channel has {channel.num_y} inputs, joint has {joint.num_y}")
    w = channel.p_u_given_y
    p_xu = joint.p_xy @ w.T
    r1 = classical_conditional_entropy(p_xu, given_axis=1)
    p_uy = w * joint.p_y[None, :]
    r2 = classical_mutual_information(p_uy)
    return RatePoint(r1, r2, ChannelWitness(channel), mu, seed, restart)


def rate_point_qhelper(src: CQSource, povm, mu: float | None = None,
                       seed: int = 0, restart: int = 0) -> RatePoint:
    """(H(X|U), I(U;B)) for a measured quantum helper."""
    elements = povm.elements if isinstance(povm, PovmWitness) else povm
    stack = linalg.check_povm(elements)
    if stack.shape[1] != src.dim:
        raise DimMismatch(f"POVM dimension {stack.shape[1]} != helper dimension {src.dim}")
    r1, r2 = Evaluator(src).pair(stack)
    witness = PovmWitness(tuple(np.array(e) for e in stack))
    return RatePoint(r1, r2, witness, mu, seed, restart)


def _fq_pair(src: BipartiteSource, v: np.ndarray, d_c: int, d_e: int) -> tuple[float, float]:
    d_a, d_b, d_r = src.psi_dims
    psi3 = src.psi.reshape(d_a, d_b, d_r)
    phi = np.tensordot(v, psi3, axes=([1], [1]))          # (dC*dE, dA, dR)
    phi = np.transpose(phi, (1, 0, 2)).reshape(d_a, d_c, d_e, d_r)
    dims = [d_a, d_c, d_e, d_r]
    h_ac = pure_subsystem_entropy(phi, dims, [0, 1])
    h_c = pure_subsystem_entropy(phi, dims, [1])
    h_ce = pure_subsystem_entropy(phi, dims, [1, 2])
    h_e = pure_subsystem_entropy(phi, dims, [2])
    r1 = h_ac - h_c
    # purity: H(RA) = H(CE) and H(RAC) = H(E)
    r2 = 0.5 * max(h_ce + h_c - h_e, 0.0)
    return r1, r2


def rate_point_fq(src: BipartiteSource, isometry, dims: tuple[int, int, int] | None = None,
                  mu: float | None = None, seed: int = 0, restart: int = 0) -> RatePoint:
    """(H(A|C), I(RA;C)/2) for a helper channel given by a Stinespring isometry.

    ``isometry`` maps B into C (x) E; ``dims = (d_B, d_C, d_E)`` may be
    omitted when an :class:`IsometryWitness` is passed.
    """
    if isinstance(isometry, IsometryWitness):
        v, (d_b, d_c, d_e) = isometry.v, isometry.dims
    else:
        if dims is None:
            raise BadDims("dims (d_B, d_C, d_E) required for a bare isometry matrix")
        v, (d_b, d_c, d_e) = np.asarray(isometry, dtype=complex), tuple(int(d) for d in dims)
    if d_b != src.d_b:
        raise DimMismatch(f"isometry input dimension {d_b} != helper dimension {src.d_b}")
    if v.shape != (d_c * d_e, d_b):
        raise DimMismatch(f"isometry shape {v.shape} inconsistent with dims {(d_b, d_c, d_e)}")
    linalg.check_isometry(v)
    r1, r2 = _fq_pair(src, v, d_c, d_e)
    return RatePoint(r1, r2, IsometryWitness(np.array(v), (d_b, d_c, d_e)), mu, seed, restart)


def recompute_rate_pair(witness: Witness, source) -> tuple[float, float]:
    """Re-evaluate a witness on its source; used to audit emitted points."""
    if isinstance(witness, ChannelWitness):
        p = rate_point_chelper(source, witness.channel)
    elif isinstance(witness, PovmWitness):
        p = rate_point_qhelper(source, witness)
    elif isinstance(witness, IsometryWitness):
        p = rate_point_fq(source, witness)
    else:
        raise TypeError(f"not a witness: {type(witness)!r}")
    return p.r1, p.r2


# ---------------------------------------------------------------------------
# curve bookkeeping

def pareto_filter(points: list[RatePoint]) -> list[RatePoint]:
    """Drop strictly dominated points; keep ties and duplicates.

    A point is dropped when some other point is at least as good in both
    coordinates and strictly better (beyond ``TOL.pareto``) in one.
    """
    if not points:
        return []
    eps = TOL.pareto
    pts = sorted(points, key=lambda p: (p.r1, p.r2))
    a = np.asarray([p.r1 for p in pts])
    b = np.asarray([p.r2 for p in pts])
    prefix_min = np.minimum.accumulate(b)
    keep = []
    for i, p in enumerate(pts):
        hi = np.searchsorted(a, p.r1 + eps, side="right")
        dominated = prefix_min[hi - 1] < p.r2 - eps
        lo = np.searchsorted(a, p.r1 - eps, side="left")
        if not dominated and lo > 0:
            dominated = prefix_min[lo - 1] <= p.r2 + eps
        if not dominated:
            keep.append(p)
    keep.sort(key=lambda p: (p.r1, -p.r2))
    return keep


def curve_min_r2_at(curve: BoundaryCurve, r1: float, time_sharing: bool = True) -> float:
    """Least helper rate the curve certifies at symbol rate ``r1``.

    With ``time_sharing`` the lower convex hull of the points is evaluated
    (the region is convex, so segments between witnesses are achievable);
    otherwise the raw staircase is used.  Returns ``inf`` left of the curve's
    reach.
    """
    pts = sorted((float(p.r1), float(p.r2)) for p in curve.points)
    if not pts:
        return float("inf")
    tol = TOL.membership
    if not time_sharing:
        xs = np.asarray([p[0] for p in pts])
        ys = np.asarray([p[1] for p in pts])
        idx = np.searchsorted(xs, r1 + tol, side="right")
        if idx == 0:
            return float("inf")
        return float(np.minimum.accumulate(ys)[idx - 1])

    # collapse equal r1 to the least r2, then take the lower convex hull
    collapsed: list[tuple[float, float]] = []
    for x, y in pts:
        if collapsed and x - collapsed[-1][0] <= 1e-15:
            continue
        collapsed.append((x, y))
    hull: list[tuple[float, float]] = []
    for x, y in collapsed:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append((x, y))
    hx = np.asarray([p[0] for p in hull])
    hy = np.asarray([p[1] for p in hull])
    if r1 < hx[0] - tol:
        return float("inf")
    if r1 >= hx[-1]:
        return float(hy.min())
    return float(np.interp(r1, hx, hy))


def membership(curve: BoundaryCurve, point: tuple[float, float]) -> str:
    """Classify a rate pair against an inner-bound curve."""
    if not curve.points:
        raise BadDims("membership requires a nonempty curve")
    r1, r2 = float(point[0]), float(point[1])
    tol = TOL.membership
    achievable = any(p.r1 <= r1 + tol and p.r2 <= r2 + tol for p in curve.points)
    if achievable:
        return ACHIEVABLE
    below_all = all(r1 < p.r1 - tol and r2 < p.r2 - tol for p in curve.points)
    if below_all:
        return NOT_DOMINATED
    return UNKNOWN


# ---------------------------------------------------------------------------
# derivative-free local search

def _local_search(fn, x0: np.ndarray, rng: np.random.Generator,
                  max_evals: int, init_step: float) -> tuple[np.ndarray, float]:
    """Coordinate-wise Gaussian descent with a shrinking step.

    Cycles the coordinates in a seeded random order, perturbing one at a time
    by ``step * N(0,1)`` (trying the mirrored move when the first fails) and
    keeping improvements; the step halves after each sweep without progress.
    """
    x = np.array(x0, dtype=float)
    fx = fn(x)
    evals = 1
    step = init_step
    order = np.arange(x.size)
    while evals < max_evals and step > 1e-8:
        improved = False
        rng.shuffle(order)
        for i in order:
            if evals >= max_evals:
                break
            delta = step * rng.standard_normal()
            for signed in (delta, -delta):
                cand = x.copy()
                cand[i] += signed
                fc = fn(cand)
                evals += 1
                if fc < fx - 1e-12 * (1.0 + abs(fx)):
                    x, fx = cand, fc
                    improved = True
                    break
                if evals >= max_evals:
                    break
        if not improved:
            step *= 0.5
    return x, fx


class _Problem:
    """One scalarised boundary-tracing problem (fixed source, fixed family)."""

    n_params: int
    init_step: float = 0.3
    random_scale: float = 1.0

    def anchors(self) -> list[np.ndarray]:
        raise NotImplementedError

    def pair(self, params: np.ndarray) -> tuple[float, float]:
        raise NotImplementedError

    def emit(self, params: np.ndarray, mu: float | None, seed: int, restart: int) -> RatePoint:
        raise NotImplementedError


def _solve_mu(problem: _Problem, mu: float, mu_index: int, restarts: int, seed: int,
              evals: int, carries: list[np.ndarray], threads: int,
              use_anchors: bool = True) -> tuple[np.ndarray, tuple]:
    starts: list[np.ndarray] = (list(problem.anchors()) if use_anchors else []) + list(carries)
    n_fixed = len(starts)
    for k in range(restarts):
        rng = np.random.default_rng([seed, mu_index, k])
        starts.append(problem.random_scale * rng.standard_normal(problem.n_params))

    def objective(params: np.ndarray) -> float:
        r1, r2 = problem.pair(params)
        return r2 + mu * r1

    def run_one(item: tuple[int, np.ndarray]):
        idx, x0 = item
        rng = np.random.default_rng([seed, mu_index, 10_000 + idx])
        x, fx = _local_search(objective, x0, rng, evals, problem.init_step)
        r1, r2 = problem.pair(x)
        return (fx, r1, r2, idx), x

    items = list(enumerate(starts))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_one, items))
    else:
        results = [run_one(it) for it in items]

    best_key, best_x = min(results, key=lambda r: r[0])
    # report random restarts by their restart index; anchors/carries as -1
    restart_idx = best_key[3] - n_fixed if best_key[3] >= n_fixed else -1
    return best_x, (best_key[1], best_key[2], restart_idx)


def _trace(problem: _Problem, mu_grid, restarts: int, seed: int, evals: int,
           threads: int, meta: dict, refine_tol: float | None = 1e-3,
           max_refine: int = 48) -> BoundaryCurve:
    """Scalarised sweep over the weight grid plus sandwich refinement.

    After the grid pass, adjacent curve points are recursively probed at the
    weight given by their chord slope; a refined point that dips more than
    ``refine_tol`` below the chord splits the interval.  Since the region is
    convex, stopping when no probe helps by more than the tolerance bounds
    the gap between the traced hull and the reachable boundary.
    """
    grid = [float(m) for m in (default_mu_grid() if mu_grid is None else mu_grid)]
    if not grid or any(m < 0 for m in grid):
        raise BadDims("mu grid must be nonempty with nonnegative entries")
    order = np.argsort(grid, kind="stable")
    points: list[RatePoint] = []
    solved: list[tuple[np.ndarray, RatePoint]] = []
    carries: list[np.ndarray] = []
    grid_winners: list[tuple[float, float, float]] = []
    for mi in order:
        mu = grid[mi]
        best_x, (_, _, restart_idx) = _solve_mu(
            problem, mu, int(mi), restarts, seed, evals, carries, threads)
        carries = [best_x]
        point = problem.emit(best_x, mu, seed, restart_idx)
        points.append(point)
        solved.append((best_x, point))
        grid_winners.append((mu, point.r1, point.r2))

    refine_count = 0
    if refine_tol is not None and len(solved) >= 2:
        frontier = sorted(solved, key=lambda item: (item[1].r1, item[1].r2))
        queue = list(zip(frontier[:-1], frontier[1:]))
        while queue and refine_count < max_refine:
            (xa, pa), (xb, pb) = queue.pop(0)
            dr1 = pb.r1 - pa.r1
            dr2 = pa.r2 - pb.r2
            if dr1 < 1e-5 or dr2 < refine_tol:
                continue
            mu_star = dr2 / dr1
            refine_count += 1
            # interval endpoints are warm starts; one random hedge
            best_x, (_, _, restart_idx) = _solve_mu(
                problem, mu_star, 100_000 + refine_count, 1,
                seed, evals, [xa, xb], threads, use_anchors=False)
            point = problem.emit(best_x, mu_star, seed, restart_idx)
            if pa.r1 - 1e-12 <= point.r1 <= pb.r1 + 1e-12:
                chord = pa.r2 + (point.r1 - pa.r1) / dr1 * (pb.r2 - pa.r2)
                depth = chord - point.r2
                points.append(point)
                if depth > refine_tol:
                    queue.append(((xa, pa), (best_x, point)))
                    queue.append(((best_x, point), (xb, pb)))

    filtered = pareto_filter(points)
    meta = dict(meta)
    meta.update({"restarts": restarts, "seed": seed, "evals_per_start": evals,
                 "mu_grid": grid, "refine_tol": refine_tol,
                 "refinements": refine_count, "pareto_tol": TOL.pareto,
                 "grid_points": grid_winners})
    return BoundaryCurve(tuple(filtered), meta)


# ---------------------------------------------------------------------------
# classical helper

def _softmax_columns(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=0, keepdims=True)
    w = np.exp(z)
    return w / w.sum(axis=0, keepdims=True)


class _CHelperProblem(_Problem):
    init_step = 0.8
    random_scale = 1.5

    def __init__(self, joint: ClassicalJoint, num_u: int):
        self.joint = joint
        self.num_u = num_u
        self.num_y = joint.num_y
        self.p_y = joint.p_y
        self.p_xy = joint.p_xy
        self.n_params = num_u * self.num_y

    def _channel(self, params: np.ndarray) -> np.ndarray:
        return _softmax_columns(params.reshape(self.num_u, self.num_y))

    def anchors(self) -> list[np.ndarray]:
        out = []
        ident = np.zeros((self.num_u, self.num_y))
        for y in range(self.num_y):
            ident[min(y, self.num_u - 1), y] = 40.0
        out.append(ident.ravel())
        const = np.zeros((self.num_u, self.num_y))
        const[0, :] = 40.0
        out.append(const.ravel())
        return out

    def pair(self, params: np.ndarray) -> tuple[float, float]:
        w = self._channel(params)
        p_xu = self.p_xy @ w.T
        p_u = p_xu.sum(axis=0)
        r1 = _plogp(p_xu.ravel()) - _plogp(p_u)
        p_uy = w * self.p_y[None, :]
        r2 = _plogp(p_u) + _plogp(self.p_y) - _plogp(p_uy.ravel())
        return r1, max(r2, 0.0)

    def emit(self, params, mu, seed, restart) -> RatePoint:
        return rate_point_chelper(self.joint, TestChannel(self._channel(params)), mu, seed, restart)


def trace_boundary_chelper(joint: ClassicalJoint, mu_grid=None, restarts: int = DEFAULT_RESTARTS,
                           seed: int = 0, evals: int = DEFAULT_EVALS, threads: int = 1,
                           refine_tol: float | None = 1e-3) -> BoundaryCurve:
    """Boundary of (H(X|U), I(U;Y)) over test channels with |U| = |Y| + 1."""
    problem = _CHelperProblem(joint, joint.num_y + 1)
    return _trace(problem, mu_grid, restarts, seed, evals, threads,
                  {"family": "classical-helper", "num_u": problem.num_u}, refine_tol)


# ---------------------------------------------------------------------------
# quantum helper

def _factors_from_povm(stack: np.ndarray) -> np.ndarray:
    """Parameter factors reproducing a given POVM (A_u = Lam_u^{1/2})."""
    out = np.empty_like(stack)
    for u in range(stack.shape[0]):
        out[u] = linalg.psd_sqrt(stack[u])
    return out


def _params_from_factors(factors: np.ndarray) -> np.ndarray:
    return np.concatenate([factors.real.ravel(), factors.imag.ravel()])


def _qubit_projector(theta: float) -> np.ndarray:
    ket = np.array([np.cos(theta), np.sin(theta)], dtype=complex)
    return np.outer(ket, ket.conj())


class _QHelperProblem(_Problem):
    init_step = 0.3

    def __init__(self, src: CQSource, num_u: int | None = None):
        self.src = src
        self.d = src.dim
        self.num_u = self.d * self.d if num_u is None else num_u
        self.n_params = 2 * self.num_u * self.d * self.d
        self.evaluator = Evaluator(src)

    def _factors(self, params: np.ndarray) -> np.ndarray:
        half = params.size // 2
        shape = (self.num_u, self.d, self.d)
        return params[:half].reshape(shape) + 1j * params[half:].reshape(shape)

    def _povm(self, params: np.ndarray) -> np.ndarray:
        return linalg.povm_from_factors(self._factors(params))

    def anchors(self) -> list[np.ndarray]:
        d, k = self.d, self.num_u
        out = []
        uninformative = np.stack([np.eye(d, dtype=complex) / np.sqrt(k)] * k)
        out.append(_params_from_factors(uninformative))
        basis = np.zeros((k, d, d), dtype=complex)
        for u in range(min(d, k)):
            basis[u, u, u] = 1.0
        out.append(_params_from_factors(basis))
        if d == 2 and k >= 2:
            for theta in (np.pi / 8, np.pi / 4, 3 * np.pi / 8):
                proj = np.zeros((k, d, d), dtype=complex)
                proj[0] = _qubit_projector(theta)
                proj[1] = _qubit_projector(theta + np.pi / 2)
                out.append(_params_from_factors(_factors_from_povm(proj)))
        return out

    def pair(self, params: np.ndarray) -> tuple[float, float]:
        return self.evaluator.pair(self._povm(params))

    def emit(self, params, mu, seed, restart) -> RatePoint:
        return rate_point_qhelper(self.src, tuple(self._povm(params)), mu, seed, restart)


def trace_boundary_qhelper(src: CQSource, mu_grid=None, restarts: int = DEFAULT_RESTARTS,
                           seed: int = 0, evals: int = DEFAULT_EVALS, threads: int = 1,
                           refine_tol: float | None = 1e-3) -> BoundaryCurve:
    """Boundary of (H(X|U), I(U;B)) over POVMs with |U| = d_B^2."""
    problem = _QHelperProblem(src)
    return _trace(problem, mu_grid, restarts, seed, evals, threads,
                  {"family": "quantum-helper", "num_u": problem.num_u}, refine_tol)


def accessible_information(src: CQSource, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                           evals: int = DEFAULT_EVALS, polish: bool = True
                           ) -> tuple[float, tuple[np.ndarray, ...]]:
    """Maximum I(X;U) over POVMs, with the maximising POVM.

    Maximising I(X;U) = H(X) - H(X|U) is run as a minimisation of H(X|U);
    the winner gets a short fine-step polish pass for a sharper optimum.
    """
    problem = _QHelperProblem(src)
    h_x = shannon(src.p_x)

    def objective(params: np.ndarray) -> float:
        return problem.pair(params)[0]

    best = None
    starts = list(problem.anchors())
    for k in range(restarts):
        rng = np.random.default_rng([seed, 0, k])
        starts.append(rng.standard_normal(problem.n_params))
    for idx, x0 in enumerate(starts):
        rng = np.random.default_rng([seed, 1, idx])
        x, fx = _local_search(objective, x0, rng, evals, problem.init_step)
        key = (fx, idx)
        if best is None or key < best[0]:
            best = (key, x)
    x = best[1]
    if polish:
        rng = np.random.default_rng([seed, 2])
        x, _ = _local_search(objective, x, rng, evals, 0.02)
    lam = problem._povm(x)
    r1, _ = problem.pair(x)
    return h_x - r1, tuple(lam)


def merge_proportional_outcomes(elements, merge_tol: float = 0.05) -> tuple[np.ndarray, ...]:
    """Sum POVM elements that are proportional to each other.

    Splitting an outcome into proportional copies changes neither the induced
    symbol statistics nor the post-measurement information, but inflates the
    raw outcome entropy; merging removes that degeneracy.  Comparison is by
    max-norm distance between trace-normalised elements.
    """
    mats = [np.asarray(e, dtype=complex) for e in elements]
    groups: list[np.ndarray] = []
    for m in sorted(mats, key=lambda e: -float(np.trace(e).real)):
        tr = float(np.trace(m).real)
        if tr <= TOL.outcome_floor:
            if groups:
                groups[-1] = groups[-1] + m
            continue
        unit = m / tr
        for gi, g in enumerate(groups):
            g_tr = float(np.trace(g).real)
            if g_tr > TOL.outcome_floor and float(np.max(np.abs(g / g_tr - unit))) <= merge_tol:
                groups[gi] = g + m
                break
        else:
            groups.append(m.copy())
    return tuple(groups)


def separation_gap(src: CQSource, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                   evals: int = DEFAULT_EVALS, merge_tol: float = 0.05
                   ) -> tuple[float, float, float]:
    """Cost of measure-then-compress at the best measurement.

    Returns ``(H(U*), I(U*;B), gap)`` where U* maximises I(X;U): compressing
    the raw outcomes costs H(U*) while simulating the measurement outcome at
    the decoder costs only I(U*;B).
    """
    _, lam = accessible_information(src, restarts, seed, evals)
    merged = merge_proportional_outcomes(lam, merge_tol)
    pm = post_measurement_cq(src, np.stack(merged), validate=False)
    h_u = _plogp(pm.p_u)
    w = []
    for p, rho in zip(pm.p_u, pm.states):
        vals = np.clip(np.linalg.eigvalsh((rho + np.conj(rho.T)) / 2.0), 0.0, None)
        w.append(p * vals)
    h_cond = _plogp(np.concatenate(w)) - _plogp(pm.p_u)
    mix = sum(p * rho for p, rho in zip(pm.p_u, pm.states))
    h_mix = _plogp(np.clip(np.linalg.eigvalsh((mix + np.conj(mix.T)) / 2.0), 0.0, None))
    i_ub = max(h_mix - h_cond, 0.0)
    return h_u, i_ub, h_u - i_ub


# ---------------------------------------------------------------------------
# fully quantum helper

class _FQProblem(_Problem):
    init_step = 0.3

    def __init__(self, src: BipartiteSource, d_c: int):
        self.src = src
        self.d_b = src.d_b
        self.d_c = int(d_c)
        if self.d_c < 1:
            raise BadDims(f"d_C must be >= 1, got {d_c}")
        self.d_e = self.d_b * self.d_c
        self.rows = self.d_c * self.d_e
        self.n_params = 2 * self.rows * self.d_b

    def _isometry(self, params: np.ndarray) -> np.ndarray:
        half = params.size // 2
        g = params[:half].reshape(self.rows, self.d_b) + 1j * params[half:].reshape(self.rows, self.d_b)
        return linalg.qr_isometry(g)

    def _params_from_matrix(self, v: np.ndarray) -> np.ndarray:
        return np.concatenate([v.real.ravel(), v.imag.ravel()])

    def anchors(self) -> list[np.ndarray]:
        out = []
        discard = np.zeros((self.rows, self.d_b), dtype=complex)
        for b in range(self.d_b):
            discard[b, b] = 1.0  # C index 0, E index b
        out.append(self._params_from_matrix(discard))
        if self.d_c >= self.d_b:
            ident = np.zeros((self.rows, self.d_b), dtype=complex)
            for b in range(self.d_b):
                ident[b * self.d_e, b] = 1.0  # C index b, E index 0
            out.append(self._params_from_matrix(ident))
        return out

    def pair(self, params: np.ndarray) -> tuple[float, float]:
        return _fq_pair(self.src, self._isometry(params), self.d_c, self.d_e)

    def emit(self, params, mu, seed, restart) -> RatePoint:
        v = self._isometry(params)
        return rate_point_fq(self.src, v, (self.d_b, self.d_c, self.d_e), mu, seed, restart)


def trace_boundary_fq(src: BipartiteSource, d_c_list=None, mu_grid=None,
                      restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                      evals: int = DEFAULT_EVALS, threads: int = 1,
                      refine_tol: float | None = 1e-3) -> BoundaryCurve:
    """Inner bound of (H(A|C), I(RA;C)/2) over channel isometries.

    For each output dimension ``d_C`` (default 1..d_B^2) the environment is
    sized ``d_E = d_B * d_C`` and the isometry is optimised per weight; the
    union of all winners is Pareto-filtered.
    """
    d_cs = list(range(1, src.d_b * src.d_b + 1)) if d_c_list is None else [int(d) for d in d_c_list]
    if not d_cs or any(d < 1 for d in d_cs):
        raise BadDims("d_C list must be nonempty with entries >= 1")
    all_points: list[RatePoint] = []
    grids = []
    for ci, d_c in enumerate(d_cs):
        problem = _FQProblem(src, d_c)
        sub = _trace(problem, mu_grid, restarts, seed + ci, evals, threads, {}, refine_tol)
        grids = sub.meta["mu_grid"]
        all_points.extend(sub.points)
    filtered = pareto_filter(all_points)
    meta = {"family": "fully-quantum-helper", "inner_bound_d_c": d_cs,
            "restarts": restarts, "seed": seed, "mu_grid": grids,
            "note": "inner bound; no output-dimension bound is known"}
    return BoundaryCurve(tuple(filtered), meta)
