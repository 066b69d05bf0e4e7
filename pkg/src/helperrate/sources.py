"""Source models: classical joints, classical-quantum ensembles, purified
bipartite quantum sources, plus the JSON on-disk format the CLI consumes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .config import TOL
from .errors import (
    DimMismatch,
    InvalidDistribution,
    InvalidEnsemble,
    InvalidSourceSpec,
    NoConvergence,
)
from .entropy import as_distribution, check_joint


@dataclass(frozen=True)
class ClassicalJoint:
    """Joint distribution P_XY as a (|X|, |Y|) matrix."""

    p_xy: np.ndarray

    def __post_init__(self):
        a = check_joint(self.p_xy)
        a.setflags(write=False)
        object.__setattr__(self, "p_xy", a)

    @property
    def num_x(self) -> int:
        return self.p_xy.shape[0]

    @property
    def num_y(self) -> int:
        return self.p_xy.shape[1]

    @property
    def p_x(self) -> np.ndarray:
        return self.p_xy.sum(axis=1)

    @property
    def p_y(self) -> np.ndarray:
        return self.p_xy.sum(axis=0)


@dataclass(frozen=True)
class CQSource:
    """Classical-quantum ensemble {(p_X(x), rho_x)} sharing one helper dimension.

    Symbols with zero probability are dropped at construction so induced
    conditionals never divide by zero.
    """

    p_x: np.ndarray
    states: tuple[np.ndarray, ...]

    def __post_init__(self):
        probs = as_distribution(self.p_x)
        states = [linalg.as_complex_matrix(s) for s in self.states]
        if len(states) != probs.size:
            raise InvalidEnsemble(f"{probs.size} probabilities but {len(states)} states")
        keep = probs > 0.0
        probs = probs[keep]
        states = [s for s, k in zip(states, keep) if k]
        if not states:
            raise InvalidEnsemble("all symbols have zero probability")
        d = states[0].shape[0]
        checked = []
        for i, s in enumerate(states):
            if s.shape[0] != d:
                raise DimMismatch(f"states[{i}] has dimension {s.shape[0]}, expected {d}")
            c = linalg.check_density(s, context=f"states[{i}]")
            c.setflags(write=False)
            checked.append(c)
        probs.setflags(write=False)
        object.__setattr__(self, "p_x", probs)
        object.__setattr__(self, "states", tuple(checked))

    @property
    def num_symbols(self) -> int:
        return self.p_x.size

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]


@dataclass(frozen=True)
class BipartiteSource:
    """Bipartite quantum source with a fixed purification.

    ``psi`` holds the amplitudes of the purified state over (A, B, R) in that
    tensor order, ``psi_dims = (d_A, d_B, d_R)``.
    """

    rho_ab: np.ndarray
    dims: tuple[int, int]
    psi: np.ndarray = field(repr=False)
    psi_dims: tuple[int, int, int]

    def __post_init__(self):
        rho = linalg.check_density(self.rho_ab)
        d_a, d_b = (int(d) for d in self.dims)
        if d_a * d_b != rho.shape[0]:
            raise DimMismatch(f"dims {self.dims} inconsistent with dimension {rho.shape[0]}")
        amps = np.asarray(self.psi, dtype=complex).ravel()
        da, db, dr = (int(d) for d in self.psi_dims)
        if (da, db) != (d_a, d_b) or amps.size != da * db * dr:
            raise DimMismatch("purification dims inconsistent with source dims")
        phi = amps.reshape(da * db, dr)
        residual = float(np.max(np.abs(phi @ np.conj(phi.T) - rho)))
        if residual > 1e-9:
            raise DimMismatch(f"purification does not reproduce the source (residual {residual:.3e})")
        rho.setflags(write=False)
        amps.setflags(write=False)
        object.__setattr__(self, "rho_ab", rho)
        object.__setattr__(self, "dims", (d_a, d_b))
        object.__setattr__(self, "psi", amps)
        object.__setattr__(self, "psi_dims", (da, db, dr))

    @property
    def d_a(self) -> int:
        return self.dims[0]

    @property
    def d_b(self) -> int:
        return self.dims[1]

    @property
    def d_r(self) -> int:
        return self.psi_dims[2]


def purified_bipartite(rho_ab, dims) -> BipartiteSource:
    """Build a :class:`BipartiteSource` by purifying ``rho_ab``."""
    rho = linalg.check_density(rho_ab)
    d_a, d_b = (int(d) for d in dims)
    amps, (_, d_r) = linalg.purify(rho)
    return BipartiteSource(rho, (d_a, d_b), amps, (d_a, d_b, d_r))


def helper_marginal(src: CQSource) -> np.ndarray:
    """Average helper state rho_B = sum_x p(x) rho_x."""
    out = np.zeros((src.dim, src.dim), dtype=complex)
    for p, s in zip(src.p_x, src.states):
        out += p * s
    return out


def commuting_reduction(src: CQSource) -> ClassicalJoint | None:
    """Classical joint read off a shared eigenbasis, if the ensemble commutes.

    Returns ``None`` unless all pairwise commutators vanish in max-norm.  The
    shared basis is found by diagonalising a generic positive combination of
    the ensemble states and validating that it diagonalises every member.
    """
    states = src.states
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            comm = states[i] @ states[j] - states[j] @ states[i]
            if float(np.max(np.abs(comm))) > TOL.commutator:
                return None

    for attempt in range(8):
        rng = np.random.default_rng(1000 + attempt)
        coeffs = rng.uniform(0.5, 1.5, len(states))
        witness = sum(c * s for c, s in zip(coeffs, states))
        _, basis = linalg.eig_hermitian(witness)
        rotated = [np.conj(basis.T) @ s @ basis for s in states]
        off = 0.0
        for r in rotated:
            off = max(off, float(np.max(np.abs(r - np.diag(np.diagonal(r))))))
        if off <= 1e-7:
            p = np.stack([px * np.clip(np.diagonal(r).real, 0.0, None) for px, r in zip(src.p_x, rotated)])
            return ClassicalJoint(p)
    raise NoConvergence("failed to jointly diagonalize a commuting ensemble")


# ---------------------------------------------------------------------------
# JSON source-spec format
#
#   {"type": "classical", "p": [[...], ...]}                    rows of P_XY
#   {"type": "cq", "p": [...], "states": [matrix, ...]}
#   {"type": "bipartite", "states": [matrix], "dims": [dA, dB]}
#
# where matrix = array of rows, each entry a [re, im] pair.

_ALLOWED_KEYS = {
    "classical": {"type", "p"},
    "cq": {"type", "p", "states"},
    "bipartite": {"type", "states", "dims"},
}

Source = ClassicalJoint | CQSource | BipartiteSource


def matrix_to_json(mat) -> list:
    a = np.asarray(mat, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def matrix_from_json(obj, fieldname: str, square: bool = True) -> np.ndarray:
    try:
        a = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidSourceSpec(f"{fieldname}: not a numeric array ({exc})") from exc
    if a.ndim != 3 or a.shape[2] != 2 or (square and a.shape[0] != a.shape[1]):
        raise InvalidSourceSpec(
            f"{fieldname}: expected a matrix of [re, im] pairs, got shape {a.shape}"
        )
    return a[:, :, 0] + 1j * a[:, :, 1]


def parse_source(doc: dict) -> Source:
    if not isinstance(doc, dict):
        raise InvalidSourceSpec("document: expected a JSON object")
    kind = doc.get("type")
    if kind not in _ALLOWED_KEYS:
        raise InvalidSourceSpec(f"type: expected one of {sorted(_ALLOWED_KEYS)}, got {kind!r}")
    unknown = set(doc) - _ALLOWED_KEYS[kind]
    if unknown:
        raise InvalidSourceSpec(f"{sorted(unknown)[0]}: unknown key for type '{kind}'")
    missing = _ALLOWED_KEYS[kind] - set(doc)
    if missing:
        raise InvalidSourceSpec(f"{sorted(missing)[0]}: required for type '{kind}'")

    if kind == "classical":
        try:
            return ClassicalJoint(np.asarray(doc["p"], dtype=float))
        except (TypeError, ValueError) as exc:
            raise InvalidSourceSpec(f"p: not a numeric matrix ({exc})") from exc
        except InvalidDistribution as exc:
            raise InvalidSourceSpec(f"p: {exc}") from exc

    if kind == "cq":
        try:
            probs = np.asarray(doc["p"], dtype=float).ravel()
        except (TypeError, ValueError) as exc:
            raise InvalidSourceSpec(f"p: not a numeric vector ({exc})") from exc
        states_doc = doc["states"]
        if not isinstance(states_doc, list) or not states_doc:
            raise InvalidSourceSpec("states: expected a nonempty list of matrices")
        states = [matrix_from_json(m, f"states[{i}]") for i, m in enumerate(states_doc)]
        try:
            return CQSource(probs, tuple(states))
        except InvalidDistribution as exc:
            raise InvalidSourceSpec(f"p: {exc}") from exc

    states_doc = doc["states"]
    if not isinstance(states_doc, list) or len(states_doc) != 1:
        raise InvalidSourceSpec("states: expected a single-matrix list for a bipartite source")
    dims = doc["dims"]
    if not isinstance(dims, list) or len(dims) != 2:
        raise InvalidSourceSpec("dims: expected [d_A, d_B]")
    rho = matrix_from_json(states_doc[0], "states[0]")
    return purified_bipartite(rho, (int(dims[0]), int(dims[1])))


def source_to_doc(src: Source) -> dict:
    if isinstance(src, ClassicalJoint):
        return {"type": "classical", "p": [[float(v) for v in row] for row in src.p_xy]}
    if isinstance(src, CQSource):
        return {
            "type": "cq",
            "p": [float(v) for v in src.p_x],
            "states": [matrix_to_json(s) for s in src.states],
        }
    if isinstance(src, BipartiteSource):
        return {
            "type": "bipartite",
            "states": [matrix_to_json(src.rho_ab)],
            "dims": [src.d_a, src.d_b],
        }
    raise TypeError(f"not a source: {type(src)!r}")


def load_source(path) -> Source:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InvalidSourceSpec(f"file: cannot read {path} ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise InvalidSourceSpec(f"file: invalid JSON in {path} ({exc})") from exc
    return parse_source(doc)


def dump_source(src: Source, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(source_to_doc(src), fh, indent=1)
        fh.write("\n")
