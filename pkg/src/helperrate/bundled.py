"""Bundled test sources used by the test suite, scripts, and CLI examples."""

from __future__ import annotations

import os

import numpy as np

from .sources import (
    BipartiteSource,
    ClassicalJoint,
    CQSource,
    dump_source,
    purified_bipartite,
)

_KET0 = np.array([1.0, 0.0], dtype=complex)
_KET_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)


def _proj(ket: np.ndarray) -> np.ndarray:
    return np.outer(ket, ket.conj())


def bb84_pair() -> CQSource:
    """Equiprobable {|0>, |+>}: the canonical non-commuting qubit ensemble."""
    return CQSource(np.array([0.5, 0.5]), (_proj(_KET0), _proj(_KET_PLUS)))


def orthogonal_pair() -> CQSource:
    """Equiprobable computational-basis states (classical in disguise)."""
    return CQSource(np.array([0.5, 0.5]), (np.diag([1.0, 0.0]).astype(complex),
                                           np.diag([0.0, 1.0]).astype(complex)))


def diagonal_commuting() -> CQSource:
    """Commuting diagonal ensemble {diag(.9,.1), diag(.2,.8)} at p = (1/2, 1/2)."""
    return CQSource(np.array([0.5, 0.5]), (np.diag([0.9, 0.1]).astype(complex),
                                           np.diag([0.2, 0.8]).astype(complex)))


def trine_ensemble() -> CQSource:
    """Three equiprobable real-plane pure states 120 degrees apart."""
    kets = [np.array([np.cos(k * 2 * np.pi / 3), np.sin(k * 2 * np.pi / 3)], dtype=complex)
            for k in range(3)]
    return CQSource(np.full(3, 1.0 / 3.0), tuple(_proj(k) for k in kets))


def single_state() -> CQSource:
    """One symbol, so the source carries no information at all."""
    return CQSource(np.array([1.0]), (np.eye(2, dtype=complex) / 2.0,))


def dsbs(q: float = 0.1) -> ClassicalJoint:
    """Doubly symmetric binary source: X = Y xor Bern(q), Y uniform."""
    return ClassicalJoint(np.array([[0.5 * (1 - q), 0.5 * q],
                                    [0.5 * q, 0.5 * (1 - q)]]))


def binary_identity() -> ClassicalJoint:
    """X = Y, uniform binary."""
    return ClassicalJoint(np.array([[0.5, 0.0], [0.0, 0.5]]))


def independent_pair() -> ClassicalJoint:
    """X independent of Y, both uniform binary."""
    return ClassicalJoint(np.full((2, 2), 0.25))


def bell_source() -> BipartiteSource:
    """Maximally entangled two-qubit source."""
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1.0 / np.sqrt(2.0)
    return purified_bipartite(np.outer(bell, bell.conj()), (2, 2))


def classically_correlated() -> BipartiteSource:
    """Perfectly correlated classical bits embedded as a two-qubit state."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[3, 3] = 0.5
    return purified_bipartite(rho, (2, 2))


def product_source() -> BipartiteSource:
    """Uncorrelated pair of maximally mixed qubits."""
    return purified_bipartite(np.eye(4, dtype=complex) / 4.0, (2, 2))


BUNDLED = {
    "bb84pair": bb84_pair,
    "orthogonal": orthogonal_pair,
    "diagcommute": diagonal_commuting,
    "trine": trine_ensemble,
    "singlestate": single_state,
    "dsbs01": dsbs,
    "binaryident": binary_identity,
    "independent": independent_pair,
    "bell": bell_source,
    "classcorr": classically_correlated,
    "product": product_source,
}


def write_bundled(directory) -> dict[str, str]:
    """Materialise every bundled source as a JSON file; returns name -> path."""
    os.makedirs(directory, exist_ok=True)
    paths = {}
    for name, factory in BUNDLED.items():
        path = os.path.join(directory, f"{name}.json")
        dump_source(factory(), path)
        paths[name] = path
    return paths
