"""Centrality and the higher commutator of a congruence sequence.

``C(T; j; delta)`` says: for every cube of M(T), if all (j)-supporting lines
are delta-pairs then so is the (j)-pivot line. That is a Horn condition in
delta, so the least delta satisfying it is reached from the equality by
repeatedly adding the pivot pairs of violating cubes and closing under Cg.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import FiniteAlgebra
from .congruences import CongruenceLattice, Partition, cg, congruence_lattice, meet_all
from .cubes import (
    Cube,
    Line,
    MatrixSet,
    check_sequence,
    generate_matrix_algebra,
    line_indices,
    lines,
)
from .errors import CoordinateError, UniverseError


@dataclass
class CentralityWitness:
    cube: Cube
    j: int
    pivot: Line
    supporting: list[Line]


@dataclass
class TwoTermWitness:
    h: Cube
    g: Cube


@dataclass
class CentralityReport:
    holds: bool
    witness: CentralityWitness | TwoTermWitness | None = None

    def __bool__(self) -> bool:
        return self.holds


def _violations(M: MatrixSet, j: int, rep: np.ndarray) -> np.ndarray:
    lo, hi, plo, phi = line_indices(M.k, j)
    R = rep[M.rows]
    ok = (R[:, lo] == R[:, hi]).all(axis=1)
    return ok & (R[:, plo] != R[:, phi])


def centrality(T: Sequence[Partition], j: int, delta: Partition, M: MatrixSet) -> CentralityReport:
    k = len(T)
    if not 0 <= j < k:
        raise CoordinateError(f"pivot coordinate {j} out of range for k={k}")
    if delta.size != M.n:
        raise UniverseError("delta and M(T) live over different universes")
    bad = np.flatnonzero(_violations(M, j, delta.array))
    if len(bad) == 0:
        return CentralityReport(True)
    cube = Cube(k, tuple(M.rows[bad[0]].tolist()))
    ls = lines(cube, j)
    pivot = next(line for line in ls if line.is_pivot)
    return CentralityReport(
        False, CentralityWitness(cube, j, pivot, [line for line in ls if not line.is_pivot])
    )


def _fixpoint(alg: FiniteAlgebra, M: MatrixSet, j: int) -> Partition:
    delta = Partition.equality(alg.size)
    _, _, plo, phi = line_indices(M.k, j)
    while True:
        bad = _violations(M, j, delta.array)
        if not bad.any():
            return delta
        pairs = np.unique(M.rows[bad][:, [plo, phi]], axis=0)
        delta = cg(alg, pairs.tolist(), start=delta)


def higher_commutator(
    alg: FiniteAlgebra,
    T: Sequence[Partition],
    pivot: int | None = None,
    M: MatrixSet | None = None,
    max_bits: int | None = None,
) -> Partition:
    """Least delta with ``C(T; pivot; delta)``; the pivot defaults to k-1."""
    T = check_sequence(alg, T)
    k = len(T)
    j = k - 1 if pivot is None else pivot
    if not 0 <= j < k:
        raise CoordinateError(f"pivot coordinate {j} out of range for k={k}")
    if M is None:
        M = generate_matrix_algebra(alg, T, max_bits=max_bits)
    return _fixpoint(alg, M, j)


def per_coordinate_commutators(
    alg: FiniteAlgebra, T: Sequence[Partition], M: MatrixSet | None = None
) -> list[Partition]:
    """``[T]_j`` for every j; these agree when the variety is congruence modular."""
    T = check_sequence(alg, T)
    if M is None:
        M = generate_matrix_algebra(alg, T)
    return [_fixpoint(alg, M, j) for j in range(len(T))]


def commutator_by_lattice_scan(
    alg: FiniteAlgebra,
    T: Sequence[Partition],
    lat: CongruenceLattice | None = None,
    M: MatrixSet | None = None,
    pivot: int | None = None,
) -> Partition:
    """Meet of every congruence delta with ``C(T; pivot; delta)``."""
    T = check_sequence(alg, T)
    j = len(T) - 1 if pivot is None else pivot
    if lat is None:
        lat = congruence_lattice(alg)
    if M is None:
        M = generate_matrix_algebra(alg, T)
    good = [d for d in lat.elements if centrality(T, j, d, M).holds]
    return meet_all(good, alg.size)


def _two_term_groups(M: MatrixSet, rep: np.ndarray):
    full = (1 << M.k) - 1
    R = rep[M.rows]
    _, first, inverse = np.unique(R[:, :full], axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    return first, inverse, R[:, full]


def two_term_centrality(T: Sequence[Partition], delta: Partition, M: MatrixSet) -> CentralityReport:
    """For all h, g in M(T): agreeing mod delta off the all-ones vertex forces agreement there.

    Cubes are bucketed by the delta-classes of their non-pivot vertices, so
    only cubes within a bucket are compared.
    """
    if delta.size != M.n:
        raise UniverseError("delta and M(T) live over different universes")
    first, inverse, top = _two_term_groups(M, delta.array)
    bad = np.flatnonzero(top != top[first[inverse]])
    if len(bad) == 0:
        return CentralityReport(True)
    h = M.rows[first[inverse[bad[0]]]]
    g = M.rows[bad[0]]
    return CentralityReport(False, TwoTermWitness(Cube(M.k, tuple(h.tolist())), Cube(M.k, tuple(g.tolist()))))


def two_term_commutator(
    alg: FiniteAlgebra, T: Sequence[Partition], M: MatrixSet | None = None
) -> Partition:
    T = check_sequence(alg, T)
    if M is None:
        M = generate_matrix_algebra(alg, T)
    full = (1 << M.k) - 1
    delta = Partition.equality(alg.size)
    while True:
        first, inverse, top = _two_term_groups(M, delta.array)
        bad = np.flatnonzero(top != top[first[inverse]])
        if len(bad) == 0:
            return delta
        pairs = np.stack([M.rows[first[inverse[bad]], full], M.rows[bad, full]], axis=1)
        delta = cg(alg, np.unique(pairs, axis=0).tolist(), start=delta)


@dataclass
class CommutatorEngine:
    """Caches M(T), commutators and the congruence lattice for one algebra."""

    alg: FiniteAlgebra
    max_bits: int | None = None
    _matrices: dict = field(default_factory=dict, repr=False)
    _comm: dict = field(default_factory=dict, repr=False)
    _lattice: CongruenceLattice | None = field(default=None, repr=False)

    @property
    def lattice(self) -> CongruenceLattice:
        if self._lattice is None:
            self._lattice = congruence_lattice(self.alg)
        return self._lattice

    def matrices(self, T: Sequence[Partition]) -> MatrixSet:
        T = tuple(T)
        if T not in self._matrices:
            self._matrices[T] = generate_matrix_algebra(self.alg, T, max_bits=self.max_bits)
        return self._matrices[T]

    def commutator(self, T: Sequence[Partition], pivot: int | None = None) -> Partition:
        T = tuple(T)
        j = len(T) - 1 if pivot is None else pivot
        key = ("tc", T, j)
        if key not in self._comm:
            self._comm[key] = higher_commutator(self.alg, T, pivot=j, M=self.matrices(T))
        return self._comm[key]

    def two_term(self, T: Sequence[Partition]) -> Partition:
        T = tuple(T)
        key = ("tt", T)
        if key not in self._comm:
            self._comm[key] = two_term_commutator(self.alg, T, M=self.matrices(T))
        return self._comm[key]

    def lattice_scan(self, T: Sequence[Partition], pivot: int | None = None) -> Partition:
        return commutator_by_lattice_scan(self.alg, T, self.lattice, self.matrices(T), pivot)
