"""Cubes in A^(2^k): the matrix algebra M(T) and its lines and squares.

A vertex of the k-cube is a function f: k -> {0, 1}, stored as the integer
with bit i equal to f(i); ``entries[bits]`` is the cube's value there. Bit i
belongs to the i-th congruence of T, and f(i) = 0 is the a-side.

Listings meant for people (text form, :func:`lines`, :func:`squares`) run
over f in lexicographic order of ``(f(0), f(1), ...)``. For k = 2 the text
form is therefore ``[r,s,u,v]`` for the square ``[[r, s], [u, v]]`` of
coordinates (0, 1).
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, check_congruence
from .congruences import Partition
from .errors import CapacityError, CoordinateError, ParseError, UniverseError
from . import kernels

DEFAULT_MAX_BITS = 32


def default_max_bits() -> int:
    env = os.environ.get("CMCOMM_CAP")
    return int(env) if env else DEFAULT_MAX_BITS


def lex_order(k: int) -> list[int]:
    """Vertex indices in lexicographic order of (f(0), ..., f(k-1))."""
    return [sum(bit << i for i, bit in enumerate(f)) for f in itertools.product((0, 1), repeat=k)]


def lex_bases(k: int, free: Sequence[int]) -> list[int]:
    """Indices with the ``free`` bits cleared, lexicographic over the other coordinates."""
    rest = [i for i in range(k) if i not in free]
    return [sum(bit << i for i, bit in zip(rest, f)) for f in itertools.product((0, 1), repeat=len(rest))]


@dataclass(frozen=True)
class Cube:
    k: int
    entries: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if len(self.entries) != 1 << self.k:
            raise ValueError(f"a {self.k}-cube has {1 << self.k} entries, got {len(self.entries)}")

    @classmethod
    def from_lex(cls, k: int, values: Sequence[int]) -> Cube:
        entries = [0] * (1 << k)
        for idx, v in zip(lex_order(k), values, strict=True):
            entries[idx] = v
        return cls(k, tuple(entries))

    def lex(self) -> tuple[int, ...]:
        return tuple(self.entries[i] for i in lex_order(self.k))

    def __getitem__(self, f: int) -> int:
        return self.entries[f]

    def to_text(self) -> str:
        return "[" + ",".join(map(str, self.lex())) + "]"

    @classmethod
    def parse(cls, text: str) -> Cube:
        s = text.strip()
        if not (s.startswith("[") and s.endswith("]")):
            raise ParseError(f"cube must be written [e,e,...]: {text!r}", 0)
        try:
            values = [int(v) for v in s[1:-1].split(",")]
        except ValueError:
            raise ParseError(f"non-integer cube entry in {text!r}", 0) from None
        k = len(values).bit_length() - 1
        if 1 << k != len(values):
            raise ParseError(f"cube has {len(values)} entries, not a power of two", 0)
        return cls.from_lex(k, values)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class Line:
    p: int
    q: int
    j: int
    base: int  # vertex index with bit j cleared
    k: int

    @property
    def pair(self) -> tuple[int, int]:
        return (self.p, self.q)

    @property
    def is_pivot(self) -> bool:
        return classify(self.k, self.base, self.j) == "pivot"


@dataclass(frozen=True)
class Square:
    r: int
    s: int
    u: int
    v: int
    j: int
    l: int
    base: int  # vertex index with bits j and l cleared
    k: int

    def rows(self) -> list[list[int]]:
        return [[self.r, self.s], [self.u, self.v]]

    @property
    def is_pivot(self) -> bool:
        return classify(self.k, self.base, self.j, self.l) == "pivot"


def _check_coords(k: int, *coords: int) -> None:
    for c in coords:
        if not 0 <= c < k:
            raise CoordinateError(f"coordinate {c} out of range for k={k}")
    if len(set(coords)) != len(coords):
        raise CoordinateError(f"coordinates must be distinct, got {coords}")


def lines(m: Cube, j: int) -> list[Line]:
    _check_coords(m.k, j)
    return [Line(m[b], m[b | 1 << j], j, b, m.k) for b in lex_bases(m.k, (j,))]


def squares(m: Cube, j: int, l: int) -> list[Square]:
    _check_coords(m.k, j, l)
    out = []
    for b in lex_bases(m.k, (j, l)):
        out.append(Square(m[b], m[b | 1 << l], m[b | 1 << j], m[b | 1 << j | 1 << l], j, l, b, m.k))
    return out


def classify(k: int, base: int, j: int, l: int | None = None) -> str:
    """``"pivot"`` iff every coordinate outside {j, l} sits on the b-side."""
    free = (j,) if l is None else (j, l)
    _check_coords(k, *free)
    mask = (1 << k) - 1
    for c in free:
        mask &= ~(1 << c)
    return "pivot" if base & mask == mask else "supporting"


def line_indices(k: int, j: int) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Vertex index arrays of the (j)-supporting lines, plus the pivot line's pair."""
    full = (1 << k) - 1
    pivot_lo = full ^ (1 << j)
    bases = [b for b in range(1 << k) if not b >> j & 1 and b != pivot_lo]
    lo = np.array(bases, dtype=np.int64)
    return lo, lo | (1 << j), pivot_lo, full


# --- M(T) ---------------------------------------------------------------------


def check_sequence(alg: FiniteAlgebra, T: Sequence[Partition]) -> tuple[Partition, ...]:
    T = tuple(T)
    if not T:
        raise CoordinateError("congruence sequence must be non-empty")
    for theta in T:
        if theta.size != alg.size:
            raise UniverseError(f"partition over {theta.size} elements, algebra has {alg.size}")
        check_congruence(alg, theta.rep)
    return T


def _generator_rows(T: Sequence[Partition]) -> np.ndarray:
    k = len(T)
    idx = np.arange(1 << k)
    rows = set()
    for i, theta in enumerate(T):
        side = (idx >> i) & 1
        for a, b in theta.pairs():
            rows.add(tuple(np.where(side == 0, a, b).tolist()))
    return np.array(sorted(rows), dtype=np.int64).reshape(-1, 1 << k)


def one_coordinate_generators(T: Sequence[Partition]) -> frozenset[Cube]:
    """Cubes ``m_f = a if f(i) = 0 else b`` for each i and each (a, b) in T[i].

    Reflexive pairs give every constant cube, so closing these under the
    basic operations yields all polynomial cubes, not just term cubes.
    """
    k = len(T)
    return frozenset(Cube(k, tuple(row)) for row in _generator_rows(T).tolist())


def cube_bits(n: int, k: int) -> int:
    return (1 << k) * math.ceil(math.log2(n)) if n > 1 else 0


@dataclass(frozen=True, eq=False)
class MatrixSet:
    """M(T) as a sorted ``(N, 2**k)`` array of cube entries."""

    k: int
    n: int
    rows: np.ndarray

    @cached_property
    def packed(self) -> np.ndarray:
        return self.rows @ (self.n ** np.arange(1 << self.k, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        for row in self.rows.tolist():
            yield Cube(self.k, tuple(row))

    def __contains__(self, cube) -> bool:
        entries = cube.entries if isinstance(cube, Cube) else tuple(cube)
        key = sum(int(e) * self.n**i for i, e in enumerate(entries))
        pos = np.searchsorted(self.packed, key)
        return bool(pos < len(self.packed) and self.packed[pos] == key)

    def contains_rows(self, rows: np.ndarray) -> np.ndarray:
        keys = np.asarray(rows, dtype=np.int64) @ (self.n ** np.arange(1 << self.k, dtype=np.int64))
        pos = np.searchsorted(self.packed, keys)
        pos = np.minimum(pos, len(self.packed) - 1)
        return self.packed[pos] == keys

    def cubes(self) -> set[Cube]:
        return set(self)


def generate_matrix_algebra(
    alg: FiniteAlgebra,
    T: Sequence[Partition],
    max_bits: int | None = None,
    impl=None,
) -> MatrixSet:
    """M(T): closure of the one-coordinate cubes inside ``alg**(2**k)``.

    The closure stops early once it holds every cube whose edges respect T,
    since M(T) can never be larger than that.
    """
    T = check_sequence(alg, T)
    k = len(T)
    n = alg.size
    limit = default_max_bits() if max_bits is None else max_bits
    bits = cube_bits(n, k)
    if bits > min(limit, 63):
        raise CapacityError(
            f"M(T) lives in a space of {n}^{1 << k} cubes ({bits} bits); capacity is {limit} bits",
            bound=bits,
            limit=limit,
        )
    gens = _generator_rows(T)
    reps = np.array([theta.rep for theta in T], dtype=np.int64)
    target = kernels.count_edge_consistent(reps, n, k, impl=impl)
    rows = kernels.closure(alg, gens, 1 << k, target=target, impl=impl)
    return MatrixSet(k, n, rows)


def edge_violations(M: MatrixSet, T: Sequence[Partition]) -> int:
    """Number of (cube, edge) pairs whose endpoints are not T-related."""
    bad = 0
    for j, theta in enumerate(T):
        lo, hi, plo, phi = line_indices(M.k, j)
        lo = np.append(lo, plo)
        hi = np.append(hi, phi)
        rep = theta.array
        bad += int((rep[M.rows[:, lo]] != rep[M.rows[:, hi]]).sum())
    return bad
