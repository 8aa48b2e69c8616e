"""Partitions, congruence generation and congruence lattices."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, check_congruence
from .errors import ParseError, UniverseError


class _UnionFind:
    def __init__(self, rep: Sequence[int]):
        self.parent = list(rep)

    def find(self, a: int) -> int:
        parent = self.parent
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # keep the least element as root so canonical form falls out directly
        if ra < rb:
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        return True

    def rep(self) -> tuple[int, ...]:
        return tuple(self.find(a) for a in range(len(self.parent)))


@dataclass(frozen=True)
class Partition:
    """Equivalence relation on ``range(n)``; ``rep[a]`` is the least element of a's block."""

    rep: tuple[int, ...]

    def __post_init__(self):
        rep = tuple(int(r) for r in self.rep)
        object.__setattr__(self, "rep", rep)
        for a, r in enumerate(rep):
            if not (0 <= r <= a) or rep[r] != r:
                raise ValueError(f"not a canonical partition array: {rep}")

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> Partition:
        uf = _UnionFind(range(n))
        covered = set()
        for block in blocks:
            block = list(block)
            for a in block:
                if not 0 <= a < n:
                    raise UniverseError(f"element {a} outside universe of size {n}")
                if a in covered:
                    raise ValueError(f"element {a} occurs in two blocks")
                covered.add(a)
            for a in block[1:]:
                uf.union(block[0], a)
        return cls(uf.rep())

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> Partition:
        uf = _UnionFind(range(n))
        for a, b in pairs:
            uf.union(a, b)
        return cls(uf.rep())

    @classmethod
    def equality(cls, n: int) -> Partition:
        return cls(tuple(range(n)))

    @classmethod
    def full(cls, n: int) -> Partition:
        return cls((0,) * n)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> Partition:
        """Parse the block form ``"|0 2|1 3|"``."""
        s = text.strip()
        if not (len(s) >= 2 and s[0] == "|" and s[-1] == "|"):
            raise ParseError(f"partition must start and end with '|': {text!r}", 0)
        blocks = []
        offset = text.index("|") + 1
        for chunk in s[1:-1].split("|"):
            try:
                block = [int(tok) for tok in chunk.split()]
            except ValueError:
                raise ParseError(f"non-integer element in block {chunk!r}", offset) from None
            if not block:
                raise ParseError("empty block", offset)
            blocks.append(block)
            offset += len(chunk) + 1
        size = max(max(b) for b in blocks) + 1
        if n is None:
            n = size
        elif size > n:
            raise ParseError(f"element {size - 1} outside universe of size {n}", 0)
        p = cls.from_blocks(n, blocks)
        if sum(len(b) for b in blocks) != n:
            raise ParseError(f"blocks do not cover 0..{n - 1}", 0)
        return p

    @property
    def size(self) -> int:
        return len(self.rep)

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.rep, dtype=np.int64)

    def blocks(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for a, r in enumerate(self.rep):
            out.setdefault(r, []).append(a)
        return [out[r] for r in sorted(out)]

    def num_blocks(self) -> int:
        return sum(1 for a, r in enumerate(self.rep) if a == r)

    def relates(self, a: int, b: int) -> bool:
        return self.rep[a] == self.rep[b]

    def __contains__(self, pair) -> bool:
        a, b = pair
        return self.rep[a] == self.rep[b]

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for block in self.blocks() for a in block for b in block]

    def is_equality(self) -> bool:
        return all(a == r for a, r in enumerate(self.rep))

    def is_full(self) -> bool:
        return all(r == 0 for r in self.rep)

    def leq(self, other: Partition) -> bool:
        _same_universe(self, other)
        return all(other.rep[a] == other.rep[r] for a, r in enumerate(self.rep))

    def __le__(self, other):
        return self.leq(other)

    def __ge__(self, other):
        return other.leq(self)

    def __lt__(self, other):
        return self != other and self.leq(other)

    def __gt__(self, other):
        return self != other and other.leq(self)

    def __or__(self, other: Partition) -> Partition:
        return join(self, other)

    def __and__(self, other: Partition) -> Partition:
        return meet(self, other)

    def __str__(self) -> str:
        return "|" + "|".join(" ".join(map(str, b)) for b in self.blocks()) + "|"

    def __repr__(self) -> str:
        return f"Partition({self})"


def _same_universe(p: Partition, q: Partition) -> None:
    if p.size != q.size:
        raise UniverseError(f"partitions over universes of size {p.size} and {q.size}")


def join(p: Partition, q: Partition) -> Partition:
    """Smallest equivalence containing both (transitive closure of the union)."""
    _same_universe(p, q)
    uf = _UnionFind(p.rep)
    for a, r in enumerate(q.rep):
        uf.union(a, r)
    return Partition(uf.rep())


def meet(p: Partition, q: Partition) -> Partition:
    _same_universe(p, q)
    first: dict[tuple[int, int], int] = {}
    rep = []
    for a in range(p.size):
        key = (p.rep[a], q.rep[a])
        rep.append(first.setdefault(key, a))
    return Partition(tuple(rep))


def join_all(parts: Iterable[Partition], n: int) -> Partition:
    out = Partition.equality(n)
    for p in parts:
        out = join(out, p)
    return out


def meet_all(parts: Iterable[Partition], n: int) -> Partition:
    out = Partition.full(n)
    for p in parts:
        out = meet(out, p)
    return out


def cg(
    alg: FiniteAlgebra,
    pairs: Iterable[tuple[int, int]],
    start: Partition | None = None,
) -> Partition:
    """Least congruence containing ``pairs`` (and ``start``, assumed a congruence).

    Every pair that merges two blocks is pushed through all depth-one unary
    translations; images that merge further blocks are processed in turn.
    """
    n = alg.size
    uf = _UnionFind(start.rep if start is not None else range(n))
    trans = alg.translations
    work = []
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise UniverseError(f"pair {(a, b)} outside universe of size {n}")
        work.append((int(a), int(b)))
    while work:
        a, b = work.pop()
        if uf.union(a, b):
            ta, tb = trans[:, a], trans[:, b]
            diff = ta != tb
            work.extend(zip(ta[diff].tolist(), tb[diff].tolist()))
    return Partition(uf.rep())


def is_congruence(alg: FiniteAlgebra, p: Partition) -> bool:
    from .errors import NotACongruenceError

    try:
        check_congruence(alg, p.rep)
    except NotACongruenceError:
        return False
    return True


@dataclass
class Lattice:
    """A finite lattice on ``range(size)`` given by its order and operation tables."""

    size: int
    leq: np.ndarray
    join: np.ndarray
    meet: np.ndarray

    @classmethod
    def from_leq(cls, leq) -> Lattice:
        leq = np.asarray(leq, dtype=bool)
        m = len(leq)
        jt = np.zeros((m, m), dtype=np.int64)
        mt = np.zeros((m, m), dtype=np.int64)
        for x in range(m):
            for y in range(m):
                ub = [z for z in range(m) if leq[x, z] and leq[y, z]]
                lb = [z for z in range(m) if leq[z, x] and leq[z, y]]
                least = [z for z in ub if all(leq[z, w] for w in ub)]
                greatest = [z for z in lb if all(leq[w, z] for w in lb)]
                if len(least) != 1 or len(greatest) != 1:
                    raise ValueError("order is not a lattice")
                jt[x, y] = least[0]
                mt[x, y] = greatest[0]
        return cls(m, leq, jt, mt)


@dataclass
class CongruenceLattice(Lattice):
    elements: list[Partition] = field(default_factory=list)

    def index(self, p: Partition) -> int:
        return self.elements.index(p)

    @property
    def bottom(self) -> Partition:
        return self.elements[0]

    @property
    def top(self) -> Partition:
        return self.elements[-1]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def congruence_lattice(alg: FiniteAlgebra) -> CongruenceLattice:
    """All congruences: principal ones, closed under join.

    Elements are ordered by decreasing number of blocks, then by their
    representative arrays, so index 0 is the equality and the last is 1.
    """
    n = alg.size
    found = {Partition.equality(n)}
    for a, b in itertools.combinations(range(n), 2):
        found.add(cg(alg, [(a, b)]))
    frontier = list(found)
    while frontier:
        new = []
        current = list(found)
        for p in frontier:
            for q in current:
                j = join(p, q)
                if j not in found:
                    found.add(j)
                    new.append(j)
        frontier = new
    elements = sorted(found, key=lambda p: (-p.num_blocks(), p.rep))
    m = len(elements)
    pos = {p: i for i, p in enumerate(elements)}
    leq = np.array([[p.leq(q) for q in elements] for p in elements], dtype=bool)
    jt = np.array([[pos[join(p, q)] for q in elements] for p in elements], dtype=np.int64)
    mt = np.array([[pos[meet(p, q)] for q in elements] for p in elements], dtype=np.int64)
    return CongruenceLattice(m, leq, jt, mt, elements)


def is_modular_lattice(lat: Lattice) -> tuple[bool, tuple[int, int, int] | None]:
    """Check ``x <= z  =>  x v (y ^ z) = (x v y) ^ z``; return a failing (x, y, z) if any."""
    J, M, L = lat.join, lat.meet, lat.leq
    for x in range(lat.size):
        for z in range(lat.size):
            if not L[x, z]:
                continue
            for y in range(lat.size):
                if J[x, M[y, z]] != M[J[x, y], z]:
                    return False, (x, y, z)
    return True, None
