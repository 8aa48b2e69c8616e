"""Day terms, shift rotations and the generating set of the commutator.

A Day chain is a list m_0, ..., m_n of 4-ary terms in x, y, z, u with

1. m_e(x, y, y, x) = x for every e,
2. m_0(x, y, z, u) = x,
3. m_n(x, y, z, u) = u,
4. m_e(x, x, u, u) = m_{e+1}(x, x, u, u) for even e,
5. m_e(x, y, y, u) = m_{e+1}(x, y, y, u) for odd e.

An algebra generates a congruence modular variety iff such a chain exists
among its 4-ary term operations.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    FiniteAlgebra,
    TermClosure,
    Var,
    check_term,
    eval_term_array,
    parse_sexpr,
    projection_arrays,
    term_to_sexpr,
    term_variables,
)
from .congruences import Partition
from .cubes import Cube, MatrixSet, _check_coords
from .errors import ArityError, ContractError, TreeError

DEFAULT_CLONE_CAP = 1_000_000


@dataclass(frozen=True)
class DayChain:
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if len(self.terms) < 2:
            raise ValueError("a Day chain has at least two terms")

    @property
    def n(self) -> int:
        return len(self.terms) - 1

    def to_json(self) -> str:
        return json.dumps([term_to_sexpr(t) for t in self.terms])

    @classmethod
    def from_json(cls, text: str) -> DayChain:
        return cls.from_list(json.loads(text))

    @classmethod
    def from_list(cls, items: Sequence[str]) -> DayChain:
        return cls(tuple(parse_sexpr(s) for s in items))

    def tables(self, alg: FiniteAlgebra) -> np.ndarray:
        """``(n+1, size**4)`` array: row e is m_e as a row-major function table."""
        env = projection_arrays(alg.size, 4)
        out = np.empty((len(self.terms), alg.size**4), dtype=np.int64)
        for e, t in enumerate(self.terms):
            check_term(alg, t)
            if max(term_variables(t), default=0) > 3:
                raise ArityError("Day terms may only use the variables x, y, z, u")
            out[e] = np.broadcast_to(eval_term_array(alg, t, env), (alg.size**4,))
        return out


def load_chain(path) -> DayChain:
    with open(path) as fh:
        return DayChain.from_json(fh.read())


def save_chain(chain: DayChain, path) -> None:
    with open(path, "w") as fh:
        fh.write(chain.to_json())
        fh.write("\n")


def _index4(n, x, y, z, u):
    return ((x * n + y) * n + z) * n + u


@dataclass
class DayChainSearch:
    chain: DayChain | None
    complete: bool
    clone_size: int


def find_day_chain(alg: FiniteAlgebra, cap: int = DEFAULT_CLONE_CAP) -> DayChainSearch:
    """Breadth-first search for a shortest Day chain among the 4-ary term operations.

    Only tables satisfying identity (1) can appear in a chain. They are
    bucketed by their restriction to (x, x, u, u) tuples (for even links)
    and to (x, y, y, u) tuples (for odd links); a chain is a path from the
    x-projection to the u-projection alternating between the two kinds of
    link, starting with an even one. The search over paths is rerun as the
    clone grows, and stops at the first chain. ``complete`` with no chain
    means the whole clone was searched: the variety is not congruence
    modular.
    """
    if alg.size == 1:
        return DayChainSearch(DayChain((Var(0), Var(3))), True, 1)
    n = alg.size
    g = np.indices((n, n))
    xs, ys = g[0].ravel(), g[1].ravel()
    ident = _index4(n, xs, ys, ys, xs)
    even_key = _index4(n, xs, xs, ys, ys)
    g3 = np.indices((n, n, n)).reshape(3, -1)
    odd_key = _index4(n, g3[0], g3[1], g3[1], g3[2])

    tc = TermClosure(alg, 4, cap)
    candidates: list[int] = []
    checked = 0
    searched_at = 0
    while True:
        rows = tc.tables[checked : tc.count]
        good = np.flatnonzero((rows[:, ident] == xs).all(axis=1))
        candidates.extend((good + checked).tolist())
        checked = tc.count
        finished = tc.complete or tc.truncated
        if len(candidates) > searched_at and (
            finished or len(candidates) - searched_at >= max(1, searched_at // 8)
        ):
            searched_at = len(candidates)
            path = _chain_path(tc.tables, candidates, even_key, odd_key)
            if path is not None:
                return DayChainSearch(DayChain(tuple(tc.terms[i] for i in path)), False, tc.count)
        if finished:
            return DayChainSearch(None, tc.complete, tc.count)
        tc.step()


def _chain_path(tables, candidates, even_key, odd_key) -> list[int] | None:
    even: dict[bytes, list[int]] = {}
    odd: dict[bytes, list[int]] = {}
    ekey = {}
    okey = {}
    for c in candidates:
        ekey[c] = tables[c, even_key].tobytes()
        okey[c] = tables[c, odd_key].tobytes()
        even.setdefault(ekey[c], []).append(c)
        odd.setdefault(okey[c], []).append(c)
    x_idx, u_idx = 0, 3
    start = (x_idx, 0)
    parent = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        c, parity = state
        nbrs = even[ekey[c]] if parity == 0 else odd[okey[c]]
        for d in nbrs:
            nxt = (d, 1 - parity)
            if nxt in parent:
                continue
            parent[nxt] = state
            if d == u_idx:
                path = []
                s = nxt
                while s is not None:
                    path.append(s[0])
                    s = parent[s]
                return path[::-1]
            queue.append(nxt)
    return None


def verify_day_chain(alg: FiniteAlgebra, chain: DayChain):
    """Check identities (1)-(5) exhaustively.

    Returns ``(True, None)`` or ``(False, (identity, e, values))`` where
    ``values`` binds the identity's variables (x, y for (1); x, y, z, u for
    (2)/(3); x, u for (4); x, y, u for (5)) at the first failure found.
    """
    n = alg.size
    tabs = chain.tables(alg)
    last = chain.n
    for e in range(last + 1):
        for x, y in itertools.product(range(n), repeat=2):
            if tabs[e, _index4(n, x, y, y, x)] != x:
                return False, (1, e, (x, y))
    for vals in itertools.product(range(n), repeat=4):
        i = _index4(n, *vals)
        if tabs[0, i] != vals[0]:
            return False, (2, 0, vals)
        if tabs[last, i] != vals[3]:
            return False, (3, last, vals)
    for e in range(last):
        if e % 2 == 0:
            for x, u in itertools.product(range(n), repeat=2):
                i = _index4(n, x, x, u, u)
                if tabs[e, i] != tabs[e + 1, i]:
                    return False, (4, e, (x, u))
        else:
            for x, y, u in itertools.product(range(n), repeat=3):
                i = _index4(n, x, y, y, u)
                if tabs[e, i] != tabs[e + 1, i]:
                    return False, (5, e, (x, y, u))
    return True, None


def shift_pair_test(
    alg: FiniteAlgebra,
    chain: DayChain,
    delta: Partition,
    a: int,
    b: int,
    c: int,
    d: int,
    tables: np.ndarray | None = None,
) -> bool:
    """Whether ``(m_e(a, a, c, c), m_e(a, b, d, c))`` is a delta-pair for every e.

    Requires ``(b, d)`` in delta; then the answer equals ``(a, c) in delta``.
    ``tables`` may carry ``chain.tables(alg)`` to skip re-evaluating the terms.
    """
    if not delta.relates(b, d):
        raise ContractError(f"({b}, {d}) is not a delta-pair")
    n = alg.size
    tabs = chain.tables(alg) if tables is None else tables
    left = tabs[:, _index4(n, a, a, c, c)]
    right = tabs[:, _index4(n, a, b, d, c)]
    rep = delta.array
    return bool((rep[left] == rep[right]).all())


# --- shift rotations ------------------------------------------------------------


def rotate_rows(rows: np.ndarray, j: int, l: int, table: np.ndarray, n: int) -> np.ndarray:
    """Apply the shift rotation at (j, l) with Day term ``table`` to every row.

    Each (j, l)-square [[r, s], [u, v]] becomes
    [[s, s], [m(s, r, u, v), m(s, s, v, v)]].
    """
    k = rows.shape[1].bit_length() - 1
    out = np.empty_like(rows)
    bj, bl = 1 << j, 1 << l
    for base in range(1 << k):
        if base & bj or base & bl:
            continue
        r = rows[:, base]
        s = rows[:, base | bl]
        u = rows[:, base | bj]
        v = rows[:, base | bj | bl]
        out[:, base] = s
        out[:, base | bl] = s
        out[:, base | bj] = table[((s * n + r) * n + u) * n + v]
        out[:, base | bj | bl] = table[((s * n + s) * n + v) * n + v]
    return out


def shift_rotation(alg: FiniteAlgebra, h: Cube, j: int, l: int, e: int, chain: DayChain) -> Cube:
    _check_coords(h.k, j, l)
    if not 0 <= e <= chain.n:
        raise ValueError(f"chain index {e} outside 0..{chain.n}")
    tab = chain.tables(alg)[e]
    rows = np.asarray([h.entries], dtype=np.int64)
    return Cube(h.k, tuple(rotate_rows(rows, j, l, tab, alg.size)[0].tolist()))


def rotate_along_tree(alg: FiniteAlgebra, h: Cube, d: Sequence[int], chain: DayChain) -> Cube:
    """h^d: rotations at (0, 1), (1, 2), ... using Day terms d[0], d[1], ..."""
    if len(d) > h.k - 1:
        raise TreeError(f"tree address of length {len(d)} exceeds k-1 = {h.k - 1}")
    tabs = chain.tables(alg)
    rows = np.asarray([h.entries], dtype=np.int64)
    for i, e in enumerate(d):
        if not 0 <= e <= chain.n:
            raise TreeError(f"tree entry {e} outside 0..{chain.n}")
        rows = rotate_rows(rows, i, i + 1, tabs[e], alg.size)
    return Cube(h.k, tuple(rows[0].tolist()))


def tree_leaves(k: int, n: int):
    """Leaves of the tree of sequences over 0..n of length k-1."""
    return itertools.product(range(n + 1), repeat=max(k - 1, 0))


def generator_set(
    alg: FiniteAlgebra,
    M: MatrixSet,
    chain: DayChain,
    sample: int | None = None,
    seed: int = 0,
) -> set[tuple[int, int]]:
    """Pivot lines at coordinate k-1 of h^d over all h in M and all leaves d.

    With ``sample`` set, only that many random leaves are walked (each applied
    to every cube), giving a subset of the exhaustive answer.
    """
    k = M.k
    tabs = chain.tables(alg)
    full = (1 << k) - 1
    lo = full ^ (1 << (k - 1))
    found: set[tuple[int, int]] = set()

    if sample is not None:
        rng = np.random.default_rng(seed)
        for _ in range(sample):
            rows = M.rows
            for depth, e in enumerate(rng.integers(0, chain.n + 1, k - 1)):
                rows = rotate_rows(rows, depth, depth + 1, tabs[e], alg.size)
            found.update(map(tuple, np.unique(rows[:, [lo, full]], axis=0).tolist()))
        return found

    def walk(rows, depth):
        if depth == k - 1:
            pairs = np.unique(rows[:, [lo, full]], axis=0)
            found.update(map(tuple, pairs.tolist()))
            return
        for e in range(chain.n + 1):
            nxt = rotate_rows(rows, depth, depth + 1, tabs[e], alg.size)
            walk(np.unique(nxt, axis=0), depth + 1)

    walk(M.rows, 0)
    return found
