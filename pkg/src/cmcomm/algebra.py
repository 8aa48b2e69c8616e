"""Finite algebras given by operation tables, and terms over them.

The universe of an algebra of size ``n`` is ``range(n)``. An operation of
arity ``r`` is a flat table of length ``n**r`` in row-major order: the
value at ``(a_0, ..., a_{r-1})`` sits at index ``sum(a_i * n**(r-1-i))``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import ArityError, CapacityError, NotACongruenceError, ParseError, SignatureError

# largest table (entries) power() is willing to materialize
POWER_TABLE_LIMIT = 1 << 24


@dataclass(frozen=True)
class OperationTable:
    symbol: str
    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if self.arity < 0:
            raise SignatureError(f"operation {self.symbol!r} has negative arity")

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise SignatureError(f"{self.symbol!r} takes {self.arity} arguments, got {len(args)}")
        n = round(len(self.table) ** (1 / self.arity)) if self.arity else 1
        idx = 0
        for a in args:
            idx = idx * n + a
        return self.table[idx]


@dataclass(frozen=True)
class FiniteAlgebra:
    name: str
    size: int
    operations: tuple[OperationTable, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "operations", tuple(self.operations))
        n = self.size
        if n < 1:
            raise SignatureError("algebra size must be positive")
        seen = set()
        for op in self.operations:
            if op.symbol in seen:
                raise SignatureError(f"duplicate operation symbol {op.symbol!r}")
            seen.add(op.symbol)
            if len(op.table) != n**op.arity:
                raise SignatureError(
                    f"table of {op.symbol!r} has length {len(op.table)}, expected {n**op.arity}"
                )
            if any(v < 0 or v >= n for v in op.table):
                raise SignatureError(f"table of {op.symbol!r} has entries outside 0..{n - 1}")

    @cached_property
    def signature(self) -> dict[str, OperationTable]:
        return {op.symbol: op for op in self.operations}

    def op(self, symbol: str) -> OperationTable:
        try:
            return self.signature[symbol]
        except KeyError:
            raise SignatureError(f"unknown operation symbol {symbol!r} in {self.name}") from None

    @property
    def universe(self) -> range:
        return range(self.size)

    @cached_property
    def translations(self) -> np.ndarray:
        """Unary polynomial translations of depth one, as an ``(t, n)`` array.

        Each row is ``x -> g(c_0, .., x, .., c_{r-1})`` for a basic operation
        ``g``, an argument position and a choice of the frozen constants.
        """
        n = self.size
        rows = [np.arange(n, dtype=np.int64)]
        for op in self.operations:
            r = op.arity
            if r == 0:
                continue
            t = op.array.reshape((n,) * r)
            for pos in range(r):
                moved = np.moveaxis(t, pos, -1).reshape(-1, n)
                rows.append(moved)
        return np.unique(np.vstack(rows), axis=0)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "size": self.size,
            "operations": [
                {"symbol": op.symbol, "arity": op.arity, "table": list(op.table)}
                for op in self.operations
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> FiniteAlgebra:
        try:
            ops = tuple(
                OperationTable(str(o["symbol"]), int(o["arity"]), tuple(o["table"]))
                for o in data["operations"]
            )
            return cls(str(data["name"]), int(data["size"]), ops)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed algebra description: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> FiniteAlgebra:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
        return cls.from_dict(data)


def load_algebra(path) -> FiniteAlgebra:
    with open(path) as fh:
        return FiniteAlgebra.from_json(fh.read())


def save_algebra(alg: FiniteAlgebra, path) -> None:
    with open(path, "w") as fh:
        fh.write(alg.to_json())
        fh.write("\n")


# --- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


Term = Var | App


def term_variables(t: Term) -> set[int]:
    if isinstance(t, Var):
        return {t.index}
    out = set()
    for a in t.args:
        out |= term_variables(a)
    return out


def term_depth(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    return 1 + max((term_depth(a) for a in t.args), default=0)


def check_term(alg: FiniteAlgebra, t: Term) -> None:
    if isinstance(t, Var):
        if t.index < 0:
            raise ArityError(f"negative variable index {t.index}")
        return
    op = alg.op(t.symbol)
    if len(t.args) != op.arity:
        raise SignatureError(
            f"{t.symbol!r} applied to {len(t.args)} arguments, arity is {op.arity}"
        )
    for a in t.args:
        check_term(alg, a)


def eval_term(alg: FiniteAlgebra, t: Term, env: Sequence[int]) -> int:
    """Value of ``t`` with variable ``i`` bound to ``env[i]``."""
    if isinstance(t, Var):
        if t.index >= len(env):
            raise ArityError(f"variable {t.index} unbound (environment has {len(env)} values)")
        return env[t.index]
    op = alg.op(t.symbol)
    if len(t.args) != op.arity:
        raise SignatureError(
            f"{t.symbol!r} applied to {len(t.args)} arguments, arity is {op.arity}"
        )
    idx = 0
    for a in t.args:
        idx = idx * alg.size + eval_term(alg, a, env)
    return op.table[idx]


def eval_term_array(alg: FiniteAlgebra, t: Term, env: Sequence[np.ndarray]) -> np.ndarray:
    """Vectorized :func:`eval_term`; ``env[i]`` are equal-shape integer arrays."""
    memo: dict = {}

    def go(s):
        key = id(s)
        if key in memo:
            return memo[key]
        if isinstance(s, Var):
            if s.index >= len(env):
                raise ArityError(f"variable {s.index} unbound")
            out = np.asarray(env[s.index], dtype=np.int64)
        else:
            op = alg.op(s.symbol)
            if len(s.args) != op.arity:
                raise SignatureError(f"{s.symbol!r} arity mismatch")
            if op.arity == 0:
                shape = np.shape(env[0]) if env else ()
                out = np.full(shape, op.table[0], dtype=np.int64)
            else:
                idx = 0
                for a in s.args:
                    idx = idx * alg.size + go(a)
                out = op.array[idx]
        memo[key] = out
        return out

    return go(t)


VAR_NAMES_4 = ("x", "y", "z", "u")


def term_to_sexpr(t: Term, names: Sequence[str] = VAR_NAMES_4) -> str:
    if isinstance(t, Var):
        return names[t.index] if t.index < len(names) else f"v{t.index}"
    if not t.args:
        return f"({t.symbol})"
    return "(" + " ".join([t.symbol] + [term_to_sexpr(a, names) for a in t.args]) + ")"


def parse_sexpr(text: str, names: Sequence[str] = VAR_NAMES_4) -> Term:
    """Parse a prefix term.

    Grammar::

        term  := VAR | "(" SYMBOL term* ")"
        VAR   := one of ``names`` or ``v<digits>``
        SYMBOL:= any token without whitespace or parentheses

    A bare token is always a variable; operation symbols (nullary ones too)
    only appear in head position, so ``(e)`` is the constant ``e``.
    """
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append((ch, i))
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append((text[i:j], i))
            i = j
    lookup = {name: k for k, name in enumerate(names)}
    pos = 0

    def var(tok, at):
        if tok in lookup:
            return Var(lookup[tok])
        if tok.startswith("v") and tok[1:].isdigit():
            return Var(int(tok[1:]))
        raise ParseError(f"unknown variable {tok!r}", at)

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of term", len(text))
        tok, at = tokens[pos]
        pos += 1
        if tok == ")":
            raise ParseError("unexpected ')'", at)
        if tok != "(":
            return var(tok, at)
        if pos >= len(tokens) or tokens[pos][0] in "()":
            raise ParseError("expected operation symbol", tokens[pos][1] if pos < len(tokens) else len(text))
        sym = tokens[pos][0]
        pos += 1
        args = []
        while True:
            if pos >= len(tokens):
                raise ParseError("missing ')'", len(text))
            if tokens[pos][0] == ")":
                pos += 1
                return App(sym, tuple(args))
            args.append(parse())

    t = parse()
    if pos != len(tokens):
        raise ParseError("trailing input after term", tokens[pos][1])
    return t


# --- function tables ---------------------------------------------------------


@dataclass(frozen=True)
class FunctionTable:
    """An m-ary operation on the universe, row-major like operation tables."""

    domain_arity: int
    table: tuple[int, ...]

    def __call__(self, *args: int) -> int:
        n = round(len(self.table) ** (1 / self.domain_arity))
        idx = 0
        for a in args:
            idx = idx * n + a
        return self.table[idx]


def projection_arrays(n: int, m: int) -> list[np.ndarray]:
    """``m`` arrays of length ``n**m``: coordinate ``i`` of each row-major tuple."""
    grid = np.indices((n,) * m).reshape(m, -1)
    return [grid[i].astype(np.int64) for i in range(m)]


def function_table(alg: FiniteAlgebra, t: Term, m: int) -> FunctionTable:
    vals = eval_term_array(alg, t, projection_arrays(alg.size, m))
    vals = np.broadcast_to(vals, (alg.size**m,))
    return FunctionTable(m, tuple(int(v) for v in vals))


# --- powers, closures, quotients --------------------------------------------


class PowerAlgebra(FiniteAlgebra):
    """Direct power; element ``(a_0, .., a_{m-1})`` is encoded as ``sum(a_i * n**i)``."""

    def __init__(self, base: FiniteAlgebra, m: int, name: str, size: int, operations):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", m)
        super().__init__(name, size, operations)

    def encode(self, vec: Sequence[int]) -> int:
        n = self.base.size
        if len(vec) != self.exponent:
            raise ArityError(f"expected a {self.exponent}-tuple")
        return sum(int(a) * n**i for i, a in enumerate(vec))

    def decode(self, x: int) -> tuple[int, ...]:
        n = self.base.size
        out = []
        for _ in range(self.exponent):
            x, d = divmod(x, n)
            out.append(d)
        return tuple(out)


def power(alg: FiniteAlgebra, m: int, limit: int = POWER_TABLE_LIMIT) -> PowerAlgebra:
    if m < 1:
        raise ValueError("exponent must be at least 1")
    n = alg.size
    N = n**m
    for op in alg.operations:
        if N**op.arity > limit:
            raise CapacityError(
                f"power {alg.name}^{m}: table of {op.symbol!r} needs {N**op.arity} entries, limit {limit}",
                bound=N**op.arity,
                limit=limit,
            )
    digits = np.array([[(x // n**i) % n for i in range(m)] for x in range(N)], dtype=np.int64)
    weights = n ** np.arange(m, dtype=np.int64)
    ops = []
    for op in alg.operations:
        r = op.arity
        if r == 0:
            c = op.table[0]
            ops.append(OperationTable(op.symbol, 0, (int(sum(c * n**i for i in range(m))),)))
            continue
        grid = np.indices((N,) * r).reshape(r, -1)
        idx = np.zeros((grid.shape[1], m), dtype=np.int64)
        for i in range(r):
            idx = idx * n + digits[grid[i]]
        vals = op.array[idx] @ weights
        ops.append(OperationTable(op.symbol, r, tuple(vals.tolist())))
    return PowerAlgebra(alg, m, f"{alg.name}^{m}", N, tuple(ops))


def subuniverse_closure(alg: FiniteAlgebra, generators: Iterable[int]) -> frozenset[int]:
    """Least subset containing ``generators`` closed under every basic operation."""
    from .kernels import closure

    gens = sorted(set(int(g) for g in generators))
    for g in gens:
        if not 0 <= g < alg.size:
            raise ValueError(f"generator {g} outside universe of size {alg.size}")
    rows = closure(alg, np.asarray(gens, dtype=np.int64).reshape(-1, 1), width=1)
    return frozenset(int(v) for v in rows[:, 0])


def check_congruence(alg: FiniteAlgebra, rep: Sequence[int]) -> None:
    """Raise :class:`NotACongruenceError` naming a violated operation and witness."""
    n = alg.size
    rep = np.asarray(rep, dtype=np.int64)
    for op in alg.operations:
        r = op.arity
        if r == 0:
            continue
        t = op.array.reshape((n,) * r)
        for pos in range(r):
            moved = np.moveaxis(t, pos, -1).reshape(-1, n)
            # a ~ rep[a] must map to related values
            bad = rep[moved] != rep[moved[:, rep]]
            if bad.any():
                row, a = map(int, np.argwhere(bad)[0])
                b = int(rep[a])
                rest = np.unravel_index(row, (n,) * (r - 1)) if r > 1 else ()
                args_a = list(int(v) for v in rest)
                args_b = list(args_a)
                args_a.insert(pos, a)
                args_b.insert(pos, b)
                raise NotACongruenceError(
                    f"not a congruence: {op.symbol}{tuple(args_a)} = {int(moved[row, a])} and "
                    f"{op.symbol}{tuple(args_b)} = {int(moved[row, b])} are in different blocks",
                    symbol=op.symbol,
                    witness=(tuple(args_a), tuple(args_b)),
                )


def quotient(alg: FiniteAlgebra, pi) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    """Quotient by a congruence, plus the canonical map element -> block index."""
    rep = pi.rep
    check_congruence(alg, rep)
    reps = sorted(set(rep))
    block_of = {r: i for i, r in enumerate(reps)}
    f = tuple(block_of[rep[a]] for a in range(alg.size))
    m = len(reps)
    ops = []
    for op in alg.operations:
        r = op.arity
        if r == 0:
            ops.append(OperationTable(op.symbol, 0, (f[op.table[0]],)))
            continue
        grid = np.indices((m,) * r).reshape(r, -1)
        idx = 0
        reps_arr = np.asarray(reps, dtype=np.int64)
        for i in range(r):
            idx = idx * alg.size + reps_arr[grid[i]]
        fa = np.asarray(f, dtype=np.int64)
        ops.append(OperationTable(op.symbol, r, tuple(fa[op.array[idx]].tolist())))
    return FiniteAlgebra(f"{alg.name}/{pi}", m, tuple(ops)), f


# --- clone of term operations ------------------------------------------------


@dataclass
class TermClosure:
    """Layered closure of the ``m`` projections under the basic operations.

    Tables are rows of ``self.tables`` (shape ``(count, n**m)``); row ``i``
    was first found as ``self.terms[i]``. :meth:`step` processes one element
    of the worklist: every operation applied to argument tuples whose largest
    index is that element. Because new rows are only appended, elements are
    discovered layer by layer and each witness term has minimal depth among
    the ones the search produced.
    """

    alg: FiniteAlgebra
    m: int
    cap: int = 1_000_000
    tables: np.ndarray = field(init=False, repr=False)
    terms: list = field(init=False, repr=False)
    count: int = field(init=False, default=0)
    done: int = field(init=False, default=0)
    truncated: bool = field(init=False, default=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.cap < self.m:
            raise ValueError("cap must be at least m")
        n = self.alg.size
        self.width = n**self.m
        self.dtype = np.uint8 if n <= 256 else np.int64
        self.tables = np.zeros((64, self.width), dtype=self.dtype)
        self.terms = []
        self._index: dict[bytes, int] = {}
        self._ops = [op for op in self.alg.operations if op.arity > 0]
        for i, proj in enumerate(projection_arrays(n, self.m)):
            self._add(proj, Var(i))
        for op in self.alg.operations:
            if op.arity == 0:
                self._add(np.full(self.width, op.table[0]), App(op.symbol, ()))

    @property
    def complete(self) -> bool:
        return not self.truncated and self.done >= self.count

    def _add(self, row, term) -> bool:
        row = np.ascontiguousarray(row, dtype=self.dtype)
        key = row.tobytes()
        if key in self._index:
            return False
        if self.count >= self.cap:
            self.truncated = True
            return False
        if self.count == len(self.tables):
            grown = np.zeros((2 * len(self.tables), self.width), dtype=self.dtype)
            grown[: self.count] = self.tables[: self.count]
            self.tables = grown
        self.tables[self.count] = row
        self.terms.append(term)
        self._index[key] = self.count
        self.count += 1
        return True

    def step(self) -> list[int]:
        """Expand one worklist element; return indices of new tables."""
        if self.done >= self.count or self.truncated:
            return []
        p = self.done
        n = self.alg.size
        start = self.count
        F = self.tables[: p + 1].astype(np.int64)
        for op in self._ops:
            for tup in _tuples_with_max(p, op.arity):
                idx = 0
                for comp in tup:
                    idx = idx * n + F[comp]
                res = np.ascontiguousarray(op.array[idx], dtype=self.dtype)
                for row_i in range(res.shape[0]):
                    row = res[row_i]
                    if row.tobytes() in self._index:
                        continue
                    args = tuple(self.terms[int(c[row_i])] for c in tup)
                    self._add(row, App(op.symbol, args))
                    if self.truncated:
                        return list(range(start, self.count))
        self.done = p + 1
        return list(range(start, self.count))

    def run(self) -> None:
        while self.done < self.count and not self.truncated:
            self.step()

    def function_tables(self) -> list[FunctionTable]:
        return [FunctionTable(self.m, tuple(int(v) for v in row)) for row in self.tables[: self.count]]


def _tuples_with_max(p: int, r: int):
    """Index arrays (broadcastable) enumerating r-tuples over 0..p with max exactly p.

    Split on the first position ``q`` holding ``p``: positions before it
    range over ``0..p-1``, positions after it over ``0..p``.
    """
    for q in range(r):
        if q > 0 and p == 0:
            continue
        shapes = []
        for i in range(r):
            if i < q:
                shapes.append(np.arange(p))
            elif i == q:
                shapes.append(np.array([p]))
            else:
                shapes.append(np.arange(p + 1))
        grids = np.meshgrid(*shapes, indexing="ij")
        yield tuple(g.reshape(-1) for g in grids)


@dataclass
class TermClosureResult:
    tables: list[FunctionTable]
    terms: list
    complete: bool


def term_operations_closure(alg: FiniteAlgebra, m: int, cap: int = 1_000_000) -> TermClosureResult:
    """All m-ary term operations of ``alg`` (or the first ``cap`` found)."""
    tc = TermClosure(alg, m, cap)
    tc.run()
    return TermClosureResult(tc.function_tables(), list(tc.terms), tc.complete)
