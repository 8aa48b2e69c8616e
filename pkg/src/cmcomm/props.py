"""Theorem harness: exhaustive checks of commutator properties on small algebras.

Every check returns a :class:`TheoremReport`. Checks whose statements are
only known under congruence modularity need a verified Day chain; without
one the report is marked not applicable instead of passing.
"""

from __future__ import annotations

import copy
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import FiniteAlgebra, eval_term, quotient
from .commutator import (
    CommutatorEngine,
    centrality,
    commutator_by_lattice_scan,
    two_term_centrality,
)
from .congruences import Partition, cg, join, join_all, meet_all
from .cubes import _generator_rows, edge_violations, lex_bases, line_indices
from .dayterms import DayChain, find_day_chain, generator_set, rotate_rows, shift_pair_test, verify_day_chain

THEOREMS = (
    "basic",
    "oracle",
    "symmetry",
    "coordinates",
    "additivity",
    "homomorphism",
    "homomorphism-image",
    "homomorphism-reduction",
    "two-term",
    "shift-pairs",
    "shifting-lemma",
    "rotation",
    "tree",
    "generators",
    "edges",
)

# theorems that need a Day chain
MODULAR_ONLY = frozenset(THEOREMS) - {"basic", "oracle", "edges"}


@dataclass
class Failure:
    T: tuple[str, ...]
    details: str

    def to_dict(self) -> dict:
        return {"T": list(self.T), "details": self.details}


@dataclass
class TheoremReport:
    theorem: str
    algebra: str
    instances: int = 0
    failures: list[Failure] = field(default_factory=list)
    applicable: bool = True
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.applicable and not self.failures

    def fail(self, T: Sequence[Partition], details: str) -> None:
        self.failures.append(Failure(tuple(str(t) for t in T), details))

    def status(self) -> str:
        if not self.applicable:
            return "n/a"
        return "pass" if not self.failures else "FAIL"

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "algebra": self.algebra,
            "instances": self.instances,
            "failures": [f.to_dict() for f in self.failures],
            "applicable": self.applicable,
            "passed": self.passed,
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def summary(self) -> str:
        line = f"{self.algebra:14s} {self.theorem:24s} {self.status():5s} instances={self.instances}"
        if self.failures:
            line += f" failures={len(self.failures)}"
        if self.note:
            line += f" ({self.note})"
        return line


def default_kmax(num_congruences: int) -> int:
    return 3 if num_congruences <= 5 else 2


class Harness:
    """Shared state for one algebra: the commutator engine and the Day chain."""

    def __init__(
        self,
        alg: FiniteAlgebra,
        chain: DayChain | None = None,
        kmax: int | None = None,
        cap: int = 1_000_000,
        engine: CommutatorEngine | None = None,
    ):
        self.alg = alg
        self.engine = engine or CommutatorEngine(alg)
        self.lattice = self.engine.lattice
        self.cons = list(self.lattice.elements)
        self.kmax = default_kmax(len(self.cons)) if kmax is None else kmax
        self.note = ""
        if chain is not None:
            ok, bad = verify_day_chain(alg, chain)
            if not ok:
                raise ValueError(f"supplied chain fails identity ({bad[0]}) at e={bad[1]}, values {bad[2]}")
            self.chain = chain
        else:
            found = find_day_chain(alg, cap)
            self.chain = found.chain
            if found.chain is None:
                self.note = "no Day chain: variety not congruence modular" if found.complete else (
                    "no Day chain within the clone cap: modularity not established"
                )
        self._quotients: dict[Partition, tuple[CommutatorEngine, tuple[int, ...]]] = {}

    @property
    def modular(self) -> bool:
        return self.chain is not None

    def sequences(self, kmin: int = 1, kmax: int | None = None) -> Iterable[tuple[Partition, ...]]:
        kmax = self.kmax if kmax is None else kmax
        for k in range(kmin, kmax + 1):
            yield from itertools.product(self.cons, repeat=k)

    def comm(self, T, pivot=None) -> Partition:
        return self.engine.commutator(T, pivot)

    def report(self, theorem: str) -> TheoremReport:
        rep = TheoremReport(theorem, self.alg.name)
        if theorem in MODULAR_ONLY and not self.modular:
            rep.applicable = False
            rep.note = self.note
        return rep

    def quotient_engine(self, pi: Partition):
        if pi not in self._quotients:
            q, f = quotient(self.alg, pi)
            self._quotients[pi] = (CommutatorEngine(q), f)
        return self._quotients[pi]


def _harness(alg, harness, kmax=None) -> Harness:
    if harness is None:
        return Harness(alg, kmax=kmax)
    if kmax is not None and kmax != harness.kmax:
        # same caches, different depth
        harness = copy.copy(harness)
        harness.kmax = kmax
    return harness


def _image(p: Partition, f: Sequence[int], m: int) -> Partition:
    """Image of a partition above ker f along f."""
    return Partition.from_pairs(m, [(f[a], f[p.rep[a]]) for a in range(p.size)])


def _preimage(q: Partition, f: Sequence[int]) -> Partition:
    return Partition.from_pairs(len(f), [(a, b) for a in range(len(f)) for b in range(a) if q.relates(f[a], f[b])])


# --- properties holding for every algebra ----------------------------------------


def check_basic_properties(alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None) -> TheoremReport:
    """Meet bound, monotonicity and the nested inequality, exhaustively."""
    h = _harness(alg, harness, kmax)
    rep = h.report("basic")
    n = alg.size
    for k in range(1, h.kmax + 1):
        seqs = list(itertools.product(h.cons, repeat=k))
        for T in seqs:
            c = h.comm(T)
            rep.instances += 1
            if not c <= meet_all(T, n):
                rep.fail(T, f"[T] = {c} not below the meet")
            if k >= 2:
                rep.instances += 1
                shorter = h.comm(T[1:])
                if not c <= shorter:
                    rep.fail(T, f"[T] = {c} not below [T without first] = {shorter}")
        for T, U in itertools.product(seqs, repeat=2):
            if all(a <= b for a, b in zip(T, U)):
                rep.instances += 1
                if not h.comm(T) <= h.comm(U):
                    rep.fail(T, f"monotonicity fails against {[str(u) for u in U]}")
    return rep


def check_oracle_equivalence(alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None) -> TheoremReport:
    """Fixpoint commutator against the meet over the whole congruence lattice."""
    h = _harness(alg, harness, kmax)
    rep = h.report("oracle")
    for T in h.sequences():
        rep.instances += 1
        fix = h.comm(T)
        scan = commutator_by_lattice_scan(alg, T, h.lattice, h.engine.matrices(T))
        if fix != scan:
            rep.fail(T, f"fixpoint {fix} vs lattice scan {scan}")
    return rep


def check_edge_invariants(alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None) -> TheoremReport:
    """Every j-edge of every cube in M(T) is a theta_j-pair, and the generators are members."""
    h = _harness(alg, harness, kmax)
    rep = h.report("edges")
    for T in h.sequences():
        rep.instances += 1
        M = h.engine.matrices(T)
        bad = edge_violations(M, T)
        if bad:
            rep.fail(T, f"{bad} edges outside their congruence")
        if not M.contains_rows(_generator_rows(T)).all():
            rep.fail(T, "a one-coordinate generator is missing from M(T)")
    return rep


# --- properties that need modularity ----------------------------------------------


def check_symmetry(alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None) -> TheoremReport:
    """[sigma T] = [T] for every permutation sigma."""
    h = _harness(alg, harness, kmax)
    rep = h.report("symmetry")
    if not rep.applicable:
        return rep
    for T in h.sequences(2):
        c = h.comm(T)
        for perm in itertools.permutations(range(len(T))):
            rep.instances += 1
            S = tuple(T[i] for i in perm)
            if h.comm(S) != c:
                rep.fail(T, f"permutation {perm} gives {h.comm(S)} instead of {c}")
    return rep


def check_coordinate_independence(
    alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None
) -> TheoremReport:
    """The least delta centralizing at j does not depend on j."""
    h = _harness(alg, harness, kmax)
    rep = h.report("coordinates")
    if not rep.applicable:
        return rep
    for T in h.sequences(2):
        c = h.comm(T)
        for j in range(len(T) - 1):
            rep.instances += 1
            cj = h.comm(T, pivot=j)
            if cj != c:
                rep.fail(T, f"pivot {j} gives {cj}, pivot {len(T) - 1} gives {c}")
    return rep


def check_additivity(alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None) -> TheoremReport:
    """[theta..., join of gammas] = join of [theta..., gamma_i].

    Joins range over all pairs of congruences, and all triples when the
    lattice has at most five elements.
    """
    h = _harness(alg, harness, kmax)
    rep = h.report("additivity")
    if not rep.applicable:
        return rep
    sizes = (2, 3) if len(h.cons) <= 5 else (2,)
    for k in range(1, h.kmax + 1):
        for prefix in itertools.product(h.cons, repeat=k - 1):
            for size in sizes:
                for gammas in itertools.combinations_with_replacement(h.cons, size):
                    rep.instances += 1
                    whole = h.comm(prefix + (join_all(gammas, alg.size),))
                    parts = join_all((h.comm(prefix + (g,)) for g in gammas), alg.size)
                    if whole != parts:
                        rep.fail(
                            prefix + (join_all(gammas, alg.size),),
                            f"gammas {[str(g) for g in gammas]}: bracket of join {whole}, join of brackets {parts}",
                        )
    return rep


def check_homomorphism_property(
    alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None
) -> list[TheoremReport]:
    """Three formulations, reported separately, for every pi and every T.

    * ``homomorphism``: [T] v pi = f^-1([f(T v pi)]).
    * ``homomorphism-image``: f([T] v pi) = [f(T)] whenever every theta_i >= pi.
    * ``homomorphism-reduction``: [T] v pi = [T v pi] v pi.

    Here f is the canonical map onto A/pi.
    """
    h = _harness(alg, harness, kmax)
    stmt = h.report("homomorphism")
    image = h.report("homomorphism-image")
    red = h.report("homomorphism-reduction")
    if not stmt.applicable:
        return [stmt, image, red]
    for pi in h.cons:
        qeng, f = h.quotient_engine(pi)
        m = qeng.alg.size
        for T in h.sequences():
            left = join(h.comm(T), pi)
            Tpi = tuple(join(t, pi) for t in T)
            fT = tuple(_image(t, f, m) for t in Tpi)
            qc = qeng.commutator(fT)
            stmt.instances += 1
            right = _preimage(qc, f)
            if left != right:
                stmt.fail(T, f"pi = {pi}: [T] v pi = {left}, pullback of quotient bracket = {right}")
            red.instances += 1
            other = join(h.comm(Tpi), pi)
            if left != other:
                red.fail(T, f"pi = {pi}: [T] v pi = {left}, [T v pi] v pi = {other}")
            if all(pi <= t for t in T):
                image.instances += 1
                pushed = _image(left, f, m)
                if pushed != qc:
                    image.fail(T, f"pi = {pi}: f([T] v pi) = {pushed}, [f(T)] = {qc}")
    return [stmt, image, red]


def check_two_term_equivalence(
    alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None
) -> TheoremReport:
    """C(T; delta) iff C_tt(T; delta) for all delta, and the two least fixpoints agree."""
    h = _harness(alg, harness, kmax)
    rep = h.report("two-term")
    if not rep.applicable:
        return rep
    for T in h.sequences():
        M = h.engine.matrices(T)
        k = len(T)
        for delta in h.cons:
            rep.instances += 1
            a = centrality(T, k - 1, delta, M).holds
            b = two_term_centrality(T, delta, M).holds
            if a != b:
                rep.fail(T, f"delta = {delta}: centrality {a}, two-term centrality {b}")
        rep.instances += 1
        tt, c = h.engine.two_term(T), h.comm(T)
        if tt != c:
            rep.fail(T, f"two-term commutator {tt}, commutator {c}")
    return rep


def check_shift_pairs(alg: FiniteAlgebra, harness: Harness | None = None) -> TheoremReport:
    """For (b, d) in delta: (a, c) in delta iff every (m_e(a,a,c,c), m_e(a,b,d,c)) is."""
    h = _harness(alg, harness)
    rep = h.report("shift-pairs")
    if not rep.applicable:
        return rep
    tabs = h.chain.tables(alg)
    n = alg.size
    for delta in h.cons:
        for a, b, c, d in itertools.product(range(n), repeat=4):
            if not delta.relates(b, d):
                continue
            rep.instances += 1
            if shift_pair_test(alg, h.chain, delta, a, b, c, d, tables=tabs) != delta.relates(a, c):
                rep.fail((delta,), f"(a, b, c, d) = {(a, b, c, d)}")
    return rep


def check_shifting_lemma(alg: FiniteAlgebra, harness: Harness | None = None) -> TheoremReport:
    """theta_1: a-b, c-d; theta_2: a-c, b-d; gamma >= theta_1 ^ theta_2 and (b, d) in gamma imply (a, c) in gamma."""
    h = _harness(alg, harness)
    rep = h.report("shifting-lemma")
    if not rep.applicable:
        return rep
    n = alg.size
    q = np.indices((n,) * 4).reshape(4, -1)
    a, b, c, d = q
    for t1, t2 in itertools.product(h.cons, repeat=2):
        r1, r2 = t1.array, t2.array
        config = (r1[a] == r1[b]) & (r1[c] == r1[d]) & (r2[a] == r2[c]) & (r2[b] == r2[d])
        low = t1 & t2
        for gamma in h.cons:
            if not low <= gamma:
                continue
            g = gamma.array
            hyp = config & (g[b] == g[d])
            rep.instances += int(hyp.sum())
            bad = np.flatnonzero(hyp & (g[a] != g[c]))
            if len(bad):
                i = bad[0]
                rep.fail((t1, t2, gamma), f"(a, b, c, d) = {tuple(int(x[i]) for x in q)}")
    return rep


def _chain_tables_scalar(alg: FiniteAlgebra, chain: DayChain) -> np.ndarray:
    """Chain tables by scalar term evaluation; an independent route to ``chain.tables``."""
    n = alg.size
    out = np.empty((chain.n + 1, n**4), dtype=np.int64)
    for e, t in enumerate(chain.terms):
        for i, env in enumerate(itertools.product(range(n), repeat=4)):
            out[e, i] = eval_term(alg, t, env)
    return out


def check_rotation_lemma(alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None) -> TheoremReport:
    """Shift rotations: square formula, membership in M(T) and delta-pair transfer.

    For every T with k >= 2, every j != l, every e and every h in M(T):

    1. each (j, l)-square [[r, s], [u, v]] becomes [[s, s], [m_e(s,r,u,v), m_e(s,s,v,v)]],
       computed here from scalar term evaluation over the squares listing;
    2. the rotated cube lies in M(T);
    3. if every (j)-supporting line of h is a delta-pair, so is every
       (l)-supporting line of the rotated cube;
    4. if the (j)-supporting line in the (j, l)-pivot square is a delta-pair,
       the (j)-pivot line of h is a delta-pair iff the (l)-pivot line of
       every rotation is.
    """
    h = _harness(alg, harness, kmax)
    rep = h.report("rotation")
    if not rep.applicable:
        return rep
    n = alg.size
    tabs = h.chain.tables(alg)
    scalar = _chain_tables_scalar(alg, h.chain)
    if not (tabs == scalar).all():
        rep.fail((), "vectorized and scalar chain evaluation disagree")
    for T in h.sequences(2):
        M = h.engine.matrices(T)
        k = len(T)
        rows = M.rows
        full = (1 << k) - 1
        for j, l in itertools.permutations(range(k), 2):
            bj, bl = 1 << j, 1 << l
            rotated = [rotate_rows(rows, j, l, tabs[e], n) for e in range(len(tabs))]
            for e, R in enumerate(rotated):
                rep.instances += len(rows)
                for base in lex_bases(k, (j, l)):
                    r, s = rows[:, base], rows[:, base | bl]
                    u, v = rows[:, base | bj], rows[:, base | bj | bl]
                    want = (s, s, scalar[e, ((s * n + r) * n + u) * n + v], scalar[e, ((s * n + s) * n + v) * n + v])
                    got = (R[:, base], R[:, base | bl], R[:, base | bj], R[:, base | bj | bl])
                    if not all((w == g).all() for w, g in zip(want, got)):
                        rep.fail(T, f"square formula at (j, l) = {(j, l)}, e = {e}, base {base}")
                        break
                missing = np.flatnonzero(~M.contains_rows(R))
                if len(missing):
                    rep.fail(T, f"rotation (j, l, e) = {(j, l, e)} leaves M(T) at {rows[missing[0]].tolist()}")
            jlo, jhi, jplo, jphi = line_indices(k, j)
            llo, lhi, lplo, lphi = line_indices(k, l)
            pivot_base = full ^ bj ^ bl  # (j, l)-pivot square
            for delta in h.cons:
                g = delta.array
                G = g[rows]
                hyp2 = (G[:, jlo] == G[:, jhi]).all(axis=1)
                hyp3 = G[:, pivot_base] == G[:, pivot_base | bj]
                jpivot = G[:, jplo] == G[:, jphi]
                all_l = np.ones(len(rows), dtype=bool)
                for e, R in enumerate(rotated):
                    GR = g[R]
                    lsupp = (GR[:, llo] == GR[:, lhi]).all(axis=1)
                    bad = np.flatnonzero(hyp2 & ~lsupp)
                    if len(bad):
                        rep.fail(T, f"delta = {delta}, (j, l, e) = {(j, l, e)}: supporting lines not carried over")
                    all_l &= GR[:, lplo] == GR[:, lphi]
                bad = np.flatnonzero(hyp3 & (jpivot != all_l))
                if len(bad):
                    rep.fail(T, f"delta = {delta}, (j, l) = {(j, l)}: pivot transfer fails for {rows[bad[0]].tolist()}")
    return rep


def check_tree_lemma(alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None) -> TheoremReport:
    """Along every tree path d = (d_0..d_i), the (i+1)-supporting lines of h^d
    at f with f(j) = 0 for some j <= i are constant pairs."""
    h = _harness(alg, harness, kmax)
    rep = h.report("tree")
    if not rep.applicable:
        return rep
    n = alg.size
    tabs = h.chain.tables(alg)
    for T in h.sequences(2):
        k = len(T)
        M = h.engine.matrices(T)

        def walk(rows, depth, path):
            if depth == k - 1:
                return
            i = depth
            for e in range(len(tabs)):
                nxt = np.unique(rotate_rows(rows, i, i + 1, tabs[e], n), axis=0)
                bit = 1 << (i + 1)
                low_mask = (1 << (i + 1)) - 1
                bases = [f for f in range(1 << k) if not f & bit and (f & low_mask) != low_mask]
                rep.instances += len(nxt)
                lo = np.array(bases, dtype=np.int64)
                if not (nxt[:, lo] == nxt[:, lo | bit]).all():
                    rep.fail(T, f"tree address {path + (e,)}: a supporting line is not constant")
                walk(nxt, depth + 1, path + (e,))

        walk(M.rows, 0, ())
    return rep


def check_generators(alg: FiniteAlgebra, kmax: int | None = None, harness: Harness | None = None) -> TheoremReport:
    """Cg(X(T)) = [T]."""
    h = _harness(alg, harness, kmax)
    rep = h.report("generators")
    if not rep.applicable:
        return rep
    for T in h.sequences():
        rep.instances += 1
        X = generator_set(alg, h.engine.matrices(T), h.chain)
        got, want = cg(alg, X), h.comm(T)
        if got != want:
            rep.fail(T, f"Cg(X(T)) = {got}, [T] = {want}")
    return rep


CHECKS = {
    "basic": check_basic_properties,
    "oracle": check_oracle_equivalence,
    "edges": check_edge_invariants,
    "symmetry": check_symmetry,
    "coordinates": check_coordinate_independence,
    "additivity": check_additivity,
    "homomorphism": check_homomorphism_property,
    "two-term": check_two_term_equivalence,
    "shift-pairs": check_shift_pairs,
    "shifting-lemma": check_shifting_lemma,
    "rotation": check_rotation_lemma,
    "tree": check_tree_lemma,
    "generators": check_generators,
}


def run_checks(
    alg: FiniteAlgebra,
    names: Iterable[str] | None = None,
    kmax: int | None = None,
    chain: DayChain | None = None,
    cap: int = 1_000_000,
) -> list[TheoremReport]:
    """Run the named checks (all by default) with one shared harness."""
    harness = Harness(alg, chain=chain, kmax=kmax, cap=cap)
    out: list[TheoremReport] = []
    for name in names or CHECKS:
        fn = CHECKS[name]
        res = fn(alg, harness=harness)
        out.extend(res if isinstance(res, list) else [res])
    return out

