import itertools
import time

import pytest

from cmcomm import corpus
from cmcomm.algebra import FiniteAlgebra, Var, eval_term
from cmcomm.congruences import Partition, cg
from cmcomm.cubes import Cube, generate_matrix_algebra
from cmcomm.dayterms import (
    DayChain,
    find_day_chain,
    generator_set,
    load_chain,
    rotate_along_tree,
    save_chain,
    shift_pair_test,
    shift_rotation,
    tree_leaves,
    verify_day_chain,
)
from cmcomm.errors import ArityError, ContractError, CoordinateError, TreeError

from conftest import MODULAR

THETA = Partition.parse("|0 2|1 3|")


@pytest.mark.parametrize("name", MODULAR)
def test_search_finds_valid_chain(name, algebras):
    res = find_day_chain(algebras[name])
    assert res.chain is not None
    ok, info = verify_day_chain(algebras[name], res.chain)
    assert ok, info


@pytest.mark.parametrize("name", MODULAR)
def test_frozen_chains_verify(name, algebras, chains):
    start = time.perf_counter()
    ok, info = verify_day_chain(algebras[name], chains[name])
    assert ok, info
    assert time.perf_counter() - start <= 1.0


def test_semilattice_has_no_chain(algebras):
    res = find_day_chain(algebras["semilattice2"])
    assert res.chain is None and res.complete
    assert res.clone_size == 15


def test_trivial_chain():
    res = find_day_chain(corpus.build("trivial"))
    assert [t for t in res.chain.terms] == [Var(0), Var(3)]


def test_verify_reports_identity_four():
    # no operations: the clone is the projections, and [x, u] breaks the (x, x, u, u) link
    bare = FiniteAlgebra("bare", 2, ())
    ok, (identity, e, values) = verify_day_chain(bare, DayChain.from_list(["x", "u"]))
    assert not ok
    assert (identity, e, values) == (4, 0, (0, 1))


def test_verify_reports_identity_one(algebras):
    ok, (identity, e, values) = verify_day_chain(algebras["z4"], DayChain.from_list(["y", "u"]))
    assert not ok and identity == 1 and e == 0


def test_chain_rejects_fifth_variable(algebras):
    with pytest.raises(ArityError):
        DayChain.from_list(["x", "v4"]).tables(algebras["z4"])


def test_chain_json_round_trip(chains, tmp_path):
    ch = chains["z4"]
    assert DayChain.from_json(ch.to_json()) == ch
    path = tmp_path / "c.json"
    save_chain(ch, path)
    assert load_chain(path) == ch
    with pytest.raises(ValueError):
        DayChain.from_list(["x"])


# --- shift pairs ---------------------------------------------------------------


def test_shift_pair_examples(algebras, chains):
    z4, ch = algebras["z4"], chains["z4"]
    assert shift_pair_test(z4, ch, THETA, 0, 1, 2, 3)
    assert not shift_pair_test(z4, ch, THETA, 0, 1, 1, 3)
    with pytest.raises(ContractError):
        shift_pair_test(z4, ch, THETA, 0, 0, 1, 1)
    assert shift_pair_test(z4, ch, Partition.equality(4), 2, 3, 2, 3)


@pytest.mark.parametrize("name", ["z4", "s3", "z4ring", "z2xz2"])
def test_shift_pairs_match_delta(name, algebras, chains, lattices):
    alg, ch = algebras[name], chains[name]
    tabs = ch.tables(alg)
    for delta in lattices[name]:
        for a, c in itertools.product(range(alg.size), repeat=2):
            for b, d in delta.pairs():
                assert shift_pair_test(alg, ch, delta, a, b, c, d, tabs) == delta.relates(a, c)


# --- rotations -----------------------------------------------------------------


def test_rotation_of_constant(algebras, chains):
    for e in range(chains["s3"].n + 1):
        h = Cube(2, (4, 4, 4, 4))
        assert shift_rotation(algebras["s3"], h, 0, 1, e, chains["s3"]) == h


def test_rotation_z2(algebras, chains):
    h = Cube.from_lex(2, [0, 1, 0, 1])
    got = shift_rotation(algebras["z2"], h, 0, 1, 0, chains["z2"])
    assert got.lex() == (1, 1, 1, 1)


def test_rotation_z4_formula(algebras, chains):
    alg, ch = algebras["z4"], chains["z4"]
    h = Cube.parse("[0,1,2,3]")
    r, s, u, v = h.lex()
    for e, t in enumerate(ch.terms):
        got = shift_rotation(alg, h, 0, 1, e, ch)
        # rows [[r, s], [u, v]] -> [[s, s], [m(s, r, u, v), m(s, s, v, v)]]
        want = (s, s, eval_term(alg, t, (s, r, u, v)), eval_term(alg, t, (s, s, v, v)))
        assert got.lex() == want


def test_rotation_errors(algebras, chains):
    h = Cube.parse("[0,1,2,3]")
    with pytest.raises(CoordinateError):
        shift_rotation(algebras["z4"], h, 0, 0, 0, chains["z4"])
    with pytest.raises(ValueError):
        shift_rotation(algebras["z4"], h, 0, 1, 99, chains["z4"])


def test_tree_walk(algebras, chains):
    alg, ch = algebras["z4"], chains["z4"]
    h = Cube.from_lex(3, range(8))
    h = Cube(3, tuple(v % 4 for v in h.entries))
    assert rotate_along_tree(alg, h, (), ch) == h
    one = rotate_along_tree(alg, h, (1,), ch)
    assert one == shift_rotation(alg, h, 0, 1, 1, ch)
    two = rotate_along_tree(alg, h, (1, 2), ch)
    assert two == shift_rotation(alg, one, 1, 2, 2, ch)
    with pytest.raises(TreeError):
        rotate_along_tree(alg, h, (0, 0, 0), ch)
    with pytest.raises(TreeError):
        rotate_along_tree(alg, h, (9,), ch)
    assert len(list(tree_leaves(3, ch.n))) == (ch.n + 1) ** 2


# --- generators of the commutator ---------------------------------------------


def test_generators_all_delta(algebras, chains):
    alg = algebras["s3"]
    eq = Partition.equality(6)
    M = generate_matrix_algebra(alg, (eq, eq))
    assert generator_set(alg, M, chains["s3"]) == {(a, a) for a in range(6)}


def test_generators_z4_ring(z4ring, chains):
    M = generate_matrix_algebra(z4ring, (Partition.full(4), THETA))
    assert cg(z4ring, generator_set(z4ring, M, chains["z4ring"])) == THETA


def test_generators_s3(algebras, chains):
    alg = algebras["s3"]
    one = Partition.full(6)
    M = generate_matrix_algebra(alg, (one, one))
    X = generator_set(alg, M, chains["s3"])
    assert cg(alg, X) == Partition.parse("|0 1 2|3 4 5|")
    # every generator lies in the meet of T
    assert all(one.relates(a, b) for a, b in X)


def test_generator_rows_are_pivots(algebras, chains):
    alg, ch = algebras["z4"], chains["z4"]
    M = generate_matrix_algebra(alg, (THETA, Partition.full(4)))
    X = generator_set(alg, M, ch)
    want = set()
    for h in M:
        for d in tree_leaves(2, ch.n):
            g = rotate_along_tree(alg, h, d, ch)
            want.add((g.entries[1], g.entries[3]))
    assert X == want
    assert all(THETA.relates(a, b) for a, b in X)


def test_sampled_generators_are_a_subset(algebras, chains):
    alg = algebras["s3"]
    one = Partition.full(6)
    M = generate_matrix_algebra(alg, (one, one, one))
    full = generator_set(alg, M, chains["s3"])
    part = generator_set(alg, M, chains["s3"], sample=3, seed=1)
    assert part and part <= full
