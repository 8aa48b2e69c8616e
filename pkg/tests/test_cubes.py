import itertools

import numpy as np
import pytest

from cmcomm.congruences import Partition
from cmcomm.cubes import (
    Cube,
    MatrixSet,
    classify,
    cube_bits,
    edge_violations,
    generate_matrix_algebra,
    lex_order,
    lines,
    one_coordinate_generators,
    squares,
)
from cmcomm.errors import CapacityError, CoordinateError, NotACongruenceError, ParseError, UniverseError

import oracles

ONE2 = Partition.full(2)


def test_lex_order():
    assert lex_order(2) == [0, 2, 1, 3]
    assert lex_order(1) == [0, 1]
    assert sorted(lex_order(3)) == list(range(8))


def test_text_form_is_square_rows():
    c = Cube.parse("[0,1,2,3]")
    # [[r, s], [u, v]] = [[0, 1], [2, 3]] for coordinates (0, 1)
    (sq,) = squares(c, 0, 1)
    assert sq.rows() == [[0, 1], [2, 3]]
    assert c.to_text() == "[0,1,2,3]"
    assert Cube.parse(c.to_text()) == c


@pytest.mark.parametrize("bad", ["0,1", "[0,1,2]", "[a,b]"])
def test_cube_parse_errors(bad):
    with pytest.raises(ParseError):
        Cube.parse(bad)


def test_lines_and_pivots():
    c = Cube.parse("[0,1,2,3]")
    l0 = lines(c, 0)
    assert [line.pair for line in l0] == [(0, 2), (1, 3)]
    assert [line.is_pivot for line in l0] == [False, True]
    l1 = lines(c, 1)
    assert [line.pair for line in l1] == [(0, 1), (2, 3)]
    assert [line.is_pivot for line in l1] == [False, True]


def test_three_cube_squares():
    c = Cube.from_lex(3, range(8))
    sq = squares(c, 0, 1)
    assert len(sq) == 2
    assert [s.is_pivot for s in sq] == [False, True]
    # pivot square: coordinate 2 on the b-side
    assert sq[1].rows() == [[1, 3], [5, 7]]
    assert classify(3, 0b100, 0, 1) == "pivot"
    assert classify(3, 0b000, 0, 1) == "supporting"
    assert sum(line.is_pivot for line in lines(c, 2)) == 1


def test_coordinate_errors():
    c = Cube.parse("[0,1,2,3]")
    with pytest.raises(CoordinateError):
        lines(c, 2)
    with pytest.raises(CoordinateError):
        squares(c, 1, 1)


def test_z2_generators_and_matrices(algebras):
    z2 = algebras["z2"]
    T = (ONE2, ONE2)
    gens = one_coordinate_generators(T)
    # 4 row-constant and 4 column-constant cubes share the 2 constant ones
    assert len(gens) == 6
    assert sum(c.lex()[0] == c.lex()[1] and c.lex()[2] == c.lex()[3] for c in gens) == 4
    assert sum(c.lex()[0] == c.lex()[2] and c.lex()[1] == c.lex()[3] for c in gens) == 4
    M = generate_matrix_algebra(z2, T)
    assert len(M) == 8
    assert gens <= M.cubes()
    # abelian: every cube satisfies r + v = s + u
    for c in M:
        r, s, u, v = c.lex()
        assert (r + v - s - u) % 2 == 0


def test_constant_cubes_present(algebras):
    alg = algebras["s3"]
    eq = Partition.equality(6)
    M = generate_matrix_algebra(alg, (eq, eq))
    assert {c.lex() for c in M} == {(a,) * 4 for a in range(6)}


def test_k1_generators_are_pairs():
    th = Partition.parse("|0 2|1 3|")
    assert {c.entries for c in one_coordinate_generators((th,))} == set(th.pairs())


@pytest.mark.parametrize("name", ["z2", "z3", "semilattice2", "z2xz2", "s3"])
def test_matrices_against_displayed_families(name, algebras, lattices):
    # close "x x / y y" (x theta_0 y) and "x y / x y" (x theta_1 y) naively
    alg = algebras[name]
    for T in itertools.product(lattices[name].elements, repeat=2):
        M = generate_matrix_algebra(alg, T)
        fam = [Cube.from_lex(2, (x, x, y, y)).entries for x, y in T[0].pairs()]
        fam += [Cube.from_lex(2, (x, y, x, y)).entries for x, y in T[1].pairs()]
        assert {tuple(r) for r in M.rows.tolist()} == oracles.naive_closure(alg, fam, 4)


def test_equality_sequence_gives_constants(algebras):
    for alg in algebras.values():
        eq = Partition.equality(alg.size)
        for k in (1, 2, 3):
            M = generate_matrix_algebra(alg, (eq,) * k)
            assert len(M) == alg.size
            assert all(len(set(c.entries)) == 1 for c in M)


def test_monotone_in_T(algebras, lattices):
    for name in ["z4ring", "s3"]:
        cons = lattices[name].elements
        for T, U in itertools.product(itertools.product(cons, repeat=2), repeat=2):
            if all(a <= b for a, b in zip(T, U)):
                assert generate_matrix_algebra(algebras[name], T).cubes() <= generate_matrix_algebra(algebras[name], U).cubes()


def test_permuting_T_permutes_cubes(algebras, lattices):
    for name in ["z4ring", "s3", "z2xz2"]:
        alg = algebras[name]
        mats = {T: generate_matrix_algebra(alg, T) for T in itertools.product(lattices[name].elements, repeat=3)}
        for T, M in mats.items():
            for perm in itertools.permutations(range(3)):
                S = tuple(T[i] for i in perm)
                # vertex f of M(S) is vertex g of M(T) with g(perm[i]) = f(i)
                idx = [sum(((f >> i) & 1) << perm[i] for i in range(3)) for f in range(8)]
                keys = M.rows[:, idx] @ (alg.size ** np.arange(8))
                assert np.array_equal(np.sort(keys), mats[S].packed)


def test_edge_invariant(algebras, lattices):
    for name in ["z4ring", "s3", "z2xz2"]:
        for T in itertools.product(lattices[name].elements, repeat=3):
            M = generate_matrix_algebra(algebras[name], T)
            assert edge_violations(M, T) == 0


def test_membership(algebras):
    z4 = algebras["z4"]
    th = Partition.parse("|0 2|1 3|")
    M = generate_matrix_algebra(z4, (th, Partition.full(4)))
    assert Cube.parse("[0,1,2,3]") in M
    assert Cube.parse("[0,1,1,2]") not in M  # vertical edge (0, 1) not in theta
    rows = np.array([[0, 2, 1, 3], [0, 2, 1, 2]])
    assert M.contains_rows(rows).tolist() == [True, False]


def test_capacity(algebras):
    d4 = algebras["d4"]
    one = Partition.full(8)
    assert cube_bits(8, 3) == 24
    with pytest.raises(CapacityError) as info:
        generate_matrix_algebra(d4, (one,) * 3, max_bits=16)
    assert (info.value.bound, info.value.limit) == (24, 16)


def test_capacity_env(algebras, monkeypatch):
    monkeypatch.setenv("CMCOMM_CAP", "7")  # z4 at k=2 needs 8 bits
    with pytest.raises(CapacityError):
        generate_matrix_algebra(algebras["z4"], (Partition.full(4),) * 2)


def test_sequence_validation(algebras):
    z4 = algebras["z4"]
    with pytest.raises(NotACongruenceError):
        generate_matrix_algebra(z4, (Partition.parse("|0 1|2 3|"),))
    with pytest.raises(UniverseError):
        generate_matrix_algebra(z4, (Partition.full(3),))
    with pytest.raises(CoordinateError):
        generate_matrix_algebra(z4, ())


def test_matrix_set_is_sorted(algebras):
    M = generate_matrix_algebra(algebras["s3"], (Partition.full(6),) * 2)
    assert isinstance(M, MatrixSet)
    assert (np.diff(M.packed) > 0).all()
