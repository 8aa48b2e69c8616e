"""Both kernel backends, and the group fast path against the generic closure."""

import itertools

import numpy as np
import pytest

from cmcomm import corpus, kernels
from cmcomm.congruences import Partition, congruence_lattice
from cmcomm.cubes import _generator_rows, generate_matrix_algebra

BACKENDS = ["python"]
try:
    kernels.backend("compiled")
    BACKENDS.append("compiled")
except ImportError:  # extension not built
    pass


def _generic(alg, gens, width, impl):
    ops = [(op.arity, op.array) for op in alg.operations]
    gens = np.vstack([gens] + [np.full((1, width), op.table[0]) for op in alg.operations if op.arity == 0])
    rows = impl.closure_rows(ops, alg.size, width, gens)
    return {tuple(r) for r in rows.tolist()}


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("name", ["z4", "s3", "d4", "z2xz2"])
def test_group_fast_path_matches_generic(backend, name):
    alg = corpus.build(name)
    impl = kernels.backend(backend)
    mul = kernels.group_operation(alg)
    assert mul is not None
    for T in itertools.product(congruence_lattice(alg).elements, repeat=2):
        gens = _generator_rows(T)
        fast = impl.group_closure_rows(mul, alg.size, 4, gens)
        assert {tuple(r) for r in fast.tolist()} == _generic(alg, gens, 4, impl)


def test_group_detection():
    assert kernels.group_operation(corpus.build("z4ring")) is None
    assert kernels.group_operation(corpus.build("semilattice2")) is None
    assert kernels.group_operation(corpus.build("trivial")) is not None


@pytest.mark.parametrize("name", ["z4ring", "s3", "semilattice2"])
def test_backends_agree_on_matrices(name):
    if "compiled" not in BACKENDS:
        pytest.skip("compiled backend not built")
    alg = corpus.build(name)
    for T in itertools.product(congruence_lattice(alg).elements, repeat=2):
        a = generate_matrix_algebra(alg, T, impl=kernels.backend("python"))
        b = generate_matrix_algebra(alg, T, impl=kernels.backend("compiled"))
        assert (a.rows == b.rows).all()


@pytest.mark.parametrize("backend", BACKENDS)
def test_unordered_set_path(backend):
    # a tiny bitmap limit forces the hash-set membership path
    alg = corpus.build("z3")
    impl = kernels.backend(backend)
    ops = [(op.arity, op.array) for op in alg.operations]
    gens = np.array([[0, 1, 2], [0, 0, 0]])
    a = impl.closure_rows(ops, 3, 3, gens, 0, 1)
    b = impl.closure_rows(ops, 3, 3, gens)
    assert {tuple(r) for r in a.tolist()} == {tuple(r) for r in b.tolist()}


@pytest.mark.parametrize("backend", BACKENDS)
def test_target_stops_early(backend):
    alg = corpus.build("z4ring")
    impl = kernels.backend(backend)
    ops = [(op.arity, op.array) for op in alg.operations]
    rows = impl.closure_rows(ops, 4, 1, np.array([[1]]), 3)
    assert len(rows) == 3


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_edge_count_against_enumeration(backend, k):
    impl = kernels.backend(backend)
    n = 3 if k < 3 else 2
    parts = [Partition.full(n), Partition.equality(n), Partition.from_pairs(n, [(0, 1)])]
    for T in itertools.product(parts, repeat=k):
        reps = np.array([t.rep for t in T])
        want = 0
        for vals in itertools.product(range(n), repeat=1 << k):
            ok = all(
                T[j].relates(vals[f], vals[f | 1 << j]) for j in range(k) for f in range(1 << k) if not f >> j & 1
            )
            want += ok
        assert impl.count_edge_consistent(reps, n, k) == want


def test_edge_count_limit():
    reps = np.zeros((3, 16), dtype=np.int64)
    assert kernels.count_edge_consistent(reps, 16, 3) == 0  # 16^8 > limit: no early exit


def test_backend_names():
    assert kernels.BACKEND in ("compiled", "python")
    with pytest.raises(ValueError):
        kernels.backend("fortran")
