"""Kernel selection: compiled extension if importable, numpy fallback otherwise.

Set ``CMCOMM_PURE=1`` to force the fallback.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("CMCOMM_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "compiled" if _impl is not _pykernels else "python"

# ambient sizes above this skip the edge count (used only as an early exit)
EDGE_COUNT_LIMIT = 1 << 26


def backend(name=None):
    """Module implementing the kernels: ``"compiled"``, ``"python"`` or the default."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "compiled":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def group_operation(alg):
    """Table of a group operation that term-defines every basic operation, else None.

    Qualifies when some binary operation is a group and every other basic
    operation is that group's inverse, identity constant or the operation
    itself. Subuniverses of powers are then just the generated subgroups.
    """
    n = alg.size
    for cand in alg.operations:
        if cand.arity != 2:
            continue
        mul = np.asarray(cand.table, dtype=np.int64).reshape(n, n)
        ids = [e for e in range(n) if (mul[e] == np.arange(n)).all() and (mul[:, e] == np.arange(n)).all()]
        if not ids:
            continue
        e = ids[0]
        # associativity: (a*b)*c == a*(b*c)
        if not (mul[mul, :] == mul[:, mul]).all():
            continue
        inv = np.argmax(mul == e, axis=1)
        if not (mul[np.arange(n), inv] == e).all():
            continue
        ok = True
        for op in alg.operations:
            arr = np.asarray(op.table, dtype=np.int64)
            if op.arity == 0:
                ok = arr[0] == e
            elif op.arity == 1:
                ok = (arr == inv).all()
            elif op.arity == 2:
                ok = (arr.reshape(n, n) == mul).all()
            else:
                ok = False
            if not ok:
                break
        if ok:
            return mul.reshape(-1)
    return None


def closure(alg, gens, width, target=0, impl=None):
    """Closure of the rows of ``gens`` in ``alg**width``, sorted by packed value."""
    impl = impl or _impl
    ops = [(op.arity, op.array) for op in alg.operations]
    n = alg.size
    gens = np.asarray(gens, dtype=np.int64).reshape(-1, width)
    for op in alg.operations:
        if op.arity == 0:
            gens = np.vstack([gens, np.full((1, width), op.table[0], dtype=np.int64)])
    if n**width >= 2**63:
        impl = _pykernels
    mul = group_operation(alg) if len(gens) else None
    if mul is not None:
        rows = impl.group_closure_rows(mul, n, width, gens, target)
    else:
        rows = impl.closure_rows(ops, n, width, gens, target)
    if len(rows) == 0:
        return rows
    if n**width < 2**63:
        key = rows @ (n ** np.arange(width, dtype=np.int64))
        order = np.argsort(key, kind="stable")
    else:
        order = sorted(range(len(rows)), key=lambda i: sum(int(v) * n**c for c, v in enumerate(rows[i])))
    return rows[order]


def count_edge_consistent(reps, n, k, impl=None):
    impl = impl or _impl
    if n ** (1 << k) > EDGE_COUNT_LIMIT:
        return 0
    return int(impl.count_edge_consistent(reps, n, k))
