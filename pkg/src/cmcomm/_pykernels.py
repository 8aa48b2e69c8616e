"""Pure-Python/numpy versions of the closure kernels.

Same contracts as the compiled module; used when it is not built or when
``CMCOMM_PURE`` is set.
"""

import numpy as np


def _tuples_with_max(p, r):
    for q in range(r):
        if q > 0 and p == 0:
            continue
        axes = [np.arange(p) if i < q else np.array([p]) if i == q else np.arange(p + 1) for i in range(r)]
        grids = np.meshgrid(*axes, indexing="ij")
        yield [g.reshape(-1) for g in grids]


def closure_rows(ops, n, width, gens, target=0, bitmap_limit=1 << 28):
    pw = np.array([n**c for c in range(width)], dtype=object if n**width >= 2**63 else np.int64)
    gens = np.asarray(gens, dtype=np.int64).reshape(-1, width)
    rows = np.zeros((max(64, len(gens)), width), dtype=np.int64)
    count = 0
    seen = set()

    def push(block):
        nonlocal rows, count
        packed = block @ pw if pw.dtype == np.int64 else [sum(int(v) * int(w) for v, w in zip(row, pw)) for row in block]
        for i, key in enumerate(packed.tolist() if hasattr(packed, "tolist") else packed):
            if key in seen:
                continue
            seen.add(key)
            if count == len(rows):
                grown = np.zeros((2 * len(rows), width), dtype=np.int64)
                grown[:count] = rows[:count]
                rows = grown
            rows[count] = block[i]
            count += 1
            if target > 0 and count >= target:
                return True
        return False

    finished = push(gens)
    p = 0
    while not finished and p < count:
        for arity, table in ops:
            if arity == 0:
                continue
            table = np.asarray(table, dtype=np.int64)
            for tup in _tuples_with_max(p, arity):
                cur = rows[: p + 1]
                idx = 0
                for comp in tup:
                    idx = idx * n + cur[comp]
                if push(table[idx]):
                    finished = True
                    break
            if finished:
                break
        p += 1
    return rows[:count].copy()


def count_edge_consistent(reps, n, k):
    reps = np.asarray(reps, dtype=np.int64)
    # partial assignments of vertices 0..v-1, extended one vertex at a time
    partial = np.zeros((1, 0), dtype=np.int64)
    for v in range(1 << k):
        ext = np.repeat(partial, n, axis=0)
        col = np.tile(np.arange(n, dtype=np.int64), len(partial))
        ok = np.ones(len(ext), dtype=bool)
        for j in range(k):
            if v >> j & 1:
                lo = v ^ (1 << j)
                ok &= reps[j][ext[:, lo]] == reps[j][col]
        partial = np.hstack([ext[ok], col[ok, None]])
    return len(partial)


def group_closure_rows(mul, n, width, gens, target=0, bitmap_limit=1 << 28):
    mul = np.asarray(mul, dtype=np.int64)
    gens = np.asarray(gens, dtype=np.int64).reshape(-1, width)
    if n**width >= 2**63:
        pw = np.array([n**c for c in range(width)], dtype=object)
    else:
        pw = n ** np.arange(width, dtype=np.int64)
    seen = set()
    found = []

    def push(block):
        keys = block @ pw
        for i, key in enumerate(keys.tolist()):
            if key not in seen:
                seen.add(key)
                found.append(block[i])
                if target > 0 and len(found) >= target:
                    return True
        return False

    finished = push(gens)
    frontier = 0
    while not finished and frontier < len(found):
        stop = min(len(found), frontier + max(1, (1 << 21) // (len(gens) * width)))
        batch = np.array(found[frontier:stop])
        frontier = stop
        # every (row, generator) product of the chunk at once
        prod = mul[batch[:, None, :] * n + gens[None, :, :]].reshape(-1, width)
        finished = push(prod)
    if not found:
        return np.zeros((0, width), dtype=np.int64)
    return np.array(found, dtype=np.int64)
