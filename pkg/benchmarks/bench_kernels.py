"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times the generic closure (with the edge-count early exit the library uses),
the group fast path and the edge count on a few corpus instances, for each
available backend.
"""

import argparse
import time

import numpy as np

from cmcomm import corpus, kernels
from cmcomm.congruences import Partition
from cmcomm.cubes import _generator_rows

CASES = [
    # (algebra, congruences as blocks with None for the full relation, time the generic closure)
    ("z4ring", (None, "|0 2|1 3|", "|0 2|1 3|"), True),
    ("z4ring", (None, None), True),
    ("s3", (None, None), True),
    ("z2xz2", (None, "|0 1|2 3|", None), True),
    ("d4", (None, None), True),
    # generic closure is quadratic in |M| here; only the group path is practical
    ("s3", (None, None, None), False),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = ["python"]
    try:
        kernels.backend("compiled")
        backends.insert(0, "compiled")
    except ImportError:
        print("compiled backend not built; timing the numpy fallback only")

    print(f"{'case':26s} {'kernel':10s} " + " ".join(f"{b:>12s}" for b in backends))
    for name, blocks, generic in CASES:
        alg = corpus.build(name)
        n = alg.size
        T = tuple(Partition.full(n) if b is None else Partition.parse(b, n) for b in blocks)
        k = len(T)
        width = 1 << k
        gens = _generator_rows(T)
        ops = [(op.arity, op.array) for op in alg.operations]
        consts = [np.full((1, width), op.table[0]) for op in alg.operations if op.arity == 0]
        all_gens = np.vstack([gens] + consts)
        mul = kernels.group_operation(alg)
        reps = np.array([t.rep for t in T], dtype=np.int64)
        target = kernels.count_edge_consistent(reps, n, k)

        rows = {"closure": [], "group": [], "edges": []}
        sizes = set()
        for b in backends:
            impl = kernels.backend(b)
            if generic:
                t, out = best_of(lambda: impl.closure_rows(ops, n, width, all_gens, target), args.repeat)
                rows["closure"].append(t)
                sizes.add(len(out))
            if mul is not None:
                t, out = best_of(lambda: impl.group_closure_rows(mul, n, width, gens, target), args.repeat)
                rows["group"].append(t)
                sizes.add(len(out))
            t, _ = best_of(lambda: impl.count_edge_consistent(reps, n, k), args.repeat)
            rows["edges"].append(t)
        assert len(sizes) == 1, f"backends disagree on |M(T)| for {name}: {sizes}"
        label = f"{name} k={k} |M|={sizes.pop()}"
        for kernel, times in rows.items():
            if times:
                print(f"{label:26s} {kernel:10s} " + " ".join(f"{t * 1e3:10.1f}ms" for t in times), flush=True)
                label = ""


if __name__ == "__main__":
    main()
