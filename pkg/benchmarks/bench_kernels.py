"""Compare the numba and pure-numpy distance kernels.

    python benchmarks/bench_kernels.py [--sizes 100,1000,3000] [--dim 4] [--repeat 5]

Both backends are imported from the same module, so this runs regardless of
``AKNN_DISABLE_NUMBA``; without numba only the numpy column is reported.
"""
import argparse
import timeit

import numpy as np

from aknn import _kernels

KINDS = {"euclidean": (0, 2.0), "manhattan": (1, 1.0), "minkowski(q=3)": (2, 3.0)}


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="100,1000,3000")
    parser.add_argument("--dim", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'kernel':<14} {'metric':<15} {'n':>6} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>8}")
    for n in (int(s) for s in args.sizes.split(",")):
        train = rng.normal(size=(n, args.dim))
        queries = rng.normal(size=(max(n // 3, 1), args.dim))
        for name, (kind, q) in KINDS.items():
            jobs = {
                "cdist": (_kernels.cdist_numpy, _kernels.cdist_numba, (queries, train, kind, q)),
                "max_pairwise": (_kernels.max_pairwise_numpy, _kernels.max_pairwise_numba, (train, kind, q)),
            }
            for label, (np_fn, nb_fn, fargs) in jobs.items():
                t_np = best_of(lambda: np_fn(*fargs), args.repeat)
                if nb_fn is None:
                    print(f"{label:<14} {name:<15} {n:>6} {t_np:>11.5f} {'-':>11} {'-':>8}")
                    continue
                nb_fn(*fargs)  # compile outside the timing
                t_nb = best_of(lambda: nb_fn(*fargs), args.repeat)
                print(f"{label:<14} {name:<15} {n:>6} {t_np:>11.5f} {t_nb:>11.5f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
