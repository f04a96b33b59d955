"""Compiled vs pure-Python column reduction on coboundary matrices.

Run with ``python benchmarks/bench_reduce.py [--repeat N]``. Each case
reduces the coboundary columns of every degree (with kernel tracking, as
the cohomology code does) and checks that both kernels agree.
"""
import argparse
import time

from acmoduli import exact, generators
from acmoduli.simplicial import barycentric_subdivision, coboundary_columns


def cases():
    yield "d2xt2(n=4)", generators.d2xt2(4).total
    yield "t4_minus_ball", generators.t4_minus_ball().total
    yield "sd(cp2_minus_ball)", barycentric_subdivision(generators.cp2_minus_ball()).total
    yield "t4(n=3)", generators.t4(3)


def run_case(X, backend):
    out = []
    for k in range(X.dim + 1):
        cols, _, _ = coboundary_columns(X, k)
        out.append(exact.reduce_columns(cols, track=True, backend=backend))
    return out


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if exact._reduce_c is None:
        raise SystemExit("compiled kernel not built; run pip install -e . first")
    print(f"{'case':<22}{'simplices':>10}{'python s':>11}{'cython s':>11}{'speedup':>9}")
    for name, X in cases():
        tp, rp = best_of(lambda: run_case(X, "python"), args.repeat)
        tc, rc = best_of(lambda: run_case(X, "cython"), args.repeat)
        if rp != rc:
            raise SystemExit(f"{name}: kernels disagree")
        n = sum(X.f_vector)
        print(f"{name:<22}{n:>10}{tp:>11.3f}{tc:>11.3f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
