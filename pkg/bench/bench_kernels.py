"""Time the compiled kernels against the pure-Python fallback.

Each backend runs in its own interpreter, since the backend is fixed at
import.  Usage:

    python bench/bench_kernels.py [--repeat 3] [--json out.json]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _random_csc(rng, nrows, ncols, density, p):
    cols = []
    for _ in range(ncols):
        k = max(1, rng.binomial(nrows, density))
        rows = np.sort(rng.choice(nrows, size=k, replace=False))
        cols.append((rows, rng.integers(1, p, size=k)))
    indptr = np.zeros(ncols + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(r) for r, _ in cols])
    indices = np.concatenate([r for r, _ in cols]).astype(np.int64)
    data = np.concatenate([v for _, v in cols]).astype(np.int64)
    return indptr, indices, data


def workloads():
    from nervess._backend import kernels

    rng = np.random.default_rng(0)
    sparse = _random_csc(rng, 1500, 1500, 0.004, 3)
    dense = rng.integers(0, 5, size=(160, 160)).astype(np.int64)

    def reduce_sparse():
        indptr, indices, data = sparse
        kernels.sparse_reduce_modp(1500, indptr, indices, data, 3, None, True, True)

    def rref_dense():
        kernels.dense_rref_modp(dense.copy(), 5)

    def ss_sphere3():
        from nervess.simpl import builtin_group, sphere_model, transformation_groupoid
        from nervess.totss import DoubleComplex, SpectralSequence
        b = transformation_groupoid(builtin_group("Z2"), sphere_model(3, 6), 6)
        SpectralSequence(DoubleComplex(b, 3), 6).infinity_totals()

    def borel_sphere3():
        from nervess.simpl import builtin_group, sphere_model, transformation_groupoid
        from nervess.totss import compare_with_diagonal
        b = transformation_groupoid(builtin_group("Z2"), sphere_model(3, 6), 6)
        compare_with_diagonal(b, 3, 6, ring=False)

    def cobar_s3():
        from nervess.cotor import builtin_rep, cobar_cotor
        from nervess.exactla import as_field
        from nervess.simpl import builtin_group
        cobar_cotor(builtin_rep(builtin_group("S3"), "adjoint", as_field(3)), k_max=5)

    return [("sparse_reduce_modp 1500x1500", reduce_sparse),
            ("dense_rref_modp 160x160", rref_dense),
            ("spectral sequence Z2 on S^3, GF(3)", ss_sphere3),
            ("H(Tot) vs H(diag) Z2 on S^3, GF(3)", borel_sphere3),
            ("cobar S3 adjoint, GF(3), k <= 4", cobar_s3)]


def worker(repeat):
    from nervess import BACKEND
    out = {"backend": BACKEND, "times": {}}
    for name, fn in workloads():
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out["times"][name] = best
    print(json.dumps(out))


def run_backend(pure, repeat):
    env = dict(os.environ)
    env.pop("NERVESS_PURE_PYTHON", None)
    if pure:
        env["NERVESS_PURE_PYTHON"] = "1"
    proc = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the timings here")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        worker(args.repeat)
        return
    fast = run_backend(False, args.repeat)
    slow = run_backend(True, args.repeat)
    if fast["backend"] != "cython":
        print("note: compiled extension not importable, both columns are pure Python")
    width = max(len(k) for k in fast["times"])
    print(f"{'workload':<{width}}  {fast['backend']:>9}  {slow['backend']:>9}  speedup")
    for name, t in fast["times"].items():
        s = slow["times"][name]
        print(f"{name:<{width}}  {t:9.3f}  {s:9.3f}  {s / t:7.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"compiled": fast, "python": slow}, fh, indent=2)


if __name__ == "__main__":
    main()
