"""Timing comparison of the compiled kernels against the numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--batch 26] [--repeats 50]

Measures the four hot kernels at production sizes (body branch
960 channels x 49 locations, aesthetics 1280 x 49, the widest dense
layer) and reports best-of-N wall time per call for every available
backend.
"""

import argparse
import time

import numpy as np

from selinet import kernels
from selinet.numerics import Rng


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def make_cases(batch):
    rng = Rng(0)

    def normals(*shape):
        return rng.normals(int(np.prod(shape))).reshape(shape)

    Fb = normals(batch, 960, 49)
    Fa = normals(batch, 1280, 49)
    wb, wa = normals(960), normals(1280)
    X = normals(batch, 1024)
    W = normals(512, 1024)
    b = normals(512)
    dY = normals(batch, 512)
    dV = normals(batch, 960)
    return Fb, Fa, wb, wa, X, W, b, dY, dV


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch", type=int, default=26)
    ap.add_argument("--repeats", type=int, default=50)
    args = ap.parse_args()

    Fb, Fa, wb, wa, X, W, b, dY, dV = make_cases(args.batch)

    rows = []
    for name in kernels.available_backends():
        impl = kernels.get_backend(name)
        _, alpha = impl.attn_pool_fwd(Fb, wb, 0.1)
        cases = {
            "attn_pool_fwd body": lambda: impl.attn_pool_fwd(Fb, wb, 0.1),
            "attn_pool_fwd aes": lambda: impl.attn_pool_fwd(Fa, wa, 0.1),
            "attn_pool_bwd body": lambda: impl.attn_pool_bwd(Fb, alpha, dV),
            "mean_pool body": lambda: impl.mean_pool(Fb),
            "affine_fwd 1024->512": lambda: impl.affine_fwd(X, W, b),
            "affine_bwd 1024->512": lambda: impl.affine_bwd(X, W, dY),
        }
        for label, fn in cases.items():
            rows.append((name, label, best_of(fn, args.repeats)))

    width = max(len(r[1]) for r in rows)
    print(f"batch {args.batch}, best of {args.repeats} (ms/call)")
    print(f"{'kernel'.ljust(width)}  " + "".join(f"{n:>10}" for n in kernels.available_backends()))
    labels = []
    for _, label, _ in rows:
        if label not in labels:
            labels.append(label)
    for label in labels:
        cells = [t for n, l, t in rows if l == label]
        print(f"{label.ljust(width)}  " + "".join(f"{1e3 * t:>10.3f}" for t in cells))
    if len(kernels.available_backends()) > 1:
        print(f"\nactive backend at import: {kernels.BACKEND}")


if __name__ == "__main__":
    main()
