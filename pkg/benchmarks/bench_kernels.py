"""Time the compiled and numpy kernels on identical inputs and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from khintchine.kernels import backends
from khintchine.lattice import halfspace_vectors


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    rng = np.random.default_rng(0)
    X = rng.random((1 << 20, 4))
    q = np.array([3, -2], dtype=np.int64)
    yield "slab_status 2^20 x (n=2, m=2)", lambda k: k.slab_status(X, q, 2, 1, 0.1, True, 1e-12)

    for h, k_samples in ((64, 4096), (256, 256)):
        qs, norms, gcds = halfspace_vectors(2, h)
        thresh = 0.25 / norms
        Xc = rng.random((k_samples, 2))
        bucket = np.ascontiguousarray(norms)
        yield (
            f"count_buckets h={h}, {len(qs)} q, {k_samples} X",
            lambda k, qs=qs, gcds=gcds, thresh=thresh, Xc=Xc, bucket=bucket, h=h: k.count_buckets(
                Xc, qs, gcds, thresh, bucket, h + 1, 1, True
            ),
        )


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json")
    args = ap.parse_args()
    impls = backends()
    rows = []
    for name, fn in cases():
        timings, outputs = {}, {}
        for bname, mod in impls.items():
            timings[bname], outputs[bname] = _best(lambda: fn(mod), args.repeat)
        ref = outputs["numpy"]
        same = all(np.array_equal(ref, o) for o in outputs.values())
        row = {"case": name, "seconds": timings, "identical": same}
        if "cython" in timings:
            row["speedup"] = timings["numpy"] / timings["cython"]
        rows.append(row)
        cols = "  ".join(f"{b}={t * 1e3:9.1f} ms" for b, t in timings.items())
        extra = f"  speedup={row['speedup']:.1f}x" if "speedup" in row else ""
        print(f"{name:45s} {cols}{extra}  identical={same}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
