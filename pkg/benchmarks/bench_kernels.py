"""Throughput comparison of the percolation kernels.

Runs identical batches of trials through the numba union-find kernel
and the numpy/scipy connected-components fallback and reports trials
per second at a few mesh sizes.

    python3 benchmarks/bench_kernels.py --trials 256 --meshes 8 16 32
"""

import argparse
import time

import numpy as np

from mgffcross.mgff_sim.experiment import MU_LAT_DEFAULT
from mgffcross.mgff_sim.kernels import HAS_NUMBA, percolate_batch
from mgffcross.mgff_sim.lattice import (
    build_lattice,
    harmonic_extension,
    interior_noise_to_field,
)
from mgffcross.probability import RectanglePolygon


def make_batch(spec, trials, seed):
    rng = np.random.default_rng(seed)
    harm = harmonic_extension(spec, MU_LAT_DEFAULT).values
    fields = np.broadcast_to(harm, (trials,) + harm.shape).copy()
    noise = rng.standard_normal((trials,) + spec.interior_shape)
    fields[:, 1:-1, 1:-1] += interior_noise_to_field(spec, noise)
    uniforms = rng.random((trials, spec.n_edges))
    return fields.reshape(trials, -1), uniforms


def time_kernel(values, uniforms, spec, kernel, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        percolate_batch(values, uniforms, spec, kernel)
        best = min(best, time.perf_counter() - t0)
    return values.shape[0] / best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=256, help="trials per batch")
    ap.add_argument("--meshes", type=int, nargs="+", default=[8, 16, 32])
    ap.add_argument("--repeats", type=int, default=3, help="timing repeats, best kept")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    kernels = ["numpy"] + (["numba"] if HAS_NUMBA else [])
    if HAS_NUMBA:
        # trigger jit compilation outside the timed region
        warm = build_lattice(RectanglePolygon.corners(1.0), 4)
        v, u = make_batch(warm, 2, args.seed)
        percolate_batch(v, u, warm, "numba")
    else:
        print("numba not importable; timing the numpy kernel only")

    print(f"{'mesh':>6} {'vertices':>9} " + " ".join(f"{k + ' tr/s':>14}" for k in kernels)
          + ("  speedup" if HAS_NUMBA else ""))
    for ny in args.meshes:
        spec = build_lattice(RectanglePolygon.corners(1.0), ny)
        values, uniforms = make_batch(spec, args.trials, args.seed)
        rates = {k: time_kernel(values, uniforms, spec, k, args.repeats) for k in kernels}
        row = f"{'1/' + str(ny):>6} {spec.nv:>9} " + " ".join(
            f"{rates[k]:>14.1f}" for k in kernels
        )
        if HAS_NUMBA:
            row += f"  {rates['numba'] / rates['numpy']:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
