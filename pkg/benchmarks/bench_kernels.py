"""Compare the numba and pure-numpy paths of the hot kernels.

    python benchmarks/bench_kernels.py [--trials N] [--repeat R]

Prints time per trial for each kernel and backend, the speedup, and the
largest disagreement between the two paths.
"""
import argparse
import time

import numpy as np

from isac_sic_lab import _accel, kernels
from isac_sic_lab.model import SCHEMES, reference_config, sample_channel_block
from isac_sic_lab.montecarlo import op_curves


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def run_both(fn, repeat):
    res = {}
    for use in (True, False):
        _accel.USE_NUMBA = use
        fn()  # warm up (JIT compile, caches)
        res[use] = best_of(fn, repeat)
    _accel.USE_NUMBA = _accel.HAVE_NUMBA
    return res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--trials", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    cfg = reference_config()
    H = sample_channel_block(cfg, np.random.default_rng(0), args.trials)
    G = np.conj(np.swapaxes(H, 1, 2)) @ H
    cases = {
        "gram_eigvals_batch": lambda: kernels.gram_eigvals_batch(H),
        "logdet2_batch": lambda: kernels.logdet2_batch(G)[0],
        "op_curves (3 schemes x 13 SNR)": lambda: op_curves(
            cfg, 5.0, np.arange(10, 41, 2.5), args.trials, 1, schemes=SCHEMES
        )[SCHEMES[0]].values,
    }
    print(f"trials={args.trials} repeat={args.repeat}")
    print(f"{'kernel':34s} {'numba us/trial':>15s} {'numpy us/trial':>15s} {'speedup':>8s} {'max diff':>10s}")
    for name, fn in cases.items():
        r = run_both(fn, args.repeat)
        tn, on = r[True]
        tp, op = r[False]
        diff = float(np.max(np.abs(np.asarray(on) - np.asarray(op))))
        print(f"{name:34s} {1e6 * tn / args.trials:15.3f} {1e6 * tp / args.trials:15.3f} "
              f"{tp / tn:8.2f} {diff:10.2e}")


if __name__ == "__main__":
    main()
