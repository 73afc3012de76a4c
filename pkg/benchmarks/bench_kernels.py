"""Compare the numba and numpy paths of the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--steps 16000]

The CN case is one oscillator period for the default acceptance packet
(A = 10 sigma, 0.02 sigma spacing). Timings exclude the first numba call,
which compiles (or loads the on-disk cache).
"""

import argparse
import time

import numpy as np

from qmlab import kernels, oscillator as osc


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--steps", type=int, default=osc.DEFAULT_STEPS_PER_PERIOD, help="CN steps (one period)")
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    spec = osc.OscillatorSpec()
    packet = osc.PacketSpec.in_sigmas(spec, 10)
    st = osc.packet_state(spec, packet)
    diag, o1, o2 = osc._cn_operator(spec, st.x, st.h)
    dt = spec.period / args.steps
    cases = {
        "first_derivative n=2^20": (
            lambda: kernels.first_derivative_numpy(f, 1e-3),
            lambda: kernels.first_derivative_numba(f, 1e-3),
        ),
        f"cn_propagate n={st.x.size} steps={args.steps}": (
            lambda: kernels.cn_propagate_numpy(st.values, diag, o1, o2, dt, args.steps, args.steps),
            lambda: kernels.cn_propagate_numba(st.values, diag, o1, o2, dt, args.steps, args.steps),
        ),
    }
    f = np.random.default_rng(0).standard_normal(2**20) + 0j

    print(f"{'kernel':<40} {'numpy s':>10} {'numba s':>10} {'speedup':>8} {'max diff':>10}")
    for name, (np_fn, nb_fn) in cases.items():
        nb_fn()  # compile / load cache
        t_np, a = best_of(np_fn, args.repeat)
        t_nb, b = best_of(nb_fn, args.repeat)
        print(f"{name:<40} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {np.abs(a - b).max():10.1e}")


if __name__ == "__main__":
    main()
