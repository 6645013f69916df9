"""Compare the numba and pure-numpy kernel paths and profile one IF-RK4 step.

    python3 benchmarks/bench_kernels.py [--n1 256] [--n2 31] [--repeat 20]

Prints one line per kernel (numpy ms, numba ms, speedup), then the share of an
IF-RK4 step spent in FFTs, in the dense sine transform and in the local kernel.
"""

import argparse
import cProfile
import pstats
import time

import numpy as np

from wgnls import _kernels, solver2d
from wgnls.geometry import build_coefficients, check_injectivity, perturbed_circle
from wgnls.spectral import StripGrid, to_modal


def best_of(fn, repeat):
    fn()  # warm up (jit compile on the first call)
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return 1e3 * best


def bench_pointwise(n1, n2, repeat):
    rng = np.random.default_rng(0)
    phi = rng.standard_normal((n1, n2)) + 1j * rng.standard_normal((n1, n2))
    v = rng.standard_normal((n1, n2))
    minv = 1 + 0.1 * rng.standard_normal((n1, n2))
    theta = phi[:, 0].copy()
    pot = v[:, 0].copy()
    yield ("phase_rotate", lambda: _kernels.phase_rotate_numpy(theta, pot, 0.75, 1e-3),
           lambda: _kernels.phase_rotate_numba(theta, pot, 0.75, 1e-3))
    yield ("local_terms", lambda: _kernels.local_terms_numpy(phi, v, minv, 1.0),
           lambda: _kernels.local_terms_numba(phi, v, minv, 1.0))


def bench_injectivity(n_samples):
    spec = perturbed_circle(0.3, 2)
    pairs = []
    for name in ("segment_crossings", "min_separated_distance"):
        fast = getattr(_kernels, name + "_numba")
        slow = getattr(_kernels, name + "_numpy")

        def run(fn, name=name):
            saved = getattr(_kernels, name)
            setattr(_kernels, name, fn)
            try:
                check_injectivity(spec, 0.1, n_samples=n_samples, raise_on_failure=False)
            finally:
                setattr(_kernels, name, saved)

        pairs.append((name + " (via check_injectivity)", lambda run=run, s=slow: run(s),
                      lambda run=run, f=fast: run(f)))
    return pairs


def step_profile(n1, n2, steps):
    grid = StripGrid(n1, n2)
    coeffs = build_coefficients(perturbed_circle(0.3, 2), 0.1, grid)
    phi0 = solver2d.initial_data("tensor_plus_excited", grid, 0.1)
    stepper = solver2d.IFRK4(coeffs, 1.0, solver2d.dt_stability(coeffs, 1.0, phi0))
    uh = to_modal(phi0, grid)
    stepper.step(uh)
    prof = cProfile.Profile()
    prof.enable()
    for _ in range(steps):
        uh = stepper.step(uh)
    prof.disable()
    st = pstats.Stats(prof)
    total = max(st.total_tt, 1e-12)
    fft = sine = local = 0.0
    for (fname, _, func), (_, _, tt, _, _) in st.stats.items():
        if "pocketfft" in fname or func in ("c2c", "_raw_fft"):
            fft += tt
        elif fname.endswith("transverse.py") and func in ("forward", "backward"):
            sine += tt
        elif func.startswith("local_terms") or func.startswith("_local_terms"):
            local += tt
    return fft / total, sine / total, local / total, 1e3 * total / steps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n1", type=int, default=256)
    ap.add_argument("--n2", type=int, default=31)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--samples", type=int, default=256, help="boundary samples for the injectivity check")
    ap.add_argument("--steps", type=int, default=50)
    a = ap.parse_args()

    print(f"active path: {'numba' if _kernels.USE_NUMBA else 'numpy'} (WGNLS_NUMBA)")
    print(f"{'kernel':44s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    cases = list(bench_pointwise(a.n1, a.n2, a.repeat)) + bench_injectivity(a.samples)
    for name, slow, fast in cases:
        reps = a.repeat if "injectivity" not in name else max(2, a.repeat // 10)
        ts, tf = best_of(slow, reps), best_of(fast, reps)
        print(f"{name:44s} {ts:10.3f} {tf:10.3f} {ts / tf:8.2f}")

    fft, sine, local, ms = step_profile(a.n1, a.n2, a.steps)
    print(f"\nIF-RK4 step on {a.n1}x{a.n2}: {ms:.2f} ms/step")
    print(f"  FFT {100 * fft:.1f}%  sine transform {100 * sine:.1f}%  local kernel {100 * local:.1f}%")


if __name__ == "__main__":
    main()
