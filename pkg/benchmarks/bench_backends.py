"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_backends.py [--repeat N]

Prints one line per (kernel, backend) with the best wall time and the
speedup of the compiled module. Outputs are compared bit for bit first.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from xposit import _backend


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _cases(kern, rng_seed=0):
    rng = np.random.default_rng(rng_seed)
    bits = rng.integers(0, 1 << 32, (2, 20_000), dtype=np.uint64).astype(np.uint32)
    x = rng.uniform(-100, 100, 20_000)
    mats = {n: (rng.uniform(-1, 1, (n, n)), rng.uniform(-1, 1, (n, n))) for n in (16, 32)}
    pm = {n: (kern.from_f64_array(a), kern.from_f64_array(b)) for n, (a, b) in mats.items()}
    cases = {
        "add_array 20k": lambda: kern.add_array(bits[0], bits[1]),
        "mul_array 20k": lambda: kern.mul_array(bits[0], bits[1]),
        "from_f64_array 20k": lambda: kern.from_f64_array(x),
        "quire_accumulate 20k": lambda: kern.quire_accumulate(0, bits[0], bits[1]),
    }
    for n in mats:
        a, b = pm[n]
        fa, fb = mats[n]
        cases[f"gemm_posit_quire {n}"] = lambda a=a, b=b: kern.gemm_posit_quire(a, b)
        cases[f"gemm_posit_noquire {n}"] = lambda a=a, b=b: kern.gemm_posit_noquire(a, b)
        cases[f"gemm_f32 fused {n}"] = lambda a=fa, b=fb: kern.gemm_f32(a, b, True)
    return cases


def _same(x, y):
    if isinstance(x, np.ndarray):
        return np.array_equal(x, y)
    return x == y


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    mods = _backend.available()
    if "cython" not in mods:
        print("compiled kernels not built; only the Python backend is available")
    timings = {name: {} for name in mods}
    for name, kern in mods.items():
        for label, fn in _cases(kern).items():
            timings[name][label] = _best(fn, args.repeat)

    print(f"{'kernel':<26}{'backend':<9}{'best s':>12}{'speedup':>10}")
    for label in timings["python"]:
        py_t, py_out = timings["python"][label]
        print(f"{label:<26}{'python':<9}{py_t:>12.5f}{'':>10}")
        if "cython" in timings:
            c_t, c_out = timings["cython"][label]
            tag = f"{py_t / c_t:>9.0f}x" if _same(py_out, c_out) else "  MISMATCH"
            print(f"{label:<26}{'cython':<9}{c_t:>12.5f}{tag:>10}")


if __name__ == "__main__":
    main()
