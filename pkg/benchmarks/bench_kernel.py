"""Compare the compiled and pure-Python backends of the per-term integral.

Usage: python benchmarks/bench_kernel.py [--repeat N]

Times full free-energy and pressure evaluations for gold-gold at 300 K and
reports the speed-up and the relative difference between the backends.
"""
import argparse
import time

from lifshitz import GeometryThermal, casimir_pressure, free_energy
from lifshitz.kernel import _compiled
from lifshitz.layered import LayeredBody
from lifshitz.materials import library

CASES = [
    ("F gold/gold 200 nm", free_energy, library.gold_drude(), library.gold_drude(), 200e-9),
    ("P gold/gold 500 nm", casimir_pressure, library.gold_drude(), library.gold_drude(), 500e-9),
    ("F Ni/(Au 30 nm on Ni) 300 nm", free_energy, library.nickel_drude(),
     LayeredBody(library.nickel_drude(), ((library.gold_drude(), 30e-9),)), 300e-9),
]


def best_time(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if _compiled is None:
        print("compiled extension unavailable; only the python backend can run")
    print(f"{'case':32s} {'python s':>10s} {'compiled s':>11s} {'speed-up':>9s} {'rel diff':>10s}")
    for name, fn, b1, b2, a in CASES:
        g = GeometryThermal(a, 300.0)
        tp, rp = best_time(lambda: fn(b1, b2, g, backend="python"), args.repeat)
        if _compiled is None:
            print(f"{name:32s} {tp:10.4f}")
            continue
        tc, rc = best_time(lambda: fn(b1, b2, g, backend="compiled"), args.repeat)
        rel = abs(rp.value - rc.value) / abs(rc.value)
        print(f"{name:32s} {tp:10.4f} {tc:11.4f} {tp / tc:9.1f} {rel:10.2e}")


if __name__ == "__main__":
    main()
