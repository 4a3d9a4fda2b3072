#!/usr/bin/env python3
"""Compare the compiled row-reduction kernels against the pure-Python
fallback on random dense matrices over the rationals and over GF(p).

The kernels are the single hot spot of the library: every hom-space,
kernel, cokernel, approximation, and homology computation funnels into
them.  Both implementations are required to produce bit-identical output;
this script checks that on every matrix it times.

Usage:
    python3 benchmarks/bench_elim.py
    python3 benchmarks/bench_elim.py --frac-sizes 30,60 --mod-sizes 100
    python3 benchmarks/bench_elim.py --end-to-end
"""

import argparse
import random
import subprocess
import sys
import time

from intres import QQ, exactla
from intres.exactla import _rref_frac_py, _rref_mod_py

MOD_P = 10007


def frac_data(rng, n):
    return [QQ.coerce(rng.randint(-9, 9)) for _ in range(n * n)]


def mod_data(rng, n):
    return [rng.randrange(MOD_P) for _ in range(n * n)]


def best_of(fn, make_args, repeats):
    """Minimum wall time over `repeats` runs on fresh copies (the kernels
    work in place, so each run gets its own argument tuple)."""
    times = []
    for _ in range(repeats):
        args = make_args()
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def check_agreement(pure, compiled, args_a, args_b):
    out_a = pure(*args_a)
    out_b = compiled(*args_b)
    if list(out_a[0]) != list(out_b[0]) or list(out_a[1]) != list(out_b[1]):
        raise SystemExit("kernel outputs disagree; refusing to benchmark")


def run_kernel_benchmarks(frac_sizes, mod_sizes, repeats):
    rng = random.Random(20260814)
    rows = []
    for n in frac_sizes:
        data = frac_data(rng, n)
        check_agreement(
            _rref_frac_py, exactla._rref_frac,
            (list(data), n, n), (list(data), n, n),
        )
        pure = best_of(_rref_frac_py, lambda: (list(data), n, n), repeats)
        fast = best_of(exactla._rref_frac, lambda: (list(data), n, n),
                       repeats)
        rows.append(("rref over Q", n, pure, fast))
    for n in mod_sizes:
        data = mod_data(rng, n)
        check_agreement(
            _rref_mod_py, exactla._rref_mod,
            (list(data), n, n, MOD_P), (list(data), n, n, MOD_P),
        )
        pure = best_of(_rref_mod_py, lambda: (list(data), n, n, MOD_P),
                       repeats)
        fast = best_of(exactla._rref_mod, lambda: (list(data), n, n, MOD_P),
                       repeats)
        rows.append((f"rref over GF({MOD_P})", n, pure, fast))
    return rows


END_TO_END_SNIPPET = """
import random, sys, time
sys.path.insert(0, {testdir!r})
from intres import betti, commutative_ladder
from conftest import random_commuting_module
rng = random.Random(20260814)
q = commutative_ladder(3)
mods = [random_commuting_module(q, rng) for _ in range(5)]
t0 = time.perf_counter()
for m in mods:
    betti(m)
print(time.perf_counter() - t0)
"""


def run_end_to_end(testdir):
    """Betti tables of five random ladder-3 modules, in subprocesses so the
    import-time kernel dispatch can differ."""
    out = {}
    for label, env_extra in (("compiled", {}), ("pure", {"INTRES_PURE": "1"})):
        import os

        env = dict(os.environ, **env_extra)
        proc = subprocess.run(
            [sys.executable, "-c", END_TO_END_SNIPPET.format(testdir=testdir)],
            capture_output=True, text=True, env=env, check=True,
        )
        out[label] = float(proc.stdout.strip())
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frac-sizes", default="30,60,90",
                    help="comma-separated matrix sizes over Q")
    ap.add_argument("--mod-sizes", default="80,160,240",
                    help="comma-separated matrix sizes over GF(p)")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--end-to-end", action="store_true",
                    help="also time whole Betti-table computations in "
                         "subprocesses with and without the compiled kernels")
    args = ap.parse_args(argv)

    if not exactla.HAVE_SPEEDUPS:
        print("note: compiled kernels unavailable (or INTRES_PURE set); "
              "the two columns below time the same implementation")

    frac_sizes = [int(s) for s in args.frac_sizes.split(",") if s]
    mod_sizes = [int(s) for s in args.mod_sizes.split(",") if s]
    rows = run_kernel_benchmarks(frac_sizes, mod_sizes, args.repeats)

    header = f"{'kernel':<20} {'size':>9} {'pure (ms)':>11} " \
             f"{'compiled (ms)':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, n, pure, fast in rows:
        ratio = pure / fast if fast > 0 else float("inf")
        print(f"{label:<20} {f'{n}x{n}':>9} {pure * 1e3:>11.2f} "
              f"{fast * 1e3:>14.2f} {ratio:>7.1f}x")

    if args.end_to_end:
        from pathlib import Path

        testdir = str(Path(__file__).resolve().parent.parent / "tests")
        totals = run_end_to_end(testdir)
        print()
        print("end-to-end: Betti tables of 5 random ladder-3 modules")
        print(f"  compiled kernels: {totals['compiled']:.3f} s")
        print(f"  pure python     : {totals['pure']:.3f} s")
        print(f"  speedup         : {totals['pure'] / totals['compiled']:.2f}x")


if __name__ == "__main__":
    main()
