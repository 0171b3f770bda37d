"""Compare the compiled kernels against the pure-Python fallback.

Microbenchmarks call both backends directly; the end-to-end row reruns a
serial puzzle search in a subprocess with IDASTRA_PURE=1 so the whole
import chain uses the fallback.

Run: python3 benchmarks/bench_kernels.py [--scramble 28] [--repeat 5]
"""

import argparse
import os
import random
import subprocess
import sys
import time

from idastra import _kernels_py
from idastra._backend import kernels
from idastra.domains.puzzle import IDENTITY_ORDER, scramble

_SEARCH_SNIPPET = """
import sys, time
from idastra._backend import backend_name
from idastra.core import serial_idastar
from idastra.domains.puzzle import PuzzleProblem, scramble
state = scramble({depth}, {seed})
problem = PuzzleProblem(state)
t0 = time.perf_counter()
out = serial_idastar(problem)
dt = time.perf_counter() - t0
print(backend_name(), out.cost, out.total_expanded, repr(dt))
"""


def _time(fn, repeat):
    return min(fn() for _ in range(repeat))


def bench_micro(repeat):
    rng = random.Random(7)
    states = [scramble(40, rng.randrange(10**9)) for _ in range(64)]
    tiles0, blank0 = states[0]
    h0 = kernels.manhattan(tiles0)
    paths = [bytes(rng.randrange(0, 6) for _ in range(12))
             for _ in range(64)]

    rows = []
    for name, compiled_fn, pure_fn, args_list in (
        ("manhattan",
         kernels.manhattan, _kernels_py.manhattan,
         [(t,) for t, _ in states]),
        ("puzzle_expand",
         kernels.puzzle_expand, _kernels_py.puzzle_expand,
         [(tiles0, blank0, h0, -1, IDENTITY_ORDER)]),
        ("path_hash",
         kernels.path_hash, _kernels_py.path_hash,
         [(1234, 1, p) for p in paths]),
    ):
        def sweep(fn, cases=args_list):
            def run():
                t0 = time.perf_counter()
                for args in cases:
                    fn(*args)
                return (time.perf_counter() - t0) / len(cases)
            return _time(run, repeat)

        fast = sweep(compiled_fn)
        slow = sweep(pure_fn)
        rows.append((name, fast, slow))
    return rows


def bench_search(depth, seed):
    def run(env_extra):
        env = dict(os.environ, **env_extra)
        snippet = _SEARCH_SNIPPET.format(depth=depth, seed=seed)
        proc = subprocess.run([sys.executable, "-c", snippet],
                              capture_output=True, text=True, env=env,
                              check=True)
        backend, cost, expanded, dt = proc.stdout.split()
        return backend, int(cost), int(expanded), float(dt)

    compiled = run({"IDASTRA_PURE": "0"})
    pure = run({"IDASTRA_PURE": "1"})
    if compiled[1:3] != pure[1:3]:
        raise SystemExit(f"backends disagree: {compiled} vs {pure}")
    return compiled, pure


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scramble", type=int, default=28,
                        help="scramble depth for the end-to-end search")
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    if kernels.BACKEND != "compiled":
        print("note: compiled extension not importable; comparing the "
              "fallback against itself", file=sys.stderr)

    print(f"{'kernel':<16}{'compiled (us)':>14}{'pure (us)':>12}"
          f"{'ratio':>8}")
    for name, fast, slow in bench_micro(args.repeat):
        ratio = slow / fast if fast > 0 else float("inf")
        print(f"{name:<16}{fast * 1e6:>14.3f}{slow * 1e6:>12.3f}"
              f"{ratio:>8.1f}x")

    compiled, pure = bench_search(args.scramble, args.seed)
    print(f"\nserial search, scramble depth {args.scramble} "
          f"(cost {compiled[1]}, {compiled[2]} expansions):")
    print(f"{'backend':<16}{'seconds':>12}{'ratio':>8}")
    print(f"{compiled[0]:<16}{compiled[3]:>12.4f}{1.0:>7.1f}x")
    print(f"{pure[0]:<16}{pure[3]:>12.4f}"
          f"{pure[3] / compiled[3]:>7.1f}x")


if __name__ == "__main__":
    main()
