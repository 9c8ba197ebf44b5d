"""Time the compiled trial loop against the pure-Python fallback.

Both backends run the identical experiment and must return the identical
success ledger; the script refuses to report a speedup for runs that
disagree.  Timings are best-of ``--repeat`` wall-clock measurements.

Usage::

    python benchmarks/bench_backends.py --trials 20000
"""

import argparse
import sys
import time

from faraday_ecp.engine import CoefficientPair
from faraday_ecp.montecarlo import SimulationConfig, estimate, kernel_available


def time_backend(config, backend, repeat):
    best = float("inf")
    ledger = None
    for _ in range(repeat):
        start = time.perf_counter()
        ledger = estimate(config, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, ledger


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha2", type=float, default=0.8, help="|alpha|^2 in (0,1)")
    parser.add_argument("--n", type=int, default=3, help="register size")
    parser.add_argument("--max-rounds", type=int, default=4, dest="max_rounds")
    parser.add_argument("--trials", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions")
    args = parser.parse_args(argv)

    config = SimulationConfig(
        coefficients=CoefficientPair.from_alpha2(args.alpha2),
        n_atoms=args.n,
        max_rounds=args.max_rounds,
        trials=args.trials,
        master_seed=args.seed,
    )

    print(
        f"alpha2={args.alpha2} n={args.n} max_rounds={args.max_rounds} "
        f"trials={args.trials} seed={args.seed}"
    )

    python_time, python_ledger = time_backend(config, "python", args.repeat)
    print(
        f"python   {python_time:10.4f} s   "
        f"{args.trials / python_time:12.0f} trials/s   "
        f"counts={python_ledger.success_count_by_round}"
    )

    if not kernel_available():
        print("compiled kernel not built; install with Cython to compare")
        return 0

    compiled_time, compiled_ledger = time_backend(config, "compiled", args.repeat)
    print(
        f"compiled {compiled_time:10.4f} s   "
        f"{args.trials / compiled_time:12.0f} trials/s   "
        f"counts={compiled_ledger.success_count_by_round}"
    )

    if compiled_ledger.success_count_by_round != python_ledger.success_count_by_round:
        print("ERROR: backends disagree; timings above are not comparable")
        return 1

    print(f"speedup  {python_time / compiled_time:10.1f} x   (ledgers identical)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
