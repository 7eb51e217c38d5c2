"""Compare the compiled and pure-Python similarity kernels.

Usage: python benchmarks/bench_fuzzy.py [--sizes 100,250,500]

Runs the all-pairs scorer over seeded synthetic name corpora with both
backends and prints per-size timings plus the speedup ratio. The two
backends must agree result-for-result; this script asserts that as it goes.
"""

from __future__ import annotations

import argparse
import random
import string
import time

from bomdiff import _jaro_py

try:
    from bomdiff import _jaro_cy
except ImportError:
    _jaro_cy = None

ALPHABET = string.ascii_lowercase + string.digits + "-._"


def corpus(n: int, seed: int = 20240915) -> list[str]:
    rng = random.Random(seed)
    out = set()
    while len(out) < n:
        length = rng.randrange(4, 32)
        out.add("".join(rng.choice(ALPHABET) for _ in range(length)))
    return sorted(out)


def time_backend(kernel, names: list[str], threshold: float) -> tuple[float, list]:
    start = time.perf_counter()
    result = kernel.score_pairs(names, names, threshold)
    return time.perf_counter() - start, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--sizes", default="100,250,500", help="comma-separated corpus sizes"
    )
    parser.add_argument("--threshold", type=float, default=0.85)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if _jaro_cy is None:
        print("compiled backend not built; showing pure-Python timings only")

    header = f"{'names':>7} {'pairs':>10} {'pure (s)':>10}"
    if _jaro_cy is not None:
        header += f" {'compiled (s)':>13} {'speedup':>8}"
    print(header)
    for n in sizes:
        names = corpus(n)
        t_py, r_py = time_backend(_jaro_py, names, args.threshold)
        line = f"{n:>7} {n * n:>10} {t_py:>10.4f}"
        if _jaro_cy is not None:
            t_cy, r_cy = time_backend(_jaro_cy, names, args.threshold)
            assert r_py == r_cy, "backends disagree"
            line += f" {t_cy:>13.4f} {t_py / t_cy:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
