"""Compare the numba and numpy kernel backends on the hot paths.

Run:  python benchmarks/bench_backends.py [--count 200000] [--repeats 5]

The hot paths are batched DFA runs over packed word windows and full
expression evaluation; both backends must produce identical arrays, so the
benchmark also asserts agreement while it measures.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cptk import kernels
from cptk.dfa import Dfa
from cptk.langs import (FULL, Complement, Inter, LeftMark, Predicate, Union,
                        member_batch)
from cptk.words import Alphabet, window


def build_workload(alphabet, count):
    packed = window(alphabet, count)
    rng = np.random.default_rng(0)
    dfas = []
    for _ in range(20):
        n = int(rng.integers(2, 7))
        rows = tuple(tuple(int(rng.integers(0, n)) for _ in range(alphabet.size))
                     for _ in range(n))
        acc = frozenset(int(s) for s in range(n) if rng.random() < 0.4)
        dfas.append(Dfa(alphabet.size, rows, 0, acc))
    expr = Union((
        Inter((LeftMark("a", Predicate("square-length")), FULL)),
        Complement(LeftMark("b", Predicate("equal-counts-ab"))),
    ))
    return packed, dfas, expr


def time_backend(name, packed, dfas, expr, repeats):
    kernels.set_backend(name)
    # warm up (jit compilation happens here, outside the timed region)
    dfas[0].accepts_batch(packed)
    best_dfa = best_expr = float("inf")
    outputs = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        outs = [d.accepts_batch(packed) for d in dfas]
        best_dfa = min(best_dfa, time.perf_counter() - t0)
        t0 = time.perf_counter()
        vec = member_batch(expr, packed)
        best_expr = min(best_expr, time.perf_counter() - t0)
        outputs = (outs, vec)
    return best_dfa, best_expr, outputs


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=200_000,
                        help="words in the packed window (default 200000)")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    alphabet = Alphabet.parse("ab")
    packed, dfas, expr = build_workload(alphabet, args.count)
    print(f"window: {args.count} words, {len(dfas)} automata, "
          f"backends: {', '.join(kernels.available_backends())}")
    rows = []
    reference = None
    for name in kernels.available_backends():
        dfa_t, expr_t, outputs = time_backend(name, packed, dfas, expr, args.repeats)
        rows.append((name, dfa_t, expr_t))
        if reference is None:
            reference = outputs
        else:
            for a, b in zip(reference[0], outputs[0]):
                assert (a == b).all(), "backend outputs diverge"
            assert (reference[1] == outputs[1]).all(), "backend outputs diverge"
    print(f"{'backend':<10} {'dfa batch (s)':>14} {'expression (s)':>15}")
    for name, dfa_t, expr_t in rows:
        print(f"{name:<10} {dfa_t:>14.4f} {expr_t:>15.4f}")
    if len(rows) == 2:
        speed = rows[1][1] / rows[0][1] if rows[0][1] else float("inf")
        print(f"dfa-batch ratio ({rows[1][0]}/{rows[0][0]}): {speed:.2f}x")


if __name__ == "__main__":
    main()
