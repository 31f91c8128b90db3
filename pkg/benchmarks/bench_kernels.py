"""Compare the numba kernels against the pure Python/numpy fallback.

Each backend runs in its own interpreter because the backend is fixed at
import time by ``MWBANK_DISABLE_NUMBA``.

    python3 benchmarks/bench_kernels.py [--iters 20000] [--blocks 200000]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from mwbank import _accel
from mwbank.design import sa1_product_filter
from mwbank.lifting import sa1_lifting_plan, lift_forward, lift_inverse
from mwbank.msf import bauer_iterate

iters, blocks = int(sys.argv[1]), int(sys.argv[2])
P = sa1_product_filter()
plan = sa1_lifting_plan("dyadic", "floor", b0=5)
x = np.random.default_rng(0).integers(-2**15, 2**15, size=(blocks, 4))

def best(f, reps=3):
    f()  # warm-up (includes numba compilation)
    times = []
    for _ in range(reps):
        t = time.perf_counter()
        f()
        times.append(time.perf_counter() - t)
    return min(times)

X = bauer_iterate(P, iters)
y = lift_forward(plan, x, engine="kernel")
assert np.array_equal(lift_inverse(plan, y, engine="kernel"), x)
print(json.dumps({
    "backend": _accel.backend(),
    "bauer_s": best(lambda: bauer_iterate(P, iters)),
    "lift_s": best(lambda: lift_inverse(plan, lift_forward(plan, x, engine="kernel"), engine="kernel")),
    "lift_np_s": best(lambda: lift_inverse(plan, lift_forward(plan, x, engine="numpy"), engine="numpy")),
    "X": X.tolist(),
    "y_head": y[:4].tolist(),
}))
"""


def run(flag, iters, blocks):
    env = dict(os.environ, MWBANK_DISABLE_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", WORKER, str(iters), str(blocks)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iters", type=int, default=20000, help="fixed-point iterations")
    ap.add_argument("--blocks", type=int, default=200000, help="integer lifting blocks")
    args = ap.parse_args()

    fast = run("0", args.iters, args.blocks)
    slow = run("1", args.iters, args.blocks)
    same = fast["X"] == slow["X"] and fast["y_head"] == slow["y_head"]
    print(f"{'kernel':<28}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for key, label in (("bauer_s", f"fixed point ({args.iters} it)"),
                       ("lift_s", f"int lifting ({args.blocks} blk)"),
                       ("lift_np_s", "int lifting, vectorized")):
        print(f"{label:<28}{fast[key]:>11.4f}s{slow[key]:>11.4f}s{slow[key] / fast[key]:>9.1f}x")
    print(f"identical results: {same}")


if __name__ == "__main__":
    main()
