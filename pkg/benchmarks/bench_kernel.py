"""Time the compiled and pure-Python removal kernels on the same inputs.

    python benchmarks/bench_kernel.py [--instances N] [--seats W] [--seed S]

Both backends must return identical states; the script stops if they differ.
"""

from __future__ import annotations

import argparse
import random
import time
from fractions import Fraction

from pamsac import kernel
from pamsac.core import ApprovalProfile
from pamsac.removal import _ratio, project


def instances(n, seats, seed):
    rng = random.Random(seed)
    roster = "ABCDEFGH"[: seats + 2]
    out = []
    while len(out) < n:
        pairs = [(rng.randint(1, 6), [c for c in roster if rng.random() < 0.45]) for _ in range(rng.randint(4, 9))]
        profile = ApprovalProfile.from_pairs(pairs, roster=tuple(roster))
        pool = profile.approved_candidates()
        if len(pool) < seats:
            continue
        committee = tuple(rng.sample(pool, seats))
        out.append(project(profile, profile.sort_set(committee), 6))
    return out


def run(backend, projs, rn, rd):
    results = []
    start = time.perf_counter()
    for proj in projs:
        k = len(proj.committee)
        full = {b: s for b, s, _ in proj.frags}
        settled = kernel.settle(k, rn, rd, proj.unit, list(proj.frags), 1, backend=backend)
        desc = kernel.descend(k, rn, rd, proj.unit, list(proj.frags), 0, full, backend=backend)
        results.append((settled[2], desc[1]))
    return time.perf_counter() - start, results


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seats", type=int, default=4)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    projs = instances(args.instances, args.seats, args.seed)
    rn, rd = _ratio(Fraction(1, 2))
    py_time, py_res = run("python", projs, rn, rd)
    print(f"python  {py_time:8.3f} s")
    if kernel.BACKEND != "cython":
        print("cython  not built")
        return
    cy_time, cy_res = run("cython", projs, rn, rd)
    if cy_res != py_res:
        raise SystemExit("backends disagree")
    print(f"cython  {cy_time:8.3f} s")
    print(f"speedup {py_time / cy_time:8.1f}x over {len(projs)} instances, {args.seats} seats")


if __name__ == "__main__":
    main()
