"""Compare the numba and pure-numpy kernel backends.

Each backend runs in its own subprocess because the backend is fixed at import
time by ``TRITELEPORT_DISABLE_JIT``.

    python benchmarks/bench_kernels.py [--specs 50] [--qubits 8]
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np


def _measure(specs: int, qubits: int) -> dict:
    from triteleport import BACKEND
    from triteleport._kernels import apply_1q, apply_controlled
    from triteleport.protocols import enumerate_branches
    from triteleport.states import TripartiteSpec

    gen = np.random.default_rng(0)
    amps = gen.standard_normal(1 << qubits) + 1j * gen.standard_normal(1 << qubits)
    amps /= np.linalg.norm(amps)
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    # warm up, so jit compilation is not timed
    apply_1q(amps, qubits, 1, h)
    apply_controlled(amps, qubits, 0, qubits - 1, x)
    list(enumerate_branches(1, TripartiteSpec.random("B", gen)))

    reps = 2000
    t1 = min(timeit.repeat(lambda: apply_1q(amps, qubits, 1, h), number=reps, repeat=3)) / reps
    t2 = min(timeit.repeat(lambda: apply_controlled(amps, qubits, 0, qubits - 1, x),
                           number=reps, repeat=3)) / reps

    pool = [TripartiteSpec.random(v, gen) for v in "ABCD" for _ in range(specs)]

    def sweep():
        for spec in pool:
            for scheme in (1, 2):
                for _ in enumerate_branches(scheme, spec):
                    pass

    t3 = min(timeit.repeat(sweep, number=1, repeat=2)) / (len(pool) * 2 * 32)
    return {"backend": BACKEND, "apply_1q_us": t1 * 1e6, "apply_controlled_us": t2 * 1e6,
            "branch_us": t3 * 1e6}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--specs", type=int, default=50, help="random specs per variant")
    p.add_argument("--qubits", type=int, default=8, help="register size for the kernel timings")
    p.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = p.parse_args()
    if args.child:
        print(json.dumps(_measure(args.specs, args.qubits)))
        return

    rows = []
    for flag in ("0", "1"):
        env = dict(os.environ, TRITELEPORT_DISABLE_JIT=flag)
        out = subprocess.run([sys.executable, __file__, "--child", "--specs", str(args.specs),
                              "--qubits", str(args.qubits)],
                             env=env, capture_output=True, text=True, check=True)
        rows.append(json.loads(out.stdout))

    print(f"{'backend':<8} {'apply_1q us':>12} {'controlled us':>14} {'branch us':>10}")
    for r in rows:
        print(f"{r['backend']:<8} {r['apply_1q_us']:12.2f} {r['apply_controlled_us']:14.2f} "
              f"{r['branch_us']:10.1f}")
    if len(rows) == 2 and rows[0]["backend"] != rows[1]["backend"]:
        print(f"full-branch speedup: {rows[1]['branch_us'] / rows[0]['branch_us']:.2f}x")


if __name__ == "__main__":
    main()
