"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see the lines inline;
they are also written to the terminal when output is captured).
"""
import time

import numpy as np
import pytest

from triteleport.circuit import builtin_text, metrics, parse_circuit, run_builtin
from triteleport.protocols import (branch_probabilities, enumerate_branches,
                                   run_scheme, verify_tables)
from triteleport.states import (TripartiteSpec, check_variant_relations,
                                entanglement_spectrum, make_joint_basis,
                                make_tripartite)
from triteleport.statevec import fidelity_up_to_phase

TOL = 1e-10
VARIANTS = "ABCD"


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance] criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail
    return emit


def test_criterion_1_perfect_teleportation(report):
    gen = np.random.default_rng(1)
    worst, runs = 1.0, 0
    start = time.perf_counter()
    for _ in range(1000):
        for variant in VARIANTS:
            spec = TripartiteSpec.random(variant, gen)
            for scheme in (1, 2):
                for tr in enumerate_branches(scheme, spec):
                    worst = min(worst, tr.fidelity)
                    runs += 1
    elapsed = time.perf_counter() - start
    report(1, runs == 1000 * 4 * 2 * 32 and worst >= 1 - TOL,
           f"{runs} branches, min fidelity 1-{1 - worst:.1e}, {elapsed:.1f} s")


def test_criterion_2_table_reproduction(report):
    reps = [verify_tables(s, trials=100, rng=2, tol=TOL) for s in (1, 2)]
    cells = sum(ok for r in reps for *_, ok in r.rows())
    bad = sum(len(r.mismatches) for r in reps)
    report(2, bad == 0 and cells == 64,
           f"{bad} mismatches / {sum(r.checks for r in reps)} checks, {cells}/64 table cells")


def test_criterion_3_cost_numbers(report):
    expected = {(1, "C"): (12, 17, 5), (2, "C"): (10, 15, 5),
                (1, "B"): (13, 18, 5), (2, "B"): (11, 16, 5),
                (1, "A"): (12, 17, 5), (2, "A"): (10, 15, 5),
                (1, "D"): (13, 18, 5), (2, "D"): (11, 16, 5)}
    got = {k: metrics(parse_circuit(builtin_text(*k))).as_tuple() for k in expected}
    wrong = {k: v for k, v in got.items() if v != expected[k]}
    report(3, not wrong, "all 8 builtins exact" if not wrong else f"mismatch {wrong}")


def test_criterion_4_basis_integrity(report):
    jb = make_joint_basis()
    gram_err = float(np.max(np.abs(jb.basis.gram() - np.eye(16))))
    spec_err = max(float(np.max(np.abs(entanglement_spectrum(jb.vector(k), (2, 3)) - 0.25)))
                   for k in range(16))
    report(4, gram_err <= TOL and spec_err <= TOL,
           f"Gram error {gram_err:.1e}, spectrum error {spec_err:.1e}")


def test_criterion_5_outcome_statistics(report):
    gen = np.random.default_rng(5)
    exact_err = 0.0
    for scheme in (1, 2):
        for variant in VARIANTS:
            for _ in range(25):
                p1, cond = branch_probabilities(scheme, TripartiteSpec.random(variant, gen))
                exact_err = max(exact_err, float(np.max(np.abs(p1 - 0.5))),
                                float(np.max(np.abs(cond - 1 / 16))))

    trials = 16000
    worst_z = 0.0
    for scheme in (1, 2):
        counts = np.zeros(16, dtype=np.int64)
        ones = 0
        for i in range(trials):
            tr = run_scheme(scheme, TripartiteSpec.random(VARIANTS[i % 4], gen), rng=gen)
            counts[tr.outcome] += 1
            ones += tr.qubit1_bit
        z_out = np.max(np.abs(counts - trials / 16)) / np.sqrt(trials * (1 / 16) * (15 / 16))
        z_bit = abs(ones - trials / 2) / np.sqrt(trials / 4)
        worst_z = max(worst_z, float(z_out), float(z_bit))
    report(5, exact_err <= TOL and worst_z < 5,
           f"exact probability error {exact_err:.1e}, worst sampled |z| {worst_z:.2f} over {trials} trials")


def test_criterion_6_variant_relations(report):
    rep = check_variant_relations(100, rng=6, tol=TOL)
    report(6, rep.ok and rep.checks == 400, f"{len(rep.failures)} failures / {rep.checks} checks")


def test_criterion_7_circuit_protocol_equivalence(report):
    gen = np.random.default_rng(7)
    worst, n = 1.0, 0
    for scheme in (1, 2):
        for variant in VARIANTS:
            for _ in range(5):
                spec = TripartiteSpec.random(variant, gen)
                target = make_tripartite(spec)
                for tr in enumerate_branches(scheme, spec):
                    out, bits, p = run_builtin(scheme, spec, tr.qubit1_bit, tr.outcome)
                    ok = bits["c1"] == tr.qubit1_bit and abs(p - tr.probability) <= TOL
                    f = min(fidelity_up_to_phase(out, tr.output), fidelity_up_to_phase(out, target))
                    worst = min(worst, f if ok else 0.0)
                    n += 1
    report(7, worst >= 1 - TOL, f"{n} branches, min fidelity 1-{1 - worst:.1e}")
