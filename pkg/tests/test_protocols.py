import json

import numpy as np
import pytest

import oracle
from triteleport.errors import ProtocolError, QubitIndexError
from triteleport.protocols import (ClassicalMessage, Step, Transcript,
                                   branch_probabilities, check_outcome_uniformity,
                                   correction_for, enumerate_branches,
                                   expected_collapse, locc_audit, run_scheme1,
                                   run_scheme2, verify_tables)
from triteleport.states import BellKind, TripartiteSpec, make_tripartite
from triteleport.statevec import PAULI, basis_state, fidelity_up_to_phase

P, Q, M, N = BellKind.PHI_PLUS, BellKind.PSI_PLUS, BellKind.PHI_MINUS, BellKind.PSI_MINUS


def _as_dict(state, tol=1e-12):
    return {format(i, f"0{state.num_qubits}b"): complex(np.round(a, 12))
            for i, a in enumerate(state.amps) if abs(a) > tol}


@pytest.mark.parametrize("bit", [0, 1])
@pytest.mark.parametrize("outcome", range(16))
def test_scheme1_single_term_payload(bit, outcome):
    spec = TripartiteSpec("B", 1, 0, 0, 0)
    tr = run_scheme1(spec, forced=(bit, outcome))
    assert set(_as_dict(tr.output)) == {"010"}
    assert tr.fidelity == pytest.approx(1, abs=1e-12)
    assert tr.output.labels == (8, 6, 7)


@pytest.mark.parametrize("bit", [0, 1])
@pytest.mark.parametrize("outcome", range(16))
def test_scheme2_single_term_payload(bit, outcome):
    spec = TripartiteSpec("D", 0, 1, 0, 0)
    tr = run_scheme2(spec, forced=(bit, outcome))
    assert set(_as_dict(tr.output)) == {"110"}
    assert tr.fidelity == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("scheme, variant", [(1, "C"), (2, "B"), (1, "A"), (2, "D")])
def test_all_32_branches_against_dense_oracle(scheme, variant, rng):
    spec = TripartiteSpec.random(variant, rng)
    target = oracle.tripartite(variant, *spec.coeffs)
    n = 0
    for tr in enumerate_branches(scheme, spec):
        p, out, collapsed = oracle.teleport(scheme, variant, spec.coeffs, tr.qubit1_bit, tr.outcome)
        assert tr.probability == pytest.approx(p, abs=1e-12)
        assert oracle.fidelity(out, target) == pytest.approx(1, abs=1e-10)
        assert fidelity_up_to_phase(tr.output, make_tripartite(spec)) >= 1 - 1e-10
        assert oracle.fidelity(tr.output.amps, out) == pytest.approx(1, abs=1e-10)
        assert oracle.fidelity(tr.collapsed.amps, collapsed) == pytest.approx(1, abs=1e-10)
        n += 1
    assert n == 32


@pytest.mark.parametrize("scheme", [1, 2])
def test_branch_probabilities_uniform(scheme, rng):
    for variant in "ABCD":
        spec = TripartiteSpec.random(variant, rng)
        p1, cond = branch_probabilities(scheme, spec)
        np.testing.assert_allclose(p1, 0.5, atol=1e-10)
        np.testing.assert_allclose(cond, 1 / 16, atol=1e-10)
        np.testing.assert_allclose(cond.sum(axis=1), 1, atol=1e-10)


def test_sampled_runs_are_seeded():
    spec = TripartiteSpec("A", 0.5, 0.5, 0.5, 0.5)
    a = run_scheme1(spec, rng=11)
    b = run_scheme1(spec, rng=11)
    assert (a.qubit1_bit, a.outcome) == (b.qubit1_bit, b.outcome)
    assert a.fidelity == pytest.approx(1, abs=1e-10)


def test_scheme2_bell_forcing_forms_agree():
    spec = TripartiteSpec("C", 0.5, 0.5j, -0.5, 0.5)
    by_pair = run_scheme2(spec, forced=(1, M, Q))
    by_index = run_scheme2(spec, forced=(1, 4 * 2 + 1))
    assert by_pair.outcome == by_index.outcome == 9
    assert by_pair.bell_outcome == (M, Q)


def test_table4_first_row(rng):
    spec = TripartiteSpec.random("B", rng)
    tr = run_scheme2(spec, forced=(0, P, P))
    a, b, c, d = spec.coeffs
    expected = np.array([b, c, a, d])  # a|10> + b|00> + c|01> + d|11>
    assert oracle.fidelity(tr.collapsed.amps, expected) == pytest.approx(1, abs=1e-10)


def test_correction_table_entries():
    assert (correction_for(1, 0).op6, correction_for(1, 0).op7) == ("I", "I")
    assert (correction_for(1, 12).op6, correction_for(1, 12).op7) == ("iY", "iY")
    assert (correction_for(1, 5).op6, correction_for(1, 5).op7) == ("iY", "Z")
    e = correction_for(2, (Q, Q))
    assert (e.op6, e.op7) == ("X", "X")
    with pytest.raises(QubitIndexError):
        correction_for(1, 16)


def test_corrections_square_to_plus_minus_identity():
    for scheme in (1, 2):
        for k in range(16):
            for u in correction_for(scheme, k).matrices():
                sq = u @ u
                assert np.allclose(sq, np.eye(2), atol=1e-12) or np.allclose(sq, -np.eye(2), atol=1e-12)
    np.testing.assert_allclose(PAULI["iY"], PAULI["Z"] @ PAULI["X"])


def test_expected_collapse_rows():
    spec = TripartiteSpec("B", 0.5, 0.5, 0.5, 0.5)
    h = 0.5
    np.testing.assert_allclose(expected_collapse(1, 0, 0, spec).amps, [h, h, h, h])  # a10 b00 c01 d11
    # phi16, qubit 1 = 1: a|01> - b|11> + c|10> - d|00>
    np.testing.assert_allclose(expected_collapse(1, 15, 1, spec).amps, [-h, h, h, -h])
    # (phi-, psi+), qubit 1 = 0: -a|11> + b|01> + c|00> - d|10>
    np.testing.assert_allclose(expected_collapse(2, (M, Q), 0, spec).amps, [h, h, -h, -h])
    # phi7 spot check: a|00> + b|10> + c|11> + d|01>
    vals = TripartiteSpec("B", 0.1, 0.3, 0.5, np.sqrt(1 - 0.35))
    np.testing.assert_allclose(expected_collapse(1, 6, 0, vals).amps, [0.1, vals.d, 0.3, 0.5])
    with pytest.raises(QubitIndexError):
        expected_collapse(1, 16, 0, spec)
    with pytest.raises(ValueError):
        expected_collapse(1, 0, 0, spec.with_variant("A"))


@pytest.mark.parametrize("scheme", [1, 2])
def test_verify_tables_full_sweep(scheme):
    rep = verify_tables(scheme, trials=100, rng=5)
    assert rep.checks == 3200
    assert rep.mismatches == []
    assert sum(1 for *_, ok in rep.rows() if ok) == 32


def test_verify_tables_catches_a_wrong_row(monkeypatch):
    from triteleport import protocols
    rows = list(protocols.SCHEME1_COLLAPSE)
    rows[3] = ("+a10 +b00 -c01 +d11", rows[3][1])
    monkeypatch.setattr(protocols, "SCHEME1_COLLAPSE", tuple(rows))
    rep = verify_tables(1, trials=3, rng=1)
    assert set(rep.row_failures) == {(0, 3)}


def test_uniformity_suite():
    rep = check_outcome_uniformity(10, rng=2)
    assert rep.ok and rep.max_deviation < 1e-12


def test_locc_audit_passes_for_engine_runs(rng):
    for scheme in (1, 2):
        for variant in "ABCD":
            locc_audit(run_scheme1(TripartiteSpec.random(variant, rng), rng=rng) if scheme == 1
                       else run_scheme2(TripartiteSpec.random(variant, rng), rng=rng))


def _hand_transcript(steps, message=ClassicalMessage(0, (0, 0, 0, 0))):
    spec = TripartiteSpec("B", 1, 0, 0, 0)
    s = make_tripartite(spec)
    return Transcript(1, spec, 0, 0, 1 / 32, correction_for(1, 0), 1, basis_state([0, 0]),
                      s, 1.0, message, steps)


BASE = [Step("sender", "prepare", (1, 2, 3)), Step("source", "prepare", (4, 5, 6, 7)),
        Step("source", "distribute", (4, 5, 6, 7)), Step("sender", "gate", (1,), "H")]


def test_locc_audit_rejects_cross_party_gate():
    steps = BASE + [Step("sender", "gate", (5, 6), "CNOT"), Step("sender", "message", (), "00000")]
    with pytest.raises(ProtocolError, match=r"step 4"):
        locc_audit(_hand_transcript(steps))


def test_locc_audit_rejects_six_bit_message():
    steps = BASE + [Step("sender", "message", (), "000000")]
    with pytest.raises(ProtocolError):
        locc_audit(_hand_transcript(steps, ClassicalMessage(0, (0, 0, 0, 0, 0))))


def test_locc_audit_rejects_receiver_before_message():
    steps = BASE + [Step("receiver", "correct", (6,), "X"), Step("sender", "message", (), "00000")]
    with pytest.raises(ProtocolError, match="before the message"):
        locc_audit(_hand_transcript(steps))


def test_transcript_json_shape():
    tr = run_scheme2(TripartiteSpec("C", 0.5, 0.5, 0.5, 0.5), forced=(0, 5))
    d = json.loads(tr.to_json())
    assert set(d) >= {"scheme", "variant", "coeffs", "qubit1_bit", "outcome", "probability",
                      "corrections", "fidelity"}
    assert d["coeffs"] == [[0.5, 0.0]] * 4
    assert d["outcome"] == [1, 1]
    assert d["corrections"] == ["X", "X"]
    assert d["probability"] == pytest.approx(1 / 32)
    assert len(tr.message.bits) == 5
