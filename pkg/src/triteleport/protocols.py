"""The two teleportation schemes as sender/receiver protocols.

Qubit labels: 1-3 carry the payload, 4-7 the entanglement channel and 8 is
the receiver's ancilla.  The sender owns 1-5, the receiver 6-8.

Scheme 1 shares a four-qubit cluster state on (4, 5, 6, 7) and the sender
measures (2, 3, 4, 5) in a 16-element joint basis.  Scheme 2 shares
phi+ on (4, 7) and (5, 6) and the sender makes Bell measurements on (2, 5)
and (3, 4).  In both, qubit 1 is measured after a Hadamard and the receiver
rebuilds the payload on (8, 6, 7).

Outcomes are integers 0-15.  For scheme 1 the integer ``k`` is the joint
vector written phi_{k+1}; for scheme 2 it is ``4 * bell25 + bell34`` with
Bell kinds numbered as in :class:`~triteleport.states.BellKind`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from .errors import ProtocolError, QubitIndexError
from .statevec import (NORM_TOL, PAULI, GateOp, MeasurementBasis, Statevector,
                       apply, apply_unitary, basis_state, fidelity_up_to_phase,
                       measure_in_basis, outcome_probabilities, permute_qubits,
                       project_in_basis, tensor)
from .states import (BellKind, TripartiteSpec, bell_basis, make_bell,
                     make_cluster_state, make_joint_basis, make_tripartite)

SCHEMES = (1, 2)
SENDER_QUBITS = frozenset({1, 2, 3, 4, 5})
RECEIVER_QUBITS = frozenset({6, 7, 8})
OWNERSHIP = {"sender": SENDER_QUBITS, "receiver": RECEIVER_QUBITS}
MESSAGE_BITS = 5
OUTPUT_ORDER = (8, 6, 7)

# Receiver corrections on (6, 7) for scheme 1, indexed by joint outcome.
SCHEME1_CORRECTIONS = (
    ("I", "I"), ("Z", "I"), ("I", "Z"), ("Z", "Z"),
    ("X", "Z"), ("iY", "Z"), ("X", "I"), ("iY", "I"),
    ("Z", "X"), ("I", "X"), ("Z", "iY"), ("I", "iY"),
    ("iY", "iY"), ("X", "iY"), ("iY", "X"), ("X", "X"),
)

_P, _Q, _M, _N = BellKind.PHI_PLUS, BellKind.PSI_PLUS, BellKind.PHI_MINUS, BellKind.PSI_MINUS

# Receiver corrections for scheme 2, keyed by (Bell state of (2,5), Bell state of (3,4)).
SCHEME2_CORRECTIONS = {
    (_P, _P): ("I", "I"), (_M, _P): ("Z", "I"),
    (_P, _M): ("I", "Z"), (_M, _M): ("Z", "Z"),
    (_Q, _M): ("X", "Z"), (_N, _M): ("iY", "Z"),
    (_Q, _P): ("X", "I"), (_N, _P): ("iY", "I"),
    (_M, _Q): ("Z", "X"), (_P, _Q): ("I", "X"),
    (_M, _N): ("Z", "iY"), (_P, _N): ("I", "iY"),
    (_N, _N): ("iY", "iY"), (_Q, _N): ("X", "iY"),
    (_N, _Q): ("iY", "X"), (_Q, _Q): ("X", "X"),
}

# Collapsed (6, 7) states for a variant-B payload: (qubit 1 reads 0, qubit 1 reads 1).
SCHEME1_COLLAPSE = (
    ("+a10 +b00 +c01 +d11", "+a10 -b00 +c01 -d11"),
    ("-a10 +b00 +c01 -d11", "-a10 -b00 +c01 +d11"),
    ("+a10 +b00 -c01 -d11", "+a10 -b00 -c01 +d11"),
    ("-a10 +b00 -c01 +d11", "-a10 -b00 -c01 -d11"),
    ("+a00 +b10 -c11 -d01", "+a00 -b10 -c11 +d01"),
    ("-a00 +b10 -c11 +d01", "-a00 -b10 -c11 -d01"),
    ("+a00 +b10 +c11 +d01", "+a00 -b10 +c11 -d01"),
    ("-a00 +b10 +c11 -d01", "-a00 -b10 +c11 +d01"),
    ("-a11 +b01 +c00 -d10", "-a11 -b01 +c00 +d10"),
    ("+a11 +b01 +c00 +d10", "+a11 -b01 +c00 -d10"),
    ("-a11 +b01 -c00 +d10", "-a11 -b01 -c00 -d10"),
    ("+a11 +b01 -c00 -d10", "+a11 -b01 -c00 +d10"),
    ("-a01 +b11 -c10 +d00", "-a01 -b11 -c10 -d00"),
    ("+a01 +b11 -c10 -d00", "+a01 -b11 -c10 +d00"),
    ("-a01 +b11 +c10 -d00", "-a01 -b11 +c10 +d00"),
    ("+a01 +b11 +c10 +d00", "+a01 -b11 +c10 -d00"),
)

SCHEME2_COLLAPSE = {
    (_P, _P): ("+a10 +b00 +c01 +d11", "+a10 -b00 +c01 -d11"),
    (_M, _P): ("-a10 +b00 +c01 -d11", "-a10 -b00 +c01 +d11"),
    (_P, _M): ("+a10 +b00 -c01 -d11", "+a10 -b00 -c01 +d11"),
    (_M, _M): ("-a10 +b00 -c01 +d11", "-a10 -b00 -c01 -d11"),
    (_Q, _M): ("+a00 +b10 -c11 -d01", "+a00 -b10 -c11 +d01"),
    (_N, _M): ("-a00 +b10 -c11 +d01", "-a00 -b10 -c11 -d01"),
    (_Q, _P): ("+a00 +b10 +c11 +d01", "+a00 -b10 +c11 -d01"),
    (_N, _P): ("-a00 +b10 +c11 -d01", "-a00 -b10 +c11 +d01"),
    (_M, _Q): ("-a11 +b01 +c00 -d10", "-a11 -b01 +c00 +d10"),
    (_P, _Q): ("+a11 +b01 +c00 +d10", "+a11 -b01 +c00 -d10"),
    (_M, _N): ("-a11 +b01 -c00 +d10", "-a11 -b01 -c00 -d10"),
    (_P, _N): ("+a11 +b01 -c00 -d10", "+a11 -b01 -c00 +d10"),
    (_N, _N): ("-a01 +b11 -c10 +d00", "-a01 -b11 -c10 -d00"),
    (_Q, _N): ("+a01 +b11 -c10 -d00", "+a01 -b11 -c10 +d00"),
    (_N, _Q): ("-a01 +b11 +c10 -d00", "-a01 -b11 +c10 +d00"),
    (_Q, _Q): ("+a01 +b11 +c10 +d00", "+a01 -b11 +c10 -d00"),
}

# State of (2, 3) after the Hadamard on qubit 1 reads 0 / 1, variant B.
PAYLOAD_BRANCH = ("+a10 +b00 +c01 +d11", "+a10 -b00 +c01 -d11")


def _check_scheme(scheme):
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be 1 or 2, got {scheme!r}")


def _check_outcome(outcome):
    if not isinstance(outcome, (int, np.integer)) or not 0 <= outcome < 16:
        raise QubitIndexError(f"outcome {outcome!r} out of range 0..15")


def _check_bit(bit):
    if bit not in (0, 1):
        raise QubitIndexError(f"qubit-1 bit must be 0 or 1, got {bit!r}")


def bell_pair(outcome: int) -> tuple[BellKind, BellKind]:
    """Scheme-2 outcome index -> (kind on (2,5), kind on (3,4))."""
    _check_outcome(outcome)
    return BellKind(outcome // 4), BellKind(outcome % 4)


def bell_outcome(bell25, bell34) -> int:
    return 4 * int(BellKind.parse(bell25)) + int(BellKind.parse(bell34))


def outcome_name(scheme: int, outcome: int) -> str:
    _check_scheme(scheme)
    _check_outcome(outcome)
    if scheme == 1:
        return f"phi{outcome + 1}"
    b25, b34 = bell_pair(outcome)
    return f"{b25.ascii}(25) {b34.ascii}(34)"


def ancilla_bit(variant: str) -> int:
    return 1 if variant in ("A", "B") else 0


def uses_cnot_78(variant: str) -> bool:
    return variant in ("B", "D")


class Step(NamedTuple):
    party: str   # "source", "sender" or "receiver"
    action: str  # "prepare", "distribute", "gate", "measure", "message", "correct"
    qubits: tuple
    detail: str = ""


@dataclass(frozen=True)
class ClassicalMessage:
    qubit1_bit: int
    outcome_bits: tuple

    @property
    def bits(self) -> tuple:
        return (self.qubit1_bit,) + tuple(self.outcome_bits)

    @classmethod
    def encode(cls, qubit1_bit: int, outcome: int) -> "ClassicalMessage":
        return cls(qubit1_bit, tuple((outcome >> k) & 1 for k in (3, 2, 1, 0)))


@dataclass(frozen=True)
class CorrectionEntry:
    outcome: int
    op6: str
    op7: str

    def matrices(self) -> tuple[np.ndarray, np.ndarray]:
        return PAULI[self.op6], PAULI[self.op7]


def correction_for(scheme: int, outcome) -> CorrectionEntry:
    """Receiver unitaries on (6, 7).  Scheme 2 also accepts a (bell25, bell34) pair."""
    _check_scheme(scheme)
    if scheme == 2 and isinstance(outcome, tuple):
        outcome = bell_outcome(*outcome)
    _check_outcome(outcome)
    if scheme == 1:
        op6, op7 = SCHEME1_CORRECTIONS[outcome]
    else:
        op6, op7 = SCHEME2_CORRECTIONS[bell_pair(outcome)]
    return CorrectionEntry(int(outcome), op6, op7)


def _two_qubit_state(row: str, spec: TripartiteSpec, labels=(6, 7)) -> Statevector:
    values = dict(zip("abcd", spec.coeffs))
    amps = np.zeros(4, dtype=np.complex128)
    for term in row.split():
        sign = -1 if term[0] == "-" else 1
        amps[int(term[2:], 2)] += sign * values[term[1]]
    return Statevector(amps, labels)


def expected_collapse(scheme: int, outcome, qubit1_bit: int, spec: TripartiteSpec) -> Statevector:
    """Tabulated pre-correction state of (6, 7) for a variant-B payload."""
    _check_scheme(scheme)
    _check_bit(qubit1_bit)
    if spec.variant != "B":
        raise ValueError("collapse tables are written for variant B only")
    if scheme == 2 and isinstance(outcome, tuple):
        outcome = bell_outcome(*outcome)
    _check_outcome(outcome)
    row = SCHEME1_COLLAPSE[outcome] if scheme == 1 else SCHEME2_COLLAPSE[bell_pair(outcome)]
    return _two_qubit_state(row[qubit1_bit], spec)


def payload_branch_state(spec: TripartiteSpec, qubit1_bit: int, labels=(6, 7)) -> Statevector:
    """Variant-B (2, 3) state conditioned on qubit 1, carried over to ``labels``."""
    _check_bit(qubit1_bit)
    return _two_qubit_state(PAYLOAD_BRANCH[qubit1_bit], spec.with_variant("B"), labels)


@dataclass
class Transcript:
    scheme: int
    spec: TripartiteSpec
    qubit1_bit: int
    outcome: int
    probability: float
    corrections: CorrectionEntry
    ancilla_bit: int
    collapsed: Statevector
    output: Statevector
    fidelity: float
    message: ClassicalMessage
    steps: list = field(default_factory=list)

    @property
    def bell_outcome(self) -> Optional[tuple]:
        return bell_pair(self.outcome) if self.scheme == 2 else None

    def to_dict(self) -> dict:
        outcome = self.outcome if self.scheme == 1 else [int(k) for k in bell_pair(self.outcome)]
        return {
            "scheme": self.scheme,
            "variant": self.spec.variant,
            "coeffs": [[float(z.real), float(z.imag)] for z in self.spec.coeffs],
            "qubit1_bit": self.qubit1_bit,
            "outcome": outcome,
            "probability": float(self.probability),
            "corrections": [self.corrections.op6, self.corrections.op7],
            "ancilla_bit": self.ancilla_bit,
            "fidelity": float(self.fidelity),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


@lru_cache(maxsize=None)
def _joint_basis():
    return make_joint_basis().basis


@lru_cache(maxsize=None)
def _bell_basis():
    return bell_basis()


_QUBIT1_BASIS = MeasurementBasis.computational(1)
_H1 = GateOp("H", (1,))


def _sender_start(spec: TripartiteSpec, scheme: int) -> tuple[Statevector, list]:
    """Payload and channel in place, and the sender's Hadamard on qubit 1 applied."""
    if scheme == 1:
        channel = make_cluster_state((4, 5, 6, 7))
        channel_steps = [Step("source", "prepare", (4, 5, 6, 7), "cluster")]
    else:
        channel = tensor(make_bell(BellKind.PHI_PLUS, (4, 7)), make_bell(BellKind.PHI_PLUS, (5, 6)))
        channel_steps = [Step("source", "prepare", (4, 7), "phi+"),
                         Step("source", "prepare", (5, 6), "phi+")]
    state = apply(tensor(make_tripartite(spec, (1, 2, 3)), channel), _H1)
    steps = [Step("sender", "prepare", (1, 2, 3), f"payload {spec.variant}"), *channel_steps,
             Step("source", "distribute", (4, 5, 6, 7)),
             Step("sender", "gate", (1,), "H")]
    return state, steps


def _measure_qubit1(state, bit, rng):
    if bit is None:
        bit, prob, rest = measure_in_basis(state, (1,), _QUBIT1_BASIS, rng)
    else:
        _check_bit(bit)
        prob, rest = project_in_basis(state, (1,), _QUBIT1_BASIS, bit)
    return bit, prob, rest


def _sender_measure(state, scheme, outcome, rng):
    """Returns (outcome, probability, remaining (6, 7) state, steps)."""
    if scheme == 1:
        if outcome is None:
            outcome, prob, rest = measure_in_basis(state, (2, 3, 4, 5), _joint_basis(), rng)
        else:
            _check_outcome(outcome)
            prob, rest = project_in_basis(state, (2, 3, 4, 5), _joint_basis(), outcome)
        steps = [Step("sender", "measure", (2, 3, 4, 5), f"joint phi{outcome + 1}")]
    else:
        basis = _bell_basis()
        if outcome is None:
            b25, p25, rest = measure_in_basis(state, (2, 5), basis, rng)
            b34, p34, rest = measure_in_basis(rest, (3, 4), basis, rng)
            outcome = 4 * b25 + b34
        else:
            _check_outcome(outcome)
            b25, b34 = divmod(int(outcome), 4)
            p25, rest = project_in_basis(state, (2, 5), basis, b25)
            p34, rest = project_in_basis(rest, (3, 4), basis, b34)
        prob = p25 * p34
        steps = [Step("sender", "measure", (2, 5), f"bell {BellKind(b25).ascii}"),
                 Step("sender", "measure", (3, 4), f"bell {BellKind(b34).ascii}")]
    return int(outcome), prob, permute_qubits(rest, (6, 7)), steps


def receiver_recover(collapsed: Statevector, scheme: int, outcome: int, qubit1_bit: int,
                     variant: str) -> tuple[Statevector, CorrectionEntry, list]:
    """Apply the table correction, entangle the ancilla and fix its phase.

    Returns the payload on (8, 6, 7), the correction used and the steps taken.
    """
    corr = correction_for(scheme, outcome)
    u6, u7 = corr.matrices()
    state = apply_unitary(apply_unitary(collapsed, u6, 6), u7, 7)
    anc = ancilla_bit(variant)
    state = tensor(state, basis_state([anc], (8,)))
    steps = [Step("receiver", "correct", (6,), corr.op6), Step("receiver", "correct", (7,), corr.op7),
             Step("receiver", "prepare", (8,), f"ancilla |{anc}>")]
    if uses_cnot_78(variant):
        state = apply(state, GateOp("CNOT", (7, 8)))
        steps.append(Step("receiver", "gate", (7, 8), "CNOT"))
    state = apply(state, GateOp("CNOT", (6, 8)))
    steps.append(Step("receiver", "gate", (6, 8), "CNOT"))
    if qubit1_bit:
        state = apply(state, GateOp("Z", (8,)))
        steps.append(Step("receiver", "correct", (8,), "Z"))
    return permute_qubits(state, OUTPUT_ORDER), corr, steps


def _finish(spec, scheme, bit, p1, outcome, p2, collapsed, steps, target=None) -> Transcript:
    msg = ClassicalMessage.encode(bit, outcome)
    steps.append(Step("sender", "message", (), "".join(map(str, msg.bits))))
    output, corr, rsteps = receiver_recover(collapsed, scheme, outcome, bit, spec.variant)
    steps.extend(rsteps)
    target = make_tripartite(spec) if target is None else target
    fid = fidelity_up_to_phase(output, target)
    return Transcript(scheme, spec, bit, outcome, p1 * p2, corr, ancilla_bit(spec.variant),
                      collapsed, output, fid, msg, steps)


def run_scheme(scheme: int, spec: TripartiteSpec, qubit1_bit: Optional[int] = None,
               outcome: Optional[int] = None, rng=None) -> Transcript:
    """Run one teleportation.  Unforced measurements are sampled from ``rng``."""
    _check_scheme(scheme)
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    state, steps = _sender_start(spec, scheme)
    bit, p1, state = _measure_qubit1(state, qubit1_bit, rng)
    steps.append(Step("sender", "measure", (1,), "Z basis"))
    outcome, p2, collapsed, msteps = _sender_measure(state, scheme, outcome, rng)
    steps.extend(msteps)
    return _finish(spec, scheme, bit, p1, outcome, p2, collapsed, steps)


def run_scheme1(spec: TripartiteSpec, forced: Optional[tuple] = None, rng=None) -> Transcript:
    """Cluster-channel scheme.  ``forced`` is ``(qubit1_bit, joint_outcome)``."""
    bit, outcome = forced if forced is not None else (None, None)
    return run_scheme(1, spec, bit, outcome, rng)


def run_scheme2(spec: TripartiteSpec, forced: Optional[tuple] = None, rng=None) -> Transcript:
    """Two-Bell-pair scheme.  ``forced`` is ``(bit, bell25, bell34)`` or ``(bit, outcome)``."""
    if forced is None:
        return run_scheme(2, spec, None, None, rng)
    if len(forced) == 3:
        bit, b25, b34 = forced
        return run_scheme(2, spec, bit, bell_outcome(b25, b34), rng)
    bit, outcome = forced
    return run_scheme(2, spec, bit, outcome, rng)


def enumerate_branches(scheme: int, spec: TripartiteSpec):
    """Yield the transcript of every one of the 32 (qubit-1 bit, outcome) branches."""
    _check_scheme(scheme)
    start, start_steps = _sender_start(spec, scheme)
    target = make_tripartite(spec)
    for bit in (0, 1):
        p1, after1 = project_in_basis(start, (1,), _QUBIT1_BASIS, bit)
        for outcome in range(16):
            steps = list(start_steps)
            steps.append(Step("sender", "measure", (1,), "Z basis"))
            _, p2, collapsed, msteps = _sender_measure(after1, scheme, outcome, None)
            steps.extend(msteps)
            yield _finish(spec, scheme, bit, p1, outcome, p2, collapsed, steps, target)


def branch_probabilities(scheme: int, spec: TripartiteSpec) -> tuple[np.ndarray, np.ndarray]:
    """Born probabilities of qubit 1 (shape 2) and of the sender outcome given each bit (2 x 16)."""
    start, _ = _sender_start(spec, scheme)
    p1 = outcome_probabilities(start, (1,), _QUBIT1_BASIS)
    cond = np.zeros((2, 16))
    for bit in (0, 1):
        _, after1 = project_in_basis(start, (1,), _QUBIT1_BASIS, bit)
        if scheme == 1:
            cond[bit] = outcome_probabilities(after1, (2, 3, 4, 5), _joint_basis())
        else:
            for b25 in range(4):
                p25, rest = project_in_basis(after1, (2, 5), _bell_basis(), b25)
                cond[bit, 4 * b25:4 * b25 + 4] = p25 * outcome_probabilities(rest, (3, 4), _bell_basis())
    return p1, cond


@dataclass
class TableReport:
    scheme: int
    checks: int = 0
    mismatches: list = field(default_factory=list)
    row_failures: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def rows(self):
        """One ``(qubit1_bit, outcome, name, passed)`` tuple per table cell."""
        for bit in (0, 1):
            for outcome in range(16):
                yield bit, outcome, outcome_name(self.scheme, outcome), not self.row_failures.get((bit, outcome))


def verify_tables(scheme: int, trials: int = 100, rng=None, tol: float = NORM_TOL) -> TableReport:
    """Compare simulated collapse states with the tables and check the corrections.

    Each of ``trials`` random variant-B payloads is run through all 32
    branches.  A branch fails if the simulated (6, 7) state differs from the
    tabulated one, or if the tabulated correction does not turn it into the
    payload's conditional (2, 3) state.
    """
    _check_scheme(scheme)
    rng = np.random.default_rng(rng)
    report = TableReport(scheme)
    for t in range(trials):
        spec = TripartiteSpec.random("B", rng)
        targets = [payload_branch_state(spec, bit) for bit in (0, 1)]
        for tr in enumerate_branches(scheme, spec):
            report.checks += 1
            key = (tr.qubit1_bit, tr.outcome)
            expected = expected_collapse(scheme, tr.outcome, tr.qubit1_bit, spec)
            f_table = fidelity_up_to_phase(tr.collapsed, expected)
            u6, u7 = tr.corrections.matrices()
            corrected = apply_unitary(apply_unitary(expected, u6, 6), u7, 7)
            f_corr = fidelity_up_to_phase(corrected, targets[tr.qubit1_bit])
            bad = []
            if f_table < 1 - tol:
                bad.append(("collapse", f_table))
            if f_corr < 1 - tol:
                bad.append(("correction", f_corr))
            if bad:
                report.mismatches.append((t, *key, bad))
                report.row_failures[key] = report.row_failures.get(key, 0) + 1
    return report


@dataclass
class UniformityReport:
    checks: int = 0
    max_deviation: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_outcome_uniformity(trials: int = 100, rng=None, tol: float = NORM_TOL) -> UniformityReport:
    """Exhaustive Born probabilities: 1/2 for qubit 1 and 1/16 for each sender outcome."""
    rng = np.random.default_rng(rng)
    report = UniformityReport()
    from .states import VARIANTS
    for t in range(trials):
        for variant in VARIANTS:
            spec = TripartiteSpec.random(variant, rng)
            for scheme in SCHEMES:
                p1, cond = branch_probabilities(scheme, spec)
                dev = max(np.max(np.abs(p1 - 0.5)), np.max(np.abs(cond - 1 / 16)))
                report.checks += 1
                report.max_deviation = max(report.max_deviation, float(dev))
                if dev > tol:
                    report.failures.append((t, variant, scheme, float(dev)))
    return report


def locc_audit(transcript: Transcript) -> bool:
    """Check that the run only used local operations plus the classical message."""
    steps = transcript.steps
    distributed = False
    message_seen = False
    for i, step in enumerate(steps):
        where = f"step {i} ({step.party} {step.action} on {step.qubits})"
        if step.action == "distribute":
            if distributed:
                raise ProtocolError(f"{where}: channel distributed twice")
            distributed = True
            continue
        if step.party == "source":
            if distributed or step.action != "prepare":
                raise ProtocolError(f"{where}: the entanglement source may only prepare before distribution")
            continue
        if step.party not in OWNERSHIP:
            raise ProtocolError(f"{where}: unknown party")
        if step.action == "message":
            if step.party != "sender" or message_seen:
                raise ProtocolError(f"{where}: exactly one sender-to-receiver message is allowed")
            if len(transcript.message.bits) != MESSAGE_BITS or step.detail and len(step.detail) != MESSAGE_BITS:
                raise ProtocolError(f"{where}: message carries {len(transcript.message.bits)} bits, "
                                    f"expected {MESSAGE_BITS}")
            message_seen = True
            continue
        if not distributed and step.action != "prepare":
            raise ProtocolError(f"{where}: acts before the channel is distributed")
        if not set(step.qubits) <= OWNERSHIP[step.party]:
            raise ProtocolError(f"{where}: touches qubits outside the {step.party}'s set "
                                f"{sorted(OWNERSHIP[step.party])}")
        if step.party == "sender" and message_seen:
            raise ProtocolError(f"{where}: sender acts after sending the message")
        if step.party == "receiver" and not message_seen:
            raise ProtocolError(f"{where}: receiver acts before the message arrives")
    if not message_seen:
        raise ProtocolError("no classical message in transcript")
    if len(transcript.message.bits) != MESSAGE_BITS:
        raise ProtocolError(f"message carries {len(transcript.message.bits)} bits, expected {MESSAGE_BITS}")
    return True
