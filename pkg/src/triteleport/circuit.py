"""Circuit IR, its text format, cost metrics and the builtin scheme circuits.

Text format, one instruction per line, ``#`` starts a comment::

    wires 1 2 3 4 5 6 7 8     # explicit labels; "wires N" means labels 0..N-1
    H 4
    CNOT 5 6                  # control, target
    CZ 6 7
    M 1 c1                    # measure wire 1 into classical bit c1
    CX c5 6                   # X on wire 6 if c5 == 1
    CZc c1 8                  # Z on wire 8 if c1 == 1

Quantum cost follows the convention used for teleportation circuits: on the
measurement-less circuit every two-qubit gate costs 1, and a single-qubit
gate costs 0 if its nearest neighbour on the same wire (before or after) is a
two-qubit gate, 1 otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import CircuitParseError, ContractError
from .statevec import (GateOp, MeasurementBasis, Statevector, apply,
                       basis_state, measure_qubit, permute_qubits,
                       project_in_basis, project_qubit, tensor)

ONE_QUBIT = ("H", "X", "Y", "Z")
TWO_QUBIT = ("CNOT", "CZ")
CLASSICAL = {"CX": "X", "CZc": "Z"}
QUANTUM_OF_CLASSICAL = {"CX": "CNOT", "CZc": "CZ"}


@dataclass(frozen=True)
class Instruction:
    op: str
    wires: tuple
    cbit: Optional[str] = None

    @property
    def is_measure(self) -> bool:
        return self.op == "M"

    @property
    def is_classical(self) -> bool:
        return self.op in CLASSICAL

    @property
    def is_two_qubit(self) -> bool:
        return self.op in TWO_QUBIT

    def text(self) -> str:
        w = " ".join(str(x) for x in self.wires)
        if self.op == "M":
            return f"M {w} {self.cbit}"
        if self.is_classical:
            return f"{self.op} {self.cbit} {w}"
        return f"{self.op} {w}"


@dataclass(frozen=True)
class CircuitIR:
    wires: tuple
    instructions: tuple
    communicated: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple(self.wires))
        object.__setattr__(self, "instructions", tuple(self.instructions))
        object.__setattr__(self, "communicated", frozenset(self.communicated))
        _validate(self)

    def __len__(self):
        return len(self.instructions)

    def measurement_wire(self, cbit: str):
        for ins in self.instructions:
            if ins.is_measure and ins.cbit == cbit:
                return ins.wires[0]
        raise KeyError(cbit)

    def has_classical_parts(self) -> bool:
        return any(i.is_measure or i.is_classical for i in self.instructions)

    def to_text(self) -> str:
        lines = ["wires " + " ".join(str(w) for w in self.wires)]
        lines += [i.text() for i in self.instructions]
        return "\n".join(lines) + "\n"


def _validate(circuit: CircuitIR):
    wires = set(circuit.wires)
    written = set()
    for k, ins in enumerate(circuit.instructions):
        for w in ins.wires:
            if w not in wires:
                raise ValueError(f"instruction {k} ({ins.text()}) uses unknown wire {w!r}")
        if len(set(ins.wires)) != len(ins.wires):
            raise ValueError(f"instruction {k} ({ins.text()}) repeats a wire")
        if ins.is_measure:
            if ins.cbit in written:
                raise ValueError(f"classical bit {ins.cbit} written twice")
            written.add(ins.cbit)
        elif ins.is_classical and ins.cbit not in written:
            raise ValueError(f"instruction {k} ({ins.text()}) reads {ins.cbit} before it is measured")


def _wire(token: str, lineno: int):
    try:
        return int(token)
    except ValueError:
        raise CircuitParseError(f"bad wire {token!r}", lineno) from None


def parse_circuit(text: str) -> CircuitIR:
    wires = None
    instructions = []
    written = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        head, args = tokens[0], tokens[1:]
        if head == "wires":
            if wires is not None:
                raise CircuitParseError("duplicate wires declaration", lineno)
            if not args:
                raise CircuitParseError("wires needs a count or a label list", lineno)
            labels = [_wire(a, lineno) for a in args]
            if len(labels) == 1:
                if labels[0] < 1:
                    raise CircuitParseError("wire count must be positive", lineno)
                wires = tuple(range(labels[0]))
            else:
                if len(set(labels)) != len(labels):
                    raise CircuitParseError("duplicate wire labels", lineno)
                wires = tuple(labels)
            continue
        if wires is None:
            raise CircuitParseError("instruction before wires declaration", lineno)

        def check(ws):
            for w in ws:
                if w not in wires:
                    raise CircuitParseError(f"wire {w} not declared", lineno)
            if len(set(ws)) != len(ws):
                raise CircuitParseError("gate wires must be distinct", lineno)
            return tuple(ws)

        if head in ONE_QUBIT or head in TWO_QUBIT:
            arity = 1 if head in ONE_QUBIT else 2
            if len(args) != arity:
                raise CircuitParseError(f"{head} takes {arity} wire(s)", lineno)
            instructions.append(Instruction(head, check([_wire(a, lineno) for a in args])))
        elif head == "M":
            if len(args) != 2:
                raise CircuitParseError("M takes a wire and a classical bit", lineno)
            if args[1] in written:
                raise CircuitParseError(f"classical bit {args[1]} written twice", lineno)
            written.add(args[1])
            instructions.append(Instruction("M", check([_wire(args[0], lineno)]), args[1]))
        elif head in CLASSICAL:
            if len(args) != 2:
                raise CircuitParseError(f"{head} takes a classical bit and a wire", lineno)
            if args[0] not in written:
                raise CircuitParseError(f"classical bit {args[0]} read before it is written", lineno)
            instructions.append(Instruction(head, check([_wire(args[1], lineno)]), args[0]))
        else:
            raise CircuitParseError(f"unknown mnemonic {head!r}", lineno)
    if wires is None:
        raise CircuitParseError("missing wires declaration", 1)
    return CircuitIR(wires, instructions)


def measurementless(circuit: CircuitIR) -> CircuitIR:
    """Drop measurements and turn each classical control into a quantum control."""
    source = {i.cbit: i.wires[0] for i in circuit.instructions if i.is_measure}
    out = []
    for ins in circuit.instructions:
        if ins.is_measure:
            continue
        if ins.is_classical:
            out.append(Instruction(QUANTUM_OF_CLASSICAL[ins.op], (source[ins.cbit], ins.wires[0])))
        else:
            out.append(ins)
    return CircuitIR(circuit.wires, out)


def quantum_cost(circuit: CircuitIR) -> int:
    if circuit.has_classical_parts():
        raise ContractError("quantum_cost needs a measurement-less circuit; call measurementless() first")
    per_wire = {w: [] for w in circuit.wires}
    for k, ins in enumerate(circuit.instructions):
        for w in ins.wires:
            per_wire[w].append(k)
    cost = 0
    for k, ins in enumerate(circuit.instructions):
        if ins.is_two_qubit:
            cost += 1
            continue
        seq = per_wire[ins.wires[0]]
        j = seq.index(k)
        neighbours = [seq[j - 1]] if j > 0 else []
        if j + 1 < len(seq):
            neighbours.append(seq[j + 1])
        if not any(circuit.instructions[n].is_two_qubit for n in neighbours):
            cost += 1
    return cost


@dataclass(frozen=True)
class CostReport:
    qc: int
    gc: int
    cb: int

    def as_tuple(self) -> tuple:
        return (self.qc, self.gc, self.cb)


def metrics(circuit: CircuitIR) -> CostReport:
    unitary = measurementless(circuit)
    fed = {i.cbit for i in circuit.instructions if i.is_classical} | set(circuit.communicated)
    cb = sum(1 for i in circuit.instructions if i.is_measure and i.cbit in fed)
    return CostReport(quantum_cost(unitary), len(unitary.instructions), cb)


_CHANNEL = {
    1: "H 4\nH 5\nCNOT 5 6\nCNOT 4 7\nCZ 6 7\n",
    2: "H 4\nH 5\nCNOT 5 6\nCNOT 4 7\n",
}
# CZ 4 5 opens the joint measurement; without it the channel CZ 6 7 would be undone.
_MEASUREMENT = {
    1: "CZ 4 5\nCNOT 2 5\nCNOT 3 4\nH 2\nH 3\n",
    2: "CNOT 2 5\nCNOT 3 4\nH 2\nH 3\n",
}
_TEMPLATE = """\
wires 1 2 3 4 5 6 7 8
# entanglement channel
{channel}\
# sender
H 1
M 1 c1
{measurement}\
M 2 c2
M 3 c3
M 4 c4
M 5 c5
# receiver
CX c5 6
CZc c2 6
CX c4 7
CZc c3 7
{cnot78}\
CNOT 6 8
CZc c1 8
"""

BUILTIN_NAMES = tuple(f"pp{s}-{v}" for s in (1, 2) for v in "ABCD")


def builtin_text(scheme: int, variant: str) -> str:
    if scheme not in (1, 2) or variant not in "ABCD" or len(variant) != 1:
        raise ValueError(f"no builtin circuit for scheme {scheme!r}, variant {variant!r}")
    return _TEMPLATE.format(channel=_CHANNEL[scheme], measurement=_MEASUREMENT[scheme],
                            cnot78="CNOT 7 8\n" if variant in "BD" else "")


def builtin_circuit(scheme: int, variant: str) -> CircuitIR:
    return parse_circuit(builtin_text(scheme, variant))


def builtin_by_name(name: str) -> CircuitIR:
    """``pp1-B`` style names: scheme number then payload variant."""
    key = name.strip()
    if len(key) != 5 or not key.lower().startswith("pp") or key[3] != "-":
        raise ValueError(f"unknown builtin {name!r}; expected one of {', '.join(BUILTIN_NAMES)}")
    try:
        scheme = int(key[2])
    except ValueError:
        raise ValueError(f"unknown builtin {name!r}") from None
    return builtin_circuit(scheme, key[4].upper())


@dataclass
class CircuitRun:
    state: Statevector
    bits: dict
    probability: float


def simulate_circuit(circuit: CircuitIR, initial: Statevector, forced: Optional[dict] = None,
                     rng=None) -> CircuitRun:
    """Run the circuit; measured wires stay in the register, collapsed.

    ``forced`` maps classical bit names to outcomes; others are sampled.
    """
    if tuple(initial.labels) != circuit.wires:
        initial = permute_qubits(initial, circuit.wires)
    forced = forced or {}
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    state, bits, prob = initial, {}, 1.0
    for ins in circuit.instructions:
        if ins.is_measure:
            if ins.cbit in forced:
                p, state = project_qubit(state, ins.wires[0], forced[ins.cbit])
                bits[ins.cbit] = forced[ins.cbit]
                prob *= p
            else:
                bit, state = measure_qubit(state, ins.wires[0], rng)
                bits[ins.cbit] = bit
        elif ins.is_classical:
            if bits[ins.cbit]:
                state = apply(state, GateOp(CLASSICAL[ins.op], ins.wires))
        else:
            state = apply(state, GateOp(ins.op, ins.wires))
    return CircuitRun(state, bits, prob)


def discard_measured(state: Statevector, bits_by_wire: dict) -> Statevector:
    """Remove wires already collapsed to known computational values."""
    wires = tuple(bits_by_wire)
    index = int("".join(str(bits_by_wire[w]) for w in wires), 2)
    _, rest = project_in_basis(state, wires, MeasurementBasis.computational(len(wires)), index)
    return rest


@lru_cache(maxsize=None)
def sender_bits_for_outcome(scheme: int) -> tuple:
    """Computational readout (c2, c3, c4, c5) of the builtin circuit for each outcome 0..15.

    Found by pulling every readout back through the measurement gates and
    matching it against the outcome vectors of the protocol engine.
    """
    from .states import bell_basis, make_joint_basis
    gates = [GateOp(i.op, i.wires) for i in parse_circuit("wires 2 3 4 5\n" + _MEASUREMENT[scheme]).instructions]
    if scheme == 1:
        targets = make_joint_basis().basis.vectors
    else:
        bb = bell_basis().vectors
        # outcome 4*b25 + b34 over qubit order (2, 5, 3, 4), re-ordered to (2, 3, 4, 5)
        targets = np.array([np.kron(bb[k // 4], bb[k % 4]).reshape(2, 2, 2, 2)
                            .transpose(0, 2, 3, 1).reshape(-1) for k in range(16)])
    table = [None] * 16
    for m in range(16):
        bits = tuple((m >> s) & 1 for s in (3, 2, 1, 0))
        v = basis_state(bits, (2, 3, 4, 5))
        for g in reversed(gates):  # every gate here is self-inverse
            v = apply(v, g)
        overlaps = np.abs(targets.conj() @ v.amps)
        k = int(np.argmax(overlaps))
        if abs(overlaps[k] - 1) > 1e-10 or table[k] is not None:
            raise RuntimeError(f"readout {bits} does not match a unique outcome vector")
        table[k] = bits
    return tuple(table)


def run_builtin(scheme: int, spec, qubit1_bit: Optional[int] = None, outcome: Optional[int] = None,
                rng=None):
    """Simulate the builtin circuit on a payload; returns ``(output on (8,6,7), bits, probability)``."""
    from .protocols import ancilla_bit
    from .states import make_tripartite
    circuit = builtin_circuit(scheme, spec.variant)
    initial = tensor(make_tripartite(spec, (1, 2, 3)), basis_state([0, 0, 0, 0], (4, 5, 6, 7)),
                     basis_state([ancilla_bit(spec.variant)], (8,)))
    forced = {}
    if qubit1_bit is not None:
        forced["c1"] = qubit1_bit
    if outcome is not None:
        forced.update(zip(("c2", "c3", "c4", "c5"), sender_bits_for_outcome(scheme)[outcome]))
    run = simulate_circuit(circuit, initial, forced, rng)
    measured = {circuit.measurement_wire(c): b for c, b in run.bits.items()}
    out = permute_qubits(discard_measured(run.state, measured), (8, 6, 7))
    return out, run.bits, run.probability
