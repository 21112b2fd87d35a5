"""Named states and measurement bases used by the teleportation schemes."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NormalizationError
from .statevec import (NORM_TOL, GateOp, MeasurementBasis, Statevector, apply,
                       fidelity_up_to_phase, reduced_density_matrix)

VARIANTS = ("A", "B", "C", "D")

# (coefficient, ket) pairs over qubits (1, 2, 3)
_TRIPARTITE_TERMS = {
    "A": (("a", "010"), ("b", "100"), ("c", "011"), ("d", "101")),
    "B": (("a", "010"), ("b", "100"), ("c", "001"), ("d", "111")),
    "C": (("a", "000"), ("b", "110"), ("c", "001"), ("d", "111")),
    "D": (("a", "000"), ("b", "110"), ("c", "011"), ("d", "101")),
}


@dataclass(frozen=True)
class TripartiteSpec:
    """Payload description: variant letter and the four complex coefficients."""

    variant: str
    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        for name in "abcd":
            value = complex(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"coefficient {name} is not finite")
            object.__setattr__(self, name, value)
        norm2 = sum(abs(x) ** 2 for x in self.coeffs)
        if abs(norm2 - 1) > NORM_TOL:
            raise NormalizationError(f"|a|^2+|b|^2+|c|^2+|d|^2 = {norm2!r}, expected 1")

    @property
    def coeffs(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def with_variant(self, variant: str) -> "TripartiteSpec":
        return TripartiteSpec(variant, *self.coeffs)

    @classmethod
    def random(cls, variant: str, rng: np.random.Generator) -> "TripartiteSpec":
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        v /= np.linalg.norm(v)
        return cls(variant, *v)


def make_tripartite(spec: TripartiteSpec, labels=(1, 2, 3)) -> Statevector:
    amps = np.zeros(8, dtype=np.complex128)
    values = dict(zip("abcd", spec.coeffs))
    for name, ket in _TRIPARTITE_TERMS[spec.variant]:
        amps[int(ket, 2)] += values[name]
    return Statevector(amps, tuple(labels))


class BellKind(enum.IntEnum):
    """Bell states numbered psi_0..psi_3 in the order phi+, psi+, phi-, psi-.

    With a CNOT then H on the first qubit, the kind reads out as the bit pair
    (sign, parity), i.e. ``value == 2 * sign + parity``.
    """

    PHI_PLUS = 0
    PSI_PLUS = 1
    PHI_MINUS = 2
    PSI_MINUS = 3

    @property
    def symbol(self) -> str:
        return ("Φ+", "Ψ+", "Φ−", "Ψ−")[self.value]

    @property
    def ascii(self) -> str:
        return ("phi+", "psi+", "phi-", "psi-")[self.value]

    @classmethod
    def parse(cls, text) -> "BellKind":
        if isinstance(text, (int, np.integer)):
            return cls(int(text))
        key = str(text).strip().lower().replace("φ", "phi").replace("ψ", "psi").replace("−", "-")
        for kind in cls:
            if key in (kind.ascii, kind.name.lower()):
                return kind
        raise ValueError(f"unknown Bell state {text!r}")


_BELL_AMPS = {
    BellKind.PHI_PLUS: (1, 0, 0, 1),
    BellKind.PSI_PLUS: (0, 1, 1, 0),
    BellKind.PHI_MINUS: (1, 0, 0, -1),
    BellKind.PSI_MINUS: (0, 1, -1, 0),
}


def make_bell(kind: BellKind, labels=(0, 1)) -> Statevector:
    return Statevector(np.array(_BELL_AMPS[BellKind(kind)], dtype=complex) / np.sqrt(2), tuple(labels))


def bell_basis() -> MeasurementBasis:
    return MeasurementBasis([make_bell(k).amps for k in BellKind],
                            names=[k.ascii for k in BellKind])


@dataclass(frozen=True)
class GhzLikeSpec:
    i: int
    j: int

    def __post_init__(self):
        if self.i not in range(4) or self.j not in range(4):
            raise ValueError(f"Bell indices must lie in 0..3, got ({self.i}, {self.j})")
        if self.i == self.j:
            raise ValueError(f"GHZ-like state needs two different Bell states, got i = j = {self.i}")


def make_ghz_like(spec: GhzLikeSpec, labels=(1, 2, 3)) -> Statevector:
    """``(|psi_i>|0> + |psi_j>|1>) / sqrt(2)``."""
    amps = np.zeros(8, dtype=np.complex128)
    bi, bj = make_bell(spec.i).amps, make_bell(spec.j).amps
    amps[0::2] = bi
    amps[1::2] = bj
    return Statevector(amps / np.sqrt(2), tuple(labels))


def make_cluster_state(labels=(4, 5, 6, 7)) -> Statevector:
    amps = np.zeros(16, dtype=np.complex128)
    amps[[0b0000, 0b0110, 0b1001]] = 0.5
    amps[0b1111] = -0.5
    return Statevector(amps, tuple(labels))


# Sixteen joint-measurement vectors, listed pairwise (2k-1, 2k).  Sign codes:
# "pm" means + for the odd member and - for the even one, "mp" the reverse.
_JOINT_PAIRS = (
    (("+", "0000"), ("+", "0110"), ("pm", "1001"), ("mp", "1111")),
    (("+", "0000"), ("-", "0110"), ("pm", "1001"), ("pm", "1111")),
    (("+", "0001"), ("+", "0111"), ("pm", "1000"), ("mp", "1110")),
    (("+", "0001"), ("-", "0111"), ("pm", "1000"), ("pm", "1110")),
    (("+", "0010"), ("+", "0100"), ("pm", "1011"), ("mp", "1101")),
    (("+", "0010"), ("-", "0100"), ("pm", "1011"), ("pm", "1101")),
    (("-", "0011"), ("-", "0101"), ("mp", "1010"), ("pm", "1100")),
    (("-", "0011"), ("+", "0101"), ("mp", "1010"), ("mp", "1100")),
)
_SIGN = {("+", 0): 1, ("+", 1): 1, ("-", 0): -1, ("-", 1): -1,
         ("pm", 0): 1, ("pm", 1): -1, ("mp", 0): -1, ("mp", 1): 1}


@dataclass(frozen=True)
class JointBasis:
    """The 16-outcome four-qubit basis with its ket-position -> qubit-label map.

    ``order[k]`` is the register label of the k-th written ket position.
    Outcome index ``i`` (0-based) is the vector written as phi_{i+1}.
    """

    basis: MeasurementBasis
    order: tuple = field(default=(2, 3, 4, 5))

    @property
    def vectors(self) -> np.ndarray:
        return self.basis.vectors

    def __len__(self):
        return len(self.basis)

    def vector(self, index: int) -> Statevector:
        return Statevector(self.basis.vectors[index], self.order)


def _joint_vectors() -> np.ndarray:
    rows = []
    for pair in _JOINT_PAIRS:
        for member in (0, 1):
            v = np.zeros(16)
            for code, ket in pair:
                v[int(ket, 2)] = _SIGN[code, member] * 0.5
            rows.append(v)
    return np.array(rows, dtype=np.complex128)


def make_joint_basis(order=(2, 3, 4, 5)) -> JointBasis:
    names = [f"phi{i}" for i in range(1, 17)]
    return JointBasis(MeasurementBasis(_joint_vectors(), names=names), tuple(order))


def entanglement_spectrum(vector: Statevector, keep) -> np.ndarray:
    """Eigenvalues of the reduced density matrix on ``keep``, ascending."""
    return np.linalg.eigvalsh(reduced_density_matrix(vector, keep))


@dataclass
class RelationReport:
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


# (source variant, gate, target variant); the gate acts on qubits (1, 2, 3)
VARIANT_RELATIONS = (
    ("A", GateOp("X", (2,)), "C"),
    ("B", GateOp("X", (2,)), "D"),
    ("A", GateOp("CNOT", (3, 2)), "B"),
    ("C", GateOp("CNOT", (3, 2)), "D"),
)


def check_variant_relations(trials: int = 100, rng=None, tol: float = NORM_TOL) -> RelationReport:
    rng = np.random.default_rng(rng)
    report = RelationReport()
    for t in range(trials):
        spec = TripartiteSpec.random("A", rng)
        for src, gate, dst in VARIANT_RELATIONS:
            mapped = apply(make_tripartite(spec.with_variant(src)), gate)
            f = fidelity_up_to_phase(mapped, make_tripartite(spec.with_variant(dst)))
            report.checks += 1
            if f < 1 - tol:
                report.failures.append((t, src, gate.kind, dst, f))
    return report
