"""Dense statevectors with labelled qubits.

Ordering contract: the first label in ``Statevector.labels`` is the most
significant bit of the amplitude index, so the ket ``|q0 q1 ... q(n-1)>`` sits
at the integer obtained by reading its bits left to right.

States are treated as immutable values; every operation returns a new state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import (BasisError, ImpossibleBranchError, QubitIndexError,
                     SizeError)

MAX_QUBITS = 16
NORM_TOL = 1e-10
BRANCH_TOL = 1e-14

_S = 1 / np.sqrt(2)
PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    # i*sigma_y, real and equal to Z @ X
    "iY": np.array([[0, 1], [-1, 0]], dtype=complex),
}
SINGLE_QUBIT_GATES = {
    "H": np.array([[_S, _S], [_S, -_S]], dtype=complex),
    "X": PAULI["X"],
    "Y": PAULI["Y"],
    "Z": PAULI["Z"],
}
# two-qubit kinds as (control, target) with the 2x2 block applied to the target
CONTROLLED_GATES = {"CNOT": PAULI["X"], "CZ": PAULI["Z"]}


@dataclass(frozen=True)
class Statevector:
    amps: np.ndarray
    labels: tuple

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128).reshape(-1)
        labels = tuple(self.labels)
        if amps.shape[0] != 1 << len(labels):
            raise SizeError(f"{amps.shape[0]} amplitudes for {len(labels)} qubits")
        if len(set(labels)) != len(labels):
            raise QubitIndexError(f"duplicate qubit labels {labels}")
        if len(labels) > MAX_QUBITS:
            raise SizeError(f"at most {MAX_QUBITS} qubits supported")
        if not np.all(np.isfinite(amps)):
            raise ValueError("non-finite amplitude")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def _trusted(cls, amps: np.ndarray, labels: tuple) -> "Statevector":
        # internal results of kernels on already-validated states
        self = object.__new__(cls)
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "labels", labels)
        return self

    @classmethod
    def from_amplitudes(cls, amps, labels=None) -> "Statevector":
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if labels is None:
            n = int(amps.shape[0]).bit_length() - 1
            labels = range(n)
        return cls(amps, tuple(labels))

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def position(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise QubitIndexError(f"qubit {label!r} not in register {self.labels}") from None

    def relabel(self, labels) -> "Statevector":
        return Statevector(self.amps, tuple(labels))

    def __repr__(self):
        return f"Statevector(labels={self.labels}, amps={np.round(self.amps, 6).tolist()})"


@dataclass(frozen=True)
class GateOp:
    """A named gate; two-qubit kinds take ``targets=(control, target)``."""

    kind: str
    targets: tuple

    def __post_init__(self):
        targets = tuple(self.targets)
        object.__setattr__(self, "targets", targets)
        if self.kind in SINGLE_QUBIT_GATES:
            if len(targets) != 1:
                raise QubitIndexError(f"{self.kind} takes one qubit, got {targets}")
        elif self.kind in CONTROLLED_GATES:
            if len(targets) != 2 or targets[0] == targets[1]:
                raise QubitIndexError(f"{self.kind} needs distinct (control, target), got {targets}")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")


def zero_state(n: int, labels=None) -> Statevector:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= MAX_QUBITS:
        raise SizeError(f"number of qubits must be in 1..{MAX_QUBITS}, got {n!r}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(amps, tuple(range(n)) if labels is None else tuple(labels))


def basis_state(bits: Sequence[int], labels=None) -> Statevector:
    """Computational basis ket; ``bits[0]`` belongs to the first label."""
    n = len(bits)
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return Statevector(amps, tuple(range(n)) if labels is None else tuple(labels))


def random_state(n: int, rng: np.random.Generator, labels=None) -> Statevector:
    """Haar-distributed pure state (normalised complex Gaussian vector)."""
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    v /= np.linalg.norm(v)
    return Statevector(v, tuple(range(n)) if labels is None else tuple(labels))


def tensor(*states: Statevector) -> Statevector:
    if not states:
        raise SizeError("tensor of no states")
    amps = states[0].amps
    labels = states[0].labels
    for s in states[1:]:
        amps = np.outer(amps, s.amps).reshape(-1)
        labels += s.labels
    return Statevector(amps, labels)


def apply(state: Statevector, op: GateOp) -> Statevector:
    n = state.num_qubits
    if op.kind in SINGLE_QUBIT_GATES:
        pos = state.position(op.targets[0])
        out = _kernels.apply_1q(state.amps, n, pos, SINGLE_QUBIT_GATES[op.kind])
    else:
        c, t = (state.position(q) for q in op.targets)
        out = _kernels.apply_controlled(state.amps, n, c, t, CONTROLLED_GATES[op.kind])
    return Statevector._trusted(out, state.labels)


def apply_unitary(state: Statevector, u: np.ndarray, qubit) -> Statevector:
    """Apply an arbitrary 2x2 matrix to one qubit."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2):
        raise SizeError(f"expected a 2x2 matrix, got shape {u.shape}")
    out = _kernels.apply_1q(state.amps, state.num_qubits, state.position(qubit), u)
    return Statevector._trusted(out, state.labels)


def apply_all(state: Statevector, ops) -> Statevector:
    for op in ops:
        state = apply(state, op)
    return state


def _qubit_probabilities(state: Statevector, q) -> np.ndarray:
    pos = state.position(q)
    n = state.num_qubits
    psi = state.amps.reshape(1 << pos, 2, 1 << (n - pos - 1))
    return np.sum(np.abs(psi) ** 2, axis=(0, 2))


def project_qubit(state: Statevector, q, bit: int) -> tuple[float, Statevector]:
    """Project qubit ``q`` onto ``|bit>``; the qubit stays in the register."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    pos = state.position(q)
    n = state.num_qubits
    psi = state.amps.reshape(1 << pos, 2, 1 << (n - pos - 1)).copy()
    psi[:, 1 - bit, :] = 0
    prob = float(np.vdot(psi, psi).real)
    if prob < BRANCH_TOL:
        raise ImpossibleBranchError(f"qubit {q!r} has zero probability of reading {bit}", prob)
    return prob, Statevector(psi.reshape(-1) / np.sqrt(prob), state.labels)


def measure_qubit(state: Statevector, q, rng: np.random.Generator) -> tuple[int, Statevector]:
    p = _qubit_probabilities(state, q)
    bit = int(rng.random() < p[1] / (p[0] + p[1]))
    return bit, project_qubit(state, q, bit)[1]


class MeasurementBasis:
    """Orthonormal vectors over ``m`` qubits, stored as rows of a matrix.

    The set may be incomplete; outcome probabilities then sum to less than one.
    """

    def __init__(self, vectors, names=None, tol: float = NORM_TOL):
        vecs = np.array(vectors, dtype=np.complex128)
        if vecs.ndim != 2 or vecs.shape[1] & (vecs.shape[1] - 1) or vecs.shape[1] < 2:
            raise BasisError(f"vectors must form a (k, 2**m) array, got shape {vecs.shape}")
        gram = vecs.conj() @ vecs.T
        err = np.max(np.abs(gram - np.eye(vecs.shape[0])))
        if err > tol:
            raise BasisError(f"basis is not orthonormal (max Gram deviation {err:.3g})")
        vecs.setflags(write=False)
        self.vectors = vecs
        self.num_qubits = vecs.shape[1].bit_length() - 1
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(len(vecs)))

    def __len__(self):
        return self.vectors.shape[0]

    def gram(self) -> np.ndarray:
        return self.vectors.conj() @ self.vectors.T

    @classmethod
    def computational(cls, m: int = 1) -> "MeasurementBasis":
        return cls(np.eye(1 << m), names=[format(i, f"0{m}b") for i in range(1 << m)])


def _split(state: Statevector, qubits) -> tuple[np.ndarray, tuple]:
    """Matrix with rows indexed by the listed qubits and columns by the rest."""
    qubits = tuple(qubits)
    if len(set(qubits)) != len(qubits):
        raise QubitIndexError(f"repeated qubits {qubits}")
    pos = [state.position(q) for q in qubits]
    rest = [i for i in range(state.num_qubits) if i not in pos]
    psi = state.amps.reshape((2,) * state.num_qubits).transpose(pos + rest)
    psi = psi.reshape(1 << len(pos), 1 << len(rest))
    return psi, tuple(state.labels[i] for i in rest)


def outcome_probabilities(state: Statevector, qubits, basis: MeasurementBasis) -> np.ndarray:
    psi, _ = _split(state, qubits)
    if psi.shape[0] != basis.vectors.shape[1]:
        raise SizeError(f"basis acts on {basis.num_qubits} qubits, {len(tuple(qubits))} given")
    amps = basis.vectors.conj() @ psi
    return np.sum(np.abs(amps) ** 2, axis=1)


def project_in_basis(state: Statevector, qubits, basis: MeasurementBasis,
                     outcome: int) -> tuple[float, Statevector]:
    """Born probability of ``basis[outcome]`` on ``qubits`` and the remaining state.

    The measured qubits are removed from the returned register.
    """
    if not 0 <= outcome < len(basis):
        raise QubitIndexError(f"outcome {outcome} out of range 0..{len(basis) - 1}")
    psi, rest = _split(state, qubits)
    if psi.shape[0] != basis.vectors.shape[1]:
        raise SizeError(f"basis acts on {basis.num_qubits} qubits, {len(tuple(qubits))} given")
    rem = basis.vectors[outcome].conj() @ psi
    prob = float(np.vdot(rem, rem).real)
    if prob < BRANCH_TOL:
        raise ImpossibleBranchError(f"outcome {basis.names[outcome]} has zero probability", prob)
    return prob, Statevector._trusted(rem / np.sqrt(prob), rest)


def measure_in_basis(state: Statevector, qubits, basis: MeasurementBasis,
                     rng: np.random.Generator) -> tuple[int, float, Statevector]:
    probs = outcome_probabilities(state, qubits, basis)
    outcome = int(rng.choice(len(probs), p=probs / probs.sum()))
    prob, rest = project_in_basis(state, qubits, basis, outcome)
    return outcome, prob, rest


def fidelity_up_to_phase(s1: Statevector, s2: Statevector) -> float:
    """``|<s1|s2>|**2``, compared position by position (labels are not aligned)."""
    if s1.num_qubits != s2.num_qubits:
        raise SizeError(f"cannot compare {s1.num_qubits}- and {s2.num_qubits}-qubit states")
    return float(min(1.0, abs(np.vdot(s1.amps, s2.amps)) ** 2))


def permute_qubits(state: Statevector, order) -> Statevector:
    """Reorder the register so that ``order`` (a permutation of labels) becomes its order."""
    order = tuple(order)
    if sorted(map(repr, order)) != sorted(map(repr, state.labels)) or len(set(order)) != len(order):
        raise ValueError(f"{order} is not a permutation of {state.labels}")
    axes = [state.labels.index(q) for q in order]
    psi = state.amps.reshape((2,) * state.num_qubits).transpose(axes)
    return Statevector._trusted(np.ascontiguousarray(psi).reshape(-1), order)


def reduced_density_matrix(state: Statevector, keep) -> np.ndarray:
    psi, _ = _split(state, keep)
    return psi @ psi.conj().T
