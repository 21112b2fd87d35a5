"""Exact simulation of cluster-state and two-Bell-pair teleportation of four-term tripartite states."""

from ._kernels import BACKEND
from .circuit import (CircuitIR, CostReport, builtin_circuit, measurementless,
                      metrics, parse_circuit, quantum_cost, simulate_circuit)
from .protocols import (Transcript, correction_for, enumerate_branches,
                        expected_collapse, locc_audit, run_scheme,
                        run_scheme1, run_scheme2, verify_tables)
from .states import (BellKind, GhzLikeSpec, JointBasis, TripartiteSpec,
                     check_variant_relations, make_bell, make_cluster_state,
                     make_ghz_like, make_joint_basis, make_tripartite)
from .statevec import (GateOp, MeasurementBasis, Statevector, apply,
                       fidelity_up_to_phase, measure_qubit, permute_qubits,
                       project_in_basis, project_qubit, zero_state)

__version__ = "0.1.0"
