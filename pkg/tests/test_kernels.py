import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triteleport import _kernels
from triteleport.statevec import PAULI, SINGLE_QUBIT_GATES

needs_numba = pytest.mark.skipif(_kernels.apply_1q_jit is None, reason="numba not available")

GATES = [SINGLE_QUBIT_GATES["H"], PAULI["X"], PAULI["Y"], PAULI["Z"], PAULI["iY"]]


def _random_amps(n, seed):
    r = np.random.default_rng(seed)
    v = r.standard_normal(1 << n) + 1j * r.standard_normal(1 << n)
    return v / np.linalg.norm(v)


def _dense_1q(u, pos, n):
    out = np.eye(1)
    for k in range(n):
        out = np.kron(out, u if k == pos else np.eye(2))
    return out


@given(n=st.integers(1, 7), data=st.data(), seed=st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_numpy_1q_matches_dense(n, data, seed):
    pos = data.draw(st.integers(0, n - 1))
    u = GATES[data.draw(st.integers(0, len(GATES) - 1))]
    amps = _random_amps(n, seed)
    np.testing.assert_allclose(_kernels.apply_1q_numpy(amps, n, pos, u), _dense_1q(u, pos, n) @ amps,
                               atol=1e-12)


@needs_numba
@given(n=st.integers(1, 7), data=st.data(), seed=st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_jit_1q_matches_numpy(n, data, seed):
    pos = data.draw(st.integers(0, n - 1))
    u = GATES[data.draw(st.integers(0, len(GATES) - 1))]
    amps = _random_amps(n, seed)
    np.testing.assert_allclose(_kernels.apply_1q_jit(amps, n, pos, u),
                               _kernels.apply_1q_numpy(amps, n, pos, u), atol=1e-13)


@needs_numba
@given(n=st.integers(2, 7), data=st.data(), seed=st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_jit_controlled_matches_numpy(n, data, seed):
    c = data.draw(st.integers(0, n - 1))
    t = data.draw(st.integers(0, n - 1).filter(lambda x: x != c))
    u = GATES[data.draw(st.integers(0, len(GATES) - 1))]
    amps = _random_amps(n, seed)
    np.testing.assert_allclose(_kernels.apply_controlled_jit(amps, n, c, t, u),
                               _kernels.apply_controlled_numpy(amps, n, c, t, u), atol=1e-13)


def test_numpy_cnot_on_basis_states():
    x = PAULI["X"]
    for i in range(4):
        amps = np.zeros(4, dtype=complex)
        amps[i] = 1
        out = _kernels.apply_controlled_numpy(amps, 2, 0, 1, x)
        expected = {0: 0, 1: 1, 2: 3, 3: 2}[i]
        assert out[expected] == 1


def test_kernels_leave_input_untouched():
    amps = _random_amps(3, 1)
    amps.setflags(write=False)
    before = amps.copy()
    _kernels.apply_1q(amps, 3, 1, GATES[0])
    _kernels.apply_controlled(amps, 3, 0, 2, GATES[1])
    np.testing.assert_array_equal(amps, before)


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("", None)])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, TRITELEPORT_DISABLE_JIT=flag)
    out = subprocess.run([sys.executable, "-c", "import triteleport; print(triteleport.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout.strip()
    if expected is None:
        expected = "numba" if _kernels.apply_1q_jit is not None else "numpy"
    assert out == expected
