"""Gate-application kernels.

Two implementations of each kernel live here: a numba ``@njit`` loop over the
amplitude array and a pure-numpy reshape/einsum path.  The numba path is used
when numba imports cleanly, unless ``TRITELEPORT_DISABLE_JIT`` is set to a
non-empty value other than ``0``.  Both paths are always importable so they
can be checked against each other.

Bit positions are counted from the most significant bit: position 0 is the
first qubit of the register.
"""

import os

import numpy as np

__all__ = ["BACKEND", "apply_1q", "apply_controlled", "apply_1q_numpy",
           "apply_controlled_numpy", "apply_1q_jit", "apply_controlled_jit"]


def apply_1q_numpy(amps, n, pos, u):
    psi = amps.reshape(1 << pos, 2, 1 << (n - pos - 1))
    return np.einsum("ab,ibj->iaj", u, psi).reshape(-1)


def apply_controlled_numpy(amps, n, cpos, tpos, u):
    psi = amps.reshape((2,) * n).copy()
    sel = [slice(None)] * n
    sel[cpos] = 1
    sel = tuple(sel)
    sub = psi[sel]
    # the control axis is gone from ``sub``
    t = tpos if tpos < cpos else tpos - 1
    psi[sel] = np.moveaxis(np.tensordot(u, sub, axes=([1], [t])), 0, t)
    return psi.reshape(-1)


def _jit_disabled():
    flag = os.environ.get("TRITELEPORT_DISABLE_JIT", "")
    return flag not in ("", "0")


try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

if njit is not None:

    @njit(cache=True)
    def apply_1q_jit(amps, n, pos, u):
        out = np.empty_like(amps)
        stride = 1 << (n - 1 - pos)
        u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
        for i in range(amps.shape[0]):
            if i & stride == 0:
                j = i | stride
                a0 = amps[i]
                a1 = amps[j]
                out[i] = u00 * a0 + u01 * a1
                out[j] = u10 * a0 + u11 * a1
        return out

    @njit(cache=True)
    def apply_controlled_jit(amps, n, cpos, tpos, u):
        out = amps.copy()
        cmask = 1 << (n - 1 - cpos)
        tmask = 1 << (n - 1 - tpos)
        u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
        for i in range(amps.shape[0]):
            if (i & cmask) != 0 and (i & tmask) == 0:
                j = i | tmask
                a0 = amps[i]
                a1 = amps[j]
                out[i] = u00 * a0 + u01 * a1
                out[j] = u10 * a0 + u11 * a1
        return out

else:  # pragma: no cover
    apply_1q_jit = None
    apply_controlled_jit = None


if njit is not None and not _jit_disabled():
    BACKEND = "numba"
    apply_1q = apply_1q_jit
    apply_controlled = apply_controlled_jit
else:
    BACKEND = "numpy"
    apply_1q = apply_1q_numpy
    apply_controlled = apply_controlled_numpy
