"""Loop kernels compiled with numba; same contracts as the numpy versions."""

import numpy as np
from numba import njit

SQRT1_2 = 1.0 / np.sqrt(2.0)


@njit(cache=True)
def _parity(v):
    p = 0
    while v:
        p ^= 1
        v &= v - 1
    return p


@njit(cache=True)
def apply_1q(amps, shift, u):
    out = np.empty(amps.size, dtype=np.complex128)
    step = 1 << shift
    u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    for i in range(amps.size):
        if i & step:
            continue
        a0 = amps[i]
        a1 = amps[i | step]
        out[i] = u00 * a0 + u01 * a1
        out[i | step] = u10 * a0 + u11 * a1
    return out


@njit(cache=True)
def apply_cz(amps, shift_a, shift_b):
    out = np.empty(amps.size, dtype=np.complex128)
    out[:] = amps
    for i in range(amps.size):
        if (i >> shift_a) & (i >> shift_b) & 1:
            out[i] = -out[i]
    return out


@njit(cache=True)
def project_zparity(amps, shift_a, shift_b, even):
    out = np.zeros(amps.size, dtype=np.complex128)
    for i in range(amps.size):
        same = (((i >> shift_a) ^ (i >> shift_b)) & 1) == 0
        if same == even:
            out[i] = amps[i]
    return out


@njit(cache=True)
def project_xparity(amps, shift_a, shift_b, even):
    out = np.empty(amps.size, dtype=np.complex128)
    flip = (1 << shift_a) | (1 << shift_b)
    s = 1.0 if even else -1.0
    for i in range(amps.size):
        out[i] = 0.5 * (amps[i] + s * amps[i ^ flip])
    return out


@njit(cache=True)
def measure_x_reduce(amps, shift, plus):
    half = amps.size >> 1
    out = np.empty(half, dtype=np.complex128)
    low = (1 << shift) - 1
    s = 1.0 if plus else -1.0
    for r in range(half):
        i0 = ((r & ~low) << 1) | (r & low)
        out[r] = SQRT1_2 * (amps[i0] + s * amps[i0 | (1 << shift)])
    return out


@njit(cache=True)
def pauli_expectation(amps, x_mask, z_mask):
    acc = 0j
    for i in range(amps.size):
        term = np.conj(amps[i ^ x_mask]) * amps[i]
        if _parity(i & z_mask):
            acc -= term
        else:
            acc += term
    return acc


@njit(cache=True)
def norm2(amps):
    acc = 0.0
    for i in range(amps.size):
        acc += amps[i].real * amps[i].real + amps[i].imag * amps[i].imag
    return acc
