"""Vectorized numpy kernels.

All kernels take a 1-D complex128 amplitude array and bit *shifts* counted from
the least significant bit; translating qubit labels to shifts is the caller's job.
Kernels never mutate their input.
"""

import numpy as np

SQRT1_2 = 1.0 / np.sqrt(2.0)


def apply_1q(amps, shift, u):
    blocks = amps.reshape(-1, 2, 1 << shift)
    return np.einsum("ij,ajb->aib", u, blocks).reshape(-1)


def apply_cz(amps, shift_a, shift_b):
    idx = np.arange(amps.size)
    both = ((idx >> shift_a) & (idx >> shift_b) & 1).astype(bool)
    out = amps.copy()
    out[both] *= -1.0
    return out


def project_zparity(amps, shift_a, shift_b, even):
    idx = np.arange(amps.size)
    same = ((idx >> shift_a) ^ (idx >> shift_b)) & 1 == 0
    keep = same if even else ~same
    return np.where(keep, amps, 0.0)


def project_xparity(amps, shift_a, shift_b, even):
    # (1 +/- X_a X_b) / 2
    partner = np.arange(amps.size) ^ ((1 << shift_a) | (1 << shift_b))
    if even:
        return 0.5 * (amps + amps[partner])
    return 0.5 * (amps - amps[partner])


def measure_x_reduce(amps, shift, plus):
    blocks = amps.reshape(-1, 2, 1 << shift)
    if plus:
        out = blocks[:, 0, :] + blocks[:, 1, :]
    else:
        out = blocks[:, 0, :] - blocks[:, 1, :]
    return (SQRT1_2 * out).reshape(-1)


def pauli_expectation(amps, x_mask, z_mask):
    """Return sum_i conj(a[i ^ x]) (-1)^{popcount(i & z)} a[i]."""
    idx = np.arange(amps.size)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & z_mask) & 1).astype(np.float64)
    return complex(np.vdot(amps[idx ^ x_mask], signs * amps))


def norm2(amps):
    return float(np.vdot(amps, amps).real)
