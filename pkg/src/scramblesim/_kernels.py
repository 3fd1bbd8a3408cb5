"""Numba kernels operating on flat complex128 amplitude arrays.

Index convention is little-endian: qubit ``q`` toggles bit ``1 << q`` of the
amplitude index. All kernels mutate in place, run single-threaded, and assume
the callers in :mod:`scramblesim.statevector` have validated qubit arguments
(in range, distinct).
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def apply_1q(amps, m00, m01, m10, m11, q):
    """Apply a 2x2 matrix to qubit q."""
    half = amps.size >> 1
    low = (1 << q) - 1
    bit = 1 << q
    for g in range(half):
        i0 = ((g >> q) << (q + 1)) | (g & low)
        i1 = i0 | bit
        a = amps[i0]
        b = amps[i1]
        amps[i0] = m00 * a + m01 * b
        amps[i1] = m10 * a + m11 * b


@njit(cache=True, nogil=True)
def apply_diag_1q(amps, p0, p1, q):
    """Multiply the qubit-q = 0/1 halves by phases p0/p1."""
    bit = 1 << q
    for i in range(amps.size):
        if i & bit:
            amps[i] *= p1
        else:
            amps[i] *= p0


@njit(cache=True, nogil=True)
def apply_zz_phase(amps, even_phase, odd_phase, q1, q2):
    """Multiply by even_phase (odd_phase) where bits q1, q2 agree (differ)."""
    for i in range(amps.size):
        if ((i >> q1) ^ (i >> q2)) & 1:
            amps[i] *= odd_phase
        else:
            amps[i] *= even_phase


@njit(cache=True, nogil=True)
def apply_2q(amps, m, q1, q2):
    """Apply a 4x4 matrix; row/column index is (bit q1 << 1) | bit q2.

    The matrix need not be unitary (projectors reuse this kernel).
    """
    qh = q1 if q1 > q2 else q2
    ql = q2 if q1 > q2 else q1
    quarter = amps.size >> 2
    mh = (1 << qh) - 1
    ml = (1 << ql) - 1
    b1 = 1 << q1
    b2 = 1 << q2
    for g in range(quarter):
        i = ((g >> ql) << (ql + 1)) | (g & ml)
        i = ((i >> qh) << (qh + 1)) | (i & mh)
        i01 = i | b2
        i10 = i | b1
        i11 = i01 | b1
        a = amps[i]
        b = amps[i01]
        c = amps[i10]
        d = amps[i11]
        amps[i] = m[0, 0] * a + m[0, 1] * b + m[0, 2] * c + m[0, 3] * d
        amps[i01] = m[1, 0] * a + m[1, 1] * b + m[1, 2] * c + m[1, 3] * d
        amps[i10] = m[2, 0] * a + m[2, 1] * b + m[2, 2] * c + m[2, 3] * d
        amps[i11] = m[3, 0] * a + m[3, 1] * b + m[3, 2] * c + m[3, 3] * d


@njit(cache=True, nogil=True)
def _parity(x):
    x ^= x >> 32
    x ^= x >> 16
    x ^= x >> 8
    x ^= x >> 4
    x ^= x >> 2
    x ^= x >> 1
    return x & 1


@njit(cache=True, nogil=True)
def apply_pauli_string(amps, flip_mask, sign_mask, global_phase):
    """Apply a Pauli string in one pass.

    flip_mask has a bit per X or Y factor, sign_mask a bit per Z or Y factor,
    and global_phase carries the i**(#Y) prefactor. Basis action:
    |i> -> global_phase * (-1)**parity(i & sign_mask) |i ^ flip_mask>.
    """
    if flip_mask == 0:
        for i in range(amps.size):
            if _parity(i & sign_mask):
                amps[i] *= -global_phase
            else:
                amps[i] *= global_phase
        return
    for i in range(amps.size):
        j = i ^ flip_mask
        if j < i:
            continue
        a = amps[i]
        b = amps[j]
        pa = -global_phase if _parity(i & sign_mask) else global_phase
        pb = -global_phase if _parity(j & sign_mask) else global_phase
        amps[j] = pa * a
        amps[i] = pb * b
