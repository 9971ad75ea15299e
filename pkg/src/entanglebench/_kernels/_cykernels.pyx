# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels.

Semantics mirror _pykernels exactly; see that module for the conventions.
"""

import numpy as np

cimport numpy as cnp

ctypedef double complex cplx


def apply_1q(cplx[::1] amps, cplx[:, ::1] u, Py_ssize_t shift):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t step = 1 << shift
    cdef Py_ssize_t low_mask = step - 1
    cdef Py_ssize_t i, base
    cdef cplx a, b
    cdef cplx u00 = u[0, 0], u01 = u[0, 1], u10 = u[1, 0], u11 = u[1, 1]
    for i in range(dim >> 1):
        base = ((i & ~low_mask) << 1) | (i & low_mask)
        a = amps[base]
        b = amps[base | step]
        amps[base] = u00 * a + u01 * b
        amps[base | step] = u10 * a + u11 * b


def apply_2q(cplx[::1] amps, cplx[:, ::1] u, Py_ssize_t shift_hi, Py_ssize_t shift_lo):
    cdef Py_ssize_t p = shift_hi if shift_hi > shift_lo else shift_lo
    cdef Py_ssize_t q = shift_hi if shift_hi < shift_lo else shift_lo
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t mask_q = (1 << q) - 1
    cdef Py_ssize_t mask_p = (1 << p) - 1
    cdef Py_ssize_t bit_hi = (<Py_ssize_t> 1) << shift_hi
    cdef Py_ssize_t bit_lo = (<Py_ssize_t> 1) << shift_lo
    cdef Py_ssize_t i, x, base, i01, i10, i11
    cdef cplx v0, v1, v2, v3
    cdef cplx um[4][4]
    cdef Py_ssize_t r, c
    for r in range(4):
        for c in range(4):
            um[r][c] = u[r, c]
    for i in range(dim >> 2):
        x = (i & mask_q) | ((i >> q) << (q + 1))
        base = (x & mask_p) | ((x >> p) << (p + 1))
        i01 = base | bit_lo
        i10 = base | bit_hi
        i11 = base | bit_lo | bit_hi
        v0 = amps[base]
        v1 = amps[i01]
        v2 = amps[i10]
        v3 = amps[i11]
        amps[base] = um[0][0] * v0 + um[0][1] * v1 + um[0][2] * v2 + um[0][3] * v3
        amps[i01] = um[1][0] * v0 + um[1][1] * v1 + um[1][2] * v2 + um[1][3] * v3
        amps[i10] = um[2][0] * v0 + um[2][1] * v1 + um[2][2] * v2 + um[2][3] * v3
        amps[i11] = um[3][0] * v0 + um[3][1] * v1 + um[3][2] * v2 + um[3][3] * v3


def apply_cnot(cplx[::1] amps, Py_ssize_t shift_c, Py_ssize_t shift_t):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t bc = (<Py_ssize_t> 1) << shift_c
    cdef Py_ssize_t bt = (<Py_ssize_t> 1) << shift_t
    cdef Py_ssize_t i, j
    cdef cplx tmp
    for i in range(dim):
        if (i & bc) != 0 and (i & bt) == 0:
            j = i | bt
            tmp = amps[i]
            amps[i] = amps[j]
            amps[j] = tmp


def apply_swap(cplx[::1] amps, Py_ssize_t shift_a, Py_ssize_t shift_b):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t ba = (<Py_ssize_t> 1) << shift_a
    cdef Py_ssize_t bb = (<Py_ssize_t> 1) << shift_b
    cdef Py_ssize_t i, j
    cdef cplx tmp
    for i in range(dim):
        if (i & ba) != 0 and (i & bb) == 0:
            j = (i ^ ba) | bb
            tmp = amps[i]
            amps[i] = amps[j]
            amps[j] = tmp
