# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend; see _pure.py for the reference semantics."""

from libc.math cimport log, sqrt

import numpy as np

NEG_INF = float("-inf")


def advance_products(const double[:, ::1] v, const double[::1] E,
                     double[:, :, :, ::1] M, double[:, ::1] logsum):
    cdef Py_ssize_t nE = E.shape[0]
    cdef Py_ssize_t R = v.shape[0]
    cdef Py_ssize_t L = v.shape[1]
    cdef Py_ssize_t e, r, t
    cdef double a, b, c, d, na, nb, x, f, inv, acc, Ee
    for e in range(nE):
        Ee = E[e]
        for r in range(R):
            a = M[e, r, 0, 0]
            b = M[e, r, 0, 1]
            c = M[e, r, 1, 0]
            d = M[e, r, 1, 1]
            acc = 0.0
            for t in range(L):
                x = Ee - v[r, t]
                na = x * a - c
                nb = x * b - d
                c = a
                d = b
                a = na
                b = nb
                f = sqrt(a * a + b * b + c * c + d * d)
                inv = 1.0 / f
                a *= inv
                b *= inv
                c *= inv
                d *= inv
                acc += log(f)
            M[e, r, 0, 0] = a
            M[e, r, 0, 1] = b
            M[e, r, 1, 0] = c
            M[e, r, 1, 1] = d
            logsum[e, r] += acc


def transfer_product_scaled(const double[::1] v, double E):
    cdef double a = 1.0, b = 0.0, c = 0.0, d = 1.0
    cdef double logscale = 0.0
    cdef double x, na, nb, f, inv
    cdef Py_ssize_t k
    for k in range(v.shape[0]):
        x = E - v[k]
        na = x * a - c
        nb = x * b - d
        c = a
        d = b
        a = na
        b = nb
        f = sqrt(a * a + b * b + c * c + d * d)
        inv = 1.0 / f
        a *= inv
        b *= inv
        c *= inv
        d *= inv
        logscale += log(f)
    return a, b, c, d, logscale


def disc_trace_grid(v, E):
    cdef const double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    E_arr = np.atleast_1d(np.ascontiguousarray(E, dtype=np.float64))
    cdef const double[::1] EE = E_arr
    cdef Py_ssize_t nE = EE.shape[0]
    sign_arr = np.empty(nE, dtype=np.int8)
    logmag_arr = np.empty(nE, dtype=np.float64)
    lognorm_arr = np.empty(nE, dtype=np.float64)
    cdef signed char[::1] sgn = sign_arr
    cdef double[::1] lm = logmag_arr
    cdef double[::1] ln = lognorm_arr
    cdef Py_ssize_t e, k
    cdef double a, b, c, d, na, nb, x, f, inv, logscale, tr, Ee
    for e in range(nE):
        Ee = EE[e]
        a = 1.0
        b = 0.0
        c = 0.0
        d = 1.0
        logscale = 0.0
        for k in range(vv.shape[0]):
            x = Ee - vv[k]
            na = x * a - c
            nb = x * b - d
            c = a
            d = b
            a = na
            b = nb
            f = sqrt(a * a + b * b + c * c + d * d)
            inv = 1.0 / f
            a *= inv
            b *= inv
            c *= inv
            d *= inv
            logscale += log(f)
        tr = a + d
        if tr > 0.0:
            sgn[e] = 1
            lm[e] = log(tr) + logscale
        elif tr < 0.0:
            sgn[e] = -1
            lm[e] = log(-tr) + logscale
        else:
            sgn[e] = 0
            lm[e] = NEG_INF
        ln[e] = logscale
    return sign_arr, logmag_arr, lognorm_arr


def disc_trace_deriv_grid(v, E):
    cdef const double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    E_arr = np.atleast_1d(np.ascontiguousarray(E, dtype=np.float64))
    cdef const double[::1] EE = E_arr
    cdef Py_ssize_t nE = EE.shape[0]
    sign_arr = np.empty(nE, dtype=np.int8)
    logmag_arr = np.empty(nE, dtype=np.float64)
    dsign_arr = np.empty(nE, dtype=np.int8)
    dlogmag_arr = np.empty(nE, dtype=np.float64)
    lognorm_arr = np.empty(nE, dtype=np.float64)
    cdef signed char[::1] sgn = sign_arr
    cdef double[::1] lm = logmag_arr
    cdef signed char[::1] dsgn = dsign_arr
    cdef double[::1] dlm = dlogmag_arr
    cdef double[::1] ln = lognorm_arr
    cdef Py_ssize_t e, k
    cdef double a, b, c, d, da, db, dc, dd, na, nb, nda, ndb
    cdef double x, f, inv, logscale, tr, dtr, Ee
    for e in range(nE):
        Ee = EE[e]
        a = 1.0
        b = 0.0
        c = 0.0
        d = 1.0
        da = 0.0
        db = 0.0
        dc = 0.0
        dd = 0.0
        logscale = 0.0
        for k in range(vv.shape[0]):
            x = Ee - vv[k]
            nda = a + x * da - dc
            ndb = b + x * db - dd
            dc = da
            dd = db
            da = nda
            db = ndb
            na = x * a - c
            nb = x * b - d
            c = a
            d = b
            a = na
            b = nb
            f = sqrt(a * a + b * b + c * c + d * d)
            inv = 1.0 / f
            a *= inv
            b *= inv
            c *= inv
            d *= inv
            da *= inv
            db *= inv
            dc *= inv
            dd *= inv
            logscale += log(f)
        tr = a + d
        dtr = da + dd
        if tr > 0.0:
            sgn[e] = 1
            lm[e] = log(tr) + logscale
        elif tr < 0.0:
            sgn[e] = -1
            lm[e] = log(-tr) + logscale
        else:
            sgn[e] = 0
            lm[e] = NEG_INF
        if dtr > 0.0:
            dsgn[e] = 1
            dlm[e] = log(dtr) + logscale
        elif dtr < 0.0:
            dsgn[e] = -1
            dlm[e] = log(-dtr) + logscale
        else:
            dsgn[e] = 0
            dlm[e] = NEG_INF
        ln[e] = logscale
    return sign_arr, logmag_arr, dsign_arr, dlogmag_arr, lognorm_arr
