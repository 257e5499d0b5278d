"""Pure numpy kernel backend.

Same call surface as the compiled extension ``_ext``; vectorizes over the
batch dimension (replicas and/or energy grid) so the per-step Python
overhead is amortized. Transfer matrices are A(x) = [[x, -1], [1, 0]] with
x = E - v_k; products are rescaled by their Frobenius norm every step and
the log of the accumulated scale is tracked separately.
"""

from __future__ import annotations

import numpy as np

NEG_INF = float("-inf")


def advance_products(v, E, M, logsum):
    """Advance scaled transfer products through one chunk of potential values.

    v: (R, L) potential values, one row per replica stream.
    E: (nE,) energies.
    M: (nE, R, 2, 2) rescaled products, updated in place.
    logsum: (nE, R) accumulated log Frobenius norms, updated in place.
    """
    v = np.asarray(v)
    E = np.asarray(E)
    a = M[:, :, 0, 0].copy()
    b = M[:, :, 0, 1].copy()
    c = M[:, :, 1, 0].copy()
    d = M[:, :, 1, 1].copy()
    acc = np.zeros_like(logsum)
    Ecol = E[:, None]
    for t in range(v.shape[1]):
        x = Ecol - v[None, :, t]
        na = x * a - c
        nb = x * b - d
        c, d = a, b
        a, b = na, nb
        f = np.sqrt(a * a + b * b + c * c + d * d)
        inv = 1.0 / f
        a *= inv
        b *= inv
        c *= inv
        d *= inv
        acc += np.log(f)
    M[:, :, 0, 0] = a
    M[:, :, 0, 1] = b
    M[:, :, 1, 0] = c
    M[:, :, 1, 1] = d
    logsum += acc


def transfer_product_scaled(v, E):
    """Full product A(E - v_n) ... A(E - v_1), rescaled every step.

    Returns (a, b, c, d, logscale) with [[a, b], [c, d]] of unit Frobenius
    norm (for n >= 1) and true product = matrix * exp(logscale).
    """
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    logscale = 0.0
    for vk in np.asarray(v, dtype=float):
        x = E - vk
        a, b, c, d = x * a - c, x * b - d, a, b
        f = np.sqrt(a * a + b * b + c * c + d * d)
        a /= f
        b /= f
        c /= f
        d /= f
        logscale += np.log(f)
    return a, b, c, d, logscale


def disc_trace_grid(v, E):
    """Trace of the transfer product over an energy grid, in scaled form.

    Returns (tr_sign, tr_logmag, prod_lognorm) arrays of shape (nE,).
    """
    v = np.asarray(v, dtype=float)
    E = np.atleast_1d(np.asarray(E, dtype=float))
    nE = E.shape[0]
    a = np.ones(nE)
    b = np.zeros(nE)
    c = np.zeros(nE)
    d = np.ones(nE)
    logscale = np.zeros(nE)
    for vk in v:
        x = E - vk
        na = x * a - c
        nb = x * b - d
        c, d = a, b
        a, b = na, nb
        f = np.sqrt(a * a + b * b + c * c + d * d)
        inv = 1.0 / f
        a *= inv
        b *= inv
        c *= inv
        d *= inv
        logscale += np.log(f)
    return _trace_scaled(a + d, logscale) + (logscale,)


def disc_trace_deriv_grid(v, E):
    """Trace and d(trace)/dE over an energy grid, in scaled form.

    Forward accumulation of the product rule alongside the product itself;
    both share the same rescaling factors. Returns
    (tr_sign, tr_logmag, dtr_sign, dtr_logmag, prod_lognorm).
    """
    v = np.asarray(v, dtype=float)
    E = np.atleast_1d(np.asarray(E, dtype=float))
    nE = E.shape[0]
    a = np.ones(nE)
    b = np.zeros(nE)
    c = np.zeros(nE)
    d = np.ones(nE)
    da = np.zeros(nE)
    db = np.zeros(nE)
    dc = np.zeros(nE)
    dd = np.zeros(nE)
    logscale = np.zeros(nE)
    for vk in v:
        x = E - vk
        nda = a + x * da - dc
        ndb = b + x * db - dd
        dc, dd = da, db
        da, db = nda, ndb
        na = x * a - c
        nb = x * b - d
        c, d = a, b
        a, b = na, nb
        f = np.sqrt(a * a + b * b + c * c + d * d)
        inv = 1.0 / f
        a *= inv
        b *= inv
        c *= inv
        d *= inv
        da *= inv
        db *= inv
        dc *= inv
        dd *= inv
        logscale += np.log(f)
    sign, logmag = _trace_scaled(a + d, logscale)
    dsign, dlogmag = _trace_scaled(da + dd, logscale)
    return sign, logmag, dsign, dlogmag, logscale


def _trace_scaled(tr, logscale):
    sign = np.sign(tr).astype(np.int8)
    with np.errstate(divide="ignore"):
        logmag = np.where(tr != 0.0, np.log(np.abs(np.where(tr != 0.0, tr, 1.0))), NEG_INF)
    return sign, logmag + np.where(sign != 0, logscale, 0.0)
