"""Simultaneous polynomial root finding (Aberth-Ehrlich).

Coefficients are double-double so that exactly the polynomials this package
produces (discriminants with huge, cancellation-prone coefficients) can be
polished beyond double precision. The simultaneous iteration itself runs in
complex double on the rounded coefficients; converged roots then get Newton
steps with full double-double Horner evaluation.
"""

from __future__ import annotations

import numpy as np

from .dd import DoubleDouble, v_dd_add, v_dd_mul, v_dd_sub
from .errors import NoConvergence

ABERTH_MAX_ITER = 200
_INIT_PHASE = 0.7


def _as_dd_arrays(coeffs):
    if isinstance(coeffs, tuple) and len(coeffs) == 2:
        hi = np.asarray(coeffs[0], dtype=float)
        lo = np.asarray(coeffs[1], dtype=float)
        return hi.copy(), lo.copy()
    hi = np.empty(len(coeffs))
    lo = np.empty(len(coeffs))
    for k, c in enumerate(coeffs):
        if isinstance(c, DoubleDouble):
            hi[k], lo[k] = c.hi, c.lo
        else:
            hi[k], lo[k] = float(c), 0.0
    return hi, lo


def _bini_start(c):
    """Initial root guesses from the Newton polygon (Bini's strategy).

    c: monic double coefficients, constant first.
    """
    deg = len(c) - 1
    logs = np.full(deg + 1, -np.inf)
    nz = c != 0.0
    logs[nz] = np.log(np.abs(c[nz]))
    # upper convex hull over (k, log|c_k|)
    hull = []
    for k in range(deg + 1):
        if not np.isfinite(logs[k]):
            continue
        while len(hull) >= 2:
            (k1, y1), (k2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (k - k2) <= (logs[k] - y2) * (k2 - k1):
                hull.pop()
            else:
                break
        hull.append((k, logs[k]))
    z = np.empty(deg, dtype=complex)
    pos = 0
    for seg, ((k1, y1), (k2, y2)) in enumerate(zip(hull[:-1], hull[1:])):
        m = k2 - k1
        r = np.exp((y1 - y2) / m)
        angles = 2.0 * np.pi * np.arange(m) / m + _INIT_PHASE + 0.5 * seg
        z[pos:pos + m] = r * np.exp(1j * angles)
        pos += m
    return z


def _horner(c, z):
    """Value and derivative of the polynomial at points z (complex double)."""
    p = np.full_like(z, c[-1])
    dp = np.zeros_like(z)
    for k in range(len(c) - 2, -1, -1):
        dp = dp * z + p
        p = p * z + c[k]
    return p, dp


def _coeff_scale_bound(c, z):
    """Sum_k |c_k| |z|^k, the residual normalization."""
    az = np.abs(z)
    b = np.full_like(az, abs(c[-1]))
    for k in range(len(c) - 2, -1, -1):
        b = b * az + abs(c[k])
    return b


def _horner_dd(hi, lo, zre, zim):
    """Complex Horner with double-double coefficients, vectorized over roots.

    Returns the value as a complex128 array (rounded after exact-ish
    accumulation, so cancellation is captured).
    """
    rehi = np.full_like(zre, hi[-1])
    relo = np.full_like(zre, lo[-1])
    imhi = np.zeros_like(zre)
    imlo = np.zeros_like(zre)
    for k in range(len(hi) - 2, -1, -1):
        # (re + i im) * z
        t1h, t1l = v_dd_mul(rehi, relo, zre, np.zeros_like(zre))
        t2h, t2l = v_dd_mul(imhi, imlo, zim, np.zeros_like(zim))
        nreh, nrel = v_dd_sub(t1h, t1l, t2h, t2l)
        t3h, t3l = v_dd_mul(rehi, relo, zim, np.zeros_like(zim))
        t4h, t4l = v_dd_mul(imhi, imlo, zre, np.zeros_like(zre))
        nimh, niml = v_dd_add(t3h, t3l, t4h, t4l)
        rehi, relo = v_dd_add(nreh, nrel, np.full_like(zre, hi[k]), np.full_like(zre, lo[k]))
        imhi, imlo = nimh, niml
    return (rehi + relo) + 1j * (imhi + imlo)


def _aberth_iterate(c, z, max_iter, hi, lo):
    """Aberth-Ehrlich sweeps; with (hi, lo) given, p and p' are evaluated in
    double-double, which is what lets the iteration descend below the double
    noise floor of ill-conditioned monomial-basis polynomials."""
    deg = len(z)
    use_dd = hi is not None
    if use_dd:
        lead = hi[-1] + lo[-1]
        k = np.arange(1, len(hi))
        dhi, dlo = hi[1:] * k, lo[1:] * k
    for _ in range(max_iter):
        if use_dd:
            p = _horner_dd(hi, lo, z.real, z.imag) / lead
            dp = _horner_dd(dhi, dlo, z.real, z.imag) / lead
            converged = np.zeros(deg, dtype=bool)
        else:
            p, dp = _horner(c, z)
            # double Horner bottoms out at eps * coefficient scale; treat
            # that as converged for this phase
            bound = _coeff_scale_bound(c, z)
            converged = np.abs(p) <= 1e-15 * bound
        safe_dp = np.where(dp == 0.0, 1.0, dp)
        newton = np.where(dp == 0.0, 0.1 * (1.0 + np.abs(z)), p / safe_dp)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        coincident = diff == 0.0
        if coincident.any():
            diff = np.where(coincident, 1e-14 * (1.0 + np.abs(z[:, None])), diff)
        s = np.sum(1.0 / diff, axis=1)
        corr = newton / (1.0 - newton * s)
        corr = np.where(np.isfinite(corr), corr, newton)
        converged = converged | (np.abs(corr) <= 5e-16 * (1.0 + np.abs(z)))
        z = np.where(converged, z, z - corr)
        if converged.all():
            break
    return z


def _rescue_real_missing(z, hi, lo):
    """Replace collapsed duplicates / cycling stragglers with real roots
    recovered by a sign scan.

    Simultaneous iteration occasionally parks two points on the same
    simple root (both then carry a tiny residual, invisible to the final
    residual gate) or leaves one point cycling near a pseudozero blob.
    The coefficients here are real, so any missing real root produces a
    sign change of the double-double evaluation along the real axis;
    bisection then recovers it to full accuracy. Complex conjugate pairs
    are untouched: they are never "missing" this way in practice, and the
    residual gate still backstops the result.
    """
    scale = 1.0 + np.abs(z)
    p = _horner_dd(hi, lo, z.real, z.imag)
    k = np.arange(1, len(hi))
    dp = _horner_dd(hi[1:] * k, lo[1:] * k, z.real, z.imag)
    # a settled point sits within its conditioning limit of a root, so its
    # Newton step is tiny; a cycling straggler's step is the blob size
    step = np.abs(p) / np.maximum(np.abs(dp), 1e-300)
    wander = step > 1e-9 * scale
    # excess members of duplicate clusters among the settled points
    dist = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(dist, np.inf)
    excess = np.zeros(len(z), dtype=bool)
    settled = np.where(~wander)[0]
    for a in range(len(settled)):
        i = settled[a]
        if excess[i]:
            continue
        for j in settled[a + 1:]:
            if dist[i, j] <= 1e-8 * scale[i]:
                excess[j] = True
    replace = np.where(wander | excess)[0]
    if len(replace) == 0:
        return z
    kept = z[~(wander | excess)]
    # sign scan over the real span of the settled roots
    span_lo = kept.real.min() if len(kept) else z.real.min()
    span_hi = kept.real.max() if len(kept) else z.real.max()
    margin = 0.05 * (span_hi - span_lo) + 1e-6
    grid = np.linspace(span_lo - margin, span_hi + margin, 8193)
    vals = _horner_dd(hi, lo, grid, np.zeros_like(grid)).real
    sgn = np.sign(vals)
    flip = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    g_lo, g_hi = grid[flip], grid[flip + 1]
    s_lo = sgn[flip]
    for _ in range(70):
        mid = 0.5 * (g_lo + g_hi)
        sm = np.sign(_horner_dd(hi, lo, mid, np.zeros_like(mid)).real)
        take = sm == s_lo
        g_lo = np.where(take, mid, g_lo)
        g_hi = np.where(take, g_hi, mid)
    cand = 0.5 * (g_lo + g_hi)
    # novel roots only: not already represented by a kept point
    if len(kept):
        novel = cand[np.min(np.abs(cand[:, None] - kept[None, :]), axis=1)
                     > 1e-8 * (1.0 + np.abs(cand))]
    else:
        novel = cand
    for i, r in zip(replace, novel):
        z[i] = complex(r, 0.0)
    return z


def _symmetrize_conjugates(z, tol):
    """Pair complex roots of a real polynomial with their conjugates."""
    z = np.array(z, dtype=complex)
    used = np.zeros(len(z), dtype=bool)
    order = np.argsort(np.abs(z.imag))[::-1]
    for i in order:
        if used[i] or z[i].imag == 0.0:
            continue
        target = np.conj(z[i])
        cand = np.where(~used & (np.arange(len(z)) != i))[0]
        if len(cand) == 0:
            z[i] = complex(z[i].real, 0.0)
            continue
        j = cand[np.argmin(np.abs(z[cand] - target))]
        if abs(z[j] - target) <= tol * (1.0 + abs(z[i])):
            pair = 0.5 * (z[i] + np.conj(z[j]))
            z[i] = pair
            z[j] = np.conj(pair)
            used[i] = used[j] = True
        elif abs(z[i].imag) <= tol * (1.0 + abs(z[i])):
            z[i] = complex(z[i].real, 0.0)
    return z


def poly_roots(coeffs, tol=1e-12):
    """All roots (with multiplicity) of a polynomial with DD coefficients.

    ``coeffs`` is constant-first: either a sequence of DoubleDouble/float or
    a ``(hi, lo)`` array pair. Each returned root z satisfies
    |p(z)| <= tol * sum_k |c_k||z|^k; raises NoConvergence otherwise.
    """
    hi, lo = _as_dd_arrays(coeffs)
    if len(hi) < 2:
        raise ValueError("degree must be >= 1")
    if hi[-1] == 0.0:
        raise ValueError("leading coefficient must be nonzero")
    # deflate exact roots at the origin: zero low-order coefficients break
    # the Bini starting radii (log|c_0| = -inf)
    m = 0
    while m < len(hi) - 1 and hi[m] == 0.0 and lo[m] == 0.0:
        m += 1
    if m > 0:
        inner = poly_roots((hi[m:], lo[m:]), tol) if len(hi) - m >= 2 \
            else np.empty(0, dtype=complex)
        z = np.concatenate([np.zeros(m, dtype=complex), inner])
        return z[np.lexsort((z.imag, z.real))]
    lead = hi[-1] + lo[-1]
    c = (hi + lo) / lead
    deg = len(c) - 1
    if deg == 1:
        return np.array([complex(-c[0])])

    z = _bini_start(c)
    # phase 1: plain double evaluation down to its noise floor
    z = _aberth_iterate(c, z, ABERTH_MAX_ITER, None, None)
    # phase 2: double-double evaluation of p breaks through the double
    # noise floor (essential for ill-conditioned monomial-basis input)
    z = _aberth_iterate(c, z, ABERTH_MAX_ITER, hi, lo)
    z = _rescue_real_missing(z, hi, lo)
    z = _symmetrize_conjugates(z, 1e-9)

    p_final = np.abs(_horner_dd(hi, lo, z.real, z.imag))
    bound = _coeff_scale_bound(np.abs(hi + lo) + 1e-300, z)
    resid = p_final / bound
    if np.any(resid > tol):
        raise NoConvergence(
            f"poly_roots residuals exceed tol={tol}: max {resid.max():.3e}",
            residuals=resid,
        )
    return z[np.lexsort((z.imag, z.real))]
