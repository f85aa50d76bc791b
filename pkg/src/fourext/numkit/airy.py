"""Airy function Ai on the real line via its two Maclaurin series.

    Ai(x) = Ai(0) f(x) + Ai'(0) g(x)
    f(x) = sum_k 3^k (1/3)_k x^{3k} / (3k)!
    g(x) = sum_k 3^k (2/3)_k x^{3k+1} / (3k+1)!

Both series converge everywhere, but for |x| large the terms peak near
exp((2/3)|x|^{3/2}) while Ai itself is O(1) (x < 0) or exponentially small
(x > 0).  The sum is therefore formed at an internal precision raised by the
expected cancellation, and the cancellation actually incurred is checked
afterwards.
"""

from __future__ import annotations

import math

import gmpy2
import numpy as np

from .precision import DOUBLE, PrecisionError, resolve_precision, working_precision

_GUARD_BITS = 40
MAX_INTERNAL_PREC = 1 << 14


def _cancellation_bits(xs) -> int:
    # log2 of the peak term magnitude; doubled for x > 0 where Ai decays at the same rate.
    def bits(v):
        return (2.0 / 3.0) * abs(v) ** 1.5 / math.log(2.0)

    lo = min(xs)
    hi = max(xs)
    return int(math.ceil(max(bits(min(lo, 0.0)), 2 * bits(max(hi, 0.0)))))


def _series(xs, wp):
    """Sum both series at ``wp`` bits for an object array ``xs``; return (value, log2 peak, log2 |value|)."""
    with gmpy2.context(gmpy2.get_context(), precision=wp):
        x = np.array([gmpy2.mpfr(v) for v in xs], dtype=object)
        ai0 = 1 / (gmpy2.cbrt(gmpy2.mpfr(9)) * gmpy2.gamma(gmpy2.mpfr(2) / 3))
        dai0 = -1 / (gmpy2.cbrt(gmpy2.mpfr(3)) * gmpy2.gamma(gmpy2.mpfr(1) / 3))
        x3 = x * x * x
        tf = np.ones_like(x) * gmpy2.mpfr(1)
        tg = x.copy()
        sf = tf.copy()
        sg = tg.copy()
        peak = np.maximum(np.abs(tf), np.abs(tg))
        tiny = gmpy2.mpfr(2) ** (-wp)
        x3max = max(np.abs(x3))
        k = 0
        while True:
            tf = tf * x3 / ((3 * k + 2) * (3 * k + 3))
            tg = tg * x3 / ((3 * k + 3) * (3 * k + 4))
            sf = sf + tf
            sg = sg + tg
            k += 1
            mags = np.maximum(np.abs(tf), np.abs(tg))
            peak = np.maximum(peak, mags)
            # Terms decrease monotonically once (3k)^2 exceeds |x|^3.
            if 9 * k * k > x3max and np.all(mags <= tiny * np.maximum(peak, 1)):
                break
        value = ai0 * sf + dai0 * sg
        lp = np.array([float(gmpy2.log2(p)) if p > 0 else 0.0 for p in peak])
        lv = np.array([float(gmpy2.log2(abs(v))) if v != 0 else -math.inf for v in value])
    return value, lp, lv


def airy_ai(x, prec=DOUBLE, max_prec: int = MAX_INTERNAL_PREC):
    """Ai(x) for real ``x`` (scalar or array), correct to about ``prec`` bits.

    The working precision is raised until the measured cancellation leaves
    at least ``prec`` good bits; :class:`PrecisionError` is raised if that
    would need more than ``max_prec`` bits (e.g. at an exact zero of Ai).

    Returns floats for ``prec=53`` and MPFR values (rounded to ``prec``)
    otherwise; arrays in, arrays out.

    >>> round(float(airy_ai(0.0)), 12)
    0.355028053888
    """
    prec = resolve_precision(prec)
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=object)).ravel()
    if len(xs) == 0:
        return np.empty(0, dtype=float if prec == DOUBLE else object)
    with working_precision(max(prec, 64)):
        xs = np.array([gmpy2.mpfr(v) for v in xs], dtype=object)
    xf = [float(v) for v in xs]
    xmax = max(abs(v) for v in xf)
    wp = prec + _cancellation_bits(xf) + _GUARD_BITS
    while True:
        if wp > max_prec:
            raise PrecisionError(
                f"Airy series cancellation exceeds the {max_prec}-bit budget (|x| <= {xmax:g})"
            )
        value, lpeak, lval = _series(xs, wp)
        lost = np.max(lpeak - lval)
        if lost + prec + _GUARD_BITS // 2 <= wp:
            break
        wp = int(lost + prec + _GUARD_BITS)
    if prec == DOUBLE:
        out = np.array([float(v) for v in value])
    else:
        with working_precision(prec):
            out = np.array([gmpy2.mpfr(v) for v in value], dtype=object)
    return out[0] if scalar else out.reshape(np.shape(x))
