"""Power-of-two scaled complex arithmetic for huge dynamic ranges.

A scaled value is a pair ``(mantissa, exp2)`` representing
``mantissa * 2**exp2`` with a complex mantissa and an integer exponent.
Long products of exponentials (transfer matrices over wide supports,
e^{iRz} factors with R in the thousands) leave double range long before
they cancel; keeping the exponent separate makes phases and ratios exact
while magnitudes stay representable.

All helpers are vectorized over numpy arrays.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "exp_scaled",
    "cexpm1",
    "renorm",
    "fold",
    "scaled_abs_log2",
    "scaled_add",
]

_LOG2 = np.log(2.0)
# renormalize once a mantissa magnitude leaves [2^-300, 2^300]
_RENORM_BOUND = 300


def exp_scaled(w):
    """exp(w) as (mantissa, exp2) with |mantissa| in [1, 2)."""
    w = np.asarray(w, dtype=complex)
    e = np.floor(w.real / _LOG2)
    m = np.exp(w.real - e * _LOG2 + 1j * w.imag)
    return m, e.astype(np.int64)


def cexpm1(u):
    """exp(u) - 1 for complex u without cancellation near u = 0.

    Uses expm1/cos half-angle pieces: with u = a + ib,
    exp(u) - 1 = expm1(a) - 2*exp(a)*sin(b/2)**2 + i*exp(a)*sin(b).
    """
    u = np.asarray(u, dtype=complex)
    a, b = u.real, u.imag
    ea = np.exp(a)
    return np.expm1(a) - 2.0 * ea * np.sin(b / 2.0) ** 2 + 1j * ea * np.sin(b)


def renorm(m, e):
    """Pull the mantissa magnitude back near 1, adjusting exp2."""
    m = np.asarray(m, dtype=complex)
    e = np.asarray(e, dtype=np.int64)
    mag = np.abs(m)
    need = (mag != 0.0) & ((mag > 2.0 ** _RENORM_BOUND) | (mag < 2.0 ** -_RENORM_BOUND))
    if np.any(need):
        _, k = np.frexp(np.where(need, mag, 1.0))
        m = np.where(need, np.ldexp(m.real, -k) + 1j * np.ldexp(m.imag, -k), m)
        e = e + np.where(need, k.astype(np.int64), 0)
    return m, e


def fold(m, e):
    """Collapse (mantissa, exp2) to a plain complex; may over/underflow."""
    m = np.asarray(m, dtype=complex)
    e = np.asarray(e)
    with np.errstate(over="ignore", under="ignore"):
        return np.ldexp(m.real, e) + 1j * np.ldexp(m.imag, e)


def scaled_abs_log2(m, e):
    """log2 |mantissa * 2**exp2|, with -inf at zero."""
    m = np.asarray(m, dtype=complex)
    mag = np.abs(m)
    with np.errstate(divide="ignore"):
        return np.where(mag == 0.0, -np.inf, np.log2(np.where(mag == 0.0, 1.0, mag)) + e)


def scaled_add(m1, e1, m2, e2):
    """(m1,e1) + (m2,e2), aligned to the larger exponent."""
    m1 = np.asarray(m1, dtype=complex)
    m2 = np.asarray(m2, dtype=complex)
    e1 = np.asarray(e1, dtype=np.int64)
    e2 = np.asarray(e2, dtype=np.int64)
    e = np.maximum(e1, e2)
    # clip the shift: anything 2000 binades down is exactly 0 in double anyway
    d1 = np.clip(e1 - e, -2000, 0)
    d2 = np.clip(e2 - e, -2000, 0)
    m = np.ldexp(m1.real, d1) + 1j * np.ldexp(m1.imag, d1)
    m = m + (np.ldexp(m2.real, d2) + 1j * np.ldexp(m2.imag, d2))
    return renorm(m, e)
