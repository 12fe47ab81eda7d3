"""Branch-cut-correct square roots and half-line geometry.

Two square-root branches are used throughout:

* ``sq_plus``  -- cut along the positive real axis, argument in [0, 2*pi),
  so the result always has nonnegative imaginary part.
* ``sq_minus`` -- cut along the negative real axis, argument in [-pi, pi),
  so the result always has nonnegative real part.

Tie-breaking on the cuts is frozen: arg_plus returns 0 (not 2*pi) on the
positive reals, arg_minus returns -pi (not +pi) on the negative reals, and
an imaginary part of -0.0 is normalized to +0.0 on entry so signed zeros
never flip a branch.

All functions accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "arg_plus",
    "arg_minus",
    "sq_plus",
    "sq_minus",
    "dist_to_halfline",
    "im_sqrt_plus",
]

_TWO_PI = 2.0 * np.pi


def _as_complex(zeta):
    """Coerce to complex ndarray with Im == -0.0 normalized to +0.0."""
    z = np.asarray(zeta, dtype=complex)
    # adding +0.0 maps -0.0 to +0.0 and leaves every other value unchanged
    return z.real + 1j * (z.imag + 0.0)


def _check_finite(z) -> None:
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite complex input")


def arg_plus(zeta):
    """Argument in [0, 2*pi); 0 on the positive real axis."""
    z = _as_complex(zeta)
    _check_finite(z)
    th = np.angle(z)
    th = np.where(th < 0.0, th + _TWO_PI, th)
    # theta + 2*pi can round up to exactly 2*pi for points one ulp below the
    # cut; clamp to the largest double below 2*pi so the branch side survives
    th = np.where(th >= _TWO_PI, np.nextafter(_TWO_PI, 0.0), th)
    return th if np.ndim(zeta) else float(th)


def arg_minus(zeta):
    """Argument in [-pi, pi); -pi on the negative real axis."""
    z = _as_complex(zeta)
    _check_finite(z)
    th = np.angle(z)  # (-pi, pi] with +pi on the negative reals
    # points with Im > 0 whose angle rounded to pi stay just below +pi;
    # the cut itself (Im == 0, Re < 0) maps to -pi
    on_plus_side = (th >= np.pi) & (z.imag > 0.0)
    th = np.where(on_plus_side, np.nextafter(np.pi, 0.0), np.where(th >= np.pi, th - _TWO_PI, th))
    return th if np.ndim(zeta) else float(th)


def sq_plus(zeta):
    """Square root with Im >= 0: sqrt(|zeta|) * exp(i*arg_plus(zeta)/2)."""
    z = _as_complex(zeta)
    _check_finite(z)
    r = np.sqrt(z)  # principal branch, arg in (-pi, pi]
    # principal root has Re >= 0; flip the lower-half results into Im >= 0
    r = np.where(r.imag < 0.0, -r, r)
    # exactly on the negative real axis numpy already gives +i*sqrt(|x|)
    return r if np.ndim(zeta) else complex(r)


def sq_minus(zeta):
    """Square root with Re >= 0: sqrt(|zeta|) * exp(i*arg_minus(zeta)/2).

    On the negative real axis the argument is -pi, so sq_minus(-x) = -i*sqrt(x).
    """
    z = _as_complex(zeta)
    _check_finite(z)
    r = np.sqrt(z)
    # principal branch agrees except exactly on the cut, where numpy returns
    # +i*sqrt(|x|) (arg = +pi) and this branch wants -i*sqrt(|x|) (arg = -pi)
    on_cut = (z.real < 0.0) & (z.imag == 0.0)
    r = np.where(on_cut, -r, r)
    return r if np.ndim(zeta) else complex(r)


def dist_to_halfline(lam):
    """Distance from lam to the closed positive half-line [0, inf)."""
    z = _as_complex(lam)
    _check_finite(z)
    d = np.where(z.real >= 0.0, np.abs(z.imag), np.abs(z))
    return d if np.ndim(lam) else float(d)


def im_sqrt_plus(lam):
    """Imaginary part of sq_plus(lam); strictly positive off [0, inf)."""
    r = sq_plus(lam)
    out = np.asarray(r).imag
    return out if np.ndim(lam) else float(out)
