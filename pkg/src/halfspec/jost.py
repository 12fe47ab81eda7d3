"""Jost function evaluation by three independent routes.

For q in L^1(0, inf) and Im z >= 0, z != 0, the Jost solution is the unique
solution of -y'' + q y = z^2 y with y ~ e^{izx} at infinity.  The Jost
function is its value at x = 0; its zeros in the open upper half-plane are
the square roots of the discrete eigenvalues of the Dirichlet operator.

Routes:

* ``jost_transfer_matrix`` -- exact backward propagation through the pieces
  of a step potential (rounding-level error only).
* ``jost_series`` -- successive approximations for the integral equation of
  f = e^{-izx} e_+ - 1, with the kernel k(u,z) = e^{iuz} sin(uz)/z.
* ``jost_ode`` -- classical RK4 backward integration, an independent
  numerical oracle for the same quantity.

Magnitudes are tracked as (mantissa, exp2) pairs so that e^{izX} factors
with X in the hundreds neither overflow nor underflow; see
:mod:`halfspec.scaling`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .branchcuts import sq_plus
from .potentials import Potential, SampledPotential, StepPotential, WeightPair, l1_norm, weighted_norm
from .scaling import cexpm1, exp_scaled, fold, renorm, scaled_abs_log2

__all__ = [
    "JostEvaluation",
    "SeriesDivergenceError",
    "jost_transfer_matrix",
    "jost_tm_scaled",
    "jost_series",
    "jost_ode",
    "jost_upper_bound",
    "line_wronskian",
    "line_jost_minus_scaled",
    "evaluate_jost",
]


class SeriesDivergenceError(RuntimeError):
    """Successive approximations did not reach the requested tolerance."""


@dataclass(frozen=True)
class JostEvaluation:
    """Value and x-derivative of the Jost solution at x = 0.

    ``value_mantissa * 2**scale_log2`` is the exact represented value (same
    exponent for the derivative).  ``value``/``derivative`` fold the scale
    back in and are the fields to use whenever the result fits in double
    range, which is every case except wide-support/large-Im z evaluations.
    """

    z: complex
    value_mantissa: complex
    derivative_mantissa: complex
    scale_log2: int
    method: str
    error_estimate: float

    @property
    def value(self) -> complex:
        return complex(fold(self.value_mantissa, self.scale_log2))

    @property
    def derivative(self) -> complex:
        return complex(fold(self.derivative_mantissa, self.scale_log2))

    @property
    def value_log2abs(self) -> float:
        return float(scaled_abs_log2(self.value_mantissa, self.scale_log2))


def _require_upper(z: complex) -> complex:
    z = complex(z)
    if z == 0:
        raise ValueError("z = 0 is excluded")
    if z.imag < 0:
        raise ValueError("need Im z >= 0")
    return z


# -- transfer matrix ----------------------------------------------------------

def _piece_apply(y, dy, w, ell):
    """Advance (y, y') backward across one constant piece of width ell.

    Returns new mantissas and the scaled factor exp(-i*w*ell) pulled out of
    the 2x2 fundamental matrix so mantissa entries stay O(1):
    with t = e^{2 i w ell},
        cos(w ell)        = P (1 + t)/2,
        sin(w ell)/w      = P (t - 1)/(2 i w),
        w sin(w ell)      = P w (t - 1)/(2 i),       P = e^{-i w ell}.
    """
    u = 2j * w * ell
    em1 = cexpm1(u)  # t - 1, cancellation-free
    c = 1.0 + em1 / 2.0
    small = np.abs(u) < 1e-3
    if np.any(small):
        # sin(w ell)/w = ell * (e^u - 1)/u with the series for (e^u-1)/u
        us = np.where(small, u, 1.0)
        ser = 1.0 + us / 2.0 * (1.0 + us / 3.0 * (1.0 + us / 4.0 * (1.0 + us / 5.0 * (1.0 + us / 6.0 * (1.0 + us / 7.0)))))
        s_small = ell * ser
    with np.errstate(divide="ignore", invalid="ignore"):
        s_gen = em1 / (2j * w)
    S = np.where(small, s_small, s_gen) if np.any(small) else s_gen
    D = w * em1 / 2j
    y_new = c * y - S * dy
    dy_new = D * y + c * dy
    pm, pe = exp_scaled(-1j * w * ell)
    return y_new * pm, dy_new, pm, pe


def jost_tm_scaled(q: StepPotential, z) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized transfer-matrix Jost data: (value, derivative, exp2) mantissas.

    Backward propagation from the right support edge with initial data
    (e^{izX}, iz e^{izX}); exact for step potentials up to rounding.  For
    compactly supported steps this formula is entire in z, so evaluation is
    permitted on all of C \\ {0}: below the real axis it computes the
    analytic continuation of the Jost function (used transiently by root
    refinement).
    """
    if not isinstance(q, StepPotential):
        raise TypeError("transfer matrix needs a piecewise-constant potential")
    if not q.is_halfline:
        raise ValueError("half-line potential required (left edge >= 0)")
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("z = 0 is excluded")
    x_right = q.edges[-1] if q.values else 0.0
    m_val, e = exp_scaled(1j * z * x_right)
    y = np.ones_like(z) * m_val
    dy = 1j * z * m_val
    e = e.copy()
    # pieces from the right edge back to the leftmost, then the free gap to 0
    segments = [(hi - lo, v) for lo, hi, v in zip(q.edges, q.edges[1:], q.values)]
    if q.values and q.edges[0] > 0.0:
        segments.insert(0, (q.edges[0], 0.0 + 0.0j))
    for ell, v in reversed(segments):
        w = sq_plus(z * z - v)
        y, dy, pm, pe = _piece_apply(y, dy, w, ell)
        dy = dy * pm
        e = e + pe
        # renormalize jointly on the larger of |y|, |dy|
        mag = np.maximum(np.abs(y), np.abs(dy))
        need = (mag > 2.0**300) | ((mag < 2.0**-300) & (mag > 0))
        if np.any(need):
            _, k = np.frexp(np.where(need, mag, 1.0))
            y = np.where(need, np.ldexp(y.real, -k) + 1j * np.ldexp(y.imag, -k), y)
            dy = np.where(need, np.ldexp(dy.real, -k) + 1j * np.ldexp(dy.imag, -k), dy)
            e = e + np.where(need, k.astype(np.int64), 0)
    return y, dy, e


def jost_transfer_matrix(q: StepPotential, z: complex) -> JostEvaluation:
    """Jost value and derivative at 0 for a step potential (exact method)."""
    zc = _require_upper(z)
    y, dy, e = jost_tm_scaled(q, np.array([zc]))
    # rounding growth is linear in the number of pieces and the phase budget
    phase = sum(abs(sq_plus(zc * zc - v)) * (hi - lo) for lo, hi, v in zip(q.edges, q.edges[1:], q.values))
    err = 5e-15 * (1.0 + phase + q.pieces) * max(abs(y[0]), abs(dy[0]))
    return JostEvaluation(
        z=zc,
        value_mantissa=complex(y[0]),
        derivative_mantissa=complex(dy[0]),
        scale_log2=int(e[0]),
        method="transfer-matrix",
        error_estimate=float(err * 2.0 ** float(np.clip(e[0], -1000, 1000))) if abs(e[0]) < 1000 else float("nan"),
    )


# -- successive approximations --------------------------------------------------

def _suffix_simpson(g: np.ndarray, h: float) -> np.ndarray:
    """R_i = integral_{x_i}^{x_n} g dt on a uniform grid with even interval
    count, for every i.  Pairwise Simpson for even offsets; odd offsets take
    the sub-integral of the same interpolating parabola.  Vectorized over
    leading axes (g has shape (..., n+1))."""
    ns = g.shape[-1] - 1
    blocks = (h / 3.0) * (g[..., 0:ns:2] + 4.0 * g[..., 1 : ns + 1 : 2] + g[..., 2 : ns + 2 : 2])
    suff = np.flip(np.cumsum(np.flip(blocks, axis=-1), axis=-1), axis=-1)
    R = np.zeros(g.shape, dtype=complex)
    R[..., 0:ns:2] = suff
    # odd points: R_{2k+1} = R_{2k+2} + int_{x_{2k+1}}^{x_{2k+2}} (parabola)
    seg = (h / 12.0) * (-g[..., 0:ns:2] + 8.0 * g[..., 1 : ns + 1 : 2] + 5.0 * g[..., 2 : ns + 2 : 2])
    R[..., 1 : ns + 1 : 2] = R[..., 2 : ns + 2 : 2] + seg
    return R


def _series_spans(q: Potential, points_per_unit: float, width_cap: float, tail_frac: float):
    """Shared quadrature layout: sample points plus spans that never cross a
    breakpoint or kink.  Returns (x, spans, cutoff_tail) where each span is
    (i0, i1, h, q_values) and q_values is exact per piece for step input."""
    if isinstance(q, StepPotential):
        X = q.edges[-1] if q.values else 0.0
        knots = sorted({0.0, *[e for e in q.edges if 0 < e <= X]}) if X > 0 else [0.0]
        cutoff_tail = 0.0
    else:
        X = q.support
        cutoff_tail = 0.0
        if not math.isfinite(X):
            X = math.e
            while q.tail_bound(X) > tail_frac and X < 1e9:
                X *= 1.5
            if q.tail_bound(X) > tail_frac:
                raise SeriesDivergenceError("potential tail decays too slowly for the quadrature window")
            cutoff_tail = q.tail_bound(X)
        else:
            # shrink very generous declared supports using the tail bound
            while q.tail is not None and X > 1.0 and q.tail_bound(X / 1.25) <= tail_frac:
                X /= 1.25
            cutoff_tail = q.tail_bound(X)
        knots = sorted({0.0, *[k for k in q.kinks if 0 < k < X], X})
    if X <= 0:
        return np.array([0.0]), [], 0.0
    points = [np.array([0.0])]
    spans = []
    idx = 0
    for lo, hi in zip(knots, knots[1:]):
        n_chunks = max(1, int(math.ceil((hi - lo) / width_cap)))
        for c in range(n_chunks):
            a = lo + (hi - lo) * c / n_chunks
            b = lo + (hi - lo) * (c + 1) / n_chunks
            n = max(8, int(math.ceil((b - a) * points_per_unit)))
            n += n % 2
            pts = np.linspace(a, b, n + 1)
            if isinstance(q, StepPotential):
                qv = complex(q(0.5 * (a + b)))  # constant on the span
            else:
                eps = 1e-9 * (b - a)
                qv = np.asarray(q(np.clip(pts, a + eps, b - eps)), dtype=complex)
            spans.append((idx, idx + n, (b - a) / n, qv))
            points.append(pts[1:])
            idx += n
    return np.concatenate(points), spans, cutoff_tail


def _apply_kernel(term: np.ndarray, x: np.ndarray, spans, z: np.ndarray) -> np.ndarray:
    """K[term](x_i) = integral_{x_i}^{X} k(t - x_i, z) q(t) term(t) dt for all
    grid points, vectorized over the z axis.

    The kernel splits as k(u, z) = (e^{2iuz} - 1)/(2iz); both resulting tail
    integrals are accumulated right-to-left span by span.  Phase factors
    relative to the span left edge stay within exp(2 Im z * width_cap), so
    nothing overflows, and factors crossing span boundaries have modulus <= 1.
    """
    nz = z.shape[0]
    out = np.zeros((nz, x.shape[0]), dtype=complex)
    two_iz = (2j * z)[:, None]
    T_end = np.zeros(nz, dtype=complex)  # plain tail beyond the current span
    A_end = np.zeros(nz, dtype=complex)  # phase-weighted tail relative to span right edge
    for i0, i1, h, qv in reversed(spans):
        pts = x[i0 : i1 + 1]
        lo = pts[0]
        F = term[:, i0 : i1 + 1] * (qv if np.ndim(qv) else complex(qv))
        # plain tails
        Rp = _suffix_simpson(F, h)
        T = Rp + T_end[:, None]
        # weighted tails: R_i = int_{x_i}^{hi} e^{2iz(t-lo)} F dt, then
        # A_i = e^{-2iz(x_i-lo)} R_i + e^{2iz(hi-x_i)} A_end
        rel = (pts - lo)[None, :]
        p = np.exp(two_iz * rel)           # decaying, |p| <= 1
        Rw = _suffix_simpson(F * p, h)
        width = pts[-1] - lo
        with np.errstate(over="ignore"):
            inv_p = np.exp(-two_iz * rel)  # growth bounded by e^{2 Im z * width_cap}
        carry = np.exp(two_iz * (width - rel))  # |.| <= 1
        A = inv_p * Rw + carry * A_end[:, None]
        out[:, i0 : i1 + 1] = (A - T) / two_iz
        T_end = T[:, 0]
        A_end = A[:, 0]
    return out


def _weighted_tail_at_zero(F: np.ndarray, x: np.ndarray, spans, z: np.ndarray) -> np.ndarray:
    """integral_0^X e^{2izt} F(t) q(t) dt (F already includes q)."""
    nz = z.shape[0]
    two_iz = (2j * z)[:, None]
    A_end = np.zeros(nz, dtype=complex)
    for i0, i1, h, qv in reversed(spans):
        pts = x[i0 : i1 + 1]
        lo = pts[0]
        rel = (pts - lo)[None, :]
        p = np.exp(two_iz * rel)
        G = F[:, i0 : i1 + 1] * (qv if np.ndim(qv) else complex(qv)) * p
        Rw = _suffix_simpson(G, h)
        width = pts[-1] - lo
        # value relative to this span's left edge, plus carried remainder
        A_end = Rw[:, 0] + np.exp(two_iz[:, 0] * width) * A_end
    return A_end


def _series_batch(q: Potential, z: np.ndarray, points_per_unit: float, tol: float, max_terms: int):
    z = np.asarray(z, dtype=complex)
    im_max = float(np.max(z.imag)) if z.size else 0.0
    width_cap = 40.0 / max(im_max, 1.0)
    x, spans, cutoff_tail = _series_spans(q, points_per_unit, width_cap, tail_frac=0.05 * tol)
    nz, nt = z.shape[0], x.shape[0]
    if nz * nt > 4_000_000:
        raise SeriesDivergenceError("quadrature grid too large; raise tol or reduce the batch")
    f = np.zeros((nz, nt), dtype=complex)
    term = np.ones((nz, nt), dtype=complex)
    omega1 = l1_norm(q) / np.abs(z)
    sups_history = []
    for n_term in range(1, max_terms + 1):
        term = _apply_kernel(term, x, spans, z)
        sups = np.max(np.abs(term), axis=1) if nt else np.zeros(nz)
        sups_history.append(sups)
        f += term
        worst = float(np.max(sups)) if nz else 0.0
        if worst < tol:
            break
        if worst > 1e120:
            raise SeriesDivergenceError(
                f"term {n_term} reached sup {worst:.3e}; bound omega^n/n! with omega={float(np.max(omega1)):.3e}"
            )
    else:
        raise SeriesDivergenceError(
            f"no convergence in {max_terms} terms; worst last sup {float(np.max(sups_history[-1])):.3e}"
        )
    value = 1.0 + f[:, 0]
    fp0 = -_weighted_tail_at_zero(1.0 + f, x, spans, z)
    derivative = 1j * z * value + fp0
    tail_sup = sups_history[-1]
    return value, derivative, tail_sup, sups_history, omega1, cutoff_tail


def _series_ppu(q: Potential, z_abs_max: float, tol: float) -> float:
    """Step targeting the O(h^4) Simpson error (2|z|h)^4/180 per unit mass."""
    l1 = max(l1_norm(q), 1e-8)
    h_target = (180.0 * tol / l1) ** 0.25 / max(2.0 * z_abs_max, 1.0)
    return max(16.0, 8.0 * z_abs_max, 1.0 / h_target)


def jost_series_grid(q: Potential, z, tol: float = 1e-10, max_terms: int = 300):
    """Batch successive-approximation values over a z array.

    Returns (values, derivatives, error_estimates); the estimate combines a
    coarse/fine Richardson difference, the last term size, and the tail cut.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0) or np.any(z.imag < 0):
        raise ValueError("need Im z >= 0 and z != 0")
    ppu = _series_ppu(q, float(np.max(np.abs(z))), tol)
    v1, d1, *_ = _series_batch(q, z, ppu / 2.0, tol, max_terms)
    v2, d2, tail_sup, _, _, cutoff_tail = _series_batch(q, z, ppu, tol, max_terms)
    quad_err = np.abs(v1 - v2) / 15.0 + np.abs(v1 - v2)
    err = quad_err + tail_sup + cutoff_tail / np.maximum(np.abs(z), 0.05) + 1e-14 * (1.0 + np.abs(v2))
    return v2, d2, err


def jost_series(q: Potential, z: complex, tol: float = 1e-10, max_terms: int = 300) -> JostEvaluation:
    """Jost data by successive approximations with a Richardson grid check."""
    zc = _require_upper(z)
    v, d, err = jost_series_grid(q, np.array([zc]), tol=tol, max_terms=max_terms)
    return JostEvaluation(
        z=zc,
        value_mantissa=complex(v[0]),
        derivative_mantissa=complex(d[0]),
        scale_log2=0,
        method="series",
        error_estimate=float(err[0]),
    )


def series_term_sups(q: Potential, z: complex, tol: float = 1e-10, max_terms: int = 300):
    """Recorded sup-norms of the successive-approximation terms (diagnostics)."""
    zc = _require_upper(z)
    ppu = _series_ppu(q, abs(zc), tol)
    *_, history, omega1, _ = _series_batch(q, np.array([zc]), ppu, tol, max_terms)
    return [float(s[0]) for s in history], float(omega1[0])


# -- Runge-Kutta oracle ---------------------------------------------------------

def _rk4_span(y, dy, v_or_func, z2, x_hi, x_lo, n_steps, constant: bool):
    h = (x_lo - x_hi) / n_steps  # negative: backward
    x = x_hi
    for _ in range(n_steps):
        if constant:
            qa = qb = qc = v_or_func
        else:
            qa = v_or_func(x)
            qb = v_or_func(x + h / 2.0)
            qc = v_or_func(x + h)
        k1y, k1d = dy, (qa - z2) * y
        k2y, k2d = dy + 0.5 * h * k1d, (qb - z2) * (y + 0.5 * h * k1y)
        k3y, k3d = dy + 0.5 * h * k2d, (qb - z2) * (y + 0.5 * h * k2y)
        k4y, k4d = dy + h * k3d, (qc - z2) * (y + h * k3y)
        y = y + (h / 6.0) * (k1y + 2 * k2y + 2 * k3y + k4y)
        dy = dy + (h / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d)
        x += h
    return y, dy


def _ode_once(q: Potential, z, x_max: float, step: float):
    z = np.asarray(z, dtype=complex)
    z2 = z * z
    y = np.exp(1j * z * x_max)
    dy = 1j * z * y
    if isinstance(q, StepPotential):
        knots = sorted({0.0, x_max, *[e for e in q.edges if 0.0 < e < x_max]})
        for lo, hi in zip(reversed(knots[:-1]), reversed(knots[1:])):
            v = complex(q(0.5 * (lo + hi)))
            n = max(2, int(math.ceil((hi - lo) / step)))
            y, dy = _rk4_span(y, dy, v, z2, hi, lo, n, constant=True)
    else:
        knots = sorted({0.0, x_max, *[k for k in q.kinks if 0.0 < k < x_max]})
        for lo, hi in zip(reversed(knots[:-1]), reversed(knots[1:])):
            n = max(2, int(math.ceil((hi - lo) / step)))
            y, dy = _rk4_span(y, dy, q, z2, hi, lo, n, constant=False)
    return y, dy


def jost_ode(q: Potential, z: complex, x_max: float | None = None, step: float = 1e-3) -> JostEvaluation:
    """Jost data by fixed-step RK4 backward from x_max, with step-halving error."""
    zc = _require_upper(z)
    if x_max is None:
        if isinstance(q, StepPotential):
            x_max = q.edges[-1] if q.values else 1.0
        else:
            x_max = q.support
            if not math.isfinite(x_max):
                raise ValueError("provide x_max for potentials with unbounded support")
    if isinstance(q, SampledPotential) and q.tail_bound(x_max) > 1e-6:
        raise ValueError("tail beyond x_max is too large for the requested accuracy")
    y1, d1 = _ode_once(q, np.array([zc]), x_max, step)
    y2, d2 = _ode_once(q, np.array([zc]), x_max, step / 2.0)
    err = abs(complex(y1[0] - y2[0])) + abs(complex(d1[0] - d2[0])) / (1.0 + abs(zc))
    tail_err = q.tail_bound(x_max) / max(abs(zc), 1e-3) if isinstance(q, SampledPotential) else 0.0
    return JostEvaluation(
        z=zc,
        value_mantissa=complex(y2[0]),
        derivative_mantissa=complex(d2[0]),
        scale_log2=0,
        method="ode",
        error_estimate=float(err + tail_err + 1e-14 * (1.0 + abs(complex(y2[0])))),
    )


# -- analytic bound -------------------------------------------------------------

def jost_upper_bound(q: Potential, z: complex, weight: WeightPair | None = None) -> float:
    """Known bound on |e_+(z) - 1|: exp(||q||_1/|z|) - 1, or the weighted
    refinement exp(a_hat(1/|z|) ||q||_a) - 1."""
    zc = _require_upper(z)
    if weight is None or weight.is_unit:
        return float(math.expm1(l1_norm(q) / abs(zc)))
    return float(math.expm1(weight.a_hat(1.0 / abs(zc)) * weighted_norm(q, weight)))


# -- line potentials -------------------------------------------------------------

def line_jost_minus_scaled(line_q: StepPotential, z):
    """(value, derivative, exp2) of the left Jost solution at 0 for a compactly
    supported line potential: forward propagation from the left edge with
    initial data (e^{-iz a}, -iz e^{-iz a}) at x = a (left support edge)."""
    z = np.asarray(z, dtype=complex)
    if not line_q.values:
        m, e = exp_scaled(np.zeros_like(z))
        return np.ones_like(z), -1j * z, np.zeros(z.shape, dtype=np.int64)
    a = line_q.edges[0]
    if a > 0:
        a = 0.0  # support entirely on the right: free up to 0 not needed
    m_val, e = exp_scaled(-1j * z * a)
    y = np.ones_like(z) * m_val
    dy = -1j * z * m_val
    e = e.copy()
    segments = [(lo, hi, v) for lo, hi, v in zip(line_q.edges, line_q.edges[1:], line_q.values) if hi <= 0 or lo < 0]
    # clip to (a, 0]; forward propagation only up to x = 0
    for lo, hi, v in segments:
        hi = min(hi, 0.0)
        if hi <= lo:
            continue
        ell = hi - lo
        w = sq_plus(z * z - v)
        # forward matrix: y(+ell) = cos(w ell) y + sin(w ell)/w y'
        #                 y'(+ell) = -w sin(w ell) y + cos(w ell) y'
        u = 2j * w * ell
        em1 = cexpm1(u)
        c = 1.0 + em1 / 2.0
        small = np.abs(u) < 1e-3
        with np.errstate(divide="ignore", invalid="ignore"):
            S = np.where(small, ell, em1 / (2j * w))
        if np.any(small):
            us = np.where(small, u, 1.0)
            ser = 1.0 + us / 2.0 * (1.0 + us / 3.0 * (1.0 + us / 4.0))
            S = np.where(small, ell * ser, S)
        D = -w * em1 / 2j
        y_new = c * y + S * dy
        dy_new = D * y + c * dy
        pm, pe = exp_scaled(-1j * w * ell)
        y, dy = y_new * pm, dy_new * pm
        e = e + pe
        mag = np.maximum(np.abs(y), np.abs(dy))
        need = (mag > 2.0**300) | ((mag < 2.0**-300) & (mag > 0))
        if np.any(need):
            _, k = np.frexp(np.where(need, mag, 1.0))
            y = np.where(need, np.ldexp(y.real, -k) + 1j * np.ldexp(y.imag, -k), y)
            dy = np.where(need, np.ldexp(dy.real, -k) + 1j * np.ldexp(dy.imag, -k), dy)
            e = e + np.where(need, k.astype(np.int64), 0)
    if line_q.edges[0] > 0:
        return np.ones_like(z), -1j * z, np.zeros(z.shape, dtype=np.int64)
    return y, dy, e


def line_wronskian_scaled(line_q: StepPotential, z):
    """W(z) = e_+(0) e_-'(0) - e_-(0) e_+'(0) as (mantissa, exp2) arrays.

    e_+ comes from backward propagation over the part of the potential on
    [0, inf); e_- from forward propagation over the part on (-inf, 0].
    Zeros of W are the square roots of the line operator's eigenvalues.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise ValueError("line Wronskian needs Im z > 0")
    # split at 0: right part as a half-line step potential
    right_edges = [e for e in line_q.edges if e > 0]
    right_lo = 0.0
    right_vals = []
    for lo, hi, v in zip(line_q.edges, line_q.edges[1:], line_q.values):
        if hi > 0:
            right_vals.append(v)
    if right_edges and right_vals:
        first_lo = max(line_q.edges[0], 0.0)
        q_right = StepPotential((first_lo, *right_edges), tuple(right_vals)).simplified()
        if not q_right.values:
            q_right = StepPotential((0.0,), ())
    else:
        q_right = StepPotential((0.0,), ())
    yp, dyp, ep = jost_tm_scaled(q_right, z)
    ym, dym, em = line_jost_minus_scaled(line_q, z)
    w = yp * dym - ym * dyp
    return renorm(w, ep + em)


def line_wronskian(line_q: StepPotential, z: complex) -> complex:
    """Wronskian of the two line Jost solutions at a single z (folded)."""
    zc = complex(z)
    if zc.imag <= 0:
        raise ValueError("line Wronskian needs Im z > 0")
    m, e = line_wronskian_scaled(line_q, np.array([zc]))
    return complex(fold(m, e)[0])


def even_line_wronskian(q: StepPotential, z) -> np.ndarray:
    """Shortcut for even extensions: W(z) = -2 e_+(0,z) e_+'(0,z) of the
    half-line restriction."""
    z = np.asarray(z, dtype=complex)
    y, dy, e = jost_tm_scaled(q, z)
    return fold(-2.0 * y * dy, 2 * e)


# -- dispatcher -------------------------------------------------------------------

def evaluate_jost(q: Potential, z: complex, method: str = "auto", **kw) -> JostEvaluation:
    if method in ("tm", "transfer-matrix"):
        return jost_transfer_matrix(q, z)
    if method == "series":
        return jost_series(q, z, **kw)
    if method == "ode":
        return jost_ode(q, z, **kw)
    if method == "auto":
        if isinstance(q, StepPotential):
            return jost_transfer_matrix(q, z)
        return jost_series(q, z, **kw)
    raise ValueError(f"unknown method {method!r}")
