"""Complex integrable potentials on the half-line and the line.

Two representations:

* :class:`StepPotential` -- piecewise constant between strictly increasing
  edges, zero outside.  This is the privileged form: every structural
  transform stays exact and the transfer-matrix evaluation of Jost data is
  exact up to rounding.
* :class:`SampledPotential` -- an evaluator plus a declared support bound
  and, for decaying tails, a bound tau(X) >= integral_X^inf |q|.  Integrals
  of silently truncated tails are refused.

Weight pairs (a, a_hat) with a_hat(x) = x/a(x) support the weighted norm
integral a(x)|q(x)| dx and a bisection-backed inverse of the strictly
increasing a_hat.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

__all__ = [
    "StepPotential",
    "SampledPotential",
    "Potential",
    "WeightPair",
    "DivergentNormError",
    "barrier",
    "zero_potential",
    "gaussian_bump",
    "log_tail_potential",
    "unit_weight",
    "poly_weight",
    "compact_support_weight",
    "log_weight",
    "l1_norm",
    "weighted_norm",
    "truncate",
    "shift_superpose",
    "even_extension",
    "superpose_steps",
    "to_step",
    "potential_from_json",
    "potential_to_json",
]


class DivergentNormError(ValueError):
    """The requested weighted integral of the potential diverges."""


@dataclass(frozen=True)
class StepPotential:
    """Piecewise-constant potential: value ``values[k]`` on [edges[k], edges[k+1]).

    ``edges`` has one more entry than ``values`` and is strictly increasing;
    the potential vanishes outside [edges[0], edges[-1]].  Half-line
    potentials have edges[0] >= 0; negative left edges make a line potential.
    """

    edges: tuple[float, ...]
    values: tuple[complex, ...]

    def __post_init__(self):
        edges = tuple(float(x) for x in self.edges)
        values = tuple(complex(v) for v in self.values)
        if len(edges) != len(values) + 1:
            raise ValueError("need len(edges) == len(values) + 1")
        if len(edges) >= 2 and not all(a < b for a, b in zip(edges, edges[1:])):
            raise ValueError("edges must be strictly increasing")
        if not all(math.isfinite(x) for x in edges):
            raise ValueError("edges must be finite")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)

    # -- geometry -----------------------------------------------------------
    @property
    def support(self) -> tuple[float, float]:
        if not self.values:
            return (0.0, 0.0)
        return (self.edges[0], self.edges[-1])

    @property
    def is_halfline(self) -> bool:
        return self.support[0] >= 0.0

    @property
    def pieces(self) -> int:
        return len(self.values)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        if self.values:
            idx = np.searchsorted(self.edges, x, side="right") - 1
            inside = (idx >= 0) & (idx < len(self.values))
            vals = np.asarray(self.values, dtype=complex)
            out[inside] = vals[idx[inside]]
        return out if out.ndim else complex(out)

    def simplified(self) -> "StepPotential":
        """Drop zero-valued end pieces and merge equal neighbours."""
        edges, values = list(self.edges), list(self.values)
        while values and values[0] == 0:
            edges.pop(0)
            values.pop(0)
        while values and values[-1] == 0:
            edges.pop()
            values.pop()
        if not values:
            return StepPotential((0.0,), ())
        out_e, out_v = [edges[0]], []
        for e, v in zip(edges[1:], values):
            if out_v and v == out_v[-1]:
                out_e[-1] = e
            else:
                out_v.append(v)
                out_e.append(e)
        return StepPotential(tuple(out_e), tuple(out_v))


@dataclass(frozen=True)
class SampledPotential:
    """Potential given by an evaluator with declared support/tail control.

    ``support`` bounds where q may be nonzero from above; ``tail`` (optional)
    is a decreasing upper bound on integral_X^inf |q|.  ``kinks`` lists
    interior points where q is not smooth, so quadratures can split there.
    """

    func: Callable
    support: float
    tail: Callable[[float], float] | None = None
    kinks: tuple[float, ...] = ()
    label: str = "sampled"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.func(x), dtype=complex)
        if self.tail is None:
            out = np.where(x > self.support, 0.0, out)
        return out if out.ndim else complex(out)

    @property
    def is_halfline(self) -> bool:
        return True

    def tail_bound(self, X: float) -> float:
        if self.tail is not None:
            return float(self.tail(X))
        return 0.0 if X >= self.support else math.inf


Potential = StepPotential | SampledPotential


# -- constructors ------------------------------------------------------------

def barrier(gamma: float, R: float) -> StepPotential:
    """Purely dissipative barrier i*gamma on [0, R]."""
    if gamma <= 0 or R <= 0:
        raise ValueError("gamma and R must be positive")
    return StepPotential((0.0, float(R)), (1j * gamma,))


def zero_potential() -> StepPotential:
    return StepPotential((0.0,), ())


def gaussian_bump(amplitude: complex, center: float, width: float) -> SampledPotential:
    """Smooth bump amplitude * exp(-(x-center)^2 / (2 width^2)) on the half-line."""
    amp = complex(amplitude)
    c, s = float(center), float(width)

    def f(x):
        return amp * np.exp(-((x - c) ** 2) / (2 * s * s))

    def tail(X):
        from scipy.special import erfc

        return abs(amp) * s * math.sqrt(math.pi / 2.0) * float(erfc((X - c) / (s * math.sqrt(2.0))))

    return SampledPotential(f, support=c + 30 * s, tail=tail, label="gaussian")


def log_tail_potential(alpha: float) -> SampledPotential:
    """i / (x log^alpha x) for x >= e, zero below; integrable for alpha > 1."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1 for integrability")

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        m = x >= math.e
        out[m] = 1j / (x[m] * np.log(x[m]) ** alpha)
        return out

    def tail(X):
        X = max(X, math.e)
        return 1.0 / ((alpha - 1.0) * math.log(X) ** (alpha - 1.0))

    return SampledPotential(f, support=math.inf, tail=tail, kinks=(math.e,), label=f"log-tail-{alpha}")


# -- weight pairs -------------------------------------------------------------

@dataclass(frozen=True)
class WeightPair:
    """Monotone weight a with companion a_hat(x) = x / a(x).

    a is nondecreasing and positive; a_hat must be continuous, strictly
    increasing with a_hat(0) = 0 and a_hat(inf) = inf for the inverse to be
    well defined on (0, inf).
    """

    a: Callable[[float], float]
    name: str = "custom"

    @property
    def is_unit(self) -> bool:
        return self.name == "unit"

    def a_hat(self, x):
        x = np.asarray(x, dtype=float)
        # overflow of a(x) at bracket-probing arguments means a_hat ~ 0 there
        with np.errstate(invalid="ignore", over="ignore"):
            out = np.where(x > 0, x / self._a_arr(x), 0.0)
        return out if out.ndim else float(out)

    def _a_arr(self, x):
        return np.vectorize(lambda t: float(self.a(t)), otypes=[float])(x)

    def a_hat_inverse(self, t: float, rel_tol: float = 1e-12) -> float:
        """Solve a_hat(x) = t by bracket growth plus bisection."""
        if t <= 0:
            raise ValueError("a_hat inverse needs t > 0")
        hi = 1.0
        for _ in range(1000):
            if self.a_hat(hi) >= t:
                break
            if hi > 1e300:
                raise DivergentNormError(f"a_hat never reaches {t}: weighted radius is infinite")
            hi *= 2.0
        else:
            raise DivergentNormError(f"a_hat never reaches {t}: weighted radius is infinite")
        lo = hi / 2.0 if hi > 1.0 else 0.0
        while lo > 0 and self.a_hat(lo) > t:
            lo /= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.a_hat(mid) >= t:
                hi = mid
            else:
                lo = mid
            if hi - lo <= rel_tol * max(hi, 1e-300):
                break
        return 0.5 * (lo + hi)


def unit_weight() -> WeightPair:
    return WeightPair(lambda x: 1.0, name="unit")


def poly_weight(p: float) -> WeightPair:
    """a(x) = 1 + x^p, the polynomial-growth weight family, p in (0,1)."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0,1)")
    return WeightPair(lambda x, p=p: 1.0 + x**p, name=f"poly-{p}")


def compact_support_weight(R: float) -> WeightPair:
    """a = 1 on (0,R], (log x / log R)^2 beyond; tailored to supp(q) in [0,R]."""
    if R <= 1:
        raise ValueError("R must exceed 1")
    lR2 = math.log(R) ** 2

    def a(x, R=R, lR2=lR2):
        return 1.0 if x <= R else math.log(x) ** 2 / lR2

    return WeightPair(a, name=f"compact-{R}")


def log_weight(beta: float) -> WeightPair:
    """a(x) = log^beta x for x >= e^beta, constant beta^beta below."""
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    cut = math.exp(beta)

    def a(x, beta=beta, cut=cut):
        return beta**beta if x < cut else math.log(x) ** beta

    return WeightPair(a, name=f"log-{beta}")


# -- integral operations -------------------------------------------------------

def _quad_abs(f, lo: float, hi: float, kinks: Sequence[float] = ()) -> float:
    pts = sorted({lo, hi, *[k for k in kinks if lo < k < hi]})
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        val, _ = quad(lambda x: abs(complex(f(x))), a, b, limit=300, epsabs=1e-13, epsrel=1e-11)
        total += val
    return total


def l1_norm(q: Potential) -> float:
    """Integral of |q| over the support (exact for step potentials).

    Sampled potentials are integrated on geometric windows; whatever mass the
    declared tail bound assigns beyond the last window is added, so slowly
    decaying tails are accounted for rather than silently dropped.
    """
    if isinstance(q, StepPotential):
        widths = np.diff(q.edges)
        return float(np.sum(widths * np.abs(np.asarray(q.values)))) if q.values else 0.0
    if not math.isfinite(q.support) and q.tail is None:
        raise DivergentNormError("unbounded support requires a tail bound")
    X = min(q.support, 16.0)
    total = _quad_abs(q, 0.0, X, q.kinks)
    while X < q.support and X < 1e250 and q.tail_bound(X) > 1e-13 * max(total, 1e-12):
        hi = min(2.0 * X, q.support)
        total += _quad_abs(q, X, hi, q.kinks)
        X = hi
    return total + q.tail_bound(X)


def weighted_norm(q: Potential, w: WeightPair) -> float:
    """Integral of a(x)|q(x)| dx; raises DivergentNormError when it diverges."""
    if w.is_unit:
        return l1_norm(q)
    if isinstance(q, StepPotential):
        total = 0.0
        for lo, hi, v in zip(q.edges, q.edges[1:], q.values):
            if v == 0:
                continue
            val, _ = quad(lambda x: float(w.a(x)), lo, hi, limit=200, epsabs=1e-13, epsrel=1e-11)
            total += abs(v) * val
        return total
    # sampled potential: doubling windows; non-decaying increments mean q not in Q_a
    X0 = max(1.0, min(q.support, 2.0) if math.isfinite(q.support) else 2.0)
    total = _quad_abs(lambda x: w.a(x) * complex(q(x)), 0.0, X0, q.kinks)
    X = X0
    prev_inc = math.inf
    grew = 0
    for _ in range(200):
        if math.isfinite(q.support) and X >= q.support:
            return total
        inc = _quad_abs(lambda x: w.a(x) * complex(q(x)), X, 2 * X, q.kinks)
        total += inc
        if inc >= prev_inc and inc > 1e-13 * max(total, 1.0):
            grew += 1
            if grew >= 3:
                raise DivergentNormError("weighted integral increments do not decay: q is not in Q_a")
        else:
            grew = 0
        if inc < 1e-13 * max(total, 1.0):
            return total
        prev_inc = inc
        X *= 2.0
    raise DivergentNormError("weighted integral did not converge within the window budget")


# -- structural transforms -----------------------------------------------------

def truncate(q: Potential, X: float) -> Potential:
    """Restriction q * chi_[0, X]."""
    if X <= 0:
        raise ValueError("truncation level must be positive")
    if isinstance(q, StepPotential):
        if not q.values or X >= q.edges[-1]:
            return q
        edges, values = [q.edges[0]], []
        for lo, hi, v in zip(q.edges, q.edges[1:], q.values):
            if lo >= X:
                break
            values.append(v)
            edges.append(min(hi, X))
        return StepPotential(tuple(edges), tuple(values)).simplified()
    tail = None if q.tail is None else (lambda Y, X=X, t=q.tail: 0.0 if Y >= X else min(t(Y), t(Y)))
    kinks = tuple(k for k in q.kinks if k < X) + ((X,) if X < q.support else ())
    return SampledPotential(
        lambda x, f=q.func, X=X: np.where(np.asarray(x) <= X, np.asarray(f(x), dtype=complex), 0.0),
        support=min(q.support, X),
        tail=None,
        kinks=kinks,
        label=f"{q.label}|[0,{X}]",
    )


def superpose_steps(a: StepPotential, b: StepPotential) -> StepPotential:
    """Pointwise sum of two step potentials as a step potential."""
    if not a.values:
        return b
    if not b.values:
        return a
    edges = np.unique(np.concatenate([a.edges, b.edges]))
    mids = 0.5 * (edges[:-1] + edges[1:])
    vals = a(mids) + b(mids)
    return StepPotential(tuple(edges), tuple(vals)).simplified()


def shift_superpose(q: StepPotential, line_q: StepPotential, X: float) -> StepPotential:
    """q(.) + line_q(. - X) as a half-line potential.

    The shifted copy must land on the half-line; overlapping supports are
    allowed but flagged with a warning since the large-shift limit assumes
    eventual disjointness.
    """
    if X <= 0:
        raise ValueError("shift must be positive")
    if not line_q.values:
        return q
    lo, hi = line_q.support
    if X + lo < 0:
        raise ValueError("shifted support leaves the half-line")
    shifted = StepPotential(tuple(e + X for e in line_q.edges), line_q.values)
    if q.values and shifted.support[0] < q.support[1]:
        warnings.warn("supports of q and the shifted copy overlap", stacklevel=2)
    return superpose_steps(q, shifted)


def even_extension(q: Potential) -> Potential:
    """Symmetric extension to the line: value at -x equals value at x."""
    if isinstance(q, StepPotential):
        if not q.values:
            return q
        if q.edges[0] < 0:
            raise ValueError("even extension is defined for half-line potentials")
        pos_edges = list(q.edges)
        pos_vals = list(q.values)
        if pos_edges[0] > 0:  # gap (0, x0) carries value 0; mirror cleanly
            pos_edges.insert(0, 0.0)
            pos_vals.insert(0, 0.0 + 0.0j)
        neg_edges = [-e for e in reversed(pos_edges)]
        neg_vals = list(reversed(pos_vals))
        edges = tuple(neg_edges[:-1] + pos_edges)
        vals = tuple(neg_vals + pos_vals)
        return StepPotential(edges, vals).simplified()
    return SampledPotential(
        lambda x, f=q.func: np.asarray(f(np.abs(np.asarray(x, dtype=float))), dtype=complex),
        support=q.support,
        tail=q.tail,
        kinks=tuple(sorted({-k for k in q.kinks} | set(q.kinks))),
        label=f"even({q.label})",
    )


def to_step(q: SampledPotential, n: int, x_max: float | None = None) -> StepPotential:
    """Midpoint discretization of a sampled potential into n equal pieces."""
    if x_max is None:
        x_max = q.support
        if not math.isfinite(x_max):
            raise ValueError("provide x_max for potentials with unbounded support")
    edges = np.linspace(0.0, x_max, n + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    return StepPotential(tuple(edges), tuple(np.asarray(q(mids), dtype=complex))).simplified()


# -- JSON descriptors ----------------------------------------------------------

def potential_to_json(q: Potential) -> str:
    if isinstance(q, StepPotential):
        return json.dumps(
            {
                "kind": "step",
                "breakpoints": list(q.edges),
                "values": [[v.real, v.imag] for v in q.values],
            },
            sort_keys=True,
        )
    raise ValueError("only step potentials have a JSON descriptor")


def potential_from_json(text: str) -> StepPotential:
    """Parse {"kind":"step",...} or {"kind":"barrier","gamma":g,"R":r}."""
    spec = json.loads(text)
    kind = spec.get("kind")
    if kind == "step":
        edges = tuple(float(x) for x in spec["breakpoints"])
        values = tuple(complex(re, im) for re, im in spec["values"])
        return StepPotential(edges, values)
    if kind == "barrier":
        return barrier(float(spec["gamma"]), float(spec["R"]))
    raise ValueError(f"unknown potential kind: {kind!r}")
