"""Explicit upper and lower bounds for eigenvalue sums, evaluated and compared.

Upper bounds (hold for every admissible potential):

* weighted Jensen bound: for weights (a, a_hat) with a_hat strictly
  increasing to infinity and integral_1^inf dx/(x a(x)) finite, and any
  delta in (0,1),
      J <= y log((1+delta)/(1-delta)^2) + (4/pi) ||q||_a I(1/y),
  where I(c) = integral_c^inf dx/(x a(x)) and y solves
  a_hat(1/y) ||q||_a = log(1+delta).
* polynomial weight specialization a = 1 + x^p, p in (0,1):
      J <= (4/pi) ||q||_a log(1+||q||_a) + (9/p) ||q||_a + 2.
* compact support in [0,R], R > 1:
      J <= 7 [1/R + ||q||_1 (1 + log(1+||q||_1) + log R)].

Lower bounds for the dissipative barrier in the contraction regime:

* S_0   >= gamma R log R / (16 pi)
* S_eps >= (gamma R)^{1+eps} / (256 pi eps log^eps R)   for the larger R
  regime R >= 4 (64 pi)^{2/eps} / (e^2 gamma) + 1, 0 < eps < 1
* sum dist^p/|lambda|^{1/2} >= gamma^p R log R / (8 pi 2^p),  p >= 1.

Every report carries the computed side, the bound side, the margin, and the
recomputed preconditions; unmet preconditions downgrade to informational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .barrier import BarrierSpec, bigr_threshold, ranger1_min_R
from .potentials import Potential, WeightPair, l1_norm, poly_weight, weighted_norm
from .sums import SumReport

__all__ = [
    "BoundReport",
    "KAPPA",
    "solve_y",
    "integral_inv_xa",
    "check_integral_condition",
    "bound_weighted_jensen",
    "bound_poly",
    "bound_compact",
    "lower_bounds_barrier",
    "empirical_K_eps",
    "generalized_sum_experiment",
]

KAPPA = math.log(1.5)


@dataclass(frozen=True)
class BoundReport:
    name: str
    direction: str            # "upper": lhs <= rhs; "lower": lhs >= rhs
    lhs: float                # computed quantity (sum, count, ...)
    rhs: float                # bound value
    preconditions_met: bool
    inputs: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs if self.direction == "upper" else self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        return self.margin >= 0.0


# -- weighted-bound ingredients ----------------------------------------------------

def solve_y(weight: WeightPair, qa_norm: float, delta: float, rel_tol: float = 1e-12) -> float:
    """y > 0 with a_hat(1/y) ||q||_a = log(1+delta) (unique by monotonicity)."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0,1)")
    if qa_norm <= 0:
        raise ValueError("weighted norm must be positive")
    target = math.log1p(delta) / qa_norm
    x = weight.a_hat_inverse(target, rel_tol=rel_tol)
    return 1.0 / x


def integral_inv_xa(weight: WeightPair, lower: float) -> float:
    """integral_lower^inf dx / (x a(x)), in log coordinates with closed forms
    for the polynomial family."""
    if weight.name.startswith("poly-"):
        p = float(weight.name.split("-", 1)[1])
        y = 1.0 / lower
        # integral_{1/y}^inf dx/(x(1+x^p)) = (1/p) log(1 + y^p)
        return math.log1p(y**p) / p
    if weight.name.startswith("compact-"):
        R = float(weight.name.split("-", 1)[1])
        # a = 1 up to R: plain log; beyond: log^2 R * integral dx/(x log^2 x)
        head = math.log(R / lower) if lower < R else 0.0
        tail_from = max(lower, R)
        return head + math.log(R) ** 2 / math.log(tail_from)
    # substitute u = log x: integral du / a(e^u) over geometric windows
    u0 = math.log(lower)
    total = 0.0
    u = max(u0, 1e-300)
    width = max(1.0, abs(u0))
    prev = math.inf
    ratio = 1.0
    while u < 700.0:  # e^700 is the largest argument a can see in double range
        hi = min(u + width, 700.0)
        val, _ = quad(lambda t: 1.0 / float(weight.a(math.exp(t))), u, hi, limit=100)
        total += val
        if val < 1e-15 * max(total, 1e-300) and u > u0 + 10:
            return total
        ratio = val / prev if prev > 0 and math.isfinite(prev) else 1.0
        prev = val
        u = hi
        width *= 1.8
    if prev > 0 and ratio < 0.9:
        return total + prev * ratio / (1.0 - ratio)  # geometric tail extrapolation
    raise ValueError("integral of 1/(x a(x)) does not converge numerically")


def check_integral_condition(weight: WeightPair, windows: int = 40) -> bool:
    """Numeric test of integral_1^inf dx/(x a(x)) < inf via doubling windows."""
    u = 0.0
    width = 1.0
    prev = math.inf
    total = 0.0
    grew = 0
    for _ in range(windows):
        if u >= 700.0:
            # reached the representable edge with decaying increments
            return prev < 0.75 * total or prev < 1e-10
        hi = min(u + width, 700.0)
        val, _ = quad(lambda t: 1.0 / float(weight.a(math.exp(t))), u, hi, limit=100)
        total += val
        if val < 1e-14 * max(total, 1e-300):
            return True
        if val >= prev * 0.9:
            grew += 1
            if grew >= 5:
                return False
        else:
            grew = 0
        prev = val
        u = hi
        width *= 2.0
    return False


# -- upper bounds -------------------------------------------------------------------

def bound_weighted_jensen(
    q: Potential,
    weight: WeightPair,
    jensen: float | SumReport,
    delta: float | None = None,
) -> BoundReport:
    """General weighted upper bound on the Jensen sum."""
    qa = weighted_norm(q, weight)
    lhs = jensen.value if isinstance(jensen, SumReport) else float(jensen)
    pre = check_integral_condition(weight)
    if delta is None:
        delta = math.exp(min(qa / 2.0, KAPPA)) - 1.0 if qa > 0 else 0.5
    inputs = {"delta": delta, "qa_norm": qa, "weight": weight.name}
    if qa == 0.0:
        # empty class: the bound degenerates; report rhs from the y = 1 edge
        return BoundReport("weighted-jensen", "upper", lhs, 0.0, pre, inputs)
    y = solve_y(weight, qa, delta)
    try:
        tail = integral_inv_xa(weight, 1.0 / y)
    except ValueError:
        if pre:
            raise
        tail = math.inf  # condition unmet: informational report only
    rhs = y * math.log((1.0 + delta) / (1.0 - delta) ** 2) + (4.0 / math.pi) * qa * tail
    inputs.update({"y": y, "tail_integral": tail})
    return BoundReport("weighted-jensen", "upper", lhs, rhs, pre, inputs)


def bound_poly(q: Potential, p: float, jensen: float | SumReport) -> BoundReport:
    """Polynomial-weight upper bound on the Jensen sum (a = 1 + x^p)."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0,1)")
    w = poly_weight(p)
    qa = weighted_norm(q, w)
    lhs = jensen.value if isinstance(jensen, SumReport) else float(jensen)
    rhs = (4.0 / math.pi) * qa * math.log1p(qa) + (9.0 / p) * qa + 2.0
    return BoundReport("poly-jensen", "upper", lhs, rhs, True, {"p": p, "qa_norm": qa})


def bound_compact(q: Potential, R_support: float, jensen: float | SumReport) -> BoundReport:
    """Compact-support upper bound on the Jensen sum."""
    if R_support <= 1:
        raise ValueError("the compact-support bound needs R > 1")
    if hasattr(q, "support"):
        sup = q.support[1] if isinstance(q.support, tuple) else q.support
        pre = sup <= R_support * (1 + 1e-12)
    else:
        pre = True
    l1 = l1_norm(q)
    lhs = jensen.value if isinstance(jensen, SumReport) else float(jensen)
    rhs = 7.0 * (1.0 / R_support + l1 * (1.0 + math.log1p(l1) + math.log(R_support)))
    return BoundReport("compact-jensen", "upper", lhs, rhs, bool(pre), {"R": R_support, "l1": l1})


# -- barrier lower bounds --------------------------------------------------------------

def lower_bounds_barrier(
    spec: BarrierSpec,
    computed: dict[str, float],
    eps: float | None = None,
    p_list: Sequence[float] = (1.0,),
) -> list[BoundReport]:
    """Certified lower bounds for the barrier sums.

    ``computed`` supplies the evaluated sums: "S0", optionally "S_eps"
    (with matching eps) and "dist_p_half" entries keyed "P<p>".
    """
    g, R = spec.gamma, spec.R
    logR = math.log(R)
    reports = []
    pre0 = spec.satisfies_bigr
    rhs0 = g * R * logR / (16.0 * math.pi)
    reports.append(
        BoundReport(
            "barrier-S0-lower", "lower", computed.get("S0", math.nan), rhs0, pre0,
            {"gamma": g, "R": R, "bigr_threshold": bigr_threshold(g)},
        )
    )
    if eps is not None:
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0,1)")
        need_R = ranger1_min_R(eps, g)
        pre = pre0 and R >= need_R
        rhs = (g * R) ** (1.0 + eps) / (256.0 * math.pi * eps * logR**eps)
        reports.append(
            BoundReport(
                "barrier-S_eps-lower", "lower", computed.get("S_eps", math.nan), rhs, pre,
                {"gamma": g, "R": R, "eps": eps, "ranger1_min_R": need_R},
            )
        )
    for p in p_list:
        if p < 1:
            raise ValueError("the dist^p bound needs p >= 1")
        rhs = g**p * R * logR / (8.0 * math.pi * 2.0**p)
        reports.append(
            BoundReport(
                f"barrier-distp-lower-p{p:g}", "lower",
                computed.get(f"P{p:g}", math.nan), rhs, pre0,
                {"gamma": g, "R": R, "p": p},
            )
        )
    return reports


# -- empirical constants -----------------------------------------------------------------

def empirical_K_eps(family: Sequence[tuple], eps: float) -> float:
    """max S_eps / ||q||_1^{1+eps} over a family: an empirical lower estimate
    for the non-explicit constant in the S_eps upper bound.

    Items are (potential, spectrum) pairs, where the spectrum is a sequence
    of eigenvalue objects or an array of lambda values; precomputed
    (l1_norm, S_eps) float pairs are accepted too.
    """
    import numpy as np

    from .sums import SumSpec, eval_sum, eval_sum_arrays

    if eps <= 0:
        raise ValueError("eps must be positive")
    best = 0.0
    for q, spectrum in family:
        if isinstance(q, (int, float)):
            l1, s_eps = float(q), float(spectrum)
        else:
            l1 = l1_norm(q)
            if isinstance(spectrum, np.ndarray):
                s_eps = eval_sum_arrays(spectrum, None, SumSpec("S_eps", eps=eps)).value
            else:
                s_eps = eval_sum(spectrum, SumSpec("S_eps", eps=eps)).value
        if l1 > 0:
            best = max(best, s_eps / l1 ** (1.0 + eps))
    return best


def generalized_sum_experiment(
    params: Sequence[tuple[float, float]],
    values: dict[tuple[float, float], Sequence[tuple[float, float]]],
) -> list[dict]:
    """Trend table for S_{alpha,beta}(L)/||q||_1 across a growing-R family.

    ``values[(alpha,beta)]`` is a list of (l1_norm, S_alpha_beta) in
    increasing-R order.  A family is classified as growing when the
    normalized ratio keeps increasing by more than 5% per step.
    """
    rows = []
    for ab in params:
        seq = values[ab]
        ratios = [s / l1 for l1, s in seq]
        growing = all(b > a * 1.05 for a, b in zip(ratios, ratios[1:]))
        bounded = ratios[-1] <= ratios[0] * 2.0
        rows.append(
            {
                "alpha": ab[0],
                "beta": ab[1],
                "ratios": ratios,
                "trend": "growing" if growing else ("bounded" if bounded else "undetermined"),
            }
        )
    return rows
