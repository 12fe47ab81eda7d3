import math

import numpy as np
import pytest

from halfspec.barrier import BarrierSpec, solve_batch
from halfspec.bounds import (
    KAPPA,
    bound_compact,
    bound_poly,
    bound_weighted_jensen,
    check_integral_condition,
    empirical_K_eps,
    generalized_sum_experiment,
    integral_inv_xa,
    lower_bounds_barrier,
    solve_y,
)
from halfspec.branchcuts import dist_to_halfline
from halfspec.potentials import (
    barrier,
    compact_support_weight,
    log_weight,
    poly_weight,
    unit_weight,
)
from halfspec.sums import SumSpec, eval_sum_arrays


def test_solve_y_small_norm_is_one():
    # with a = 1 + x^p and ||q||_a < 2 kappa, a_hat(1) = 1/2 forces y = 1
    w = poly_weight(0.5)
    qa = 0.5
    delta = math.exp(min(qa / 2.0, KAPPA)) - 1.0
    assert solve_y(w, qa, delta) == pytest.approx(1.0, rel=1e-9)


def test_solve_y_consistency():
    w = poly_weight(0.3)
    for qa, delta in ((3.0, 0.5), (0.8, 0.2), (12.0, 0.49)):
        y = solve_y(w, qa, delta)
        assert w.a_hat(1.0 / y) * qa == pytest.approx(math.log1p(delta), rel=1e-10)


def test_integral_closed_forms():
    w = poly_weight(0.5)
    # integral_{1/y}^inf dx/(x(1+x^p)) = (1/p) log(1+y^p)
    for y in (1.0, 2.5, 10.0):
        assert integral_inv_xa(w, 1.0 / y) == pytest.approx(2.0 * math.log1p(y**0.5), rel=1e-12)
    R = 50.0
    # from R onward the compact weight integrates to exactly log R
    assert integral_inv_xa(compact_support_weight(R), R) == pytest.approx(math.log(R), rel=1e-12)


def test_integral_condition():
    assert check_integral_condition(poly_weight(0.4))
    assert check_integral_condition(log_weight(1.5))
    assert not check_integral_condition(unit_weight())


def test_bound_poly_values():
    q = barrier(1.0, 3.0)
    rep = bound_poly(q, 0.5, 0.0)
    qa = 3.0 + (2.0 / 3.0) * 3.0**1.5  # integral of (1 + sqrt x) on [0,3]
    assert rep.inputs["qa_norm"] == pytest.approx(qa, rel=1e-10)
    assert rep.rhs == pytest.approx((4 / math.pi) * qa * math.log1p(qa) + 18 * qa + 2, rel=1e-10)
    # rhs is monotone in the weighted norm
    rep2 = bound_poly(barrier(1.0, 4.0), 0.5, 0.0)
    assert rep2.rhs > rep.rhs
    # zero potential: rhs = 2 >= J = 0
    rep0 = bound_poly(barrier(1e-12, 1.0), 0.5, 0.0)
    assert rep0.rhs == pytest.approx(2.0, abs=1e-6) and rep0.passed


def test_bound_compact_values():
    rep = bound_compact(barrier(1.0, 1200.0), 1200.0, 0.0)
    expected = 7 * (1 / 1200 + 1200 * (1 + math.log(1201) + math.log(1200)))
    assert rep.rhs == pytest.approx(expected, rel=1e-12)
    assert rep.preconditions_met
    # support violation is flagged
    rep2 = bound_compact(barrier(1.0, 5.0), 2.0, 0.0)
    assert not rep2.preconditions_met


def test_weighted_jensen_general():
    q = barrier(1.0, 100.0)
    rep = bound_weighted_jensen(q, compact_support_weight(100.0), 10.0)
    assert rep.preconditions_met and rep.rhs > rep.lhs
    # unit weight fails the integral condition
    rep2 = bound_weighted_jensen(q, unit_weight(), 10.0)
    assert not rep2.preconditions_met


def test_weighted_jensen_actually_bounds_barrier():
    spec = BarrierSpec(1.0, 1200.0)
    res = solve_batch(spec, np.arange(1, spec.M_R + 1))
    lam = res["lam"][res["in_spectrum"]]
    J = eval_sum_arrays(lam, None, SumSpec("Jensen")).value
    rep = bound_weighted_jensen(spec.potential(), compact_support_weight(spec.R), J)
    assert rep.preconditions_met and rep.passed


def test_lower_bounds_barrier():
    spec = BarrierSpec(1.0, 1200.0)
    res = solve_batch(spec, np.arange(1, spec.M_R + 1))
    lam = res["lam"][res["in_spectrum"]]
    d = dist_to_halfline(lam)
    computed = {
        "S0": float(np.sum(d / np.abs(lam) ** 0.5)),
        "P1": float(np.sum(d / np.abs(lam) ** 0.5)),
        "P2": float(np.sum(d**2 / np.abs(lam) ** 0.5)),
    }
    reps = lower_bounds_barrier(spec, computed, eps=0.9, p_list=(1.0, 2.0))
    by_name = {r.name: r for r in reps}
    assert by_name["barrier-S0-lower"].passed
    assert by_name["barrier-S0-lower"].rhs == pytest.approx(1200 * math.log(1200) / (16 * math.pi))
    # p = 1 reduces to the S0-style bound with constant 1/(16 pi)
    assert by_name["barrier-distp-lower-p1"].rhs == pytest.approx(by_name["barrier-S0-lower"].rhs)
    # eps = 0.9 at R = 1200 fails the larger-R precondition: informational
    assert not by_name["barrier-S_eps-lower"].preconditions_met


def test_empirical_K_eps():
    assert empirical_K_eps([(1.0, 0.0)], 0.5) == 0.0
    assert empirical_K_eps([(2.0, 16.0), (4.0, 16.0)], 1.0) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        empirical_K_eps([], 0.0)


def test_generalized_sum_trends():
    params = [(1.0, 1.0), (0.5, 1.0)]
    values = {
        (1.0, 1.0): [(10.0, 5.0), (20.0, 10.0), (40.0, 20.0)],          # ratio constant
        (0.5, 1.0): [(10.0, 20.0), (20.0, 80.0), (40.0, 320.0)],        # ratio doubling
    }
    rows = generalized_sum_experiment(params, values)
    assert rows[0]["trend"] == "bounded"
    assert rows[1]["trend"] == "growing"


def test_empirical_ratio_family():
    # S_eps / ||q||_1^{1+eps} stays bounded across a growing-R family while
    # S_0 / ||q||_1 grows like log R
    eps = 0.5
    family = []
    s0_ratios = []
    for R in (1200.0, 2400.0, 4800.0):
        spec = BarrierSpec(1.0, R)
        res = solve_batch(spec, np.arange(1, spec.M_R + 1))
        lam = res["lam"][res["in_spectrum"]]
        s_eps = eval_sum_arrays(lam, None, SumSpec("S_eps", eps=eps)).value
        s0 = eval_sum_arrays(lam, None, SumSpec("S_eps", eps=0.0)).value
        family.append((spec.l1, s_eps))
        s0_ratios.append(s0 / spec.l1)
    K = empirical_K_eps(family, eps)
    assert K > 0
    ratios = [s / l1 ** (1 + eps) for l1, s in family]
    assert max(ratios) <= 3 * min(ratios)          # bounded across the family
    assert s0_ratios[1] > s0_ratios[0] and s0_ratios[2] > s0_ratios[1]  # critical ratio grows


def test_generalized_sum_trends_on_barriers():
    params = [(1.0, 1.0), (0.5, 1.0), (1.0, 0.5)]
    values = {ab: [] for ab in params}
    for R in (1200.0, 2400.0, 4800.0):
        spec = BarrierSpec(1.0, R)
        res = solve_batch(spec, np.arange(1, spec.M_R + 1))
        lam = res["lam"][res["in_spectrum"]]
        for ab in params:
            rep = eval_sum_arrays(lam, None, SumSpec("S_alpha_beta", alpha=ab[0], beta=ab[1]))
            values[ab].append((spec.l1, rep.value))
    rows = generalized_sum_experiment(params, values)
    by = {(r["alpha"], r["beta"]): r["trend"] for r in rows}
    assert by[(1.0, 1.0)] == "bounded"
    assert by[(0.5, 1.0)] == "growing"
    assert by[(1.0, 0.5)] == "growing"


def test_empirical_K_eps_accepts_potentials():
    spec = BarrierSpec(1.0, 1200.0)
    res = solve_batch(spec, np.arange(1, spec.M_R + 1))
    lam = res["lam"][res["in_spectrum"]]
    K = empirical_K_eps([(barrier(1.0, 1200.0), lam)], 0.5)
    s = eval_sum_arrays(lam, None, SumSpec("S_eps", eps=0.5)).value
    assert K == pytest.approx(s / 1200.0 ** 1.5, rel=1e-12)


def test_y_at_least_one_when_ahat1_large_enough():
    # monotonicity: a_hat(1) >= log(1+delta)/||q||_a forces y >= 1
    w = poly_weight(0.3)
    for qa, delta in ((1.0, 0.4), (5.0, 0.2), (0.9, 0.45)):
        y = solve_y(w, qa, delta)
        assert w.a_hat(1.0 / y) * qa == pytest.approx(math.log1p(delta), rel=1e-10)
        if w.a_hat(1.0) >= math.log1p(delta) / qa:
            assert y >= 1.0 - 1e-12
        else:
            assert y < 1.0
