import math

import numpy as np
import pytest

from halfspec.branchcuts import sq_plus
from halfspec.jost import (
    SeriesDivergenceError,
    even_line_wronskian,
    jost_ode,
    jost_series,
    jost_tm_scaled,
    jost_transfer_matrix,
    jost_upper_bound,
    line_wronskian,
    series_term_sups,
)
from halfspec.potentials import (
    StepPotential,
    barrier,
    even_extension,
    gaussian_bump,
    poly_weight,
    unit_weight,
    zero_potential,
)
from halfspec.scaling import fold


def test_free_potential_exact():
    for z in (1j, 2.0 + 0.5j, 0.3, -1.7 + 0j):
        ev = jost_transfer_matrix(zero_potential(), z)
        assert ev.value == 1.0
        assert ev.derivative == 1j * z


def test_barrier_closed_form():
    # e^{izR} (cos(Rs) - iz sin(Rs)/s), s = sq_plus(z^2 - i gamma), independently
    # evaluated for gamma = R = 1, z = i
    ev = jost_transfer_matrix(barrier(1.0, 1.0), 1j)
    assert ev.value == pytest.approx(0.9798029784580847 + 0.2832083271117139j, rel=1e-13)
    z, gamma, R = 0.7 + 1.3j, 2.0, 1.5
    s = sq_plus(z * z - 1j * gamma)
    expected = np.exp(1j * z * R) * (np.cos(R * s) - 1j * z * np.sin(R * s) / s)
    ev = jost_transfer_matrix(barrier(gamma, R), z)
    assert ev.value == pytest.approx(expected, rel=1e-12)


def test_refinement_invariance():
    q1 = barrier(1.0, 2.0)
    q2 = StepPotential((0.0, 0.7, 2.0), (1j, 1j))
    for z in (1.3 + 0.4j, 0.2 + 0j, 5j):
        a = jost_transfer_matrix(q1, z)
        b = jost_transfer_matrix(q2, z)
        assert abs(a.value - b.value) <= 1e-13 * (1 + abs(a.value))


def test_series_matches_transfer_matrix():
    es = jost_series(barrier(0.5, 1.0), 2j)
    et = jost_transfer_matrix(barrier(0.5, 1.0), 2j)
    assert abs(es.value - et.value) <= 1e-8
    assert abs(es.derivative - et.derivative) <= 1e-8
    assert abs(es.value - et.value) <= es.error_estimate + et.error_estimate


def test_series_term_bound():
    # term sup-norms obey omega^n / n! with omega = ||q||_1 / |z|
    sups, omega = series_term_sups(barrier(1.0, 1.0), 1.5 + 0.5j)
    for n, s in enumerate(sups, start=1):
        assert s <= omega**n / math.factorial(n) + 1e-12


def test_series_free_and_errors():
    ev = jost_series(zero_potential(), 1 + 1j)
    assert ev.value == 1.0 and ev.derivative == -1 + 1j
    with pytest.raises(ValueError):
        jost_series(barrier(1.0, 1.0), 0.0)
    with pytest.raises(SeriesDivergenceError):
        # tail decays too slowly for any quadrature window
        from halfspec.potentials import log_tail_potential

        jost_series(log_tail_potential(1.2), 1j, tol=1e-10)


def test_ode_matches_transfer_matrix():
    eo = jost_ode(barrier(1.0, 2.0), 1 + 1j, step=1e-4)
    et = jost_transfer_matrix(barrier(1.0, 2.0), 1 + 1j)
    assert abs(eo.value - et.value) <= 1e-8
    assert abs(eo.derivative - et.derivative) <= 1e-8


def test_gaussian_cross_method():
    g = gaussian_bump(0.5 + 0.2j, 2.0, 0.6)
    s = jost_series(g, 2j, tol=1e-10)
    o = jost_ode(g, 2j, x_max=g.support, step=2e-3)
    assert abs(s.value - o.value) <= s.error_estimate + o.error_estimate


def test_upper_bound_forms():
    q = barrier(1.0, 2.0)
    z = 2.0 / math.log(2.0) * 1j  # ||q||_1 = |z| log 2 -> bound exactly 1
    assert jost_upper_bound(q, z) == pytest.approx(1.0, rel=1e-12)
    assert jost_upper_bound(q, 1 + 1j, weight=unit_weight()) == pytest.approx(
        jost_upper_bound(q, 1 + 1j), rel=1e-12
    )
    w = poly_weight(0.5)
    assert jost_upper_bound(q, 1 + 1j, weight=w) > 0


def test_upper_bound_holds_on_samples():
    rng = np.random.default_rng(3)
    q = StepPotential((0.0, 0.8, 1.7, 2.9, 4.0), (0.3 + 0.2j, -0.4j, 0.25 - 0.1j, 0.1 + 0.3j))
    z = rng.uniform(0.2, 8, 200) + 1j * rng.uniform(0.0, 8, 200)
    y, _, e = jost_tm_scaled(q, z)
    vals = fold(y, e)
    bound = np.expm1(sum(abs(v) * (b - a) for a, b, v in zip(q.edges, q.edges[1:], q.values)) / np.abs(z))
    assert np.all(np.abs(vals - 1) <= bound + 1e-10)


def test_line_wronskian():
    assert line_wronskian(zero_potential(), 1 + 1j) == pytest.approx(-2j * (1 + 1j), rel=1e-14)
    # even extension shortcut agrees with two-sided propagation
    lb = even_extension(barrier(1.0, 1.0))
    z = 0.7 + 0.3j
    two_sided = line_wronskian(lb, z)
    shortcut = complex(even_line_wronskian(barrier(1.0, 1.0), np.array([z]))[0])
    assert abs(two_sided - shortcut) <= 1e-10 * abs(two_sided)


def test_shifted_jost_relation():
    # e_+(x, q(. - X)) = e^{izX} e_+(x - X, q) at x = 0 for a pure shift
    z = 0.9 + 0.7j
    X = 3.0
    q = barrier(1.0, 1.0)
    shifted = StepPotential((X, X + 1.0), (1j,))
    a = jost_transfer_matrix(shifted, z)
    b = jost_transfer_matrix(q, z)
    # e_+(-X, q) for the unshifted barrier is e^{-izX} (free continuation):
    # value relation collapses to e_+(0, shifted) = e^{izX} e^{-izX} e_+(0,q)... not
    # free on [0, X]; instead verify against direct evaluation of the formula
    assert a.value == pytest.approx(np.exp(1j * z * X) * _free_continue(b, z, -X), rel=1e-11)


def _free_continue(ev, z, dx):
    # continue (value, derivative) at 0 freely by dx: plane-wave decomposition
    c_plus = (ev.value + ev.derivative / (1j * z)) / 2.0
    c_minus = (ev.value - ev.derivative / (1j * z)) / 2.0
    return c_plus * np.exp(1j * z * dx) + c_minus * np.exp(-1j * z * dx)


def test_scaled_evaluation_wide_support():
    # e^{izX} factors far outside double range stay finite in mantissa form
    q = StepPotential((0.0, 1.0, 600.0, 601.0), (1j, 0.0, 0.5j))
    z = 0.5 + 1.5j
    y, dy, e = jost_tm_scaled(q, np.array([z]))
    assert np.isfinite(y[0]) and np.isfinite(dy[0])
    assert e[0] != 0  # the dynamic range actually engaged


def test_weighted_upper_bound_holds_on_samples():
    # the weighted refinement exp(a_hat(1/|z|) ||q||_a) - 1 also dominates
    # |e_+ - 1| wherever it applies, and sharpens the plain bound at small |z|
    from halfspec.potentials import weighted_norm

    rng = np.random.default_rng(6)
    w = poly_weight(0.5)
    for q in (barrier(1.0, 2.0), StepPotential((0.0, 0.8, 1.7, 2.9, 4.0), (0.3 + 0.2j, -0.4j, 0.25 - 0.1j, 0.1 + 0.3j))):
        qa = weighted_norm(q, w)
        z = rng.uniform(0.05, 6, 300) + 1j * rng.uniform(0.0, 6, 300)
        y, _, e = jost_tm_scaled(q, z)
        vals = fold(y, e)
        bound_w = np.expm1(w.a_hat(1.0 / np.abs(z)) * qa)
        assert np.all(np.abs(vals - 1.0) <= bound_w + 1e-10)
    # sharper than the plain bound once 1/|z| is large (a_hat(t) << t there)
    q = barrier(1.0, 2.0)
    z_small = 0.05 + 0.0j
    assert jost_upper_bound(q, z_small, weight=w) < jost_upper_bound(q, z_small)
