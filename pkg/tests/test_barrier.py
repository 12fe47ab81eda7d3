import math
import warnings

import numpy as np
import pytest

from halfspec.barrier import (
    A_of_w,
    B_of_w,
    BarrierSpec,
    G,
    bigr_threshold,
    box_count,
    enumerate_spectrum,
    extended_family,
    in_sector_f_inf,
    phi,
    ranger1_min_R,
    scaling_check,
    solve_batch,
    solve_fixed_point,
)
from halfspec.branchcuts import sq_minus, sq_plus
from halfspec.jost import jost_transfer_matrix

SPEC = BarrierSpec(1.0, 1200.0)


def test_spec_properties():
    assert SPEC.satisfies_bigr
    assert bigr_threshold(1.0) == 1200.0
    # floor(gamma R^2 / (32 pi log R)) evaluated independently
    assert SPEC.M_R == int(1200.0**2 / (32 * math.pi * math.log(1200.0)))
    assert SPEC.M_R == 2020
    assert not BarrierSpec(4.0, 1200.0).satisfies_bigr


def test_phi_free_limit():
    # gamma -> 0 with Im z > 0: s -> z and e_+ -> 1, so phi -> -2z e^{-iRz}
    z = 0.8 + 1.1j
    R = 2.0
    val = phi(BarrierSpec(1e-12, R), z)
    assert val == pytest.approx(-2 * z * np.exp(-1j * R * z), rel=1e-5)


def test_phi_zero_at_igamma_flag():
    # z0^2 = i gamma zeroes phi but is not an eigenvalue (s = 0 degeneracy);
    # in floating point s ~ sqrt(ulp), so phi(z0) ~ 2 s (izR - 1)
    z0 = sq_plus(1j * SPEC.gamma)
    s = sq_plus(z0 * z0 - 1j * SPEC.gamma)
    assert abs(s) < 1e-7
    assert abs(phi(SPEC, z0)) <= 10 * abs(s) * (1 + SPEC.R * abs(z0))
    # the Jost function itself does not vanish there (small barrier keeps
    # the magnitudes in plain double range)
    small = BarrierSpec(1.0, 2.0)
    assert abs(phi(small, z0)) <= 10 * abs(s) * (1 + small.R * abs(z0))
    assert abs(jost_transfer_matrix(small.potential(), z0).value) > 1e-2


def test_phi_identity_against_jost():
    rng = np.random.default_rng(1)
    lam = rng.uniform(0.5, 20.0, 20) + 1j * rng.uniform(0.2, 0.9, 20)
    z = sq_minus(lam)
    s = sq_plus(z * z - 1j * SPEC.gamma)
    ph = phi(SPEC, z)
    for zi, si, pi_ in zip(z, s, ph):
        ev = jost_transfer_matrix(SPEC.potential(), zi)
        rhs = -2.0 * si * np.exp(-1j * SPEC.R * zi) * ev.value
        assert pi_ == pytest.approx(rhs, rel=1e-11)


def test_A_and_B_basics():
    assert A_of_w(SPEC, 0.0) == 0.0
    rng = np.random.default_rng(2)
    u = -rng.uniform(0, 3, 500)
    w = u + 1j * rng.uniform(0, 1, 500) * np.abs(u) / 2
    assert np.all(in_sector_f_inf(w))
    assert np.all(A_of_w(SPEC, w) >= -1e-13)
    js = rng.integers(1, 2000, 500)
    B = B_of_w(SPEC, w, js)
    assert np.all(B >= 2 * np.pi * (js - 0.5))
    assert np.all(B < 2 * np.pi * (js + 0.5))
    assert np.all(np.abs(w * w + 1j * SPEC.gamma) >= SPEC.gamma / 2)


def test_solve_fixed_point_j1():
    sol = solve_fixed_point(SPEC, 1)
    assert sol.in_spectrum and sol.guaranteed
    assert sol.residual_phi < 1e-10
    assert sol.contraction < 1.0
    assert abs(sol.w - G(SPEC, 1, sol.w)) <= 1e-11 * (1 + abs(sol.w))
    # independent oracle: branches are pi/R apart in the w plane, so a dense
    # scan of |phi| there isolates branch 1, then Newton refines it --
    # direct root finding on phi, no contraction iteration involved
    from halfspec.scaling import exp_scaled, scaled_abs_log2, scaled_add
    from halfspec.spectra import newton_refine

    def phi_w(ws):
        ws = np.asarray(ws, dtype=complex)
        zz = sq_minus(ws * ws + 1j * SPEC.gamma)
        m1, e1 = exp_scaled(1j * SPEC.R * ws)
        m2, e2 = exp_scaled(-1j * SPEC.R * ws)
        return scaled_add((zz - ws) * m1, e1, -(zz + ws) * m2, e2)

    w0 = -np.pi / SPEC.R
    half = 0.45 * np.pi / SPEC.R
    us = np.linspace(w0 - half, w0 + half, 80)
    vs = np.linspace(0.0, half, 40)
    W = (us[:, None] + 1j * vs[None, :]).ravel()
    logmag = scaled_abs_log2(*phi_w(W))
    w_seed = W[int(np.argmin(logmag))]
    w_direct, _, ok = newton_refine(phi_w, w_seed, 1e-13)
    assert ok
    assert abs(w_direct * w_direct + 1j * SPEC.gamma - sol.lam) <= 1e-11


def test_enumeration_and_distinctness():
    sols = enumerate_spectrum(SPEC, j_max=50)
    assert len(sols) == 50
    assert all(s.in_spectrum for s in sols)
    ws = [s.w for s in sols]
    assert min(abs(a - b) for a, b in zip(ws, ws[1:])) > 1e-11 * 10
    # branch index sandwich transfers to lambda ordering
    lams = [s.lam for s in sols]
    assert all(b.real > a.real for a, b in zip(lams, lams[1:]))


def test_batch_certified_block():
    res = solve_batch(SPEC, np.arange(1, SPEC.M_R + 1))
    assert bool(np.all(res["converged"]))
    assert bool(np.all(res["in_spectrum"]))
    lam = res["lam"]
    assert np.all(lam.real > 0)
    assert np.all((lam.imag >= SPEC.gamma / 2 - 1e-12) & (lam.imag <= SPEC.gamma + 1e-12))
    assert float(np.max(res["residual_phi"])) < 1e-10
    assert float(np.max(res["contraction"])) < 1.0
    assert int(np.max(res["iterations"])) <= 30


def test_sector_preservation():
    rng = np.random.default_rng(3)
    u = -rng.uniform(0.001, 3, 2000)
    w = u + 1j * rng.uniform(0, 1, 2000) * np.abs(u) / 2
    js = rng.integers(1, SPEC.M_R, 2000)
    A = A_of_w(SPEC, w)
    B = B_of_w(SPEC, w, js)
    sel = B >= 2 * np.abs(A)
    gw = G(SPEC, js[sel], w[sel])
    assert np.all(in_sector_f_inf(gw))
    assert np.all(B_of_w(SPEC, gw, js[sel]) >= 2 * np.abs(A_of_w(SPEC, gw)))


def test_below_threshold_warns_but_solves():
    small = BarrierSpec(4.0, 1200.0)
    with pytest.warns(UserWarning):
        sol = solve_fixed_point(small, 5)
    assert abs(sol.w - G(small, 5, sol.w)) <= 1e-10 * (1 + abs(sol.w))


def test_extended_family_labels():
    fam = extended_family(SPEC, chunk=50_000)
    j = fam["j"]
    assert int(np.sum(fam["guaranteed"])) == SPEC.M_R
    # the certified block is a prefix; extras are labeled, not asserted
    assert bool(np.all(fam["in_spectrum"][: SPEC.M_R]))
    assert not bool(np.all(fam["in_spectrum"]))
    # eigenvalue condition holds beyond M_R for a long stretch
    assert int(np.sum(fam["is_eigenvalue"])) > 10 * SPEC.M_R


def test_box_count():
    rep = box_count(SPEC)
    assert rep.passed
    assert rep.count >= rep.lower_bound
    assert rep.lower_bound == pytest.approx(1200.0**2 / (128 * math.pi * math.log(1200.0)), rel=1e-12)
    # tiny C1 empties the box but still reports cleanly
    rep0 = box_count(SPEC, C1=1.0)
    assert rep0.count == 0 and not rep0.passed


def test_scaling_exact():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sc = scaling_check(BarrierSpec(4.0, 1200.0), 0.5, j_max=500)
        assert sc["max_rel_mismatch"] < 1e-10
        ident = scaling_check(SPEC, 1.0, j_max=100)
        assert ident["max_rel_mismatch"] == 0.0


def test_upper_count_sanity():
    # total eigenvalue count stays below the known 11/log2 * gamma R^2 / log R cap
    fam = extended_family(SPEC)
    n_eigs = int(np.sum(fam["is_eigenvalue"]))
    cap = 11.0 / math.log(2.0) * SPEC.gamma * SPEC.R**2 / math.log(SPEC.R)
    assert n_eigs <= cap


def test_ranger1():
    assert ranger1_min_R(0.9, 1.0) == pytest.approx(4 / math.e**2 * (64 * math.pi) ** (2 / 0.9) + 1)
    with pytest.raises(ValueError):
        ranger1_min_R(1.5, 1.0)


def test_phi_relative_residual_scales():
    from halfspec.barrier import phi_relative_residual

    sol = solve_fixed_point(SPEC, 800)  # mid-range: z*z - i*gamma is well conditioned
    z_root = sq_minus(sol.w**2 + 1j * SPEC.gamma)
    assert phi_relative_residual(SPEC, z_root) < 1e-9
    # half an eigenvalue spacing away the residual is O(1)
    off = z_root + 0.5 * np.pi / SPEC.R
    assert phi_relative_residual(SPEC, off) > 1e-3
