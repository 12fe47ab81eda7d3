import warnings

import numpy as np
import pytest

from halfspec.potentials import (
    StepPotential,
    barrier,
    even_extension,
    zero_potential,
)
from halfspec.spectra import (
    ContourTooCloseError,
    count_zeros_in_contour,
    enclosure,
    find_spectrum,
    newton_refine,
    shift_limit_check,
    track_shift_roots,
    truncation_limit_check,
    winding_number,
    _jost_fn,
)

WELL = StepPotential((0.0, 2.0), (-1.1 + 0.4j,))


def test_enclosure():
    enc = enclosure(barrier(1.0, 2.0))
    assert enc.r_fls == pytest.approx(4.0)
    assert enc.r == pytest.approx(4.0)
    # unit-weight radius: (||q||_1 / log 2)^2, relevant only when smaller
    from halfspec.potentials import unit_weight

    q = barrier(0.25, 1.0)  # ||q||_1 = 0.25 < log 2
    enc2 = enclosure(q, unit_weight())
    assert enc2.rho_inv == pytest.approx((0.25 / np.log(2)) ** 2, rel=1e-9)
    assert enc2.r == pytest.approx(min(enc2.rho_inv, enc2.r_fls))


def test_enclosure_empty_spectrum():
    from halfspec.potentials import WeightPair

    # a grows so fast that a_hat is bounded: weighted radius infinite
    bounded_hat = WeightPair(lambda x: 1.0 + x * x, name="fast")
    enc = enclosure(barrier(1.0, 1.0), bounded_hat)
    assert enc.empty and enc.r == 0.0


def test_count_zeros_free():
    contour = [0.5 + 0.1j, 2 + 0.1j, 2 + 2j, 0.5 + 2j]
    assert count_zeros_in_contour(zero_potential(), contour) == 0


def test_count_zeros_well():
    res = find_spectrum(WELL, tol=1e-10)
    assert res.outer_count == 1
    [ev] = res.eigenvalues
    box = [
        ev.z - 0.3 - 0.3j + 0.6j * 0,
        ev.z + 0.3 - 0.3j,
        ev.z + 0.3 + 0.3j,
        ev.z - 0.3 + 0.3j,
    ]
    box = [complex(b.real, max(b.imag, 1e-4)) for b in box]
    assert count_zeros_in_contour(WELL, box) == 1


def test_find_spectrum_free_and_well():
    assert find_spectrum(zero_potential()).eigenvalues == []
    res = find_spectrum(WELL, tol=1e-10)
    [ev] = res.eigenvalues
    assert ev.multiplicity == 1
    assert ev.residual < 1e-10
    assert ev.z.imag > 0 and abs(ev.lam) <= res.enclosure.r_fls * (1 + 1e-6)
    # the refined root really kills the Jost function
    from halfspec.jost import jost_transfer_matrix

    assert abs(jost_transfer_matrix(WELL, ev.z).value) < 1e-9


def test_multiplicity_consistency():
    rng = np.random.default_rng(5)
    for _ in range(3):
        cuts = np.sort(rng.uniform(0.3, 3.7, 3))
        vals = rng.normal(size=4, scale=0.8) + 1j * rng.normal(size=4, scale=0.8)
        q = StepPotential((0.0, *cuts, 4.0), tuple(vals))
        res = find_spectrum(q, tol=1e-9)
        assert sum(e.multiplicity for e in res.eigenvalues) == res.outer_count


def test_winding_rejects_zero_on_contour():
    # contour passing exactly through the refined zero
    res = find_spectrum(WELL, tol=1e-10)
    z0 = res.eigenvalues[0].z
    bad = [z0 - 0.2, z0 + 0.2 - 0.0j, z0 + 0.2j + 0.2, z0 + 0.2j - 0.2]
    with pytest.raises((ContourTooCloseError, Exception)):
        count_zeros_in_contour(WELL, [complex(v.real, max(v.imag, 1e-6)) for v in bad])


def test_newton_refine_on_well():
    res = find_spectrum(WELL, tol=1e-10)
    z0 = res.eigenvalues[0].z
    z, resid, ok = newton_refine(_jost_fn(WELL), z0 + 0.05 + 0.02j, 1e-12)
    assert ok and abs(z - z0) < 1e-9 and resid < 1e-11


def test_shift_limit_decreasing():
    q = barrier(1.0, 1.0)
    lq = even_extension(q)
    z_grid = [complex(0.4 + 0.3 * k, 0.6 + 0.2 * m) for k in range(5) for m in range(3)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = shift_limit_check(q, lq, [8.0, 16.0, 32.0], z_grid)
    devs = [r["sup_deviation"] for r in rows]
    assert devs[1] < devs[0] and devs[2] < devs[1]
    # zero line potential: the limit is e_+ itself, deviation identically 0
    rows0 = shift_limit_check(q, even_extension(zero_potential()), [5.0, 10.0], z_grid)
    assert all(r["sup_deviation"] == 0.0 for r in rows0)


def test_truncation_limit():
    q = StepPotential((0.0, 1.0, 3.0), (1j, 0.5j))
    z_grid = [0.5 + 0.8j, 1.2 + 0.6j]
    rows = truncation_limit_check(q, [0.5, 2.0, 3.0, 4.0], z_grid)
    devs = [r["sup_deviation"] for r in rows]
    assert devs[-1] == 0.0  # X beyond support: exact equality
    assert all(b <= a for a, b in zip(devs, devs[1:]))


def test_track_shift_roots_converges():
    from halfspec.jost import line_wronskian_scaled

    q = barrier(1.0, 1.0)
    lq = even_extension(q)

    def wr(zs):
        return line_wronskian_scaled(lq, np.asarray(zs, dtype=complex))

    z_root, _, ok = newton_refine(wr, 0.711841 + 0.311601j, 1e-13)
    assert ok
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = track_shift_roots(q, lq, [10.0, 20.0, 40.0], [z_root])
    errs = [r["errors"][0] for r in rows]
    assert errs[1] < 0.5 * errs[0]
    assert errs[2] < 0.5 * errs[1]


def test_winding_additivity():
    fn = _jost_fn(WELL)
    parent = [0.05 + 0.05j, 1.4 + 0.05j, 1.4 + 1.2j, 0.05 + 1.2j]
    total = winding_number(fn, parent, density=24.0)
    mid_r, mid_i = 0.725, 0.625
    kids = [
        [complex(0.05, 0.05), complex(mid_r, 0.05), complex(mid_r, mid_i), complex(0.05, mid_i)],
        [complex(mid_r, 0.05), complex(1.4, 0.05), complex(1.4, mid_i), complex(mid_r, mid_i)],
        [complex(0.05, mid_i), complex(mid_r, mid_i), complex(mid_r, 1.2), complex(0.05, 1.2)],
        [complex(mid_r, mid_i), complex(1.4, mid_i), complex(1.4, 1.2), complex(mid_r, 1.2)],
    ]
    assert sum(winding_number(fn, k, density=24.0) for k in kids) == total


def test_cross_module_pairwise_barrier():
    # quadtree zeros in a strip window match the fixed-point family pairwise
    from halfspec.barrier import BarrierSpec, solve_batch

    spec = BarrierSpec(1.0, 1200.0)
    res = solve_batch(spec, np.arange(1, 600))
    z = res["z"]
    j0, j1 = 499, 538
    region = (
        0.5 * (z[j0 - 1].real + z[j0].real),
        0.5 * (z[j1].real + z[j1 + 1].real),
        z[j0 : j1 + 1].imag.min() * 0.5,
        z[j0 : j1 + 1].imag.max() * 2.0,
    )
    out = find_spectrum(spec.potential(), tol=1e-10, region=region, density=600.0)
    assert len(out.eigenvalues) == j1 - j0 + 1
    lam_fp = np.sort_complex(res["lam"][j0 : j1 + 1])
    lam_qt = np.sort_complex(out.lambdas())
    assert np.max(np.abs(lam_fp - lam_qt) / np.abs(lam_fp)) <= 1e-8


def test_small_barrier_vs_dense_scan():
    # independent oracle: modulus grid scan + local Newton refinement
    from halfspec.jost import jost_tm_scaled
    from halfspec.scaling import fold

    q = StepPotential((0.0, 3.0), (1j,))
    xs = np.linspace(-3.2, 3.2, 321)
    ys = np.linspace(0.004, 3.2, 200)
    Z = (xs[:, None] + 1j * ys[None, :]).ravel()
    y, _, e = jost_tm_scaled(q, Z)
    vals = np.abs(fold(y, e)).reshape(len(xs), len(ys))
    fn = _jost_fn(q)
    roots = []
    for i in range(1, len(xs) - 1):
        for k in range(1, len(ys) - 1):
            v = vals[i, k]
            if v < 0.3 and v <= vals[i - 1, k] and v <= vals[i + 1, k] and v <= vals[i, k - 1] and v <= vals[i, k + 1]:
                zr, resid, ok = newton_refine(fn, complex(xs[i], ys[k]), 1e-12)
                if ok and zr.imag > 1e-6 and resid < 1e-9 and not any(abs(zr - r0) < 1e-6 for r0 in roots):
                    roots.append(zr)
    out = find_spectrum(q, tol=1e-10)
    assert len(out.eigenvalues) == len(roots)
    for ev in out.eigenvalues:
        assert min(abs(ev.z - r) for r in roots) < 1e-8


def test_thread_determinism():
    q = StepPotential((0.0, 2.0), (-1.1 + 0.4j,))
    a = find_spectrum(q, tol=1e-10, threads=1)
    b = find_spectrum(q, tol=1e-10, threads=4)
    assert [(e.z, e.multiplicity) for e in a.eigenvalues] == [
        (e.z, e.multiplicity) for e in b.eigenvalues
    ]


def test_even_extension_wronskian_vanishes_at_eigenvalues():
    # every half-line eigenvalue annihilates the line Wronskian of the even
    # extension (two-sided propagation, no shortcut)
    from halfspec.jost import line_wronskian_scaled
    from halfspec.scaling import scaled_abs_log2

    res = find_spectrum(WELL, tol=1e-11)
    lqe = even_extension(WELL)
    for ev in res.eigenvalues:
        m, e = line_wronskian_scaled(lqe, np.array([ev.z]))
        at_root = float(scaled_abs_log2(m, e)[0])
        m2, e2 = line_wronskian_scaled(lqe, np.array([ev.z + 0.05]))
        off_root = float(scaled_abs_log2(m2, e2)[0])
        assert at_root < off_root - 20.0  # many binades down at the root


def test_multiplicity_two_synthetic_zero():
    # a genuine double zero: boxes with count 2 that never separate shrink
    # below tol and are assigned multiplicity 2
    z0 = 0.62 + 0.38j

    def fn(zs):
        zs = np.asarray(zs, dtype=complex)
        return (zs - z0) ** 2 * (1.0 + 0.1 * zs), np.zeros(zs.shape, dtype=np.int64)

    res = find_spectrum(
        zero_potential(), tol=1e-7, radius=4.0, fn=fn, region=(0.1, 1.3, 0.05, 1.1)
    )
    assert res.outer_count == 2
    [ev] = res.eigenvalues
    assert ev.multiplicity == 2
    assert abs(ev.z - z0) < 1e-6


def test_two_nearby_simple_zeros_separate():
    z1, z2 = 0.5 + 0.5j, 0.5005 + 0.5j  # separation 5e-4

    def fn(zs):
        zs = np.asarray(zs, dtype=complex)
        return (zs - z1) * (zs - z2), np.zeros(zs.shape, dtype=np.int64)

    res = find_spectrum(
        zero_potential(), tol=1e-9, radius=4.0, fn=fn, region=(0.1, 1.0, 0.05, 1.0)
    )
    assert res.outer_count == 2
    assert len(res.eigenvalues) == 2
    assert all(e.multiplicity == 1 for e in res.eigenvalues)
    got = sorted(e.z.real for e in res.eigenvalues)
    assert abs(got[0] - z1.real) < 1e-8 and abs(got[1] - z2.real) < 1e-8
