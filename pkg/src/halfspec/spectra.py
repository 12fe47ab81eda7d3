"""Eigenvalue location by argument-principle counting and Newton refinement.

lambda = z^2 is a discrete eigenvalue of the Dirichlet operator iff the Jost
function vanishes at z (Im z > 0), with matching multiplicities, and the
whole discrete spectrum sits in |lambda| <= ||q||_1^2 (or the sharper
weighted radius).  That reduces spectral computation to zero counting and
refinement for one analytic function on a bounded region:

* ``count_zeros_in_contour`` walks a closed polyline with adaptive phase
  continuation (every accepted phase increment below pi/2) and returns the
  winding number, i.e. the zero count with multiplicity.
* ``find_spectrum`` runs an adaptive quadtree over the search half-disk,
  counting per box, Newton-refining isolated zeros and subdividing clusters.

Phases are computed from scaled mantissas, so decaying e^{izR} prefactors of
wide potentials never underflow the continuation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .jost import jost_tm_scaled
from .potentials import Potential, StepPotential, WeightPair, l1_norm, weighted_norm
from .scaling import scaled_abs_log2

__all__ = [
    "EnclosureReport",
    "Eigenvalue",
    "SpectrumResult",
    "PhaseContinuationError",
    "ContourTooCloseError",
    "enclosure",
    "count_zeros_in_contour",
    "winding_number",
    "find_spectrum",
    "newton_refine",
    "shift_limit_check",
    "truncation_limit_check",
    "track_shift_roots",
]


class PhaseContinuationError(RuntimeError):
    """Adaptive bisection could not bring all phase steps below pi/2."""


class ContourTooCloseError(RuntimeError):
    """The function modulus on the contour dips too close to zero."""


@dataclass(frozen=True)
class EnclosureReport:
    """Radii bounding the discrete spectrum in the lambda plane."""

    r_fls: float                 # ||q||_1^2
    rho_inv: float | None = None  # weighted radius, when a weight is supplied
    empty: bool = False           # weighted criterion shows no eigenvalues at all

    @property
    def r(self) -> float:
        if self.empty:
            return 0.0
        if self.rho_inv is None:
            return self.r_fls
        return min(self.r_fls, self.rho_inv)


@dataclass(frozen=True)
class Eigenvalue:
    """One discrete eigenvalue lambda = z^2 with Im z > 0.

    ``residual`` is |e_+(z)| / (1 + |e_+'(z)|), a Newton-step-sized measure
    that stays meaningful when the raw Jost value carries a large exponent.
    """

    z: complex
    lam: complex
    multiplicity: int
    residual: float


@dataclass
class SpectrumResult:
    eigenvalues: list[Eigenvalue]
    unresolved: list[tuple[float, float, float, float, int]]  # boxes (re0,re1,im0,im1,count)
    enclosure: EnclosureReport
    outer_count: int

    @property
    def unresolved_flag(self) -> bool:
        return bool(self.unresolved)

    def lambdas(self) -> np.ndarray:
        return np.array([e.lam for e in self.eigenvalues], dtype=complex)


# -- enclosure -------------------------------------------------------------------

def enclosure(q: Potential, weight: WeightPair | None = None) -> EnclosureReport:
    """Spectral enclosure radii: |lambda| <= ||q||_1^2 always; with a weight,
    also |lambda| <= 1/rho where rho = inf{t : a_hat(sqrt t) >= log2/||q||_a}."""
    r_fls = l1_norm(q) ** 2
    if weight is None:
        return EnclosureReport(r_fls=r_fls)
    qa = weighted_norm(q, weight)
    if qa == 0.0:
        return EnclosureReport(r_fls=r_fls, rho_inv=0.0, empty=True)
    target = np.log(2.0) / qa
    try:
        s = weight.a_hat_inverse(target)
    except Exception:
        # a_hat never reaches the target: rho = inf, spectrum empty
        return EnclosureReport(r_fls=r_fls, rho_inv=0.0, empty=True)
    rho = s * s
    return EnclosureReport(r_fls=r_fls, rho_inv=1.0 / rho if rho > 0 else np.inf)


# -- phase continuation ----------------------------------------------------------

def _polyline_points(vertices: Sequence[complex], density: float) -> tuple[np.ndarray, np.ndarray]:
    """Sample a closed polyline; returns (arclength parameters, points)."""
    verts = np.asarray(list(vertices) + [vertices[0]], dtype=complex)
    ts, pts = [], []
    acc = 0.0
    for a, b in zip(verts[:-1], verts[1:]):
        seg = abs(b - a)
        n = max(8, int(np.ceil(seg * density)))
        loc = np.linspace(0.0, 1.0, n, endpoint=False)
        ts.append(acc + loc * seg)
        pts.append(a + (b - a) * loc)
        acc += seg
    ts.append(np.array([acc]))
    pts.append(np.array([verts[0]]))
    return np.concatenate(ts), np.concatenate(pts)


def winding_number(
    f: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    vertices: Sequence[complex],
    density: float = 8.0,
    max_rounds: int = 60,
    max_points: int = 20_000_000,
    min_modulus_log2: float | None = None,
) -> int:
    """Winding number of f along a closed polyline by phase continuation.

    ``f`` maps a point array to (mantissa, exp2); only mantissa phases and
    log-magnitudes are used.  Segments are bisected until every phase step
    is below pi/2.  ``min_modulus_log2``, when given, rejects contours whose
    log2-modulus dips more than that far below the contour median.
    """
    ts, pts = _polyline_points(vertices, density)
    m, e = f(pts)
    logmag = scaled_abs_log2(m, e)
    if np.any(~np.isfinite(logmag)):
        raise ContourTooCloseError("exact zero on the contour")
    for _ in range(max_rounds):
        ph = np.angle(m)
        dph = np.diff(ph)
        dph = (dph + np.pi) % (2 * np.pi) - np.pi
        bad = np.abs(dph) >= np.pi / 2
        if not np.any(bad):
            if min_modulus_log2 is not None and len(logmag) > 2:
                # the natural modulus scale drifts along the contour (factors
                # like e^{iRz}), so zero proximity is judged against the
                # immediate neighbours, which share the local scale: a zero
                # at distance d from a sample with spacing h dips by log2(d/h)
                inner = logmag[:-1]  # closed contour: last sample repeats the first
                nb = np.maximum(np.roll(inner, 1), np.roll(inner, -1))
                dip = float(np.min(inner - nb))
                if dip < min_modulus_log2:
                    raise ContourTooCloseError(
                        f"contour modulus dips {-dip:.1f} binades below its neighbours"
                    )
            total = float(np.sum(dph)) / (2 * np.pi)
            n = int(np.round(total))
            if abs(total - n) > 0.25:
                raise PhaseContinuationError(f"winding sum {total:.3f} is not close to an integer")
            return n
        idx = np.nonzero(bad)[0]
        new_ts = 0.5 * (ts[idx] + ts[idx + 1])
        if len(ts) + len(new_ts) > max_points:
            raise PhaseContinuationError("phase refinement exceeded the sample budget")
        new_pts = _param_to_points(vertices, new_ts)
        nm, ne = f(new_pts)
        nlog = scaled_abs_log2(nm, ne)
        if np.any(~np.isfinite(nlog)):
            raise ContourTooCloseError("exact zero on the contour")
        ts = np.concatenate([ts, new_ts])
        order = np.argsort(ts, kind="stable")
        ts = ts[order]
        m = np.concatenate([m, nm])[order]
        logmag = np.concatenate([logmag, nlog])[order]
    raise PhaseContinuationError("phase steps still exceed pi/2 after maximum refinement")


def _param_to_points(vertices: Sequence[complex], ts: np.ndarray) -> np.ndarray:
    verts = np.asarray(list(vertices) + [vertices[0]], dtype=complex)
    lens = np.abs(np.diff(verts))
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    out = np.empty(ts.shape, dtype=complex)
    seg_idx = np.clip(np.searchsorted(cum, ts, side="right") - 1, 0, len(lens) - 1)
    local = (ts - cum[seg_idx]) / lens[seg_idx]
    out[:] = verts[seg_idx] + (verts[seg_idx + 1] - verts[seg_idx]) * local
    return out


def _jost_fn(q: StepPotential) -> Callable:
    def f(zs: np.ndarray):
        y, _, e = jost_tm_scaled(q, zs)
        return y, e
    return f


def count_zeros_in_contour(
    q: StepPotential,
    contour: Sequence[complex],
    samples: int = 8,
    refinement_tol: float = 1e-9,
) -> int:
    """Zeros (with multiplicity) of the Jost function inside a closed polyline.

    The contour must stay in {Im z >= 0} and clear of zeros; a dip of the
    contour modulus below 10x the refinement tolerance relative to the
    contour's typical size raises ContourTooCloseError.
    """
    verts = [complex(v) for v in contour]
    if any(v.imag < 0 for v in verts):
        raise ValueError("contour must stay in the closed upper half-plane")
    min_log2 = np.log2(10.0 * refinement_tol)
    return winding_number(_jost_fn(q), verts, density=float(samples), min_modulus_log2=min_log2)


# -- Newton refinement -------------------------------------------------------------

def newton_refine(
    fn: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    z0: complex,
    tol: float,
    max_iter: int = 60,
) -> tuple[complex, float, bool]:
    """Newton iteration with central-difference derivative on scaled values.

    Returns (z, residual, converged); the derivative is formed from the same
    scaled evaluations, so common exponents cancel in the Newton step.
    """
    z = complex(z0)
    for _ in range(max_iter):
        h = 1e-7 * (1.0 + abs(z))
        pts = np.array([z, z + h, z - h], dtype=complex)
        m, e = fn(pts)
        # align exponents to the central point
        shift = e - e[0]
        shift = np.clip(shift, -1000, 1000)
        mm = m * (2.0 ** shift.astype(float))
        fz, fp = mm[0], (mm[1] - mm[2]) / (2.0 * h)
        if fp == 0:
            return z, np.inf, False
        dz = fz / fp
        z = z - dz
        if abs(dz) <= tol * (1.0 + abs(z)):
            pts = np.array([z, z + h, z - h], dtype=complex)
            m, e = fn(pts)
            shift = np.clip(e - e[0], -1000, 1000)
            mm = m * (2.0 ** shift.astype(float))
            resid = abs(mm[0]) / (1.0 + abs((mm[1] - mm[2]) / (2.0 * h)))
            return z, float(resid), True
    return z, np.inf, False


# -- quadtree search ----------------------------------------------------------------

@dataclass(order=True)
class _Box:
    sort_key: tuple = field(init=False)
    re0: float = field(compare=False, default=0.0)
    re1: float = field(compare=False, default=0.0)
    im0: float = field(compare=False, default=0.0)
    im1: float = field(compare=False, default=0.0)
    count: int = field(compare=False, default=0)

    def __post_init__(self):
        self.sort_key = (self.re0, self.im0, self.re1, self.im1)

    @property
    def size(self) -> float:
        return max(self.re1 - self.re0, self.im1 - self.im0)

    def vertices(self) -> list[complex]:
        return [
            complex(self.re0, self.im0),
            complex(self.re1, self.im0),
            complex(self.re1, self.im1),
            complex(self.re0, self.im1),
        ]


_SPLIT_FRACTIONS = (0.5, 0.55, 0.45, 0.6, 0.4, 0.52, 0.48)


def _count_box(fn, box: _Box, tol: float, density: float) -> int:
    last = None
    for frac in (1.0, 1.007, 0.993, 1.015):
        verts = [
            complex(box.re0, box.im0),
            complex(box.re1 * frac if box.re1 > 0 else box.re1 / frac, box.im0),
            complex(box.re1 * frac if box.re1 > 0 else box.re1 / frac, box.im1 * frac),
            complex(box.re0, box.im1 * frac),
        ] if frac != 1.0 else box.vertices()
        try:
            return winding_number(fn, verts, density=density, min_modulus_log2=np.log2(10 * tol))
        except (ContourTooCloseError, PhaseContinuationError) as exc:
            last = exc
    raise last


def _split_box(fn, box: _Box, tol: float, density: float) -> list[_Box]:
    """Split into 4 children whose counts add up to the parent's.

    Split lines are shifted off any zero; on a sum mismatch the parent is
    recounted at escalated density (a multiple zero close to an edge can
    alias a full 2*pi turn past the phase-step criterion, shifting one unit
    of count between neighbours while sums higher up still balance; denser
    sampling resolves the swirl) and the corrected count propagates.
    """
    last_exc = None
    boost = 1.0
    for fr in _SPLIT_FRACTIONS:
        rm = box.re0 + fr * (box.re1 - box.re0)
        im = box.im0 + fr * (box.im1 - box.im0)
        kids = [
            _Box(re0=box.re0, re1=rm, im0=box.im0, im1=im),
            _Box(re0=rm, re1=box.re1, im0=box.im0, im1=im),
            _Box(re0=box.re0, re1=rm, im0=im, im1=box.im1),
            _Box(re0=rm, re1=box.re1, im0=im, im1=box.im1),
        ]
        try:
            for k in kids:
                k.count = winding_number(
                    fn, k.vertices(), density=density * boost, min_modulus_log2=np.log2(10 * tol)
                )
            if sum(k.count for k in kids) != box.count:
                recount = winding_number(
                    fn, box.vertices(), density=8.0 * density * boost, min_modulus_log2=np.log2(10 * tol)
                )
                if sum(k.count for k in kids) != recount:
                    raise PhaseContinuationError(
                        f"children counts {[k.count for k in kids]} do not add to parent "
                        f"{box.count} (recount {recount})"
                    )
            return kids
        except (ContourTooCloseError, PhaseContinuationError) as exc:
            last_exc = exc
            boost *= 4.0
            continue
    raise last_exc


def find_spectrum(
    q: StepPotential,
    tol: float = 1e-9,
    floor: float | None = None,
    radius: float | None = None,
    density: float = 8.0,
    fn: Callable | None = None,
    region: tuple[float, float, float, float] | None = None,
    threads: int = 1,
) -> SpectrumResult:
    """All discrete eigenvalues inside the spectral enclosure.

    Quadtree subdivision of the search rectangle with per-box winding counts;
    single zeros are Newton-refined, clusters subdivided until separated or
    assigned as one multiple zero below the size tolerance.  Zeros within
    ``floor`` of the real axis cannot be separated from the essential
    spectrum and are reported in ``unresolved`` rather than silently dropped.

    ``region`` = (re0, re1, im0, im1) restricts the search to a z-plane
    rectangle instead of the full enclosure (targeted sweeps of very wide
    potentials whose enclosure is far larger than the zero set).

    Boxes are processed in breadth-first waves sorted by coordinates;
    ``threads`` > 1 maps each wave over a worker pool, and assembly is
    order-independent, so results are identical at any thread count.
    """
    enc = enclosure(q)
    r = radius if radius is not None else enc.r_fls
    if r == 0.0 and region is None:
        return SpectrumResult([], [], enc, 0)
    sqrt_r = float(np.sqrt(r))
    L = sqrt_r * (1.0 + 1e-3)
    if floor is None:
        floor = 1e-6 * (1.0 + sqrt_r)
    fn = fn or _jost_fn(q)
    if region is not None:
        re0, re1, im0, im1 = region
        root = _Box(re0=re0, re1=re1, im0=max(im0, floor), im1=im1)
    else:
        root = _Box(re0=-L, re1=L, im0=floor, im1=L * (1.0 + 1e-3))
    root.count = _count_box(fn, root, tol, density)
    outer = root.count

    def verify_simple(z: complex) -> bool:
        """Tiny winding contour around a refined root must count exactly 1;
        a higher count means an unseparated cluster masquerading as a simple
        zero (a multiple zero bisected by a split line shows winding 1 in
        each child while Newton stalls nearby)."""
        r_v = 10.0 * tol * (1.0 + abs(z))
        ring = [z + r_v * (-1 - 1j), z + r_v * (1 - 1j), z + r_v * (1 + 1j), z + r_v * (-1 + 1j)]
        if any(v.imag <= 0 for v in ring):
            return True  # hugging the floor: accept on Newton's evidence
        try:
            return winding_number(fn, ring, density=4.0 / r_v) == 1
        except (ContourTooCloseError, PhaseContinuationError):
            return False

    def handle(box: _Box):
        """Outcome for one box: list of (kind, payload); kinds eig/unresolved/child."""
        if box.count == 0:
            return []
        touches_floor = box.im0 <= floor * (1.0 + 1e-12)
        if box.count == 1:
            zc = complex(0.5 * (box.re0 + box.re1), 0.5 * (box.im0 + box.im1))
            z, resid, ok = newton_refine(fn, zc, tol)
            pad = 0.05 * box.size
            inside = (box.re0 - pad <= z.real <= box.re1 + pad) and (box.im0 - pad <= z.imag <= box.im1 + pad)
            if ok and inside and z.imag > floor and verify_simple(z):
                return [("eig", Eigenvalue(z=z, lam=z * z, multiplicity=1, residual=resid))]
            if ok and inside and z.imag <= floor:
                return [("unresolved", (box.re0, box.re1, box.im0, box.im1, box.count))]
        if box.size < tol:
            z = complex(0.5 * (box.re0 + box.re1), 0.5 * (box.im0 + box.im1))
            if touches_floor:
                return [("unresolved", (box.re0, box.re1, box.im0, box.im1, box.count))]
            _, resid, _ = newton_refine(fn, z, tol, max_iter=5)
            return [("eig", Eigenvalue(z=z, lam=z * z, multiplicity=box.count, residual=resid))]
        try:
            kids = _split_box(fn, box, tol, density)
        except (ContourTooCloseError, PhaseContinuationError):
            if touches_floor and box.size < 1e3 * tol:
                return [("unresolved", (box.re0, box.re1, box.im0, box.im1, box.count))]
            if box.size < 1e3 * tol:
                # winding arithmetic degenerates once a zero is pinned to a
                # box edge at float resolution; bin the count here and let
                # the cluster merge reunite halves from the sibling box
                z = complex(0.5 * (box.re0 + box.re1), 0.5 * (box.im0 + box.im1))
                zr, resid, ok = newton_refine(fn, z, tol, max_iter=8)
                if not (ok and abs(zr - z) <= 2 * box.size):
                    zr, resid = z, np.inf
                return [("eig", Eigenvalue(z=zr, lam=zr * zr, multiplicity=box.count, residual=resid))]
            raise
        return [("child", k) for k in kids if k.count > 0]

    eigs: list[Eigenvalue] = []
    unresolved: list[tuple[float, float, float, float, int]] = []
    frontier: list[_Box] = [root]
    pool = None
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        pool = ThreadPoolExecutor(max_workers=threads)
    try:
        while frontier:
            frontier.sort()
            mapper = pool.map if pool is not None else map
            outcomes = list(mapper(handle, frontier))
            frontier = []
            for events in outcomes:
                for kind, payload in events:
                    if kind == "eig":
                        eigs.append(payload)
                    elif kind == "unresolved":
                        unresolved.append(payload)
                    else:
                        frontier.append(payload)
    finally:
        if pool is not None:
            pool.shutdown()
    eigs = _merge_clusters(eigs, tol)
    eigs.sort(key=lambda ev: (ev.lam.real, ev.lam.imag))
    return SpectrumResult(eigs, sorted(unresolved), enc, outer)


def _merge_clusters(eigs: list[Eigenvalue], tol: float) -> list[Eigenvalue]:
    """Combine roots indistinguishable at the size tolerance.

    A zero of multiplicity m split across box boundaries arrives as m
    nearby entries; anything within 3*tol of a group joins it, multiplicities
    add, and the smallest-residual member represents the location."""
    if len(eigs) < 2:
        return eigs
    eigs = sorted(eigs, key=lambda ev: (ev.z.real, ev.z.imag))
    out: list[Eigenvalue] = []
    group = [eigs[0]]
    for ev in eigs[1:]:
        anchor = min(group, key=lambda e: e.residual)
        if abs(ev.z - anchor.z) <= 3.0 * tol * (1.0 + abs(anchor.z)):
            group.append(ev)
        else:
            out.append(_combine(group))
            group = [ev]
    out.append(_combine(group))
    return out


def _combine(group: list[Eigenvalue]) -> Eigenvalue:
    if len(group) == 1:
        return group[0]
    best = min(group, key=lambda e: e.residual)
    mult = sum(e.multiplicity for e in group)
    return Eigenvalue(z=best.z, lam=best.lam, multiplicity=mult, residual=best.residual)


# -- limit checks -------------------------------------------------------------------

def _fold_jost(q: StepPotential, zs: np.ndarray) -> np.ndarray:
    from .scaling import fold

    y, _, e = jost_tm_scaled(q, zs)
    return fold(y, e)


def shift_limit_check(
    q: StepPotential,
    line_q: StepPotential,
    X_list: Sequence[float],
    z_grid: Sequence[complex],
) -> list[dict]:
    """Deviation of e_+(0,z; q + line_q(. - X)) from its large-shift limit
    e_+(0,z;q) W(z,line_q) / (-2iz), per shift, sup over the z grid."""
    from .jost import line_wronskian_scaled
    from .potentials import shift_superpose
    from .scaling import fold

    zs = np.asarray(list(z_grid), dtype=complex)
    base = _fold_jost(q, zs)
    if line_q.values:
        wm, we = line_wronskian_scaled(line_q, zs)
        W = fold(wm, we)
        limit = base * W / (-2j * zs)
    else:
        limit = base  # free factor: W = -2iz exactly, limit is e_+ itself
    rows = []
    for X in X_list:
        qX = shift_superpose(q, line_q, float(X))
        vals = _fold_jost(qX, zs)
        dev = float(np.max(np.abs(vals - limit)))
        rows.append({"X": float(X), "sup_deviation": dev})
    return rows


def truncation_limit_check(
    q: Potential,
    X_list: Sequence[float],
    z_grid: Sequence[complex],
    tol: float = 1e-10,
) -> list[dict]:
    """Deviation of e_+(0,z;q_X) from e_+(0,z;q), sup over the z grid, with
    the analytic tail bound exp(tau(X)/min|z|) - 1 where a tail is declared."""
    from .jost import jost_series_grid
    from .potentials import SampledPotential, truncate

    zs = np.asarray(list(z_grid), dtype=complex)
    if isinstance(q, StepPotential):
        base = _fold_jost(q, zs)
        evaluate = lambda p: _fold_jost(p, zs)
    else:
        base, _, _ = jost_series_grid(q, zs, tol=tol)
        evaluate = lambda p: jost_series_grid(p, zs, tol=tol)[0]
    min_abs_z = float(np.min(np.abs(zs)))
    rows = []
    for X in X_list:
        qX = truncate(q, float(X))
        vals = evaluate(qX)
        dev = float(np.max(np.abs(vals - base)))
        row = {"X": float(X), "sup_deviation": dev}
        if isinstance(q, SampledPotential) and q.tail is not None:
            # |e_+(0,z;q) - e_+(0,z;q_X)| is controlled by the tail mass
            row["tail_bound"] = float(np.expm1(q.tail_bound(float(X)) / min_abs_z) * np.exp(l1_norm(q) / min_abs_z))
        rows.append(row)
    return rows


def track_shift_roots(
    q: StepPotential,
    line_q: StepPotential,
    X_list: Sequence[float],
    seed_roots: Sequence[complex],
    tol: float = 1e-11,
) -> list[dict]:
    """Follow zeros of e_+(0, .; q + line_q(. - X)) near given limit roots.

    For each X, Newton-refines from every seed (a root of the product limit:
    zero of e_+(0,.;q) or of W(.,line_q)) and records the distance."""
    from .potentials import shift_superpose

    rows = []
    for X in X_list:
        qX = shift_superpose(q, line_q, float(X))
        fn = _jost_fn(qX)
        entry = {"X": float(X), "roots": [], "errors": []}
        for seed in seed_roots:
            z, resid, ok = newton_refine(fn, complex(seed), tol)
            entry["roots"].append(z if ok else None)
            entry["errors"].append(abs(z - seed) if ok else np.inf)
        rows.append(entry)
    return rows
