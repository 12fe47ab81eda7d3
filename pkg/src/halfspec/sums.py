"""Eigenvalue sums: critical/non-critical Lieb-Thirring style and Jensen.

Over a spectrum {lambda_k} repeated by algebraic multiplicity:

* S_eps  = sum dist(lambda, [0,inf)) / |lambda|^{(1-eps)/2},   eps >= 0
* J      = sum Im sqrt(lambda)  (upper-half-plane branch)
* S_{alpha,beta}^{2 alpha} = sum |lambda|^alpha (dist/|lambda|)^beta

Terms are accumulated in descending magnitude order so results are
independent of input ordering.  Near-real zeros excluded by the search
floor are flagged, never silently estimated: without locations there is no
honest per-zero contribution bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .branchcuts import dist_to_halfline, im_sqrt_plus
from .spectra import Eigenvalue

__all__ = ["SumSpec", "SumReport", "eval_sum", "eval_sum_arrays", "sandwich_checks"]


@dataclass(frozen=True)
class SumSpec:
    kind: str                      # "S_eps" | "Jensen" | "S_alpha_beta"
    eps: float | None = None
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.kind == "S_eps":
            if self.eps is None or self.eps < 0:
                raise ValueError("S_eps requires eps >= 0")
        elif self.kind == "Jensen":
            pass
        elif self.kind == "S_alpha_beta":
            if not (self.alpha and self.alpha > 0 and self.beta and self.beta > 0):
                raise ValueError("S_alpha_beta requires alpha > 0 and beta > 0")
        else:
            raise ValueError(f"unknown sum kind {self.kind!r}")


@dataclass(frozen=True)
class SumReport:
    spec: SumSpec
    value: float                   # S_eps, J, or the 2*alpha-th root for S_alpha_beta
    raw_sum: float                 # the plain term sum (equals value except for S_alpha_beta)
    n_terms: int
    unresolved_flag: bool


def _terms(lams: np.ndarray, mults: np.ndarray, spec: SumSpec) -> np.ndarray:
    dist = dist_to_halfline(lams)
    if np.any((dist == 0.0) & (np.abs(lams) > 0)) or np.any(np.abs(lams) == 0.0):
        raise ValueError("eigenvalues must avoid the closed positive half-line")
    if spec.kind == "S_eps":
        t = dist / np.abs(lams) ** ((1.0 - spec.eps) / 2.0)
    elif spec.kind == "Jensen":
        t = im_sqrt_plus(lams)
    else:
        t = np.abs(lams) ** spec.alpha * (dist / np.abs(lams)) ** spec.beta
    return t * mults


def eval_sum_arrays(lams, mults, spec: SumSpec, unresolved: bool = False) -> SumReport:
    lams = np.asarray(lams, dtype=complex)
    mults = np.ones(lams.shape) if mults is None else np.asarray(mults, dtype=float)
    if lams.size == 0:
        return SumReport(spec=spec, value=0.0, raw_sum=0.0, n_terms=0, unresolved_flag=unresolved)
    t = _terms(lams, mults, spec)
    order = np.argsort(-np.abs(t), kind="stable")
    raw = float(np.add.reduce(t[order]))
    if spec.kind == "S_alpha_beta":
        value = raw ** (1.0 / (2.0 * spec.alpha))
    else:
        value = raw
    return SumReport(spec=spec, value=value, raw_sum=raw, n_terms=int(lams.size), unresolved_flag=unresolved)


def eval_sum(spectrum: Sequence[Eigenvalue], spec: SumSpec, unresolved: bool = False) -> SumReport:
    lams = np.array([e.lam for e in spectrum], dtype=complex)
    mults = np.array([e.multiplicity for e in spectrum], dtype=float)
    return eval_sum_arrays(lams, mults, spec, unresolved=unresolved)


def sandwich_checks(
    spectrum: Sequence[Eigenvalue] | np.ndarray,
    l1: float | None = None,
    eps_pairs: Sequence[tuple[float, float]] = ((0.1, 0.5),),
) -> dict:
    """Termwise and aggregate consistency relations between the sums.

    * J <= S_0 <= 2 J, which holds termwise:
      |lambda|^{1/2} Im sqrt(lambda) <= dist <= 2 |lambda|^{1/2} Im sqrt(lambda).
    * with the enclosure |lambda| <= l1^2 on every eigenvalue:
      S_{eps2} <= l1^{eps2-eps1} S_{eps1} for eps1 < eps2.
    """
    if isinstance(spectrum, np.ndarray):
        lams, mults = spectrum.astype(complex), np.ones(len(spectrum))
    else:
        lams = np.array([e.lam for e in spectrum], dtype=complex)
        mults = np.array([e.multiplicity for e in spectrum], dtype=float)
    out: dict = {"n_terms": int(lams.size)}
    if lams.size == 0:
        out.update({"jensen_sandwich": True, "termwise": True, "eps_monotone": [], "enclosure_ok": True})
        return out
    dist = dist_to_halfline(lams)
    ims = im_sqrt_plus(lams)
    lhs = np.abs(lams) ** 0.5 * ims
    out["termwise"] = bool(np.all(lhs <= dist * (1 + 1e-12)) and np.all(dist <= 2 * lhs * (1 + 1e-12)))
    J = float(np.sum(ims * mults))
    S0 = float(np.sum(dist / np.abs(lams) ** 0.5 * mults))
    out["J"], out["S0"] = J, S0
    out["jensen_sandwich"] = bool(J <= S0 * (1 + 1e-12) and S0 <= 2 * J * (1 + 1e-12))
    out["eps_monotone"] = []
    if l1 is not None:
        out["enclosure_ok"] = bool(np.all(np.abs(lams) <= l1 * l1 * (1 + 1e-9)))
        for e1, e2 in eps_pairs:
            if not 0 <= e1 < e2:
                raise ValueError("need 0 <= eps1 < eps2")
            s1 = float(np.sum(dist / np.abs(lams) ** ((1 - e1) / 2) * mults))
            s2 = float(np.sum(dist / np.abs(lams) ** ((1 - e2) / 2) * mults))
            ok = s2 <= l1 ** (e2 - e1) * s1 * (1 + 1e-12)
            out["eps_monotone"].append({"eps1": e1, "eps2": e2, "S_eps1": s1, "S_eps2": s2, "ok": bool(ok)})
    return out
