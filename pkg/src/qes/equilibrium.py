"""Three equivalent tests that p(z) exp(h) solves the equation, h = z^3/3 - bz.

* divisibility: p'' + 2h'p' is divisible by p,
* residues: the residues of p^-2 exp(-2h) vanish at every zero of p,
* equilibrium: sum_{j != k} 1/(z_k - z_j) + h'(z_k) = 0 for every zero z_k.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qesfamily import QESPoint, build_family, make_point, random_locus_points

CLUSTER_TOL = 1e-6
DEFECT_TOL = 1e-8  # a relative defect below this counts as satisfied


class ClusteredRootsError(ValueError):
    def __init__(self, i: int, j: int, distance: float):
        self.pair = (i, j)
        self.distance = distance
        super().__init__(f"roots {i} and {j} are {distance:.3e} apart; p is not numerically squarefree")


@dataclass
class EquilibriumReport:
    point: QESPoint
    roots: np.ndarray
    residuals: np.ndarray
    max_residual: float


def hprime(z, b):
    return z * z - b


def _check_separated(roots: np.ndarray, tol: float):
    n = len(roots)
    scale = 1.0 + float(np.max(np.abs(roots))) if n else 1.0
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(roots[i] - roots[j])
            if d < tol * scale:
                raise ClusteredRootsError(i, j, d)


def equilibrium_residuals(point: QESPoint, tol: float = CLUSTER_TOL) -> EquilibriumReport:
    roots = point.roots
    if len(roots) == 0:
        return EquilibriumReport(point, roots, np.zeros(0, complex), 0.0)
    _check_separated(roots, tol)
    diff = roots[:, None] - roots[None, :]
    np.fill_diagonal(diff, np.inf)
    res = (1.0 / diff).sum(axis=1) + hprime(roots, point.b)
    return EquilibriumReport(point, roots, res, float(np.max(np.abs(res))))


def relative_equilibrium_defect(report: EquilibriumReport) -> float:
    """Max residual relative to the size of the terms being balanced."""
    if len(report.roots) == 0:
        return 0.0
    roots = report.roots
    scale = np.abs(roots) ** 2 + abs(report.point.b)
    if len(roots) > 1:
        diff = roots[:, None] - roots[None, :]
        np.fill_diagonal(diff, np.inf)
        scale = scale + np.abs(1.0 / diff).sum(axis=1)
    return float(np.max(np.abs(report.residuals) / np.maximum(scale, 1e-300)))


def _dividend(pc: np.ndarray, b) -> np.ndarray:
    """Descending coefficients of p'' + 2(z^2 - b)p'."""
    d1 = np.polyder(pc) if len(pc) > 1 else np.zeros(1, complex)
    d2 = np.polyder(d1) if len(d1) > 1 else np.zeros(1, complex)
    return np.polyadd(d2, np.polymul(2 * np.array([1, 0, -b], dtype=complex), d1))


def divisibility_defect(point: QESPoint) -> float:
    pc = np.asarray(point.pcoeffs, dtype=complex)
    if len(pc) == 1:
        return 0.0
    num = _dividend(pc, point.b)
    _, rem = np.polydiv(num, pc)
    scale = float(np.max(np.abs(num)))
    if not np.isfinite(scale):
        raise OverflowError("dividend overflowed")
    return float(np.max(np.abs(rem))) / scale if scale else float(np.max(np.abs(rem)))


def residue_at(point: QESPoint, k: int, tol: float = CLUSTER_TOL) -> complex:
    """Residue kernel -(p'' + 2h'p')/p'^3 at the k-th zero of p.

    The true residue of p^-2 exp(-2h) there is this times exp(-2h(z_k)), a
    factor that never vanishes.
    """
    pc = np.asarray(point.pcoeffs, dtype=complex)
    z = point.roots[k]
    d1 = np.polyder(pc)
    d2 = np.polyder(d1) if len(d1) > 1 else np.zeros(1, complex)
    p1 = np.polyval(d1, z)
    if abs(p1) < tol * max(1.0, float(np.max(np.abs(pc)))):
        raise ClusteredRootsError(k, k, abs(p1))
    p2 = np.polyval(d2, z)
    return complex(-(p2 + 2 * hprime(z, point.b) * p1) / p1**3)


def residues(point: QESPoint, tol: float = CLUSTER_TOL) -> np.ndarray:
    return np.array([residue_at(point, k, tol) for k in range(point.n)], dtype=complex)


def relative_residue_defect(point: QESPoint) -> float:
    """Largest residue kernel scaled by the magnitude of its two terms."""
    if point.n == 0:
        return 0.0
    pc = np.asarray(point.pcoeffs, dtype=complex)
    d1 = np.polyder(pc)
    d2 = np.polyder(d1) if len(d1) > 1 else np.zeros(1, complex)
    worst = 0.0
    for z in point.roots:
        p1 = np.polyval(d1, z)
        p2 = np.polyval(d2, z)
        t = 2 * hprime(z, point.b) * p1
        scale = abs(p2) + 2 * (abs(z) ** 2 + abs(point.b)) * abs(p1)
        worst = max(worst, abs(p2 + t) / max(scale, 1e-300))
    return worst


def concordance(point: QESPoint) -> dict:
    """All three defects at one point, each as a relative measure."""
    rep = equilibrium_residuals(point)
    return {
        "divisibility": divisibility_defect(point),
        "residue": relative_residue_defect(point),
        "equilibrium": relative_equilibrium_defect(rep),
        "max_equilibrium_residual": rep.max_residual,
    }


@dataclass
class ConcordanceStudy:
    n: int
    on_locus: list
    off_locus: list
    tol: float
    disagreements: int  # points where the three tests do not agree
    misclassified: int  # on-locus points failing, or off-locus points passing
    passed: bool


def _verdicts(c: dict, tol: float) -> tuple[bool, bool, bool]:
    return c["divisibility"] < tol, c["residue"] < tol, c["equilibrium"] < tol


def concordance_study(n: int, count: int = 50, seed: int = 0, tol: float = DEFECT_TOL,
                      offset: float = 0.1, b_range=(-4.0, 4.0)) -> ConcordanceStudy:
    """Run the three tests on ``count`` random locus points and on the same
    points with ``a`` shifted by ``offset``; they must agree everywhere."""
    if n < 1:
        raise ValueError("the tests are vacuous for n = 0")
    fam = build_family(n)
    rng = np.random.default_rng(seed)
    on, off = [], []
    bad = wrong = 0
    for pt in random_locus_points(fam, count, rng, b_range):
        for shift, store, expect in ((0.0, on, True), (offset, off, False)):
            q = pt if shift == 0 else make_point(fam, pt.b, pt.a + shift)
            c = concordance(q)
            v = _verdicts(c, tol)
            c["verdict"] = v
            store.append(c)
            if len(set(v)) > 1:
                bad += 1
            elif v[0] != expect:
                wrong += 1
    return ConcordanceStudy(n, on, off, tol, bad, wrong, bad == 0 and wrong == 0)
