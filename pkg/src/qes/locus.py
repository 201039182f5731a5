"""The real QES spectral locus: branch tracing, classification and large-b checks.

Branches are traced in the (b, a) plane on Q*(b, a) = 0; the eigenvalue is
then lam = b^2 - 2a.  A branch is labelled by m, where p_n has n - 2m real
zeros along it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .polycore import (BiPoly, PolyUsageError, UniPoly, complex_roots, count_real_roots, discriminant_in,
                       discriminant_in_a, isolate_real_roots, squarefree_part, top_weight_part)
from .qesfamily import AB, QESFamily, build_family, eval_fast, roots_in_a, scaled_residual

REAL_ZERO_TOL = 1e-6
REAL_ROOT_TOL = 1e-9


class ContinuationError(RuntimeError):
    pass


@dataclass
class Branch:
    n: int
    m: int
    samples: list = field(default_factory=list)  # (b, lam, a)
    zerocounts: list = field(default_factory=list)  # (n, real zeros)
    arc_starts: list = field(default_factory=list)  # sample index where each traced arc begins

    def arcs(self):
        bounds = self.arc_starts + [len(self.samples)]
        return [self.samples[i:j] for i, j in zip(bounds, bounds[1:])]


@dataclass
class CriticalPoint:
    b: float
    lam: float
    kind: str = "a"


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def real_zero_count(family: QESFamily, a: float, b: float, tol: float = REAL_ZERO_TOL) -> int:
    """Real zeros of p_n at (a, b): |Im z| < tol (1 + |z|).

    Clustered zeros (large b) make the imaginary parts unreliable; when any
    zero lies within a factor 1000 of the threshold, or the non-real zeros
    do not pair up, the count is redone exactly with a Sturm sequence on the
    rational value of the floating point (a, b).
    """
    if family.n == 0:
        return 0
    z = complex_roots(family.p_at(a, b))
    rel = np.abs(z.imag) / (tol * (1 + np.abs(z)))
    count = int(np.sum(rel < 1))
    if (family.n - count) % 2 == 0 and not np.any((rel > 1e-3) & (rel < 1e3)):
        return count
    return exact_real_zero_count(family, a, b)


def exact_real_zero_count(family: QESFamily, a: float, b: float) -> int:
    """Distinct real zeros of p_n at the exact binary values of (a, b)."""
    p = UniPoly(list(reversed(family.p_exact(Fraction(float(a)), Fraction(float(b))))), "z")
    sf = squarefree_part(p)
    bound = 1 + max(abs(c) for c in sf.coeffs[:-1]) / abs(sf.lc()) if sf.degree >= 1 else 1
    return count_real_roots(sf, -bound - 1, bound + 1)


def branch_index(family: QESFamily, a: float, b: float, tol: float = REAL_ZERO_TOL) -> int:
    """m such that p_n(., a, b) has n - 2m real zeros."""
    r = real_zero_count(family, a, b, tol)
    if (family.n - r) % 2:
        raise ContinuationError(f"odd number of non-real zeros at b={b}, a={a}; tolerance too loose")
    return (family.n - r) // 2


def real_points(family: QESFamily, b: float) -> list[float]:
    """Real roots a of Q*(b, .), ascending."""
    out = []
    for r in roots_in_a(family, b):
        if abs(r.imag) <= REAL_ROOT_TOL * (1 + abs(r)):
            out.append(float(r.real))
    return sorted(out)


# ---------------------------------------------------------------------------
# pseudo-arclength continuation
# ---------------------------------------------------------------------------


@dataclass
class StepControl:
    h0: float = 0.05
    hmax: float = 0.5
    hrel: float = 0.05  # the step may also grow to hrel * |b|
    hmin: float = 1e-7
    newton_tol: float = 1e-12
    max_newton: int = 12
    max_steps: int = 200000


class _Curve:
    def __init__(self, family: QESFamily):
        self.F = family.qstar
        self.Fa = family.dqstar_da
        self.Fb = family.dqstar_db

    def value(self, b, a):
        return eval_fast(self.F, a, b)

    def grad(self, b, a):
        return eval_fast(self.Fb, a, b), eval_fast(self.Fa, a, b)

    def tangent(self, b, a, prev=None):
        fb, fa = self.grad(b, a)
        t = np.array([fa, -fb], dtype=float)
        nrm = np.hypot(*t)
        if nrm == 0:
            raise ContinuationError(f"singular point of the locus at b={b}, a={a}")
        t /= nrm
        if prev is not None and t @ prev < 0:
            t = -t
        return t

    def correct(self, b, a, t, ctl: StepControl):
        """Newton on F = 0 within the hyperplane through (b, a) normal to t."""
        x0 = np.array([b, a])
        x = x0.copy()
        for it in range(ctl.max_newton):
            f = self.value(*x)
            fb, fa = self.grad(*x)
            J = np.array([[fb, fa], [t[0], t[1]]])
            rhs = -np.array([f, t @ (x - x0)])
            try:
                dx = np.linalg.solve(J, rhs)
            except np.linalg.LinAlgError:
                return None, it
            x = x + dx
            if np.max(np.abs(dx)) <= ctl.newton_tol * (1 + np.max(np.abs(x))):
                if scaled_residual(self.F, x[1], x[0]) < 1e-10:
                    return x, it + 1
        return None, ctl.max_newton

    def solve_a_at(self, b, a_guess, iters=30):
        a = a_guess
        for _ in range(iters):
            fa = eval_fast(self.Fa, a, b)
            if fa == 0:
                break
            da = self.value(b, a) / fa
            a -= da
            if abs(da) <= 1e-15 * (1 + abs(a)):
                break
        return a


def _trace_direction(curve: _Curve, family, b0, a0, t0, m, b_range, ctl: StepControl, tol):
    """Follow the curve from (b0, a0) along t0 until b leaves b_range."""
    lo, hi = b_range
    pts = []
    x = np.array([b0, a0])
    t = t0
    h = ctl.h0
    for _ in range(ctl.max_steps):
        pred = x + h * t
        xn, its = curve.correct(pred[0], pred[1], t, ctl)
        if xn is None:
            h /= 2
            if h < ctl.hmin:
                raise ContinuationError(f"Newton stalled near b={x[0]:.6g}, a={x[1]:.6g}")
            continue
        if xn[0] < lo or xn[0] > hi:
            edge = lo if xn[0] < lo else hi
            frac = (edge - x[0]) / (xn[0] - x[0])
            ae = curve.solve_a_at(edge, x[1] + frac * (xn[1] - x[1]))
            if branch_index(family, ae, edge, tol) == m:
                pts.append((edge, ae))
            return pts
        if branch_index(family, xn[1], xn[0], tol) != m:
            h /= 2
            if h < ctl.hmin:
                raise ContinuationError(
                    f"zero-count classification flipped near b={xn[0]:.6g} without a singular point; "
                    "reduce the step size"
                )
            continue
        tn = curve.tangent(xn[0], xn[1], t)
        if tn @ t < 0.9:  # sharp turn: take a smaller step
            h /= 2
            if h >= ctl.hmin:
                continue
        pts.append((float(xn[0]), float(xn[1])))
        x, t = xn, tn
        if its <= 3:
            h = min(h * 1.5, max(ctl.hmax, ctl.hrel * abs(x[0])))
    raise ContinuationError("step budget exhausted")


def trace_arc(family: QESFamily, b0: float, a0: float, m: int, b_range, ctl: StepControl | None = None,
              tol: float = REAL_ZERO_TOL) -> list[tuple[float, float]]:
    """Trace the connected arc through (b0, a0) in both directions; ordered by arclength."""
    ctl = ctl or StepControl()
    curve = _Curve(family)
    t0 = curve.tangent(b0, a0)
    fwd = _trace_direction(curve, family, b0, a0, t0, m, b_range, ctl, tol)
    bwd = _trace_direction(curve, family, b0, a0, -t0, m, b_range, ctl, tol)
    pts = list(reversed(bwd)) + [(b0, a0)] + fwd
    # a seed on the window edge comes back as the edge point of one direction
    out = [pts[0]]
    for p in pts[1:]:
        if abs(p[0] - out[-1][0]) > 1e-13 * (1 + abs(p[0])) or abs(p[1] - out[-1][1]) > 1e-13 * (1 + abs(p[1])):
            out.append(p)
    return out


def _seeds(family: QESFamily, m: int, b_range, grid: int, tol: float):
    lo, hi = b_range
    out = []
    for b in np.linspace(hi, lo, grid):
        for a in real_points(family, float(b)):
            if branch_index(family, a, float(b), tol) == m:
                out.append((float(b), a))
    return out


def _covered(curve: "_Curve", seed, arc) -> bool:
    """Does the arc pass through the seed?  Interpolate the arc at the seed's
    b, project onto the curve at fixed b, and compare."""
    b, a = seed
    for (b1, a1), (b2, a2) in zip(arc[:-1], arc[1:]):
        if min(b1, b2) <= b <= max(b1, b2):
            s = 0.5 if b1 == b2 else (b - b1) / (b2 - b1)
            ai = curve.solve_a_at(b, a1 + s * (a2 - a1))
            if abs(ai - a) <= 1e-7 * (1 + abs(a)):
                return True
    # at a fold the arc turns around between two samples, so the seed can sit
    # beside a segment rather than at a sample b; accept it when it is much
    # closer to the segment than the segment is long
    p = np.array([b, a])
    for q1, q2 in zip(arc[:-1], arc[1:]):
        q1, q2 = np.asarray(q1, float), np.asarray(q2, float)
        seg = q2 - q1
        length = float(np.hypot(*seg))
        if length == 0.0:
            continue
        s = min(max(float((p - q1) @ seg) / length**2, 0.0), 1.0)
        if float(np.hypot(*(p - q1 - s * seg))) <= 0.25 * length:
            return True
    return any(abs(bb - b) <= 1e-12 and abs(aa - a) <= 1e-7 * (1 + abs(a)) for bb, aa in arc)


def trace_branch(n: int, m: int, b_range=(-6.0, 6.0), ctl: StepControl | None = None,
                 seed_grid: int = 61, tol: float = REAL_ZERO_TOL, family: QESFamily | None = None) -> Branch:
    """All arcs of the branch with n - 2m real zeros inside the b window."""
    if m < 0 or 2 * m > n:
        raise PolyUsageError(f"m must lie in [0, {n // 2}]")
    fam = family or build_family(n)
    lo, hi = float(b_range[0]), float(b_range[1])
    if lo >= hi:
        raise PolyUsageError("empty b window")
    branch = Branch(n=n, m=m)
    if n == 0:
        bs = np.linspace(lo, hi, seed_grid)
        branch.arc_starts.append(0)
        for b in bs:
            branch.samples.append((float(b), float(b * b), 0.0))
            branch.zerocounts.append((0, 0))
        return branch
    arcs = []
    curve = _Curve(fam)
    for seed in _seeds(fam, m, (lo, hi), seed_grid, tol):
        if any(_covered(curve, seed, arc) for arc in arcs):
            continue
        arcs.append(trace_arc(fam, seed[0], seed[1], m, (lo, hi), ctl, tol))
    for arc in arcs:
        branch.arc_starts.append(len(branch.samples))
        for b, a in arc:
            branch.samples.append((b, b * b - 2 * a, a))
            branch.zerocounts.append((n, real_zero_count(fam, a, b, tol)))
    return branch


def trace_locus(n: int, b_range=(-6.0, 6.0), ctl: StepControl | None = None, seed_grid: int = 61) -> list[Branch]:
    fam = build_family(n)
    return [trace_branch(n, m, b_range, ctl, seed_grid, family=fam) for m in range(n // 2 + 1)]


# ---------------------------------------------------------------------------
# checks at large b
# ---------------------------------------------------------------------------


@dataclass
class OrderingReport:
    n: int
    b: float
    lambdas: dict  # m -> sorted list of lam
    passed: bool
    inconclusive: bool


def classes_at(family: QESFamily, b: float, tol: float = REAL_ZERO_TOL) -> dict[int, list[float]]:
    out: dict[int, list[float]] = {}
    for a in real_points(family, b):
        out.setdefault(branch_index(family, a, b, tol), []).append(b * b - 2 * a)
    return {m: sorted(v) for m, v in sorted(out.items())}


def branch_ordering_check(n: int, b_large: float = 100.0) -> OrderingReport:
    """Every eigenvalue on branch m+1 exceeds every eigenvalue on branch m."""
    fam = build_family(n)
    lams = classes_at(fam, b_large)
    ms = list(range(n // 2 + 1))
    if any(m not in lams for m in ms):
        return OrderingReport(n, b_large, lams, False, True)
    ok = all(min(lams[m + 1]) > max(lams[m]) for m in ms[:-1])
    return OrderingReport(n, b_large, lams, ok, False)


def qes_critical_points(n: int, window=(-50, 50), precision=Fraction(1, 10**15)) -> list[CriticalPoint]:
    """Real (b, lam) with Q = dQ/dlam = 0."""
    fam = build_family(n)
    if n == 0:
        return []
    disc = discriminant_in(fam.qlambda, "lam")
    sf = squarefree_part(disc)
    out = []
    for lo, hi in isolate_real_roots(sf, window, precision):
        b = float((lo + hi) / 2)
        lam_roots = np.roots(fam.qlambda.numeric_coeffs("lam", b))
        best = None
        for i in range(len(lam_roots)):
            for j in range(i + 1, len(lam_roots)):
                d = abs(lam_roots[i] - lam_roots[j])
                if best is None or d < best[0]:
                    best = (d, (lam_roots[i] + lam_roots[j]) / 2)
        lam = best[1]
        if abs(lam.imag) <= 1e-6 * (1 + abs(lam)):
            out.append(CriticalPoint(b=b, lam=float(lam.real)))
    return out


def top_weight_product(n: int) -> BiPoly:
    """prod_k (a - (n - 2k) sqrt(b)) with the +- factors paired."""
    a = BiPoly.var("a", AB)
    b = BiPoly.var("b", AB)
    out = a if n % 2 == 0 else BiPoly.constant(1, AB)
    for c in range(n, 0, -2):
        out = out * (a * a - b.scale(c * c))
    return out


@dataclass
class TopWeightReport:
    n: int
    product: BiPoly
    top: BiPoly
    passed: bool


def top_weight_check(n: int) -> TopWeightReport:
    fam = build_family(n)
    prod = top_weight_product(n)
    top = top_weight_part(fam.qstar)
    return TopWeightReport(n, prod, top, prod == top)


@dataclass
class DiscriminantReport:
    n: int
    degree: int
    expected: int
    passed: bool
    disc: UniPoly


def discriminant_degree_check(n: int) -> DiscriminantReport:
    if n < 1:
        raise PolyUsageError("n must be >= 1")
    fam = build_family(n)
    d = discriminant_in_a(fam.qstar)
    exp = n * (n + 1) // 2
    return DiscriminantReport(n, d.degree, exp, d.degree == exp, d)


@dataclass
class AsymptoticReport:
    n: int
    b: float
    residuals: list
    exact: bool

    @property
    def max_abs(self) -> float:
        return max(abs(float(r)) for r in self.residuals)


def _harmonic_offset(n: int, k: int) -> int:
    return 2 * (2 * k + 1) - 2 * (n + 1)


def asymptotic_k_check(n: int, b: float = 1e4) -> AsymptoticReport:
    """r_k = (lam_k - b^2)/sqrt(b) - (2(2k+1) - 2(n+1)) over the sorted eigenvalues.

    When Q* equals its top-weight part the roots are a = t sqrt(b) with t
    the roots of Q*(t, 1); if those are rational the residuals are exact.
    """
    fam = build_family(n)
    if fam.qstar == top_weight_part(fam.qstar):
        t_poly = fam.qstar.specialize("b", 1)
        ts = _rational_roots(t_poly)
        if ts is not None and len(ts) == n + 1:
            # lam = b^2 - 2 t sqrt(b) so (lam - b^2)/sqrt(b) = -2t; sort by lam ascending
            ts = sorted(ts, reverse=True)
            res = [Fraction(-2) * t - _harmonic_offset(n, k) for k, t in enumerate(ts)]
            return AsymptoticReport(n, b, res, True)
    a_vals = real_points(fam, b)
    if len(a_vals) != n + 1:
        raise ContinuationError(f"only {len(a_vals)} real roots at b={b}; increase b")
    a_vals = sorted(a_vals, reverse=True)  # ascending lam
    sb = math.sqrt(b)
    res = [-2 * a / sb - _harmonic_offset(n, k) for k, a in enumerate(a_vals)]
    return AsymptoticReport(n, b, res, False)


def _integer_form(p: UniPoly) -> list[int]:
    from math import gcd

    den = 1
    for c in p.coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    return [int(c * den) for c in p.coeffs]


def _rational_roots(p: UniPoly):
    """All rational roots with multiplicity if p splits over Q, else None."""
    if p.degree < 1:
        return []
    roots = []
    q = p
    while q.degree >= 1:
        ints = _integer_form(q)
        if ints[0] == 0:
            roots.append(Fraction(0))
            q = q // UniPoly([0, 1], p.var)
            continue
        cands = (Fraction(s * u, v) for u in _divisors(ints[0]) for v in _divisors(ints[-1]) for s in (1, -1))
        found = next((r for r in cands if q(r) == 0), None)
        if found is None:
            return None
        roots.append(found)
        q = q // UniPoly([-found, 1], p.var)
    return roots


def _divisors(k: int):
    k = abs(k)
    return [d for d in range(1, k + 1) if k % d == 0]
