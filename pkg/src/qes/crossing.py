"""Level crossings between the QES eigenvalue and the rest of the spectrum.

Along the branch where p_n has no real zeros (n even) the integral
Phi_n(b) = int p^2 exp(2h) dz over the contour from inf*e^{-i pi/3} to
inf*e^{i pi/3} reduces to Airy functions: with s = 2^{2/3} b,

    int z^k exp((2/3)z^3 - 2bz) dz  ~  (-1/2)^k 2^{2k/3} Ai^(k)(s),

and Ai^(k) = u_k Ai + v_k Ai' by the Airy equation.  The common factor
2^{2/3} i pi is dropped.  Zeros of Phi_n are level crossings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .airy import airy
from .locus import branch_index, real_points
from .polycore import PolyUsageError, UniPoly
from .qesfamily import QESFamily, build_family

TWO23 = 2.0 ** (2.0 / 3.0)


class BranchSelectionError(ValueError):
    def __init__(self, b: float, candidates):
        self.b = b
        self.candidates = list(candidates)
        super().__init__(f"no unique real a with zero real zeros at b={b}; candidates {self.candidates}")


@dataclass
class CrossingPoint:
    n: int
    k: int
    b: float
    a: float
    lam: float
    residual: float
    bracket_width: float


@lru_cache(maxsize=None)
def derivative_reduction(k: int) -> tuple[UniPoly, UniPoly]:
    """(u_k, v_k) with Ai^(k)(s) = u_k(s) Ai(s) + v_k(s) Ai'(s)."""
    if k < 0:
        raise PolyUsageError("k must be >= 0")
    if k == 0:
        return UniPoly([1], "s"), UniPoly([], "s")
    u, v = derivative_reduction(k - 1)
    s = UniPoly([0, 1], "s")
    return u.derivative() + s * v, u + v.derivative()


def select_branch_root(family: QESFamily, b: float) -> float:
    """The real root a of Q*(b, .) whose p_n has no real zeros."""
    m = family.n // 2
    cands = [a for a in real_points(family, b) if branch_index(family, a, b) == m]
    if len(cands) != 1:
        raise BranchSelectionError(b, cands)
    return cands[0]


def phi_from_p(pc_desc, b: float) -> float:
    """Sum over p^2 = sum c_k z^k of c_k (-1/2)^k 2^{2k/3} Ai^(k)(2^{2/3} b)."""
    sq = np.polymul(pc_desc, pc_desc)[::-1]  # ascending
    s = TWO23 * b
    av = airy(s)
    total = 0.0
    for k, c in enumerate(sq):
        if c == 0:
            continue
        u, v = derivative_reduction(k)
        dk = u(s) * av.ai + v(s) * av.aip
        total += float(np.real(c)) * (-0.5) ** k * TWO23**k * dk
    return total


def phi(n: int, b: float, family: QESFamily | None = None) -> float:
    """Phi_n(b) up to the constant 2^{2/3} i pi, on the branch with no real zeros."""
    if n % 2:
        raise PolyUsageError("phi is available for even n only")
    fam = family or build_family(n)
    if n == 0:
        return airy(TWO23 * b).ai
    a = select_branch_root(fam, b)
    return phi_from_p(fam.p_at(a, b).real, b)


def phi_with_a(n: int, b: float, family: QESFamily | None = None) -> tuple[float, float]:
    fam = family or build_family(n)
    if n == 0:
        return airy(TWO23 * b).ai, 0.0
    a = select_branch_root(fam, b)
    return phi_from_p(fam.p_at(a, b).real, b), a


def _scan(f, count: int, b_start: float, step_factor: float, b_floor: float):
    """Walk b downward collecting sign-change brackets of f."""
    brackets = []
    b = b_start
    fb = f(b)
    while len(brackets) < count:
        wavelength = math.pi / (TWO23 * math.sqrt(max(TWO23 * abs(b), 1.0)))
        h = step_factor * wavelength
        bn = b - h
        if bn < b_floor:
            raise RuntimeError(f"fewer than {count} sign changes above b={b_floor}")
        fn = f(bn)
        if fb == 0:
            brackets.append((b, b))
        elif fb * fn < 0:
            brackets.append((bn, b))
        b, fb = bn, fn
    return brackets


def find_crossings(n: int, count: int, b_start: float = 0.0, xtol: float = 1e-13, b_floor: float = -1e4,
                   max_halvings: int = 4) -> list[CrossingPoint]:
    """First ``count`` zeros of Phi_n on b < b_start, scanning downward.

    The scan step is a quarter of the local Airy wavelength.  The scan is
    repeated at half the step; if the brackets disagree the step is halved
    again, which catches two zeros hiding inside one step.
    """
    if n % 2:
        raise PolyUsageError("crossings are computed for even n only")
    fam = build_family(n)

    def f(b):
        return phi(n, b, fam)

    factor = 0.25
    brackets = _scan(f, count, b_start, factor, b_floor)
    for _ in range(max_halvings):
        finer = _scan(f, count, b_start, factor / 2, b_floor)
        if _same_roots(brackets, finer):
            break
        factor /= 2
        brackets = finer
    out = []
    for k, (lo, hi) in enumerate(brackets, start=1):
        if lo == hi:
            b = lo
        else:
            b = brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
        val, a = phi_with_a(n, b, fam)
        out.append(CrossingPoint(n=n, k=k, b=b, a=a, lam=b * b - 2 * a, residual=abs(val),
                                 bracket_width=hi - lo))
    return out


def _same_roots(coarse, fine) -> bool:
    """Each coarse bracket overlaps the fine bracket at the same index."""
    for (lo1, hi1), (lo2, hi2) in zip(coarse, fine):
        if hi2 < lo1 or hi1 < lo2:
            return False
    return True


def asymptotic_crossing(k: int) -> float:
    return -((0.75 * math.pi * k) ** (2.0 / 3.0))


def phi_quadrature(n: int, b: float, R: float = 8.0, family: QESFamily | None = None) -> float:
    """Independent value of phi by contour quadrature, divided by 2^{2/3} i pi."""
    from .identity import contour_integral, default_vertices

    fam = family or build_family(n)
    if n == 0:
        pc = np.array([1.0])
    else:
        pc = fam.p_at(select_branch_root(fam, b), b).real

    def f(z):
        return np.polyval(pc, z) ** 2 * np.exp(2 * (z**3 / 3 - b * z))

    val = contour_integral(f, default_vertices(b, R))
    return (val / (TWO23 * 1j * math.pi)).real
