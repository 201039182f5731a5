"""Airy function Ai and its derivative on the real line.

Near the origin the Maclaurin series is summed directly.  Farther out the
large-argument expansion is used in its Laplace-integral (Borel-summed)
form, evaluated with generalized Gauss-Laguerre quadrature:

    K_nu(zeta) = sqrt(pi/(2 zeta)) e^-zeta / Gamma(nu + 1/2)
                 * int_0^inf t^(nu - 1/2) e^-t (1 + t/(2 zeta))^(nu - 1/2) dt

and its Hankel analogue for negative arguments.  Unlike the truncated
asymptotic series this stays accurate to rounding level down to |x| ~ 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_genlaguerre

from .numeric import DOUBLE_BITS, precision_bits

SERIES_RADIUS = 4.5
UNDERFLOW_X = 104.0  # exp(-(2/3) x^1.5) underflows doubles beyond this
LAGUERRE_NODES = 64

AI0 = 3 ** (-2 / 3) / math.gamma(2 / 3)
AIP0 = -(3 ** (-1 / 3)) / math.gamma(1 / 3)


@dataclass(frozen=True)
class AiryValue:
    x: float
    ai: float
    aip: float
    error: float
    method: str
    underflow: bool = False


# ---------------------------------------------------------------------------
# Maclaurin series
# ---------------------------------------------------------------------------


def airy_series(x: float, bits: int | None = None) -> tuple[float, float]:
    """(Ai, Ai') from the Maclaurin series; extended precision above 53 bits."""
    bits = precision_bits(bits)
    if bits > DOUBLE_BITS:
        return _series_mp(x, bits)
    x3 = x * x * x
    # f = sum x^{3k} / prod, g = sum x^{3k+1} / prod, and their derivatives
    f = fp = g = gp = 0.0
    t, s = 1.0, x
    tp, sp = x * x / 2, 1.0
    k = 0
    while True:
        f += t
        g += s
        fp += tp
        gp += sp
        t *= x3 / ((3 * k + 2) * (3 * k + 3))
        s *= x3 / ((3 * k + 3) * (3 * k + 4))
        tp *= x3 / ((3 * k + 3) * (3 * k + 5))
        sp *= x3 / ((3 * k + 1) * (3 * k + 3))
        k += 1
        if k > 3 and max(abs(t), abs(s), abs(tp), abs(sp)) < 1e-18 * max(1.0, abs(f), abs(g), abs(fp), abs(gp)):
            break
    return AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp


def _series_mp(x: float, bits: int) -> tuple[float, float]:
    import mpmath

    with mpmath.workprec(bits):
        X = mpmath.mpf(x)
        x3 = X**3
        c1 = 1 / (mpmath.power(3, mpmath.mpf(2) / 3) * mpmath.gamma(mpmath.mpf(2) / 3))
        c2 = -1 / (mpmath.power(3, mpmath.mpf(1) / 3) * mpmath.gamma(mpmath.mpf(1) / 3))
        f = fp = g = gp = mpmath.mpf(0)
        t, s, tp, sp = mpmath.mpf(1), X, X * X / 2, mpmath.mpf(1)
        k = 0
        eps = mpmath.mpf(2) ** (-bits - 8)
        while True:
            f += t
            g += s
            fp += tp
            gp += sp
            t *= x3 / ((3 * k + 2) * (3 * k + 3))
            s *= x3 / ((3 * k + 3) * (3 * k + 4))
            tp *= x3 / ((3 * k + 3) * (3 * k + 5))
            sp *= x3 / ((3 * k + 1) * (3 * k + 3))
            k += 1
            if k > 3 and max(abs(t), abs(s), abs(tp), abs(sp)) < eps * max(1, abs(f), abs(g), abs(fp), abs(gp)):
                break
        return float(c1 * f + c2 * g), float(c1 * fp + c2 * gp)


# ---------------------------------------------------------------------------
# large-argument expansion, Laplace form
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _laguerre(alpha: float, n: int):
    return roots_genlaguerre(n, alpha)


def airy_laplace(x: float, nodes: int = LAGUERRE_NODES) -> tuple[float, float]:
    """(Ai, Ai') for |x| >= ~2 from the Laplace-integral form of the asymptotic expansion."""
    if x == 0:
        raise ValueError("the large-argument form needs x != 0")
    t1, w1 = _laguerre(-1 / 6, nodes)
    t2, w2 = _laguerre(1 / 6, nodes)
    ax = abs(x)
    zeta = 2.0 / 3.0 * ax**1.5
    g56 = math.gamma(5 / 6)
    g76 = math.gamma(7 / 6)
    if x > 0:
        pref = math.sqrt(math.pi / (2 * zeta)) * math.exp(-zeta)
        k13 = pref / g56 * float(np.sum(w1 * (1 + t1 / (2 * zeta)) ** (-1 / 6)))
        k23 = pref / g76 * float(np.sum(w2 * (1 + t2 / (2 * zeta)) ** (1 / 6)))
        return math.sqrt(ax / 3) / math.pi * k13, -ax / (math.pi * math.sqrt(3)) * k23
    pref = math.sqrt(2 / (math.pi * zeta))
    h13 = pref * np.exp(1j * (zeta - math.pi / 6 - math.pi / 4)) / g56 * np.sum(w1 * (1 + 1j * t1 / (2 * zeta)) ** (-1 / 6))
    h23 = pref * np.exp(1j * (zeta - math.pi / 3 - math.pi / 4)) / g76 * np.sum(w2 * (1 + 1j * t2 / (2 * zeta)) ** (1 / 6))
    ai = math.sqrt(ax / 3) * (np.exp(1j * math.pi / 6) * h13).real
    aip = ax / math.sqrt(3) * (np.exp(-1j * math.pi / 6) * h23).real
    return float(ai), float(aip)


def airy_poincare(x: float, max_terms: int = 60) -> tuple[float, float]:
    """Optimally truncated asymptotic series (for cross-checks at large |x|)."""
    ax = abs(x)
    zeta = 2.0 / 3.0 * ax**1.5
    # u_k and v_k coefficients of the standard expansion
    u = [1.0]
    v = [1.0]
    for k in range(1, max_terms):
        uk = u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        u.append(uk)
        v.append(-(6 * k + 1) / (6 * k - 1) * uk)

    def trunc(coefs, sign):
        # sum of coefs[k] * (sign/zeta)^k up to the smallest term
        total, last = 0.0, math.inf
        for k, c in enumerate(coefs):
            term = c * (sign / zeta) ** k
            if abs(term) > last:
                break
            total += term
            last = abs(term)
        return total

    if x > 0:
        e = math.exp(-zeta)
        ai = e / (2 * math.sqrt(math.pi) * ax**0.25) * trunc(u, -1.0)
        aip = -(ax**0.25) * e / (2 * math.sqrt(math.pi)) * trunc(v, -1.0)
        return ai, aip

    def split(coefs):
        even, odd = 0.0, 0.0
        last = math.inf
        for k, c in enumerate(coefs):
            term = c / zeta**k
            if abs(term) > last:
                break
            last = abs(term)
            if k % 2 == 0:
                even += (-1) ** (k // 2) * term
            else:
                odd += (-1) ** (k // 2) * term
        return even, odd

    ue, uo = split(u)
    ve, vo = split(v)
    ph = zeta - math.pi / 4
    ai = (math.cos(ph) * ue + math.sin(ph) * uo) / (math.sqrt(math.pi) * ax**0.25)
    aip = ax**0.25 * (math.sin(ph) * ve - math.cos(ph) * vo) / math.sqrt(math.pi)
    return ai, aip


# ---------------------------------------------------------------------------
# dispatcher
# ---------------------------------------------------------------------------


def airy(x: float, bits: int | None = None) -> AiryValue:
    x = float(x)
    if x > UNDERFLOW_X:
        return AiryValue(x, 0.0, -0.0, 0.0, "underflow", underflow=True)
    if abs(x) <= SERIES_RADIUS:
        ai, aip = airy_series(x, bits)
        return AiryValue(x, ai, aip, 1e-14 * max(1.0, math.exp(abs(x) ** 1.5 / 1.5) * 1e-2), "series")
    ai, aip = airy_laplace(x)
    return AiryValue(x, ai, aip, 1e-15 * max(1.0, abs(x)), "laplace")


def ai(x: float) -> float:
    return airy(x).ai


def airy_zeros(count: int, tol: float = 1e-13) -> list[float]:
    """First ``count`` zeros of Ai, by bracketing and bisection on ``airy``."""
    zeros = []
    x = 0.0
    prev = ai(x)
    while len(zeros) < count:
        step = min(0.1, 0.25 * math.pi / math.sqrt(max(abs(x), 1.0)))
        xn = x - step
        cur = ai(xn)
        if prev == 0:
            zeros.append(x)
        elif prev * cur < 0:
            lo, hi = xn, x
            flo = cur
            while hi - lo > tol * max(1.0, abs(lo)):
                mid = 0.5 * (lo + hi)
                fm = ai(mid)
                if fm == 0:
                    lo = hi = mid
                    break
                if (fm < 0) == (flo < 0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            zeros.append(0.5 * (lo + hi))
        x, prev = xn, cur
    return zeros[:count]
