"""The polynomial family p_n and the spectral polynomials Q* and Q.

For ``J = n + 1`` the operator ``y'' - (z^4 - 2bz^2 + 2Jz) y`` has
eigenfunctions ``p(z) exp(z^3/3 - bz)`` with ``p`` of degree ``n`` exactly on
the curve ``Q*(b, a) = 0``, with eigenvalue ``lam = b^2 - 2a``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction

import numpy as np

from .polycore import BiPoly, PolyUsageError, complex_roots

DEFAULT_CAP = 16
AB = ("a", "b")
LB = ("lam", "b")


@dataclass(frozen=True)
class QESFamily:
    n: int
    coeffs: tuple  # a_0 .. a_n as BiPoly in (a, b); p = sum a_j z^(n-j)
    qstar: BiPoly
    qlambda: BiPoly

    @property
    def J(self) -> int:
        return self.n + 1

    @cached_property
    def dqstar_da(self) -> BiPoly:
        return self.qstar.derivative("a")

    @cached_property
    def dqstar_db(self) -> BiPoly:
        return self.qstar.derivative("b")

    def p_at(self, a, b) -> np.ndarray:
        """Descending numeric coefficients of p_n at (a, b)."""
        return np.array([eval_fast(c, a, b) for c in self.coeffs], dtype=complex)

    def p_exact(self, a, b) -> list[Fraction]:
        return [c(Fraction(a), Fraction(b)) for c in self.coeffs]

    def to_json(self) -> dict:
        return {
            "schema": "qes.family/1",
            "n": self.n,
            "coeffs": [c.to_json() for c in self.coeffs],
            "qstar": self.qstar.to_json(),
            "qlambda": self.qlambda.to_json(),
        }

    @classmethod
    def from_json(cls, doc) -> "QESFamily":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(
            n=int(doc["n"]),
            coeffs=tuple(BiPoly.from_json(c, AB) for c in doc["coeffs"]),
            qstar=BiPoly.from_json(doc["qstar"], AB),
            qlambda=BiPoly.from_json(doc["qlambda"], LB),
        )


@dataclass
class QESPoint:
    n: int
    b: complex
    a: complex
    lam: complex
    pcoeffs: np.ndarray  # descending, leading 1
    residual: float
    _roots: np.ndarray | None = field(default=None, repr=False)

    @property
    def roots(self) -> np.ndarray:
        if self._roots is None:
            self._roots = complex_roots(self.pcoeffs) if self.n >= 1 else np.zeros(0, complex)
        return self._roots

    def is_real(self, tol: float = 1e-12) -> bool:
        return abs(np.imag(self.a)) <= tol * (1 + abs(self.a)) and abs(np.imag(self.b)) == 0


def eval_fast(P: BiPoly, x, y):
    """Floating evaluation of a BiPoly."""
    return P.compiled()(x, y)


def scaled_residual(P: BiPoly, x, y) -> float:
    """|P(x, y)| divided by the sum of term magnitudes."""
    return P.compiled().scaled_residual(x, y)


def _recurrence_coeffs(n: int) -> list[BiPoly]:
    a = BiPoly.var("a", AB)
    b = BiPoly.var("b", AB)
    zero = BiPoly({}, AB)
    coeffs = [BiPoly.constant(1, AB)]

    def get(k):
        return coeffs[k] if k >= 0 else zero

    for j in range(1, n + 1):
        rhs = a * get(j - 1) - (b * get(j - 2)).scale(n - j + 2) + get(j - 3).scale(Fraction((n - j + 2) * (n - j + 3), 2))
        coeffs.append(rhs.scale(Fraction(1, j)))
    return coeffs


def constant_term_condition(n: int, coeffs=None) -> BiPoly:
    """Unnormalized constant term of p'' + 2h'p' - (2nz - 2a)p, divided by 2.

    Matching coefficients of that expression gives the recurrence for the a_j;
    what is left over at z^0 is ``a a_n - b a_{n-1} + a_{n-2}``.
    """
    if coeffs is None:
        coeffs = _recurrence_coeffs(n)
    a = BiPoly.var("a", AB)
    b = BiPoly.var("b", AB)
    zero = BiPoly({}, AB)

    def get(k):
        return coeffs[k] if k >= 0 else zero

    return a * get(n) - b * get(n - 1) + get(n - 2)


def build_family(n: int, cap: int = DEFAULT_CAP) -> QESFamily:
    if not isinstance(n, int) or n < 0:
        raise PolyUsageError(f"n must be a nonnegative integer, got {n!r}")
    if n > cap:
        raise PolyUsageError(f"n={n} exceeds the configured cap {cap}")
    coeffs = _recurrence_coeffs(n)
    raw = constant_term_condition(n, coeffs)
    lc = raw.lc_in("a")
    if lc.degree != 0:
        raise PolyUsageError("constant-term condition is not monic-normalizable in a")
    qstar = raw.scale(1 / lc.coeffs[0])
    return QESFamily(n=n, coeffs=tuple(coeffs), qstar=qstar, qlambda=q_in_lambda_from(qstar, n))


def q_in_lambda_from(qstar: BiPoly, n: int) -> BiPoly:
    lam = BiPoly.var("lam", LB)
    b = BiPoly.var("b", LB)
    sub = qstar.subs("a", (b * b - lam).scale(Fraction(1, 2)))
    out = sub.scale(Fraction(-2) ** (n + 1))
    lc = out.lc_in("lam")
    if lc.degree != 0 or lc.coeffs[0] != 1:
        raise PolyUsageError("Q is not monic in lam after substitution")
    return out


def q_in_lambda(family: QESFamily) -> BiPoly:
    return family.qlambda


def make_point(family: QESFamily, b, a) -> QESPoint:
    """Package (b, a) as a point; ``a`` need not lie on the locus."""
    pc = family.p_at(a, b)
    res = scaled_residual(family.qstar, a, b)
    return QESPoint(n=family.n, b=b, a=a, lam=b * b - 2 * a, pcoeffs=pc, residual=res)


def polish_root(family: QESFamily, b, a, steps: int = 3):
    """Newton steps on Q*(b, .) starting from ``a``."""
    dq = family.dqstar_da
    for _ in range(steps):
        d = eval_fast(dq, a, b)
        if d == 0:
            break
        a = a - eval_fast(family.qstar, a, b) / d
    return a


def roots_in_a(family: QESFamily, b) -> np.ndarray:
    if family.n == 0:
        return np.zeros(1, dtype=complex)
    c = family.qstar.numeric_coeffs("a", b)
    roots = complex_roots(c)
    return np.array([polish_root(family, b, r) for r in roots])


def eigenvalues_at(family: QESFamily, b) -> list[QESPoint]:
    """All QES points above ``b``, sorted by (Re lam, Im lam)."""
    pts = []
    for a in roots_in_a(family, b):
        a = complex(a)
        if isinstance(b, (int, float, Fraction)) and abs(a.imag) <= 1e-13 * (1 + abs(a)):
            a = a.real
        bb = float(b) if isinstance(b, (int, Fraction)) else b
        pts.append(make_point(family, bb, a))
    pts.sort(key=lambda p: (round(complex(p.lam).real, 10), complex(p.lam).imag))
    return pts


def random_locus_points(family: QESFamily, count: int, rng, b_range=(-3.0, 3.0)) -> list[QESPoint]:
    pts = []
    while len(pts) < count:
        b = float(rng.uniform(*b_range))
        cands = eigenvalues_at(family, b)
        pts.append(cands[int(rng.integers(len(cands)))])
    return pts


def pretty_p(family: QESFamily) -> str:
    """p_n in descending powers of z with (a, b) coefficients."""
    parts = []
    for j, c in enumerate(family.coeffs):
        k = family.n - j
        if c.is_zero():
            continue
        mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
        cs = str(c)
        if mono and cs == "1":
            term = mono
        elif mono:
            term = f"({cs})*{mono}"
        else:
            term = f"({cs})" if parts else cs
        parts.append(term)
    return " + ".join(parts) if parts else "0"
