"""Exact rational polynomial arithmetic.

Univariate polynomials (:class:`UniPoly`) store ascending ``Fraction``
coefficients.  Bivariate polynomials (:class:`BiPoly`) are a sparse map
``(i, j) -> Fraction`` for the monomial ``x**i * y**j`` where ``vars = (x, y)``.
In this package the second variable is always ``b``; the first is ``a`` for
``Q*`` and the ``a_j`` coefficients, or ``lam`` for ``Q``.

Floating evaluation uses Horner's scheme.  Nothing here mutates after
construction.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from numbers import Number, Rational as _RationalABC

import numpy as np

Rational = Fraction

VARIABLES = ("z", "a", "b", "lam", "s")


class PolyUsageError(ValueError):
    """Incompatible variable tags or an operation outside its domain."""


class NonSquarefreeError(ValueError):
    """Raised by root isolation when the input has a repeated root."""

    def __init__(self, witness: "UniPoly"):
        self.witness = witness
        super().__init__(f"polynomial is not squarefree; gcd(P, P') = {witness}")


class RootFindingError(RuntimeError):
    def __init__(self, message: str, residuals=None):
        self.residuals = residuals
        super().__init__(message)


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, _RationalABC)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise PolyUsageError(f"exact coefficient required, got {type(c).__name__}")


def _fmt_coeff_term(c: Fraction, mono: str, first: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    mag = abs(c)
    if mono == "":
        body = str(mag)
    elif mag == 1:
        body = mono
    elif mag.denominator == 1:
        body = f"{mag.numerator}*{mono}"
    else:
        body = f"{mag.numerator}/{mag.denominator}*{mono}"
    if first:
        return sign + body
    return f" {sign} {body}"


def _mono(var: str, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return var
    return f"{var}^{k}"


# ---------------------------------------------------------------------------
# univariate
# ---------------------------------------------------------------------------


class UniPoly:
    """Exact polynomial in one variable, coefficients ascending."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs=(), var: str = "z"):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var", var)

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    @classmethod
    def monomial(cls, k: int, c=1, var: str = "z") -> "UniPoly":
        return cls([0] * k + [c], var)

    @classmethod
    def constant(cls, c, var: str = "z") -> "UniPoly":
        return cls([c], var)

    @classmethod
    def from_roots(cls, roots, var: str = "z") -> "UniPoly":
        p = cls([1], var)
        for r in roots:
            p = p * cls([-_frac(r), 1], var)
        return p

    # -- structure ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def monic(self) -> "UniPoly":
        if self.is_zero():
            raise PolyUsageError("zero polynomial has no monic form")
        return self.scale(1 / self.lc())

    def _check(self, other: "UniPoly"):
        if self.var != other.var and self.degree > 0 and other.degree > 0:
            raise PolyUsageError(f"variable mismatch: {self.var} vs {other.var}")

    def _coerce(self, other):
        if isinstance(other, UniPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, _RationalABC)):
            return UniPoly([other], self.var)
        return NotImplemented

    def _var_of(self, other: "UniPoly") -> str:
        if self.degree <= 0:
            return other.var
        return self.var

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self.coeff(k) + other.coeff(k) for k in range(n)], self._var_of(other))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return UniPoly([], self._var_of(other))
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, c in enumerate(self.coeffs):
            if c:
                for j, d in enumerate(other.coeffs):
                    out[i + j] += c * d
        return UniPoly(out, self._var_of(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PolyUsageError("negative power")
        result = UniPoly([1], self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "UniPoly":
        c = _frac(c)
        return UniPoly([c * x for x in self.coeffs], self.var)

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs and (self.var == other.var or self.degree <= 0)
        if isinstance(other, (int, Fraction)):
            return self.coeffs == UniPoly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.var))

    def derivative(self, var: str | None = None) -> "UniPoly":
        if var is not None and var != self.var:
            if self.degree <= 0:
                return UniPoly([], self.var)
            raise PolyUsageError(f"cannot differentiate {self.var}-polynomial in {var}")
        return UniPoly([k * c for k, c in enumerate(self.coeffs)][1:], self.var)

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        inv = 1 / other.lc()
        quot = [Fraction(0)] * max(0, len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] * inv
            if c:
                quot[k - dq] = c
                for j, d in enumerate(other.coeffs):
                    rem[k - dq + j] -= c * d
        return UniPoly(quot, self.var), UniPoly(rem[:dq], self.var)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def compose(self, inner: "UniPoly") -> "UniPoly":
        """``self(inner(t))``, result in ``inner``'s variable."""
        out = UniPoly([], inner.var)
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out

    # -- evaluation --------------------------------------------------------
    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
        else:
            acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(acc, Fraction) else float(c))
        return acc

    def sign_at(self, x: Fraction) -> int:
        v = self(_frac(x))
        return (v > 0) - (v < 0)

    def to_numpy(self, dtype=complex) -> np.ndarray:
        """Descending coefficient array (numpy ``polyval`` order)."""
        return np.array([float(c) for c in reversed(self.coeffs)] or [0.0], dtype=dtype)

    # -- display -----------------------------------------------------------
    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c:
                parts.append(_fmt_coeff_term(c, _mono(self.var, k), not parts))
        return "".join(parts)

    def __repr__(self):
        return f"UniPoly({self}, var={self.var!r})"


def poly_gcd(f: UniPoly, g: UniPoly) -> UniPoly:
    """Monic gcd over Q (zero if both are zero)."""
    while not g.is_zero():
        f, g = g, f % g
    return f if f.is_zero() else f.monic()


def resultant(f: UniPoly, g: UniPoly) -> Fraction:
    """Resultant over Q via the Euclidean remainder sequence."""
    f._check(g)
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    res = Fraction(1)
    while True:
        m, n = f.degree, g.degree
        if n == 0:
            return res * g.lc() ** m
        r = f % g
        if r.is_zero():
            return Fraction(0)
        if (m * n) % 2:
            res = -res
        res *= g.lc() ** (m - r.degree)
        f, g = g, r


def discriminant(f: UniPoly) -> Fraction:
    d = f.degree
    if d < 1:
        raise PolyUsageError("discriminant needs degree >= 1")
    if d == 1:
        return Fraction(1)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative()) / f.lc()


# ---------------------------------------------------------------------------
# bivariate
# ---------------------------------------------------------------------------


class CompiledPoly:
    """Floating evaluator for a fixed BiPoly: sum of c * x**i * y**j."""

    __slots__ = ("c", "i", "j", "imax", "jmax")

    def __init__(self, terms: dict):
        items = sorted(terms.items())
        self.c = np.array([float(v) for _, v in items])
        self.i = np.array([k[0] for k, _ in items], dtype=int)
        self.j = np.array([k[1] for k, _ in items], dtype=int)
        self.imax = int(self.i.max()) if items else 0
        self.jmax = int(self.j.max()) if items else 0

    def _terms(self, x, y):
        xp = np.power(x, np.arange(self.imax + 1))
        yp = np.power(y, np.arange(self.jmax + 1))
        return self.c * xp[self.i] * yp[self.j]

    def __call__(self, x, y):
        if not self.c.size:
            return 0.0
        return self._terms(x, y).sum()

    def scaled_residual(self, x, y) -> float:
        """|value| over the sum of term magnitudes, with |x|, |y| floored at 1
        in the scale so that points near the origin are not judged 0/0."""
        if not self.c.size:
            return 0.0
        val = self._terms(x, y).sum()
        mag = np.abs(self._terms(max(abs(x), 1.0), max(abs(y), 1.0))).sum()
        return float(abs(val) / mag)


class BiPoly:
    """Sparse exact polynomial in two variables ``vars = (x, y)``."""

    __slots__ = ("terms", "vars", "_compiled")

    def __init__(self, terms=None, vars: tuple[str, str] = ("a", "b")):
        clean = {}
        for key, c in (terms or {}).items():
            c = _frac(c)
            if c:
                clean[(int(key[0]), int(key[1]))] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "vars", tuple(vars))
        object.__setattr__(self, "_compiled", None)

    def __setattr__(self, name, value):
        raise AttributeError("BiPoly is immutable")

    @classmethod
    def var(cls, name: str, vars=("a", "b")) -> "BiPoly":
        if name not in vars:
            raise PolyUsageError(f"{name} not in {vars}")
        key = (1, 0) if name == vars[0] else (0, 1)
        return cls({key: 1}, vars)

    @classmethod
    def constant(cls, c, vars=("a", "b")) -> "BiPoly":
        return cls({(0, 0): c}, vars)

    @classmethod
    def from_unipoly(cls, p: UniPoly, vars=("a", "b")) -> "BiPoly":
        if p.var == vars[0] or p.degree <= 0:
            return cls({(k, 0): c for k, c in enumerate(p.coeffs)}, vars)
        if p.var == vars[1]:
            return cls({(0, k): c for k, c in enumerate(p.coeffs)}, vars)
        raise PolyUsageError(f"{p.var} not in {vars}")

    def compiled(self) -> CompiledPoly:
        """Cached floating evaluator (the exact terms never change)."""
        if self._compiled is None:
            object.__setattr__(self, "_compiled", CompiledPoly(self.terms))
        return self._compiled

    # -- structure ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def _index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise PolyUsageError(f"{var} is not a variable of {self.vars}") from None

    def degree_in(self, var: str) -> int:
        i = self._index(var)
        return max((k[i] for k in self.terms), default=-1)

    def coeffs_in(self, var: str) -> list[UniPoly]:
        """Coefficients of powers of ``var`` as polynomials in the other variable."""
        i = self._index(var)
        other = self.vars[1 - i]
        d = self.degree_in(var)
        buckets = [dict() for _ in range(d + 1)]
        for key, c in self.terms.items():
            buckets[key[i]][key[1 - i]] = c
        out = []
        for bk in buckets:
            top = max(bk, default=-1)
            out.append(UniPoly([bk.get(k, 0) for k in range(top + 1)], other))
        return out

    @classmethod
    def from_coeffs_in(cls, var: str, coeffs, vars) -> "BiPoly":
        i = vars.index(var)
        terms = {}
        for p, up in enumerate(coeffs):
            for q, c in enumerate(up.coeffs):
                key = (p, q) if i == 0 else (q, p)
                terms[key] = c
        return cls(terms, vars)

    def lc_in(self, var: str) -> UniPoly:
        return self.coeffs_in(var)[-1]

    def weight(self) -> int:
        """Largest ``i + 2*j`` over the support."""
        if self.is_zero():
            raise PolyUsageError("zero polynomial has no weight")
        return max(i + 2 * j for i, j in self.terms)

    def _check(self, other: "BiPoly"):
        if self.vars != other.vars:
            raise PolyUsageError(f"variable mismatch: {self.vars} vs {other.vars}")

    def _coerce(self, other):
        if isinstance(other, BiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, _RationalABC)):
            return BiPoly.constant(other, self.vars)
        if isinstance(other, UniPoly):
            return BiPoly.from_unipoly(other, self.vars)
        return NotImplemented

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BiPoly(out, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({k: -c for k, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + c1 * c2
        return BiPoly(out, self.vars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise PolyUsageError("negative power")
        result = BiPoly.constant(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "BiPoly":
        c = _frac(c)
        return BiPoly({k: c * v for k, v in self.terms.items()}, self.vars)

    def __eq__(self, other):
        if isinstance(other, BiPoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == BiPoly.constant(other, self.vars).terms
        return NotImplemented

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.vars))

    def derivative(self, var: str) -> "BiPoly":
        i = self._index(var)
        out = {}
        for key, c in self.terms.items():
            if key[i]:
                nk = (key[0] - 1, key[1]) if i == 0 else (key[0], key[1] - 1)
                out[nk] = c * key[i]
        return BiPoly(out, self.vars)

    def subs(self, var: str, expr) -> "BiPoly":
        """Substitute ``expr`` for ``var``.

        ``expr`` is a BiPoly whose variables contain the remaining variable
        of ``self``; the result lives in ``expr.vars``.
        """
        i = self._index(var)
        other = self.vars[1 - i]
        if isinstance(expr, UniPoly):
            expr = BiPoly.from_unipoly(expr, self.vars if expr.var == other else (expr.var, other))
        if other not in expr.vars:
            raise PolyUsageError(f"substitution must keep {other}")
        ov = BiPoly.var(other, expr.vars)
        powers_e = {0: BiPoly.constant(1, expr.vars)}
        powers_o = {0: BiPoly.constant(1, expr.vars)}
        out = BiPoly({}, expr.vars)
        for key, c in self.terms.items():
            pe, po = key[i], key[1 - i]
            if pe not in powers_e:
                powers_e[pe] = expr ** pe
            if po not in powers_o:
                powers_o[po] = ov ** po
            out = out + (powers_e[pe] * powers_o[po]).scale(c)
        return out

    def specialize(self, var: str, value) -> UniPoly:
        """Fix ``var`` to an exact value; returns a polynomial in the other variable."""
        i = self._index(var)
        other = self.vars[1 - i]
        value = _frac(value)
        out: dict[int, Fraction] = {}
        for key, c in self.terms.items():
            out[key[1 - i]] = out.get(key[1 - i], 0) + c * value ** key[i]
        top = max(out, default=-1)
        return UniPoly([out.get(k, 0) for k in range(top + 1)], other)

    def numeric_coeffs(self, var: str, value) -> np.ndarray:
        """Descending complex coefficients in ``var`` after fixing the other variable to ``value``."""
        i = self._index(var)
        d = self.degree_in(var)
        out = np.zeros(d + 1, dtype=complex)
        for up_k, up in enumerate(self.coeffs_in(var)):
            out[d - up_k] = _horner(up.coeffs, value)
        return out

    def __call__(self, *args, **kwargs):
        """Evaluate at exact or floating values given positionally or by name."""
        if kwargs:
            args = tuple(kwargs[v] for v in self.vars)
        x, y = args
        exact = all(isinstance(v, (int, Fraction)) for v in args)
        total = Fraction(0) if exact else 0.0
        # Horner in x over coefficients that are polynomials in y
        for up in reversed(self.coeffs_in(self.vars[0])):
            total = total * x + (up(y) if exact else _horner(up.coeffs, y))
        return total

    def top_weight_part(self) -> "BiPoly":
        w = self.weight()
        return BiPoly({k: c for k, c in self.terms.items() if k[0] + 2 * k[1] == w}, self.vars)

    # -- display -----------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (-(kv[0][0] + 2 * kv[0][1]), -kv[0][0], kv[0][1]))

    def __str__(self):
        if self.is_zero():
            return "0"
        x, y = self.vars
        parts = []
        for (i, j), c in self.sorted_terms():
            mono = "*".join(m for m in (_mono(x, i), _mono(y, j)) if m)
            parts.append(_fmt_coeff_term(c, mono, not parts))
        return "".join(parts)

    def __repr__(self):
        return f"BiPoly({self}, vars={self.vars!r})"

    def to_json(self) -> list[list[int]]:
        return [[i, j, c.numerator, c.denominator] for (i, j), c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, rows, vars=("a", "b")) -> "BiPoly":
        return cls({(r[0], r[1]): Fraction(r[2], r[3]) for r in rows}, vars)


def _horner(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + float(c)
    return acc


# ---------------------------------------------------------------------------
# resultants in the first variable with coefficients in Q[b]
# ---------------------------------------------------------------------------


def _interpolate(xs, ys, var) -> UniPoly:
    """Newton divided differences, exact."""
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = UniPoly([coef[-1]], var)
    for i in range(n - 2, -1, -1):
        out = out * UniPoly([-xs[i], 1], var) + coef[i]
    return out


def discriminant_in(P: BiPoly, var: str = "a") -> UniPoly:
    """Discriminant of ``P`` with respect to ``var``, as an exact polynomial in the other variable.

    ``disc = (-1)^(d(d-1)/2) Res(P, dP/dvar) / lc(P)``.  Computed by exact
    evaluation at integer points of the other variable and interpolation; the
    number of points exceeds the Sylvester-determinant degree bound.
    """
    d = P.degree_in(var)
    if d < 1:
        raise PolyUsageError(f"polynomial is constant in {var}")
    other = P.vars[1 - P._index(var)]
    if d == 1:
        return UniPoly([1], other)
    cols = P.coeffs_in(var)
    lc = cols[-1]
    deg_bound = (2 * d - 1) * max(c.degree for c in cols if not c.is_zero()) - max(lc.degree, 0)
    need = max(deg_bound, 0) + 1
    xs, ys = [], []
    t = 0
    while len(xs) < need:
        cand = Fraction((t + 1) // 2 * (1 if t % 2 else -1))
        t += 1
        lcv = lc(cand)
        if lcv == 0:
            continue
        specialized = UniPoly([c(cand) for c in cols], var)
        xs.append(cand)
        ys.append(discriminant(specialized))
    return _interpolate(xs, ys, other)


def discriminant_in_a(P: BiPoly) -> UniPoly:
    return discriminant_in(P, P.vars[0])


def top_weight_part(P: BiPoly) -> BiPoly:
    return P.top_weight_part()


# ---------------------------------------------------------------------------
# real root isolation (Sturm)
# ---------------------------------------------------------------------------


def squarefree_part(P: UniPoly) -> UniPoly:
    g = poly_gcd(P, P.derivative())
    if g.degree <= 0:
        return P
    return P // g


def sturm_sequence(P: UniPoly) -> list[UniPoly]:
    seq = [P, P.derivative()]
    while not seq[-1].is_zero():
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        seq.append(-r)
    return seq


def _sign_changes(seq, x: Fraction) -> int:
    signs = [s for s in (p.sign_at(x) for p in seq) if s]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def count_real_roots(P: UniPoly, lo, hi) -> int:
    """Distinct real roots in the half-open interval (lo, hi]."""
    seq = sturm_sequence(P)
    return _sign_changes(seq, _frac(lo)) - _sign_changes(seq, _frac(hi))


def isolate_real_roots(P: UniPoly, interval=(-10, 10), precision=Fraction(1, 10**6)):
    """Disjoint isolating intervals ``(lo, hi)`` of width <= ``precision``.

    Every real root in the closed interval lies in exactly one returned pair.
    An exact rational root found along the way is returned as ``(r, r)``.
    """
    if P.degree < 1:
        return []
    g = poly_gcd(P, P.derivative())
    if g.degree >= 1:
        raise NonSquarefreeError(g)
    lo, hi = _frac(interval[0]), _frac(interval[1])
    if lo > hi:
        raise PolyUsageError("empty interval")
    precision = _frac(precision)
    seq = sturm_sequence(P)
    out = []
    if P.sign_at(lo) == 0:
        out.append((lo, lo))
    # Sturm counts roots in (a, b]; bisection points that are roots are
    # recorded exactly and excluded from both halves.
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = _sign_changes(seq, a) - _sign_changes(seq, b)
        if n == 0:
            continue
        if P.sign_at(b) == 0:
            out.append((b, b))
            n -= 1
            if n == 0:
                continue
            # shrink b off the exact root
            nb = b - (b - a) / 2
            while _sign_changes(seq, nb) - _sign_changes(seq, b) != 1:
                nb = b - (b - nb) / 2
            b = nb
            n = _sign_changes(seq, a) - _sign_changes(seq, b)
            if n == 0:
                continue
        if n == 1:
            out.append(_refine(P, a, b, precision))
            continue
        m = (a + b) / 2
        stack.append((a, m))
        stack.append((m, b))
    return sorted(set(out))


def _refine(P: UniPoly, a: Fraction, b: Fraction, precision: Fraction):
    """Bisect an interval (a, b] holding exactly one simple root."""
    sb = P.sign_at(b)
    if sb == 0:
        return (b, b)
    while b - a > precision:
        m = (a + b) / 2
        sm = P.sign_at(m)
        if sm == 0:
            return (m, m)
        if sm == sb:
            b = m
        else:
            a = m
    return (a, b)


# ---------------------------------------------------------------------------
# numeric complex roots (Aberth-Ehrlich)
# ---------------------------------------------------------------------------


def _horner_with_bound(c, dc, absc, z):
    """p(z), p'(z) and sum |c_k| |z|^k at all points at once."""
    az = np.abs(z)
    p = np.full_like(z, c[0])
    bound = np.full(z.shape, absc[0])
    for ck, ak in zip(c[1:], absc[1:]):
        p = p * z + ck
        bound = bound * az + ak
    dp = np.full_like(z, dc[0])
    for ck in dc[1:]:
        dp = dp * z + ck
    return p, dp, bound


def complex_roots(coeffs, tol: float = 1e-12, maxiter: int = 500) -> np.ndarray:
    """All complex roots of a numeric polynomial by simultaneous iteration.

    ``coeffs`` are descending (leading first).  Roots are refined together by
    the Aberth-Ehrlich correction, polished by Newton steps, and returned
    sorted by real then imaginary part.
    """
    c = np.asarray(coeffs, dtype=complex)
    nz = np.flatnonzero(np.abs(c) > 0)
    if nz.size == 0:
        raise PolyUsageError("zero polynomial")
    if c.size < 2:
        raise PolyUsageError("degree must be >= 1")
    # judge the leading coefficient after scaling z to the root radius, so a
    # monic polynomial with large roots is not mistaken for a degree drop
    with np.errstate(divide="ignore", over="ignore"):
        ratios = np.abs(c[1:]) / abs(c[0])
        radius = max(ratios[k] ** (1.0 / (k + 1)) for k in range(c.size - 1))
    if c[0] == 0 or not np.isfinite(radius):
        raise PolyUsageError("leading coefficient numerically negligible")
    c = c / c[0]
    n = c.size - 1
    if n == 1:
        return np.array([-c[1]])
    dc = c[:-1] * np.arange(n, 0, -1)
    absc = np.abs(c[1:])
    # Fujiwara bound, then a spread of starting radii for conditioning
    radius = 2 * max(absc[k] ** (1.0 / (k + 1)) for k in range(n)) if absc.any() else 1.0
    radius = max(radius, 1e-8)
    angles = 2 * math.pi * np.arange(n) / n + 0.4
    z = 0.5 * radius * np.exp(1j * angles)
    absc_all = np.abs(c)
    eps = np.finfo(float).eps
    done = np.zeros(n, dtype=bool)
    for _ in range(maxiter):
        p, dp, bound = _horner_with_bound(c, dc, absc_all, z)
        # a root is finished once |p| sits at the rounding-error floor
        done |= np.abs(p) <= 8 * eps * bound
        if done.all():
            break
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            w = ratio / (1 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        w[done] = 0.0
        z = z - w
        done |= np.abs(w) <= 4 * eps * np.abs(z)
    # Newton polish
    for _ in range(2):
        p, dp, _b = _horner_with_bound(c, dc, absc_all, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.abs(dp) > 0, p / np.where(dp == 0, 1, dp), 0)
        cand = z - step
        pc_, _d, _b2 = _horner_with_bound(c, dc, absc_all, cand)
        z = np.where(np.abs(pc_) < np.abs(p), cand, z)
    absz = np.abs(z)
    scale = np.polyval(np.abs(c), absz)
    resid = np.abs(np.polyval(c, z))
    bad = resid > tol * scale
    if bad.any():
        raise RootFindingError(
            f"Aberth iteration did not converge ({bad.sum()} of {n} roots); max rel residual "
            f"{float(np.max(resid / scale)):.3e}",
            residuals=resid / scale,
        )
    key_re = np.round(z.real, 9)
    order = np.lexsort((z.imag, key_re))
    return z[order]
