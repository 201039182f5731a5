"""Certificates for the polynomial identity

    p(z)^2 p(-z)^2 - C = q'(z) p(z) - q(z) p'(z) - 2 q(z) p(z) h'(z)

and its integrated form along the contour from inf*e^{-i pi/3} to inf*e^{i pi/3}.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from .polycore import BiPoly, PolyUsageError, UniPoly
from .numeric import DOUBLE_BITS, certificate_bits, precision_bits as precision_bits_setting
from .qesfamily import AB, QESFamily, QESPoint, build_family, eval_fast, make_point, random_locus_points

CERT_TOL = 1e-8
COND_LIMIT = 1e13


class IllConditionedError(RuntimeError):
    def __init__(self, cond: float):
        self.cond = cond
        super().__init__(f"certificate system is ill-conditioned (cond ~ {cond:.2e})")


class PathTooCloseToPoleError(ValueError):
    def __init__(self, pole: complex, distance: float):
        self.pole = pole
        self.distance = distance
        super().__init__(
            f"pole of p(-z)^-2 at {pole:.6g} lies {distance:.2e} from the path; "
            "pass different vertices to bend the contour around it"
        )


# ---------------------------------------------------------------------------
# numeric certificate
# ---------------------------------------------------------------------------


@dataclass
class IdentityCertificate:
    point: QESPoint
    qcoeffs: np.ndarray  # ascending
    C: complex
    residual: float
    certified: bool
    degree: int
    cond: float


def _mirror(pc_desc: np.ndarray) -> np.ndarray:
    """Coefficients of p(-z) from those of p(z), descending."""
    d = len(pc_desc) - 1
    signs = np.array([(-1) ** (d - i) for i in range(d + 1)])
    return pc_desc * signs


def certificate_system(pc_desc: np.ndarray, b, qdeg: int):
    """Linear system A x = rhs for x = (q_0 .. q_qdeg, C), ascending powers of z."""
    p = np.asarray(pc_desc, dtype=complex)
    n = len(p) - 1
    p_asc = p[::-1]
    dp_asc = np.polyder(p)[::-1] if n >= 1 else np.zeros(1, complex)
    hp_asc = np.array([-b, 0, 1], dtype=complex)
    pp_h = np.convolve(p_asc, hp_asc)  # p h'
    rows = max(4 * n, qdeg + n + 2) + 1
    A = np.zeros((rows, qdeg + 2), dtype=complex)
    for k in range(qdeg + 1):
        col = np.zeros(rows, dtype=complex)
        if k >= 1:
            col[k - 1 : k - 1 + len(p_asc)] += k * p_asc
        col[k : k + len(dp_asc)] -= dp_asc
        col[k : k + len(pp_h)] -= 2 * pp_h
        A[:, k] = col
    A[0, qdeg + 1] = 1.0
    sq = np.convolve(p_asc, p_asc)
    rhs_full = np.convolve(sq, _mirror(np.convolve(p, p))[::-1])
    rhs = np.zeros(rows, dtype=complex)
    rhs[: len(rhs_full)] = rhs_full
    return A, rhs


def _componentwise_residual(A, x, rhs) -> float:
    """max_i |(Ax - rhs)_i| / (sum_j |A_ij x_j| + |rhs_i|)."""
    r = np.abs(A @ x - rhs)
    scale = np.abs(A) @ np.abs(x) + np.abs(rhs)
    mask = scale > 0
    return float(np.max(r[mask] / scale[mask])) if mask.any() else 0.0


def _solve_double(point: QESPoint, qdeg: int):
    A, rhs = certificate_system(point.pcoeffs, point.b, qdeg)
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    As = A / norms
    x, *_ = np.linalg.lstsq(As, rhs, rcond=None)
    sv = np.linalg.svd(As, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    return A, rhs, x / norms, cond


def _solve_extended(point: QESPoint, qdeg: int, bits: int, family: QESFamily | None):
    """Same least-squares problem in mpmath at ``bits`` of precision.

    The point's (a, b) are taken as exact binary values, so an off-locus
    point stays off the locus.
    """
    import mpmath

    fam = family or build_family(point.n)
    with mpmath.workprec(bits):
        a = mpmath.mpc(point.a)
        b = mpmath.mpc(point.b)
        pc = [_mp_eval(c, a, b) for c in fam.coeffs]
        A, rhs = _mp_system(pc, b, qdeg)
        # column equilibration, as in the double path
        norms = [mpmath.sqrt(sum(abs(A[i, j]) ** 2 for i in range(A.rows))) or 1 for j in range(A.cols)]
        As = A.copy()
        for j in range(A.cols):
            for i in range(A.rows):
                As[i, j] /= norms[j]
        xs, _ = mpmath.qr_solve(As, rhs)
        x = [xs[j] / norms[j] for j in range(A.cols)]
        Ad = np.array([[complex(A[i, j]) for j in range(A.cols)] for i in range(A.rows)])
        r = [abs(sum(A[i, j] * x[j] for j in range(A.cols)) - rhs[i]) for i in range(A.rows)]
        sc = [sum(abs(A[i, j] * x[j]) for j in range(A.cols)) + abs(rhs[i]) for i in range(A.rows)]
        resid = float(max(ri / si for ri, si in zip(r, sc) if si != 0))
        xd = np.array([complex(v) for v in x])
        rd = np.array([complex(rhs[i]) for i in range(A.rows)])
    sv = np.linalg.svd(Ad / np.where(np.linalg.norm(Ad, axis=0) == 0, 1, np.linalg.norm(Ad, axis=0)), compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    return Ad, rd, xd, cond, resid


def _mp_eval(P: BiPoly, a, b):
    import mpmath

    return mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * a**i * b**j for (i, j), c in P.terms.items())


def _mp_system(pc_desc, b, qdeg: int):
    import mpmath

    p = list(reversed(pc_desc))
    n = len(p) - 1
    dp = [k * p[k] for k in range(1, n + 1)]
    ph = [mpmath.mpc(0)] * (n + 3)
    for i, c in enumerate(p):
        ph[i] -= b * c
        ph[i + 2] += c
    rows = max(4 * n, qdeg + n + 2) + 1
    A = mpmath.matrix(rows, qdeg + 2)
    for k in range(qdeg + 1):
        if k >= 1:
            for i, c in enumerate(p):
                A[k - 1 + i, k] += k * c
        for i, c in enumerate(dp):
            A[k + i, k] -= c
        for i, c in enumerate(ph):
            A[k + i, k] -= 2 * c
    A[0, qdeg + 1] = 1
    pm = [c * (-1) ** k for k, c in enumerate(p)]

    def conv(x, y):
        out = [mpmath.mpc(0)] * (len(x) + len(y) - 1)
        for i, u in enumerate(x):
            for j, v in enumerate(y):
                out[i + j] += u * v
        return out

    full = conv(conv(p, p), conv(pm, pm))
    rhs = mpmath.matrix(rows, 1)
    for i, c in enumerate(full):
        rhs[i] = c
    return A, rhs


def solve_certificate(point: QESPoint, qdeg: int | None = None, tol: float = CERT_TOL,
                      precision_bits: int | None = None, family: QESFamily | None = None) -> IdentityCertificate:
    """Least-squares certificate (q, C) at a point.

    The residual is the componentwise backward error of the overdetermined
    system; it doubles as the test, at rounding level on the locus and far
    above it off the locus.  With more than 53 bits requested the solve runs
    in mpmath.
    """
    n = point.n
    if n < 1:
        raise PolyUsageError("the identity needs deg p >= 1")
    if qdeg is None:
        qdeg = 3 * n - 2
    if qdeg < 0:
        raise PolyUsageError("trial degree must be >= 0")
    bits = precision_bits_setting(precision_bits)
    if bits > DOUBLE_BITS:
        A, rhs, x, cond, resid = _solve_extended(point, qdeg, bits, family)
    else:
        A, rhs, x, cond = _solve_double(point, qdeg)
        if cond > COND_LIMIT:
            raise IllConditionedError(cond)
        resid = _componentwise_residual(A, x, rhs)
    q = x[:-1]
    top = np.flatnonzero(np.abs(q) > 1e-9 * max(1.0, float(np.max(np.abs(q)))))
    deg = int(top[-1]) if top.size else -1
    return IdentityCertificate(
        point=point, qcoeffs=q, C=complex(x[-1]), residual=resid,
        certified=resid < tol, degree=deg, cond=cond,
    )


# ---------------------------------------------------------------------------
# exact certificate in Q[b][a] / (Q*)
# ---------------------------------------------------------------------------


class QuotientRing:
    """Q[b][a] modulo a polynomial monic in a.  Elements are tuples of
    UniPoly-in-b coefficients, ascending in a, of length < deg_a(modulus)."""

    def __init__(self, modulus: BiPoly):
        cols = modulus.coeffs_in("a")
        if cols[-1] != UniPoly([1], "b"):
            raise PolyUsageError("modulus must be monic in a")
        self.d = len(cols) - 1
        self.tail = cols[:-1]  # a^d = -sum tail_k a^k
        self.zero = UniPoly([], "b")

    def reduce(self, coeffs) -> tuple:
        c = list(coeffs)
        for k in range(len(c) - 1, self.d - 1, -1):
            lead = c[k]
            if lead.is_zero():
                continue
            c[k] = self.zero
            for j, t in enumerate(self.tail):
                c[k - self.d + j] = c[k - self.d + j] - lead * t
        c = c[: self.d] + [self.zero] * max(0, self.d - len(c))
        return tuple(c)

    def from_bipoly(self, P: BiPoly) -> tuple:
        if P.is_zero():
            return self.zeros()
        return self.reduce(P.coeffs_in("a"))

    def to_bipoly(self, x) -> BiPoly:
        return BiPoly.from_coeffs_in("a", x, AB)

    def zeros(self) -> tuple:
        return tuple([self.zero] * self.d)

    def add(self, x, y) -> tuple:
        return tuple(u + v for u, v in zip(x, y))

    def sub(self, x, y) -> tuple:
        return tuple(u - v for u, v in zip(x, y))

    def scale(self, x, c) -> tuple:
        return tuple(u.scale(c) for u in x)

    def mul(self, x, y) -> tuple:
        out = [self.zero] * (2 * self.d - 1)
        for i, u in enumerate(x):
            if u.is_zero():
                continue
            for j, v in enumerate(y):
                if not v.is_zero():
                    out[i + j] = out[i + j] + u * v
        return self.reduce(out)

    def is_zero(self, x) -> bool:
        return all(u.is_zero() for u in x)


@dataclass
class ExactCertificate:
    n: int
    q: list  # ascending in z, each a BiPoly in (a, b) reduced mod Q*
    C: BiPoly
    proof: bool
    constant_law: bool
    family: QESFamily = field(repr=False)

    def text(self) -> str:
        lines = [f"n = {self.n}", f"Q*_{self.n + 1}(b,a) = {self.family.qstar}", f"C*(b,a) = {self.C}"]
        for k in range(len(self.q) - 1, -1, -1):
            if not self.q[k].is_zero():
                lines.append(f"q[z^{k}] = {self.q[k]}")
        lines.append(f"identity holds in the quotient ring: {self.proof}")
        lines.append(f"C* = 2^-{self.n} dQ*/da: {self.constant_law}")
        return "\n".join(lines)


def exact_certificate(n: int, family: QESFamily | None = None, max_n: int = 4) -> ExactCertificate:
    """Solve the coefficient system exactly modulo Q*.

    Matching z^{4n} down to z^{n+2} determines q top-down (pivot -2 each
    time); z^{n+1} .. z^1 must then vanish, and z^0 gives C.
    """
    if n < 1:
        raise PolyUsageError("the identity needs n >= 1")
    if n > max_n:
        raise PolyUsageError(f"exact certificates are limited to n <= {max_n}")
    fam = family or build_family(n)
    R = QuotientRing(fam.qstar)
    # p ascending in z with ring coefficients
    p = [R.from_bipoly(c) for c in reversed(fam.coeffs)]
    b_el = R.from_bipoly(BiPoly.var("b", AB))
    zero = R.zeros()

    def pmul(f, g):
        out = [zero] * (len(f) + len(g) - 1)
        for i, u in enumerate(f):
            if R.is_zero(u):
                continue
            for j, v in enumerate(g):
                if not R.is_zero(v):
                    out[i + j] = R.add(out[i + j], R.mul(u, v))
        return out

    dp = [R.scale(p[k], k) for k in range(1, len(p))] or [zero]
    hp = [R.scale(b_el, -1), zero, R.from_bipoly(BiPoly.constant(1, AB))]
    ph = pmul(p, hp)
    pm = [R.scale(c, (-1) ** k) for k, c in enumerate(p)]
    rhs = pmul(pmul(p, p), pmul(pm, pm))
    qdeg = 3 * n - 2
    top = 4 * n

    def column(k):
        """Ascending z-coefficients of k z^{k-1} p - z^k p' - 2 z^k p h'."""
        col = [zero] * (top + 1)
        for i, c in enumerate(p):
            if k >= 1:
                col[k - 1 + i] = R.add(col[k - 1 + i], R.scale(c, k))
        for i, c in enumerate(dp):
            col[k + i] = R.sub(col[k + i], c)
        for i, c in enumerate(ph):
            col[k + i] = R.sub(col[k + i], R.scale(c, 2))
        return col

    cols = [column(k) for k in range(qdeg + 1)]
    q = [zero] * (qdeg + 1)
    for k in range(qdeg, -1, -1):
        m = k + n + 2
        acc = rhs[m]
        for kk in range(k + 1, qdeg + 1):
            acc = R.sub(acc, R.mul(cols[kk][m], q[kk]))
        pivot = cols[k][m]
        if pivot != R.from_bipoly(BiPoly.constant(-2, AB)):
            raise PolyUsageError("unexpected pivot in the certificate system")
        q[k] = R.scale(acc, Fraction(-1, 2))
    # residual equations z^{n+1} .. z^0
    lhs = [zero] * (top + 1)
    for k in range(qdeg + 1):
        for m in range(top + 1):
            if not R.is_zero(cols[k][m]):
                lhs[m] = R.add(lhs[m], R.mul(cols[k][m], q[k]))
    C = R.sub(rhs[0], lhs[0])
    proof = all(R.is_zero(R.sub(rhs[m], lhs[m])) for m in range(1, top + 1))
    C_bp = R.to_bipoly(C)
    law = R.to_bipoly(R.from_bipoly(fam.qstar.derivative("a").scale(Fraction(1, 2**n))))
    return ExactCertificate(
        n=n, q=[R.to_bipoly(c) for c in q], C=C_bp, proof=proof,
        constant_law=(C_bp == law), family=fam,
    )


# ---------------------------------------------------------------------------
# constant law
# ---------------------------------------------------------------------------


def constant_law_value(family: QESFamily, a, b):
    return eval_fast(family.qstar.derivative("a"), a, b) / 2**family.n


@dataclass
class ConstantReport:
    n: int
    mode: str  # "exact" or "numeric"
    passed: bool
    max_rel_error: float
    samples: int
    detail: str = ""


def verify_constant(n: int, samples: int = 20, seed: int = 0, tol: float = 1e-8,
                    precision_bits: int | None = None) -> ConstantReport:
    fam = build_family(n)
    if n <= 4:
        cert = exact_certificate(n, fam)
        return ConstantReport(n, "exact", cert.proof and cert.constant_law, 0.0 if cert.constant_law else math.inf, 0, str(cert.C))
    rng = np.random.default_rng(seed)
    bits = certificate_bits(n, precision_bits)
    worst = 0.0
    for pt in random_locus_points(fam, samples, rng):
        cert = solve_certificate(pt, precision_bits=bits, family=fam)
        ref = constant_law_value(fam, pt.a, pt.b)
        worst = max(worst, abs(cert.C - ref) / max(abs(ref), 1e-300))
    return ConstantReport(n, "numeric", worst < tol, worst, samples)


# ---------------------------------------------------------------------------
# integrated form
# ---------------------------------------------------------------------------


def default_vertices(b: float, R: float) -> list[complex]:
    """Endpoints on the rays at -pi/3 and pi/3 plus interior bend points.

    For b < 0 the path runs through the saddles +-i sqrt(-b), where
    |exp(2h)| = 1, so neither integral suffers from cancellation.  For b > 0
    it passes through the saddle -sqrt(b).
    """
    lo = R * cmath.exp(-1j * math.pi / 3)
    hi = R * cmath.exp(1j * math.pi / 3)
    b = complex(b)
    if abs(b.imag) > 0 or b.real == 0:
        return [lo, 0j, hi]
    if b.real < 0:
        s = math.sqrt(-b.real)
        return [lo, -1j * s, 1j * s, hi]
    return [lo, complex(-math.sqrt(b.real)), hi]


def _segment_distance(p: complex, u: complex, v: complex) -> float:
    d = v - u
    t = ((p - u) * d.conjugate()).real / (abs(d) ** 2)
    t = min(1.0, max(0.0, t))
    return abs(p - (u + t * d))


def contour_integral(f, vertices, epsrel: float = 1e-12, limit: int = 400) -> complex:
    """Integral of ``f`` along the polyline through ``vertices``."""
    total = 0j
    with warnings.catch_warnings():
        # quadpack flags round-off when asked for near machine precision
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for u, v in zip(vertices, vertices[1:]):
            d = v - u
            val, _ = integrate.quad(lambda t: f(u + t * d) * d, 0.0, 1.0, complex_func=True,
                                    epsabs=0.0, epsrel=epsrel, limit=limit)
            total += val
    return total


def integral_sides(point: QESPoint, C, R: float = 6.0, vertices=None, pole_tol: float = 1e-3, epsrel: float = 1e-12):
    pc = np.asarray(point.pcoeffs, dtype=complex)
    b = point.b
    verts = list(vertices) if vertices is not None else default_vertices(b, R)
    if point.n >= 1:
        for r in point.roots:
            pole = -r
            dist = min(_segment_distance(pole, u, v) for u, v in zip(verts, verts[1:]))
            if dist < pole_tol:
                raise PathTooCloseToPoleError(pole, dist)
    pm = _mirror(pc)

    def e2h(z):
        return cmath.exp(2 * (z**3 / 3 - b * z))

    def lhs_f(z):
        return np.polyval(pc, z) ** 2 * e2h(z)

    def rhs_f(z):
        return e2h(z) / np.polyval(pm, z) ** 2

    lhs = contour_integral(lhs_f, verts, epsrel)
    rhs = C * contour_integral(rhs_f, verts, epsrel)
    return lhs, rhs


def verify_integral_identity(point: QESPoint, R: float = 6.0, tol: float = 1e-12, vertices=None, C=None) -> float:
    """Relative mismatch of the integrated identity."""
    if point.n < 1:
        raise PolyUsageError("the identity needs n >= 1")
    if C is None:
        C = solve_certificate(point).C
    lhs, rhs = integral_sides(point, C, R, vertices, epsrel=tol)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


# ---------------------------------------------------------------------------
# batch study
# ---------------------------------------------------------------------------


@dataclass
class CertificateStudy:
    n: int
    bits: int
    on_residuals: list
    off_residuals: list
    tol: float
    off_floor: float
    passed: bool


def certificate_study(n: int, count: int = 20, seed: int = 0, offset: float = 0.1, tol: float = CERT_TOL,
                      off_floor: float = 1e-3, precision_bits: int | None = None,
                      b_range=(-3.0, 3.0)) -> CertificateStudy:
    """Numeric certificates at random locus points and at the same points with
    ``a`` shifted by ``offset``.  Passing means every on-locus residual is
    below ``tol`` and every shifted one above ``off_floor``."""
    fam = build_family(n)
    rng = np.random.default_rng(seed)
    bits = certificate_bits(n, precision_bits)
    on, off = [], []
    for pt in random_locus_points(fam, count, rng, b_range):
        on.append(solve_certificate(pt, tol=tol, precision_bits=bits, family=fam).residual)
        shifted = make_point(fam, pt.b, pt.a + offset)
        off.append(solve_certificate(shifted, tol=tol, precision_bits=bits, family=fam).residual)
    passed = max(on) < tol and min(off) > off_floor
    return CertificateStudy(n, bits, on, off, tol, off_floor, passed)
