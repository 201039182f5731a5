"""Spectral determinant by complex shooting.

With z = i*zeta the eigenvalue equation y'' - (z^4 - 2bz^2 + 2Jz) y = lam y
becomes

    w'' + Q(zeta) w = 0,   Q = zeta^4 + 2b zeta^2 + 2iJ zeta + lam,

with w decaying along the rays arg zeta = -pi/6 and -5pi/6.  Both decaying
solutions are started from their asymptotic expansion

    w ~ exp(-i zeta^3/3 - i b zeta) zeta^(J-1) sum_m c_m zeta^-m,

integrated to a common match point with a Taylor-series stepper, and the
Wronskian there is the determinant.  The normalization comes from the
expansion, so the determinant does not depend on the starting radius.
Magnitudes are carried as (mantissa, log scale) pairs.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .polycore import complex_roots

RAY_RIGHT = -math.pi / 6
RAY_LEFT = -5 * math.pi / 6
SMALL_BATCH = 8  # below this, looping the scalar stepper beats numpy


class ShootingError(RuntimeError):
    pass


@dataclass(frozen=True)
class ShootingConfig:
    J: float
    b: float
    R: float = 12.0
    rtol: float = 1e-10
    renorm: float = 1e8
    match: complex | None = None  # default chosen from b
    kappa: float = 3.0  # Taylor step: |step| * local scale
    hmax: float = 0.5
    max_order: int = 90
    max_steps: int = 200000
    radius_rule: str = "turning"  # or "quartic"


@dataclass
class DetSample:
    lam: complex
    det: complex  # mantissa
    logscale: float
    error: float = 0.0

    @property
    def value(self) -> complex:
        return self.det * math.exp(self.logscale) if self.logscale < 700 else complex(math.inf)


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------


def turning_radius(J: float, b: float, lams) -> float:
    """Largest |zeta| among zeros of Q over the extreme lam values of a batch."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    picks = {int(np.argmax(lams.real)), int(np.argmin(lams.real)), int(np.argmax(np.abs(lams)))}
    return max(float(np.max(np.abs(complex_roots([1, 0, 2 * b, 2j * J, lams[k]])))) for k in picks)


def effective_radius(config: ShootingConfig, lams, rule: str = "turning") -> float:
    """Starting radius for the rays.

    ``turning``: R >= 1.5 * (largest turning-point modulus) + 2.  The start
    only has to lie beyond the turning points; any admixture of the growing
    solution there dies out exponentially on the way in.
    ``quartic``: R^4 >= 10 (2|b| R^2 + 2|J| R + |lam|), the stricter rule.
    """
    R = config.R
    if rule == "turning":
        return max(R, 1.5 * turning_radius(config.J, config.b, lams) + 2.0)
    b, J = abs(config.b), abs(config.J)
    lam_max = float(np.max(np.abs(np.atleast_1d(lams))))

    def ok(R):
        return R**4 >= 10 * (2 * b * R * R + 2 * J * R + lam_max)

    if ok(R):
        return R
    lo, hi = R, R
    while not ok(hi):
        hi *= 1.5
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if ok(mid) else (mid, hi)
    return hi


def match_point(config: ShootingConfig, lams=None) -> complex:
    """Where the two integrations meet.

    The negative imaginary zeta axis bisects the two rays.  Matching a
    little way down it, at depth growing with the lam scale and with b > 0,
    keeps both solutions on their growing side; for strongly negative b the
    best point moves back toward the origin.
    """
    if config.match is not None:
        return complex(config.match)
    lam = 1.0 if lams is None else max(1.0, float(np.max(np.real(np.atleast_1d(lams)))))
    depth = 0.5 * lam**0.25
    if config.b > 0:
        depth = max(math.sqrt(config.b), depth)
    else:
        depth /= 1 + abs(config.b) / 4
    # quantized so that every lam maps to one path regardless of batching
    return -1j * round(depth * 4) / 4


def check_turning_points(config: ShootingConfig, lam, start: complex):
    for lv in np.atleast_1d(lam):
        roots = complex_roots([1, 0, 2 * config.b, 2j * config.J, lv])
        d = float(np.min(np.abs(roots - start)))
        if d < 1.0:
            raise ShootingError(
                f"turning point {roots[np.argmin(np.abs(roots - start))]:.4g} is {d:.3g} from the start "
                f"point {start:.4g}; increase R"
            )


# ---------------------------------------------------------------------------
# asymptotic start
# ---------------------------------------------------------------------------


def asymptotic_terms(J: float, b: float, lam, zeta: complex, terms: int):
    """Terms c_m zeta^-m of the expansion, one column per lam.

    Generated directly in scaled form so large b or lam cannot overflow.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    nu = J - 1.0
    inv = 1.0 / zeta
    t = np.zeros((terms, lam.size), dtype=complex)
    t[0] = 1.0
    for m in range(1, terms):
        acc = (lam - b * b) * inv * t[m - 1]
        if m >= 2:
            acc = acc - 2j * b * (nu - m + 2) * inv * inv * t[m - 2]
        if m >= 3:
            acc = acc + (nu - m + 3) * (nu - m + 2) * inv**3 * t[m - 3]
        t[m] = -acc / (2j * m)
    return t


def recessive_init(ray_angle: float, R: float, J: float, b: float, lam, max_terms: int = 200):
    """(w, w', logscale) at zeta = R e^{i ray_angle} for the decaying solution.

    The true values are (w, w') * exp(logscale).  The series is summed up to
    its smallest block of terms.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    zeta = R * cmath.exp(1j * ray_angle)
    nu = J - 1.0
    inv = 1.0 / zeta
    with np.errstate(over="ignore", invalid="ignore"):
        terms = asymptotic_terms(J, b, lam, zeta, max_terms)
    mags = np.abs(terms)
    mags[~np.isfinite(mags)] = np.inf
    # the recurrence has period three, so compare maxima over blocks of three
    # terms and stop before the first block that grows
    nblk = max_terms // 3
    blk = mags[: 3 * nblk].reshape(nblk, 3, lam.size).max(axis=1)
    halt = (blk[1:] < 1e-18 * mags[0]) | (blk[1:] > blk[:-1])
    halt = np.vstack([halt, np.ones((1, lam.size), dtype=bool)])
    stop = 3 * (np.argmax(halt, axis=0) + 1)
    mask = np.arange(max_terms)[:, None] < stop[None, :]
    terms = np.where(mask, terms, 0)
    S = terms.sum(axis=0)
    dS = ((nu - np.arange(max_terms))[:, None] * terms * inv).sum(axis=0)
    L = -1j * zeta**3 / 3 - 1j * b * zeta + nu * cmath.log(zeta)
    g = -1j * (zeta * zeta + b)
    phase = cmath.exp(1j * L.imag)
    w = phase * S
    dw = phase * (dS + g * S)
    return w, dw, np.full(lam.size, L.real)


# ---------------------------------------------------------------------------
# Taylor integrator
# ---------------------------------------------------------------------------


def _q_coeffs(z0: complex, J: float, b: float, lam):
    q4 = 1.0
    q3 = 4 * z0
    q2 = 6 * z0 * z0 + 2 * b
    q1 = 4 * z0**3 + 4 * b * z0 + 2j * J
    q0 = z0**4 + 2 * b * z0 * z0 + 2j * J * z0 + lam
    return q0, q1, q2, q3, q4


def _taylor_step(w, dw, z0, delta, J, b, lam, max_order, tol):
    """One step of length delta; returns (w, dw, converged)."""
    q0, q1, q2, q3, q4 = _q_coeffs(z0, J, b, lam)
    d2 = delta * delta
    Q = [q0 * d2, q1 * d2 * delta, q2 * d2 * d2, q3 * d2 * d2 * delta, q4 * d2**3]
    d = [w, dw * delta]
    sw = w + d[1]
    sdw = d[1].copy()
    small = 0
    for k in range(0, max_order - 2):
        acc = Q[0] * d[k]
        if k >= 1:
            acc = acc + Q[1] * d[k - 1]
        if k >= 2:
            acc = acc + Q[2] * d[k - 2]
        if k >= 3:
            acc = acc + Q[3] * d[k - 3]
        if k >= 4:
            acc = acc + Q[4] * d[k - 4]
        nxt = -acc / ((k + 2) * (k + 1))
        d.append(nxt)
        sw = sw + nxt
        sdw = sdw + (k + 2) * nxt
        scale = np.abs(sw) + np.abs(sdw)
        if np.all(np.abs(nxt) * (k + 2) <= tol * scale):
            small += 1
            if small >= 4:
                return sw, sdw / delta, True
        else:
            small = 0
    return sw, sdw / delta, False


def _taylor_step_scalar(w, dw, z0, delta, J, b, lam, max_order, tol):
    q0, q1, q2, q3, q4 = _q_coeffs(z0, J, b, lam)
    d2 = delta * delta
    Q0, Q1, Q2, Q3, Q4 = q0 * d2, q1 * d2 * delta, q2 * d2 * d2, q3 * d2 * d2 * delta, q4 * d2**3
    d = [w, dw * delta]
    sw = w + d[1]
    sdw = d[1]
    small = 0
    for k in range(0, max_order - 2):
        acc = Q0 * d[k]
        if k >= 4:
            acc += Q1 * d[k - 1] + Q2 * d[k - 2] + Q3 * d[k - 3] + Q4 * d[k - 4]
        elif k >= 1:
            acc += Q1 * d[k - 1]
            if k >= 2:
                acc += Q2 * d[k - 2]
            if k >= 3:
                acc += Q3 * d[k - 3]
        nxt = -acc / ((k + 2) * (k + 1))
        d.append(nxt)
        sw += nxt
        sdw += (k + 2) * nxt
        if abs(nxt) * (k + 2) <= tol * (abs(sw) + abs(sdw)):
            small += 1
            if small >= 4:
                return sw, sdw / delta, True
        else:
            small = 0
    return sw, sdw / delta, False


def integrate_path(z_start: complex, z_end: complex, w, dw, logscale, config: ShootingConfig, lam):
    """Carry (w, w', logscale) along the straight segment z_start -> z_end."""
    J, b = config.J, config.b
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    tol = config.rtol * 1e-6  # per-step truncation, well under the target
    z = z_start
    total = abs(z_end - z_start)
    if total == 0:
        return w, dw, logscale
    u = (z_end - z_start) / total
    travelled = 0.0
    lam_mag = float(np.max(np.abs(lam)))
    scalar = lam.size == 1
    if scalar:
        lam, w, dw, logscale = complex(lam[0]), complex(w[0]), complex(dw[0]), float(logscale[0])
        step = _taylor_step_scalar
    else:
        step = _taylor_step
    h_cut = 1.0
    for _ in range(config.max_steps):
        remaining = total - travelled
        if remaining <= 1e-14 * total:
            if scalar:
                return np.array([w]), np.array([dw]), np.array([logscale])
            return w, dw, logscale
        az = abs(z)
        rho = max(
            math.sqrt(az**4 + 2 * abs(b) * az * az + 2 * abs(J) * az + lam_mag),
            (4 * az**3 + 4 * abs(b) * az + 2 * abs(J)) ** (1 / 3),
            (6 * az * az + 2 * abs(b)) ** 0.25,
            (4 * az) ** 0.2,
            1.0,
        )
        h = min(config.hmax, config.kappa * h_cut / rho, remaining)
        delta = h * u
        wn, dwn, ok = step(w, dw, z, delta, J, b, lam, config.max_order, tol)
        if not ok:
            h_cut /= 2
            if h_cut < 1e-6:
                raise ShootingError(f"step size collapsed near zeta={z:.4g}")
            continue
        h_cut = min(1.0, h_cut * 2)
        travelled += h
        z = z_start + travelled * u
        w, dw = wn, dwn
        if scalar:
            nrm = abs(w) + abs(dw) / max(1.0, rho)
            if nrm > config.renorm or 0 < nrm < 1 / config.renorm:
                w, dw = w / nrm, dw / nrm
                logscale += math.log(nrm)
        else:
            nrm = np.abs(w) + np.abs(dw) / max(1.0, rho)
            if np.any(nrm > config.renorm) or np.any(nrm < 1 / config.renorm):
                nrm = np.where(nrm > 0, nrm, 1.0)
                w, dw = w / nrm, dw / nrm
                logscale = logscale + np.log(nrm)
    raise ShootingError("step budget exhausted")


# ---------------------------------------------------------------------------
# determinant
# ---------------------------------------------------------------------------


def phase_factor(J: float) -> complex:
    """Constant that makes the determinant real for real b, lam (PT symmetry)."""
    return cmath.exp(1j * math.pi * (J - 1.0))


def path_key(config: ShootingConfig, lam) -> tuple[float, complex]:
    """(start radius rounded up to a whole number, match point) for one lam."""
    R = float(math.ceil(effective_radius(config, [lam], config.radius_rule)))
    return R, match_point(config, [lam])


def spectral_det_batch(J: float, b: float, lams, config: ShootingConfig | None = None):
    """(mantissa, logscale) arrays of the Wronskian at the match point."""
    cfg = config or ShootingConfig(J=J, b=b)
    if cfg.J != J or cfg.b != b:
        cfg = replace(cfg, J=J, b=b)
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    # every lam gets the radius and match point it would get on its own, so
    # the determinant does not depend on how lam values are batched
    keys = [path_key(cfg, x) for x in lams]
    uniq = sorted(set(keys), key=lambda k: (k[0], k[1].imag))
    if len(uniq) > 1:
        W = np.empty(lams.size, dtype=complex)
        ls = np.empty(lams.size)
        for key in uniq:
            sel = np.array([k == key for k in keys])
            W[sel], ls[sel] = spectral_det_batch(J, b, lams[sel], replace(cfg, R=key[0], match=key[1]))
        return W, ls
    if 1 < lams.size <= SMALL_BATCH:
        parts = [spectral_det_batch(J, b, [x], cfg) for x in lams]
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
    R, zm = uniq[0]
    sols = []
    for theta in (RAY_RIGHT, RAY_LEFT):
        start = R * cmath.exp(1j * theta)
        check_turning_points(cfg, [lams[np.argmax(np.abs(lams))]], start)
        w, dw, ls = recessive_init(theta, R, J, b, lams)
        w, dw, ls = integrate_path(start, zm, w, dw, ls, cfg, lams)
        sols.append((w, dw, ls))
    (w1, d1, l1), (w2, d2, l2) = sols
    W = (w1 * d2 - d1 * w2) * phase_factor(J)
    return W, l1 + l2


def spectral_det(J: float, b: float, lam, config: ShootingConfig | None = None,
                 estimate_error: bool = False) -> DetSample:
    """One determinant value.  With ``estimate_error`` the computation is
    repeated from a radius 2 larger and the difference is reported in the
    units of ``det``."""
    cfg = config or ShootingConfig(J=J, b=b)
    W, ls = spectral_det_batch(J, b, [lam], cfg)
    err = 0.0
    if estimate_error:
        R, zm = path_key(replace(cfg, J=J, b=b), complex(lam))
        W2, ls2 = spectral_det_batch(J, b, [lam], replace(cfg, R=R + 2, match=zm))
        err = abs(W[0] - W2[0] * math.exp(max(-700, min(700, ls2[0] - ls[0]))))
    return DetSample(lam=complex(lam), det=complex(W[0]), logscale=float(ls[0]), error=err)


def det_scan(J: float, b: float, lams, config: ShootingConfig | None = None) -> list[DetSample]:
    W, ls = spectral_det_batch(J, b, lams, config)
    return [DetSample(lam=complex(x), det=complex(w), logscale=float(l)) for x, w, l in zip(np.atleast_1d(lams), W, ls)]


def write_scan_csv(samples, fh, J=None, b=None) -> None:
    """Rows lambda, Re det, Im det, logscale under a versioned comment header."""
    import csv

    fh.write(f"# qes.detscan/1 J={J} b={b}\n")
    wr = csv.writer(fh)
    wr.writerow(["lambda_re", "lambda_im", "det_re", "det_im", "logscale"])
    for s in samples:
        wr.writerow([repr(s.lam.real), repr(s.lam.imag), repr(s.det.real), repr(s.det.imag), repr(s.logscale)])


def _log_abs(W, ls):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(W)) + ls


def det_ratio(J: float, b: float, lam: complex, delta: float = 0.05, config: ShootingConfig | None = None) -> float:
    """|det(lam)| over the largest |det| at lam +- delta and lam +- i delta.

    Near a simple zero this is about |lam - lam_0| / delta plus the noise floor.
    """
    pts = np.array([lam, lam + delta, lam - delta, lam + 1j * delta, lam - 1j * delta], dtype=complex)
    W, ls = spectral_det_batch(J, b, pts, config)
    la = _log_abs(W, ls)
    return float(math.exp(la[0] - np.max(la[1:])))


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------


@dataclass
class Eigenvalue:
    lam: complex
    residual: float  # det ratio at the polished value
    bracketed: bool


@dataclass
class EigenReport:
    J: float
    b: float
    window: tuple
    eigenvalues: list = field(default_factory=list)
    complex_flags: list = field(default_factory=list)  # (lo, hi, polished lam)
    phase_defect: float = 0.0


def _aligned(J, b, lams, cfg):
    """Real part of the phase-aligned determinant, scaled to a common log level."""
    W, ls = spectral_det_batch(J, b, lams, cfg)
    ref = float(np.median(ls))
    return W * np.exp(np.clip(ls - ref, -700, 700)), ls, ref


def polish_complex(J: float, b: float, lam0: complex, cfg: ShootingConfig, h: float = 1e-3,
                   tol: float = 1e-13, maxit: int = 40) -> complex:
    """Secant iteration on det in the complex lam plane."""
    def f(x):
        W, ls = spectral_det_batch(J, b, [x], cfg)
        return W[0], ls[0]

    x0, x1 = complex(lam0), complex(lam0) + h
    f0, l0 = f(x0)
    f1, l1 = f(x1)
    for _ in range(maxit):
        # bring both to the same log level before differencing
        g0 = f0 * math.exp(max(-700, min(700, l0 - l1)))
        denom = f1 - g0
        if denom == 0:
            break
        x2 = x1 - f1 * (x1 - x0) / denom
        if abs(x2 - x1) <= tol * max(1.0, abs(x2)):
            return x2
        x0, f0, l0 = x1, f1, l1
        x1 = x2
        f1, l1 = f(x1)
    return x1


def eigenvalues(J: float, b: float, lambda_window=(-10.0, 30.0), config: ShootingConfig | None = None,
                step: float | None = None, polish: bool = True) -> EigenReport:
    """Real eigenvalues in a window from sign changes of the aligned determinant.

    A dip in |det| without a sign change is refined on a finer grid and, if
    it persists, polished in the complex plane and reported as a complex pair.
    """
    cfg = config or ShootingConfig(J=J, b=b)
    lo, hi = lambda_window
    if step is None:
        step = scan_step(b)
    grid = np.arange(lo, hi + step / 2, step)
    D, ls, ref = _aligned(J, b, grid, cfg)
    rep = EigenReport(J=J, b=b, window=(lo, hi))
    mag = np.abs(D)
    rep.phase_defect = float(np.max(np.abs(D.imag) / np.maximum(mag, 1e-300)))
    re = D.real
    found = []

    def f_real(x):
        W, l2 = spectral_det_batch(J, b, [x], cfg)
        return float((W[0] * math.exp(max(-700, min(700, l2[0] - ref)))).real)

    def refine(x0, x1):
        f0, f1 = f_real(x0), f_real(x1)
        if f0 * f1 < 0:
            return brentq(f_real, x0, x1, xtol=1e-14, rtol=1e-15, maxiter=200)
        # a grid point sits on the root and its sign is noise
        return x0 if abs(f0) <= abs(f1) else x1

    for i in range(len(grid) - 1):
        if re[i] == 0:
            found.append(grid[i])
        elif re[i] * re[i + 1] < 0:
            found.append(refine(grid[i], grid[i + 1]))
    # dips without sign change
    logm = np.log(np.maximum(mag, 1e-300)) + (ls - ref)
    for i in range(1, len(grid) - 1):
        if logm[i] < logm[i - 1] and logm[i] < logm[i + 1] and re[i - 1] * re[i + 1] > 0:
            if any(abs(x - grid[i]) < 2 * step for x in found):
                continue
            sub = np.linspace(grid[i - 1], grid[i + 1], 41)
            Ds, lss, refs = _aligned(J, b, sub, cfg)
            rs = Ds.real
            changes = [j for j in range(len(sub) - 1) if rs[j] * rs[j + 1] < 0]
            if changes:
                for j in changes:
                    found.append(refine(sub[j], sub[j + 1]))
                continue
            lamc = polish_complex(J, b, complex(grid[i], 0.1 * step), cfg)
            # a pair close enough to the axis to cause this dip
            near = abs(lamc - grid[i]) < max(1.0, 20 * step)
            if abs(lamc.imag) > 1e-6 and near and lo <= lamc.real <= hi:
                rep.complex_flags.append((grid[i - 1], grid[i + 1], lamc))
    found.sort()
    found = [x for k, x in enumerate(found) if k == 0 or x - found[k - 1] > 1e-9 * (1 + abs(x))]
    for x in found:
        lam = polish_complex(J, b, complex(x), cfg) if polish else complex(x)
        if polish and abs(lam - x) > 10 * step:
            lam = complex(x)
        rep.eigenvalues.append(Eigenvalue(lam=lam, residual=det_ratio(J, b, lam, 0.05, cfg), bracketed=True))
    return rep


# ---------------------------------------------------------------------------
# cross-checks
# ---------------------------------------------------------------------------


@dataclass
class CrossingVerification:
    n: int
    b: float
    lam: float
    ratio: float
    passed: bool


def verify_crossing(n: int, crossing, config: ShootingConfig | None = None,
                    delta: float = 0.05, threshold: float = 1e-4) -> CrossingVerification:
    """Is the crossing an eigenvalue of the operator with J = -(n+1)?

    ``crossing`` is anything with ``b`` and ``lam`` attributes, or a
    (b, lam) pair.
    """
    b, lam = (crossing.b, crossing.lam) if hasattr(crossing, "lam") else crossing
    J = -(n + 1)
    cfg = replace(config, J=J, b=b) if config else ShootingConfig(J=J, b=b)
    r = det_ratio(J, b, lam, delta, cfg)
    return CrossingVerification(n=n, b=b, lam=lam, ratio=r, passed=r < threshold)


@dataclass
class RealityReport:
    J: int
    b: float
    non_qes: list
    dual: list
    max_imag: float
    max_mismatch: float
    complex_flags: list
    passed: bool


def scan_step(b: float) -> float:
    """Grid spacing for real scans: 0.05, widened with the level spacing.

    For |b| large the low levels are harmonic with spacing ~ 2 sqrt(2|b|),
    so the grid keeps roughly a hundred points per level.
    """
    return 0.05 * max(1.0, math.sqrt(abs(b)) / 2)


def spectrum_floor(J: float, b: float) -> float:
    """Heuristic starting point for upward eigenvalue scans.

    Low eigenvalues sit near b^2 + O(sqrt b) for b > 0 and near
    sqrt(2|b|) (2k+1) for b < 0; the margin covers the J-dependent shift.
    """
    root = math.sqrt(abs(b))
    base = b * b if b > 0 else 0.0
    return math.floor(base - 4 * (abs(J) + 1) * (root + 1) - 10.0)


def _first_eigenvalues(J, b, count, cfg_base, exclude=(), start=None, width=None, step=None, max_windows=30):
    """Lowest ``count`` real eigenvalues not within 1e-6 of anything in ``exclude``."""
    cfg = replace(cfg_base, J=J, b=b) if cfg_base else ShootingConfig(J=J, b=b)
    lo = start if start is not None else spectrum_floor(J, b)
    step = step or scan_step(b)
    width = width or 200 * step
    out, flags = [], []
    for _ in range(max_windows):
        rep = eigenvalues(J, b, (lo, lo + width), cfg, step)
        flags.extend(rep.complex_flags)
        for e in rep.eigenvalues:
            if e.lam.real >= lo + width + 1e-12 or any(abs(e.lam.real - x.real) < 1e-6 for x in out):
                continue
            if any(abs(e.lam - q) < 1e-6 * (1 + abs(q)) for q in exclude):
                continue
            out.append(e.lam)
        if len(out) >= count:
            break
        lo += width
    out.sort(key=lambda z: z.real)
    return out[:count], flags


def reality_check(J: int, b: float, count: int = 6, config: ShootingConfig | None = None,
                  tol: float = 1e-6) -> RealityReport:
    """Non-QES eigenvalues of L_J are real and coincide with eigenvalues of L_{-J}."""
    from .qesfamily import build_family, eigenvalues_at

    if J < 1:
        raise ShootingError("J must be a positive integer")
    qes = [complex(p.lam) for p in eigenvalues_at(build_family(J - 1), float(b))]
    mine, flags = _first_eigenvalues(J, b, count, config, exclude=qes)
    dual, dflags = _first_eigenvalues(-J, b, count, config)
    max_imag = max((abs(x.imag) for x in mine), default=math.inf)
    if len(mine) < count or len(dual) < count:
        mismatch = math.inf
    else:
        mismatch = max(abs(x - y) for x, y in zip(mine, dual))
    passed = len(mine) == count and max_imag < tol and mismatch < tol and not flags
    return RealityReport(J, b, mine, dual, max_imag, mismatch, flags + dflags, passed)


def lowest_eigenvalue(J: float, b: float, config: ShootingConfig | None = None, start=None, width=None):
    vals, _ = _first_eigenvalues(J, b, 1, config, start=start, width=width)
    if not vals:
        raise ShootingError("no eigenvalue found")
    return vals[0]
