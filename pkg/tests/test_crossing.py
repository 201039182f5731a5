"""Airy reduction of the eigenfunction integral and its zeros."""
import math

import numpy as np
import pytest
import sympy
from scipy import special

from qes.crossing import (
    TWO23,
    BranchSelectionError,
    asymptotic_crossing,
    derivative_reduction,
    find_crossings,
    phi,
    phi_quadrature,
    select_branch_root,
)
from qes.polycore import PolyUsageError, UniPoly
from qes.qesfamily import build_family, eval_fast


def test_reduction_examples():
    assert derivative_reduction(0) == (UniPoly([1], "s"), UniPoly([], "s"))
    assert derivative_reduction(2) == (UniPoly([0, 1], "s"), UniPoly([], "s"))
    assert derivative_reduction(3) == (UniPoly([1], "s"), UniPoly([0, 1], "s"))
    with pytest.raises(PolyUsageError):
        derivative_reduction(-1)


@pytest.mark.parametrize("k", range(0, 9))
def test_reduction_against_sympy(k):
    s, A, P = sympy.symbols("s A P")
    d = sympy.diff(sympy.airyai(s), s, k)
    d = sympy.expand(d.subs(sympy.airyaiprime(s), P).subs(sympy.airyai(s), A))

    def as_unipoly(expr):
        return UniPoly([int(c) for c in reversed(sympy.Poly(expr, s).all_coeffs())], "s")

    assert derivative_reduction(k) == (as_unipoly(d.coeff(A)), as_unipoly(d.coeff(P)))


def test_phi0_is_airy():
    for b in (-3.0, -0.7, 0.0, 1.2):
        assert phi(0, b) == pytest.approx(special.airy(TWO23 * b)[0], abs=1e-13)
    assert phi(0, 0.0) > 0


def test_phi0_zeros_are_scaled_airy_zeros():
    cr = find_crossings(0, 3)
    ref = special.ai_zeros(3)[0] / TWO23
    assert np.allclose([c.b for c in cr], ref, atol=1e-8)
    assert cr[0].b == pytest.approx(-2.338107410 / TWO23, abs=1e-8)
    for c in cr:
        assert c.lam == pytest.approx(c.b**2, abs=1e-12)


@pytest.mark.parametrize("n", [2, 4])
def test_phi_matches_quadrature(n):
    fam = build_family(n)
    for b in np.linspace(-6.0, -0.5, 10):
        a = phi(n, b, fam)
        q = phi_quadrature(n, b, family=fam)
        assert abs(a - q) <= 1e-6 * max(abs(a), abs(q))


def test_phi_at_b_minus_3():
    assert phi(2, -3.0) == pytest.approx(phi_quadrature(2, -3.0), rel=1e-6)


def test_n2_crossings_agree_with_quadrature_sign_changes():
    fam = build_family(2)
    cr = find_crossings(2, 5)
    assert len(cr) == 5
    bs = [c.b for c in cr]
    assert all(x > y for x, y in zip(bs, bs[1:]))
    for c in cr:
        eps = 1e-4
        assert phi_quadrature(2, c.b + eps, family=fam) * phi_quadrature(2, c.b - eps, family=fam) < 0
        a = select_branch_root(fam, c.b)
        assert c.lam == pytest.approx(c.b**2 - 2 * a, abs=1e-10)
        assert abs(eval_fast(fam.qstar, c.a, c.b)) < 1e-10 * (1 + abs(c.a) ** 3)


def test_crossings_interlace_with_derivative_zeros():
    fam = build_family(2)
    cr = find_crossings(2, 5)
    bs = sorted(c.b for c in cr)
    for lo, hi in zip(bs, bs[1:]):
        grid = np.linspace(lo + 1e-6, hi - 1e-6, 400)
        vals = np.array([phi(2, b, fam) for b in grid])
        d = np.diff(vals)
        assert np.sum(np.sign(d[1:]) != np.sign(d[:-1])) == 1


def test_asymptotic_spacing_n0():
    cr = find_crossings(0, 20)
    for c in cr[9:]:
        assert abs(c.b / asymptotic_crossing(c.k) - 1) < 0.02


def test_odd_n_rejected():
    with pytest.raises(PolyUsageError):
        phi(1, -1.0)
    with pytest.raises(PolyUsageError):
        find_crossings(3, 1)


def test_ambiguous_branch_reported():
    # for n = 1 both real roots a = +-1 at b = 1 give one real zero
    with pytest.raises(BranchSelectionError) as err:
        select_branch_root(build_family(1), 1.0)
    assert len(err.value.candidates) == 2


def test_asymptotic_formula():
    assert asymptotic_crossing(1) == pytest.approx(-((0.75 * math.pi) ** (2 / 3)))
