"""Real branches of the QES locus, critical points and large-b structure."""
import math

import numpy as np
import pytest
import sympy

from qes.locus import (
    asymptotic_k_check,
    branch_ordering_check,
    classes_at,
    discriminant_degree_check,
    qes_critical_points,
    top_weight_check,
    top_weight_product,
    trace_branch,
    trace_locus,
)
from qes.polycore import BiPoly, PolyUsageError
from qes.qesfamily import build_family, eval_fast

sb, sl = sympy.symbols("b lam")


def test_n1_branch_closed_form():
    br = trace_branch(1, 0, (-2.0, 9.0))
    assert br.samples
    for b, lam, a in br.samples:
        assert b >= -1e-9
        assert min(abs(lam - (b * b + 2 * math.sqrt(max(b, 0)))), abs(lam - (b * b - 2 * math.sqrt(max(b, 0))))) < 1e-8
    bs = [s[0] for s in br.samples]
    # one arc through the fold at b = 0, carrying both signs of a
    assert len(br.arcs()) == 1
    assert 0 <= min(bs) < 0.05 and max(bs) == pytest.approx(9.0)
    assert min(s[2] for s in br.samples) < 0 < max(s[2] for s in br.samples)


def test_n0_parabola():
    br = trace_branch(0, 0, (-4.0, 4.0))
    assert all(lam == pytest.approx(b * b) for b, lam, _ in br.samples)


def test_n2_no_real_zero_branch_spans_window():
    br = trace_branch(2, 1, (-6.0, 6.0))
    bs = [s[0] for s in br.samples]
    assert min(bs) == pytest.approx(-6.0) and max(bs) == pytest.approx(6.0)
    assert all(r == 0 for _, r in br.zerocounts)


def test_n2_real_zero_branch_is_bounded_below():
    br = trace_branch(2, 0, (-6.0, 6.0))
    bs = [s[0] for s in br.samples]
    # this branch only exists above the critical value b = 3/4
    assert 0.75 - 1e-9 < min(bs) < 0.8


@pytest.mark.parametrize("n", range(0, 5))
def test_samples_lie_on_curve_and_keep_class(n):
    fam = build_family(n)
    for br in trace_locus(n, (-6.0, 6.0)):
        assert br.samples, (n, br.m)
        for (b, lam, a), (tot, real) in zip(br.samples, br.zerocounts):
            assert tot == n and real == n - 2 * br.m
            assert lam == pytest.approx(b * b - 2 * a)
            scale = 1 + abs(a) ** (n + 1) + abs(b) ** ((n + 1) / 2)
            assert abs(eval_fast(fam.qstar, a, b)) < 1e-8 * scale


def test_bad_class_index():
    with pytest.raises(PolyUsageError):
        trace_branch(2, 2)
    with pytest.raises(PolyUsageError):
        trace_branch(2, 0, (1.0, -1.0))


@pytest.mark.parametrize("n", range(1, 7))
def test_branch_count_at_large_b(n):
    classes = classes_at(build_family(n), 100.0)
    assert sorted(classes) == list(range(n // 2 + 1))


@pytest.mark.parametrize("n,b", [(2, 50.0), (4, 100.0), (1, 50.0), (3, 100.0)])
def test_branch_ordering(n, b):
    rep = branch_ordering_check(n, b)
    assert rep.passed and not rep.inconclusive


def test_critical_points_examples():
    assert qes_critical_points(0) == []
    (cp,) = qes_critical_points(1)
    assert cp.b == pytest.approx(0.0, abs=1e-12) and cp.lam == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3])
def test_critical_point_count_matches_sympy(n):
    fam = build_family(n)
    q = sympy.Add(*[sympy.Rational(c.numerator, c.denominator) * sl**i * sb**j for (i, j), c in fam.qlambda.terms.items()])
    disc = sympy.discriminant(q, sl)
    roots = [r for r in sympy.Poly(disc, sb).real_roots() if -50 <= r <= 50]
    distinct = sorted(set(float(r) for r in roots))
    pts = qes_critical_points(n)
    # every critical point sits on a real discriminant root; complex double
    # roots in lam are dropped, so there can be fewer points than roots
    assert len(pts) <= len(distinct)
    for cp in pts:
        assert min(abs(cp.b - r) for r in distinct) < 1e-10
        d = np.polyval(fam.qlambda.numeric_coeffs("lam", cp.b), cp.lam)
        assert abs(d) < 1e-6 * (1 + abs(cp.lam)) ** (n + 1)
    if n == 2:
        assert [round(cp.b, 12) for cp in pts] == [0.75]


@pytest.mark.parametrize("n", range(1, 9))
def test_top_weight_and_discriminant_degree(n):
    assert top_weight_check(n).passed
    rep = discriminant_degree_check(n)
    assert rep.passed and rep.degree == n * (n + 1) // 2


def test_top_weight_products():
    a = BiPoly.var("a")
    b = BiPoly.var("b")
    assert top_weight_product(1) == a * a - b
    assert top_weight_product(3) == a**4 - (a * a * b).scale(10) + (b * b).scale(9)
    assert top_weight_product(4) == a**5 - (a**3 * b).scale(20) + (a * b * b).scale(64)


def test_discriminant_examples():
    assert discriminant_degree_check(1).disc.coeffs == (0, 4)
    assert discriminant_degree_check(2).disc.degree == 3
    assert discriminant_degree_check(3).degree == 6
    with pytest.raises(PolyUsageError):
        discriminant_degree_check(0)


def test_asymptotics_exact_cases():
    for n in (0, 1):
        rep = asymptotic_k_check(n)
        assert rep.exact and rep.max_abs == 0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_asymptotics_numeric(n):
    rep = asymptotic_k_check(n, 1e4)
    assert len(rep.residuals) == n + 1
    assert rep.max_abs < 0.1


@pytest.mark.parametrize("n", range(1, 7))
def test_sqrt_b_scaling(n):
    fam = build_family(n)
    for b in (1e2, 1e3, 1e4):
        lams = sorted(lam for v in classes_at(fam, b).values() for lam in v)
        scaled = [(lam - b * b) / math.sqrt(b) for lam in lams]
        assert len(scaled) == n + 1
        assert all(abs(s) <= 2 * n + 1 for s in scaled)
        assert all(x < y for x, y in zip(scaled, scaled[1:]))


def test_fold_on_window_edge_traced_once():
    # b = 0 is the n = 1 fold; with the window starting there the loop must
    # still come out as a single arc
    br = trace_branch(1, 0, (0.0, 9.0))
    assert len(br.arcs()) == 1
    ends = sorted(round(s[2], 9) for s in br.samples if s[0] == 9.0)
    assert ends == [-3.0, 3.0]
