"""Airy engine against scipy.special and against itself across regimes."""
import math

import numpy as np
import pytest
from scipy import special

from qes.airy import AI0, AIP0, airy, airy_laplace, airy_poincare, airy_series, airy_zeros


def test_values_at_origin():
    v = airy(0.0)
    assert abs(v.ai - 0.355028053887817) < 1e-12
    assert abs(v.aip + 0.258819403792807) < 1e-12
    assert AI0 == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), rel=1e-15)
    assert AIP0 == pytest.approx(-(3 ** (-1 / 3)) / math.gamma(1 / 3), rel=1e-15)


def test_value_at_one():
    assert airy(1.0).ai == pytest.approx(0.135292416312881, abs=1e-13)


@pytest.mark.parametrize("x", np.linspace(-40.0, 4.0, 221))
def test_against_scipy(x):
    ai, aip, _, _ = special.airy(x)
    v = airy(x)
    assert abs(v.ai - ai) <= 1e-12
    # Ai' grows like |x|^(1/4); compare on that scale
    assert abs(v.aip - aip) <= 1e-12 * max(1.0, abs(x) ** 0.25)


@pytest.mark.parametrize("x", [5.0, 10.0, 30.0, 80.0])
def test_decaying_side_relative(x):
    ai, aip, _, _ = special.airy(x)
    v = airy(x)
    assert v.ai == pytest.approx(ai, rel=1e-12)
    assert v.aip == pytest.approx(aip, rel=1e-12)


def test_underflow_flag():
    v = airy(200.0)
    assert v.underflow and v.ai == 0.0


def test_first_zeros():
    zs = airy_zeros(3)
    ref = special.ai_zeros(3)[0]
    assert np.allclose(zs, ref, atol=1e-8)
    assert zs[0] == pytest.approx(-2.338107410, abs=1e-9)


@pytest.mark.parametrize("x", np.concatenate([np.linspace(3.5, 4.5, 11), np.linspace(-5.0, -4.0, 11)]))
def test_series_and_large_argument_overlap(x):
    s = airy_series(x)
    l = airy_laplace(x)
    assert abs(s[0] - l[0]) < 1e-10
    assert abs(s[1] - l[1]) < 1e-10


@pytest.mark.parametrize("x", [-30.0, -12.0, 12.0, 25.0])
def test_laplace_matches_truncated_series(x):
    l = airy_laplace(x)
    p = airy_poincare(x)
    scale = 1.0 if x < 0 else abs(l[0])
    assert abs(l[0] - p[0]) <= 1e-10 * scale
    assert abs(l[1] - p[1]) <= 1e-10 * max(scale, abs(l[1]) if x > 0 else abs(x) ** 0.25)


def test_wronskian_with_bi():
    # Ai Bi' - Ai' Bi = 1/pi; Bi from scipy, Ai from here
    for x in (-7.3, -1.0, 0.4, 3.0):
        _, _, bi, bip = special.airy(x)
        v = airy(x)
        assert v.ai * bip - v.aip * bi == pytest.approx(1 / math.pi, abs=1e-11)


def test_extended_precision_series():
    lo = airy_series(2.5)
    hi = airy_series(2.5, bits=200)
    assert hi[0] == pytest.approx(lo[0], abs=1e-14)
    assert hi[1] == pytest.approx(lo[1], abs=1e-14)


def test_laplace_needs_nonzero():
    with pytest.raises(ValueError):
        airy_laplace(0.0)
