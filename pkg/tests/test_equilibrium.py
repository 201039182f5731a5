"""Divisibility, residue and electrostatic-equilibrium tests for QES zeros."""
import numpy as np
import pytest

from qes.equilibrium import (
    ClusteredRootsError,
    concordance,
    concordance_study,
    divisibility_defect,
    equilibrium_residuals,
    residue_at,
    residues,
)
from qes.qesfamily import build_family, eigenvalues_at, make_point, random_locus_points


def test_single_charge_on_locus():
    rep = equilibrium_residuals(make_point(build_family(1), 1.0, 1.0))
    assert rep.roots == pytest.approx([-1.0])
    assert abs(rep.residuals[0]) < 1e-15


def test_single_charge_off_locus():
    rep = equilibrium_residuals(make_point(build_family(1), 1.0, 2.0))
    assert rep.max_residual == pytest.approx(3.0)


def test_no_charges():
    pt = eigenvalues_at(build_family(0), 1.5)[0]
    rep = equilibrium_residuals(pt)
    assert len(rep.residuals) == 0 and rep.max_residual == 0
    assert len(residues(pt)) == 0
    assert divisibility_defect(pt) == 0


def test_divisibility_examples():
    fam1 = build_family(1)
    assert divisibility_defect(make_point(fam1, 1.0, 1.0)) < 1e-15
    # p = z + 2: dividend 2z^2 - 2 leaves remainder 2 h'(-2) = 6
    assert divisibility_defect(make_point(fam1, 1.0, 2.0)) == pytest.approx(6 / 2)
    for pt in eigenvalues_at(build_family(2), 1.0):
        assert divisibility_defect(pt) < 1e-10


def test_residue_examples():
    fam1 = build_family(1)
    assert abs(residue_at(make_point(fam1, 1.0, 1.0), 0)) < 1e-15
    assert residue_at(make_point(fam1, 1.0, 2.0), 0) == pytest.approx(-6)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_residue_equals_scaled_equilibrium_residual(n):
    # r_k = -(p'' + 2h'p')/p'^3 and p''/p' = 2 sum 1/(z_k - z_j) give
    # r_k = -2 E_k / p'(z_k)^2
    fam = build_family(n)
    rng = np.random.default_rng(n)
    for pt in random_locus_points(fam, 5, rng):
        for q in (pt, make_point(fam, pt.b, pt.a + 0.3)):
            rep = equilibrium_residuals(q)
            dp = np.polyder(q.pcoeffs)
            for k, zk in enumerate(rep.roots):
                want = -2 * rep.residuals[k] / np.polyval(dp, zk) ** 2
                got = residue_at(q, k)
                assert abs(got - want) <= 1e-10 * max(abs(want), 1e-300) + 1e-13


def test_clustered_roots_rejected():
    # n=2, b=1, a=2 gives p = (z + 1)^2
    pt = make_point(build_family(2), 1.0, 2.0)
    with pytest.raises(ClusteredRootsError) as err:
        equilibrium_residuals(pt)
    assert err.value.pair == (0, 1)
    with pytest.raises(ClusteredRootsError):
        residue_at(pt, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_three_conditions_agree(n):
    study = concordance_study(n, count=10, seed=n)
    assert study.passed, (study.disagreements, study.misclassified)
    for c in study.on_locus:
        assert max(c["divisibility"], c["residue"], c["equilibrium"]) < 1e-9
    for c in study.off_locus:
        assert min(c["divisibility"], c["residue"], c["equilibrium"]) > 1e-3


def test_concordance_keys():
    c = concordance(eigenvalues_at(build_family(3), 0.5)[0])
    assert set(c) == {"divisibility", "residue", "equilibrium", "max_equilibrium_residual"}


def test_study_rejects_n0():
    with pytest.raises(ValueError):
        concordance_study(0)
