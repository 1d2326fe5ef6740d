"""Smoke tests for the python bindings: each surface is touched once with a
value that has a closed-form cross-check."""

import math

import pytest

import freemax as fm


def test_law_catalog_and_parse():
    law = fm.Law.parse("twopoint:0.5,2")
    assert law.name() == "twopoint:0.5,2"
    assert law.cdf(1.0) == pytest.approx(0.5)
    assert law.atom_at_zero() == pytest.approx(0.5)
    assert len(fm.Law.catalog()) >= 15
    with pytest.raises(ValueError):
        fm.Law.parse("nosuchlaw")


def test_s_transform_closed_and_numeric():
    s = fm.s_transform(fm.Law.parse("mp"))
    assert s(-0.5) == pytest.approx(2.0, abs=1e-10)
    assert s.inverse(2.0) == pytest.approx(-0.5, abs=1e-10)

    g = fm.grid_from_law(fm.Law.parse("mp"), 2048)
    sn = fm.s_transform_grid(g)
    assert sn(-0.5) == pytest.approx(2.0, rel=1e-3)


def test_phi_of_free_poisson_is_uniform():
    p = fm.phi(fm.Law.parse("mp"))
    assert p.closed
    for x in (0.1, 0.5, 0.9):
        assert p.cdf(x) == pytest.approx(x, abs=1e-6)


def test_free_power_matches_rate_two_family():
    m = fm.free_add_power(fm.Law.parse("mp"), 2.0, 2048)
    # rate-2 upper edge (1 + sqrt(2))^2
    assert m.support()[1] == pytest.approx((1 + math.sqrt(2)) ** 2, abs=0.05)
    assert m.mean() == pytest.approx(2.0, abs=1e-3)


def test_boolean_power_atoms():
    m = fm.boolean_add_power(fm.Law.parse("twopoint:0.5,2"), 2.0)
    atoms = sorted((a.location, a.mass) for a in m.atoms())
    assert atoms[0][0] == pytest.approx(0.0)
    assert atoms[0][1] == pytest.approx(1.0 / 3.0, abs=1e-9)
    assert atoms[1][0] == pytest.approx(3.0, abs=1e-9)
    assert atoms[1][1] == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_max_semigroups_and_value_maps():
    f = fm.Cdf.from_law(fm.Law.parse("frechet:1"))
    g = fm.classical_max_pow(f, 3.0)
    assert g(3.0) == pytest.approx(math.exp(-1.0), abs=1e-12)
    assert fm.lambda_vee_value(math.exp(-0.25)) == pytest.approx(0.75)
    assert fm.b_t_vee(f, 0.0)(2.0) == pytest.approx(f(2.0))


def test_verification_drivers():
    reports = fm.verify_thm_free(fm.Law.parse("twopoint:0.5,2"), 2.0, grid_n=256)
    assert len(reports) == 2
    assert all(r.passed for r in reports)

    r = fm.verify_thm_classical(1.0, 2.0)
    assert r.passed and r.sup_norm < 1e-10

    s = fm.stable_s_transform(0.5, "boolean")
    assert all(r.passed for r in fm.verify_thm_bn_stable(s, 1.0))


def test_random_matrix_sampler():
    sample = fm.sample_wishart_spectrum(64, 7)
    assert len(sample.eigenvalues) == 64
    ks = fm.ks_distance(sample, fm.Cdf.from_law(fm.Law.parse("mp")))
    assert ks < 0.2


def test_numeric_error_surfaces_as_python_exception():
    with pytest.raises(ValueError):
        fm.free_add_power(fm.Law.parse("gumbel"), 2.0)
