"""
Tests for the special functions.

This module checks log-gamma, the regularized incomplete gamma and the
chi-square and normal tails against scipy.
"""
import math

import pytest
from scipy import special as sp
from scipy import stats

from src.distributions.special import (
    chi_square_cdf,
    chi_square_isf,
    chi_square_quantile,
    chi_square_sf,
    gamma_function,
    log_gamma,
    normal_cdf,
    normal_isf,
    normal_quantile,
    normal_sf,
    regularized_gamma_p,
    regularized_gamma_q,
)
from src.utils.errors import DomainError


@pytest.mark.parametrize("s", [0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 55.5, 171.0])
def test_log_gamma_matches_scipy(s):
    assert log_gamma(s) == pytest.approx(sp.gammaln(s), rel=1e-12, abs=1e-13)


def test_gamma_function_values():
    assert gamma_function(1.0) == pytest.approx(1.0, rel=1e-13)
    assert gamma_function(5.0) == pytest.approx(24.0, rel=1e-12)
    assert gamma_function(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


@pytest.mark.parametrize("s", [0.0, -1.0, math.inf, math.nan])
def test_log_gamma_rejects_bad_arguments(s):
    with pytest.raises(DomainError):
        log_gamma(s)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.5, 10.0, 54.5])
@pytest.mark.parametrize("x", [0.01, 0.7, 3.0, 11.0, 60.0, 200.0])
def test_incomplete_gamma_matches_scipy(a, x):
    assert regularized_gamma_p(a, x) == pytest.approx(sp.gammainc(a, x), rel=1e-10, abs=1e-14)
    assert regularized_gamma_q(a, x) == pytest.approx(sp.gammaincc(a, x), rel=1e-10, abs=1e-14)


def test_incomplete_gamma_edges():
    assert regularized_gamma_p(2.0, 0.0) == 0.0
    assert regularized_gamma_q(2.0, 0.0) == 1.0
    assert regularized_gamma_p(2.0, math.inf) == 1.0
    with pytest.raises(DomainError):
        regularized_gamma_p(0.0, 1.0)
    with pytest.raises(DomainError):
        regularized_gamma_q(1.0, -1.0)


@pytest.mark.parametrize("dof", [1, 2, 18, 20, 109, 131])
def test_chi_square_tails_match_scipy(dof):
    for x in (0.5, dof * 0.8, float(dof), dof * 1.5, dof * 3.0):
        assert chi_square_sf(x, dof) == pytest.approx(stats.chi2.sf(x, dof), rel=1e-9, abs=1e-15)
        assert chi_square_cdf(x, dof) == pytest.approx(stats.chi2.cdf(x, dof), rel=1e-9, abs=1e-15)


def test_chi_square_thresholds_at_five_percent():
    assert chi_square_sf(31.41, 20) == pytest.approx(0.05, abs=0.001)
    assert chi_square_sf(134.4, 109) == pytest.approx(0.05, abs=0.001)
    assert chi_square_quantile(0.95, 20) == pytest.approx(31.41, abs=0.01)
    assert chi_square_quantile(0.99, 20) == pytest.approx(37.57, abs=0.01)


@pytest.mark.parametrize("dof", [1, 5, 20, 109])
@pytest.mark.parametrize("q", [1e-6, 0.003571, 0.05, 0.5, 0.9])
def test_chi_square_inverse_matches_scipy(dof, q):
    assert chi_square_isf(q, dof) == pytest.approx(stats.chi2.isf(q, dof), rel=1e-9)
    assert chi_square_quantile(q, dof) == pytest.approx(stats.chi2.ppf(q, dof), rel=1e-8)


def test_chi_square_rejects_bad_arguments():
    with pytest.raises(DomainError):
        chi_square_sf(1.0, 0)
    with pytest.raises(DomainError):
        chi_square_sf(-1.0, 3)
    with pytest.raises(DomainError):
        chi_square_isf(0.0, 3)
    with pytest.raises(DomainError):
        chi_square_quantile(1.0, 3)


def test_normal_tails_match_scipy():
    for z in (-3.0, -1.0, 0.0, 0.5, 1.96, 2.914, 3.384, 6.0):
        assert normal_sf(z) == pytest.approx(stats.norm.sf(z), rel=1e-12)
        assert normal_cdf(z) == pytest.approx(stats.norm.cdf(z), rel=1e-12)


def test_normal_inverses():
    assert normal_isf(0.025) == pytest.approx(1.959964, abs=1e-6)
    assert normal_isf(0.5) == 0.0
    assert normal_isf(0.975) == pytest.approx(-1.959964, abs=1e-6)
    assert normal_quantile(0.995) == pytest.approx(stats.norm.ppf(0.995), rel=1e-10)
    with pytest.raises(DomainError):
        normal_isf(1.0)
