"""Tests for remainders, convergence studies and constant adjudication."""

import numpy as np
import pytest

from lib.error_handler import ConfigError, DegenerateFitError, HaarAdmissibilityError
from lib.expansion import ExpansionRequest, expand, mexican_expansion
from lib.mellin import WaveletSpec
from lib.oracle import QuadratureSettings, cwt_oracle, haar_F_integral
from lib.profiles import get_profile, haar_self_profile, zero_profile
from lib.remainder import (
    DISPLAY_OFFSET_LIMIT,
    constant_adjudication,
    convergence_study,
    fit_slope,
    haar_delta_explicit,
    haar_i1_remainder,
    predicted_slope,
    remainder_by_difference,
    render_adjudication,
)

MORLET = WaveletSpec.morlet(2.0)
MEXICAN = WaveletSpec.mexican_hat()
HAAR = WaveletSpec.haar()
GRID = np.logspace(2.0, 3.5, 8)


def haar_request(a=200.0, n=2, b=0.0):
    return ExpansionRequest(get_profile("haar-admissible", 0.5), HAAR, b, a, n)


class TestRemainderByDifference:

    def test_zero_profile(self):
        req = ExpansionRequest(zero_profile(), MEXICAN, 0.0, 100.0, 2)
        assert remainder_by_difference(req, 0j, expand(req)) == 0

    def test_term_count_mismatch(self):
        req = ExpansionRequest(get_profile("gauss"), MEXICAN, 0.0, 100.0, 3)
        with pytest.raises(ConfigError):
            remainder_by_difference(req, 0j, expand(req.with_terms(2)))

    def test_telescoping(self):
        req = ExpansionRequest(get_profile("gauss"), MEXICAN, 0.7, 50.0, 5)
        oracle = 0.3 + 0.1j
        full = mexican_expansion(req)
        for n in range(1, 5):
            shorter = remainder_by_difference(req.with_terms(n), oracle, mexican_expansion(req.with_terms(n)))
            longer = remainder_by_difference(req.with_terms(n + 1), oracle,
                                             mexican_expansion(req.with_terms(n + 1)))
            assert abs((shorter - longer) - full.terms[n]) < 1e-15

    @pytest.mark.parametrize("wavelet,name,lam,b", [
        (MORLET, "gauss", 1.0, 0.7),
        (MEXICAN, "gauss", 0.5, 0.7),
        (HAAR, "haar-admissible", 0.5, 0.3),
    ])
    def test_telescoping_against_reference(self, wavelet, name, lam, b):
        a = 150.0
        profile = get_profile(name, lam)
        oracle = cwt_oracle(profile, wavelet, b, a)
        F_b = haar_F_integral(profile, b) if wavelet is HAAR else None
        full = expand(ExpansionRequest(profile, wavelet, b, a, 5), F_b=F_b)
        gaps = []
        for n in range(1, 6):
            req = ExpansionRequest(profile, wavelet, b, a, n)
            gaps.append(remainder_by_difference(req, oracle, expand(req, F_b=F_b)))
        for n in range(1, 5):
            assert abs((gaps[n - 1] - gaps[n]) - full.terms[n]) <= 1e-14 * max(1.0, abs(full.terms[n]))

    def test_mexican_hat_size(self):
        a = 100.0
        req = ExpansionRequest(get_profile("gauss"), MEXICAN, 0.0, a, 2)
        gap = remainder_by_difference(req, cwt_oracle(req.profile, MEXICAN, 0.0, a), expand(req))
        assert gap.real == pytest.approx(-3.0 * a ** -2.5, rel=1e-3)


class TestSlopes:

    @pytest.mark.parametrize("profile,lam,wavelet,b,n,expected", [
        ("gauss", 1.0, MEXICAN, 0.0, 1, -2.5),
        ("gauss", 1.0, MEXICAN, 0.0, 2, -2.5),
        ("gauss", 1.0, MEXICAN, 0.0, 3, -4.5),
        ("gauss", 1.0, MEXICAN, 1.5, 2, -2.5),
        ("gauss", 1.0, MORLET, 0.0, 1, -2.5),
        ("haar-admissible", 0.5, HAAR, 0.0, 2, -3.0),
    ])
    def test_predicted(self, profile, lam, wavelet, b, n, expected):
        req = ExpansionRequest(get_profile(profile, lam), wavelet, b, 100.0, n)
        assert predicted_slope(req) == pytest.approx(expected)

    def test_predicted_none_for_zero_profile(self):
        assert predicted_slope(ExpansionRequest(zero_profile(), MEXICAN, 0.0, 100.0, 1)) is None

    def test_fit(self):
        grid = np.logspace(1, 3, 5)
        assert fit_slope(grid, 7.0 * grid ** -2.0) == pytest.approx(-2.0, abs=1e-12)

    def test_fit_degenerate(self):
        with pytest.raises(DegenerateFitError):
            fit_slope([100.0], [1e-3])
        with pytest.raises(DegenerateFitError):
            fit_slope([100.0, 1000.0], [1e-3, 0.0])

    @pytest.mark.parametrize("grid", [[100.0, 200.0, 400.0, 800.0], [100.0, 50.0, 5000.0], [100.0]])
    def test_grid_validation(self, grid):
        with pytest.raises(ConfigError):
            convergence_study(get_profile("gauss"), MEXICAN, 0.0, 1, grid)

    def test_degenerate_study(self):
        report = convergence_study(zero_profile(), MEXICAN, 0.0, 1, GRID, workers=1)
        assert report.degenerate
        assert report.fitted_slope is None
        assert report.predicted_slope is None
        assert report.passed is False
        assert all(e == 0 for e in report.errors)
        assert report.as_dict()["pass"] is False


class TestHaarExplicitRemainder:

    def test_matches_positive_half_of_the_gap(self):
        req = haar_request(a=200.0, n=1)
        explicit = haar_delta_explicit(req.profile, 0.0, 200.0, 1)
        direct = haar_i1_remainder(req)
        assert abs(explicit - direct) <= 1e-6 * abs(direct)

    def test_integration_by_parts(self):
        profile = get_profile("haar-admissible", 0.5)
        plain = haar_delta_explicit(profile, 0.0, 200.0, 2, m=0)
        once = haar_delta_explicit(profile, 0.0, 200.0, 2, m=1)
        assert abs(once - plain) <= 1e-3 * abs(plain)

    def test_stable_under_tighter_quadrature(self):
        profile = get_profile("haar-admissible", 0.5)
        tight = QuadratureSettings(abs_tol=1e-15, rel_tol=1e-12, envelope_tol=1e-20, nodes_per_panel=32)
        for n in (1, 2):
            default = haar_delta_explicit(profile, 0.0, 200.0, n)
            tightened = haar_delta_explicit(profile, 0.0, 200.0, n, q=tight)
            assert abs(tightened - default) <= 1e-7 * abs(default)

    def test_errors(self):
        with pytest.raises(HaarAdmissibilityError):
            haar_delta_explicit(get_profile("gauss"), 0.0, 100.0, 1)
        profile = get_profile("haar-admissible", 0.5)
        with pytest.raises(ConfigError):
            haar_delta_explicit(profile, 0.0, 100.0, 2, m=3)
        with pytest.raises(ConfigError):
            haar_delta_explicit(profile, 0.0, 100.0, 0)
        with pytest.raises(ConfigError):
            haar_delta_explicit(profile, 0.0, 100.0, 1, m=1)
        with pytest.raises(ConfigError):
            haar_delta_explicit(haar_self_profile(), 0.0, 100.0, 2, m=1)


@pytest.mark.slow
class TestConvergenceStudies:

    @pytest.mark.parametrize("profile,lam,wavelet,b,n", [
        ("gauss", 1.0, MEXICAN, 0.0, 1),
        ("gauss", 1.0, MEXICAN, 0.0, 2),
        ("gauss", 1.0, MEXICAN, 1.5, 2),
        ("gauss", 1.0, MORLET, 0.0, 1),
        ("haar-admissible", 0.5, HAAR, 0.0, 2),
    ])
    def test_observed_order(self, profile, lam, wavelet, b, n):
        report = convergence_study(get_profile(profile, lam), wavelet, b, n, GRID, workers=2)
        assert not report.degenerate
        assert report.passed, report.as_dict()
        assert abs(report.fitted_slope - report.predicted_slope) < report.slope_tolerance
        assert report.has_leading_extra is (wavelet is HAAR)

    def test_report_is_reproducible(self):
        first = convergence_study(get_profile("gauss"), MEXICAN, 0.0, 1, GRID, workers=3)
        second = convergence_study(get_profile("gauss"), MEXICAN, 0.0, 1, GRID, workers=1)
        assert first.errors == second.errors
        assert first.a_grid == tuple(GRID)


@pytest.mark.slow
class TestAdjudication:

    @pytest.mark.parametrize("profile,lam,wavelet,n", [
        ("gauss", 1.0, MORLET, 1),
        ("gauss", 1.0, MEXICAN, 1),
        ("haar-admissible", 0.5, HAAR, 2),
    ])
    def test_printed_constants_rejected(self, profile, lam, wavelet, n):
        report = constant_adjudication(get_profile(profile, lam), wavelet, 0.0, n, GRID, workers=2)
        assert report.rederived_consistent, report.as_dict()
        assert report.display_rejected
        assert report.display_offset > DISPLAY_OFFSET_LIMIT

    def test_mexican_offset_is_the_factor_two(self):
        report = constant_adjudication(get_profile("gauss"), MEXICAN, 0.0, 1, GRID, workers=2)
        assert report.display_offset == pytest.approx(1.0, abs=1e-2)

    def test_markdown(self):
        report = constant_adjudication(get_profile("gauss"), MEXICAN, 0.0, 1, GRID, workers=2)
        text = render_adjudication([report])
        assert text.startswith("# Constant adjudication")
        assert "| mexican | gauss | 0 | 1 |" in text
        assert text.endswith("\n")


@pytest.mark.slow
class TestOrderAcrossTermCounts:

    def test_fitted_slope_decreases_with_n(self):
        profile = get_profile("gauss", 1.0)
        reports = [convergence_study(profile, MORLET, 0.7, n, GRID, workers=2) for n in (1, 2, 3)]
        assert [r.predicted_slope for r in reports] == pytest.approx([-1.5, -2.5, -3.5])
        slopes = [r.fitted_slope for r in reports]
        assert all(slope is not None for slope in slopes), slopes
        assert slopes[0] > slopes[1] > slopes[2]
        assert all(r.passed for r in reports), [r.as_dict() for r in reports]
