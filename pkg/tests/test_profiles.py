"""Tests for the test spectra, shifted coefficients and hypothesis checks."""

import dataclasses
import math

import numpy as np
import pytest

from lib.error_handler import ConfigError, InsufficientCoefficientsError, UnknownProfileError
from lib.mellin import WaveletSpec
from lib.profiles import (
    BUILTIN_NAMES,
    DecayClass,
    DecayKind,
    FreqProfile,
    Parity,
    builtin_profiles,
    check_hypotheses,
    declared_decay_check,
    derivative,
    family_profile,
    get_profile,
    haar_self_profile,
    origin_expansion_ratios,
    shift_coeffs,
    shift_coeffs_negative,
    zero_profile,
)


def coefficient_profile(coeffs, parity=Parity.EVEN):
    """A profile that only matters through its coefficients"""
    return FreqProfile(
        name="coefficients", lam=1.0, coeffs=tuple(complex(c) for c in coeffs),
        evaluator=lambda w: np.exp(-w * w), decay=DecayClass(DecayKind.GAUSSIAN), parity=parity,
    )


class TestBuiltinProfiles:

    def test_names(self):
        names = [p.name for p in builtin_profiles()]
        assert names == list(BUILTIN_NAMES)
        assert {"gauss", "rational", "haar-admissible"} <= set(names)

    def test_gauss_value(self):
        profile = get_profile("gauss", 1.0)
        assert complex(profile.eval(0.1)).real == pytest.approx(math.exp(-0.01), rel=1e-15)
        assert profile.coeffs[:5] == (1, 0, -1, 0, 0.5)

    def test_rational_coefficients(self):
        profile = get_profile("rational", 1.0)
        assert [c.real for c in profile.coeffs[:5]] == [1.0, 0.0, -1.0, 0.0, 1.0]
        assert profile.decay.kind is DecayKind.POLYNOMIAL
        assert profile.decay.order == pytest.approx(2.0)

    def test_haar_admissible_leading_behaviour(self):
        profile = get_profile("haar-admissible", 0.5)
        assert profile.coeffs[0] == 0
        assert profile.coeffs[1] == 1
        w = 1e-4
        assert complex(profile.eval(w) / w ** 0.5).real == pytest.approx(1.0, abs=1e-7)

    def test_even_extension(self):
        profile = get_profile("gauss", 0.5)
        w = np.array([0.3, 1.0, 2.5])
        np.testing.assert_allclose(profile.eval(-w), profile.eval(w), rtol=0, atol=0)
        assert profile.coeffs_neg == profile.coeffs

    def test_zero_profile(self):
        profile = zero_profile()
        assert np.all(profile.eval(np.linspace(-3, 3, 7)) == 0)
        assert all(c == 0 for c in profile.coeffs)

    def test_haar_self_is_the_wavelet_transform(self):
        profile = haar_self_profile()
        w = np.linspace(0.1, 20, 50)
        np.testing.assert_allclose(profile.eval(w), WaveletSpec.haar().psi_hat(w), atol=1e-15)
        assert profile.coeffs[0] == 0
        assert profile.coeffs[1] == pytest.approx(0.25j)

    def test_lambda_range(self):
        with pytest.raises(ConfigError):
            family_profile("bad", "gauss", 1.5)
        with pytest.raises(ConfigError):
            family_profile("bad", "gauss", 0.0)

    def test_unknown(self):
        with pytest.raises(UnknownProfileError):
            get_profile("no-such-profile")
        with pytest.raises(UnknownProfileError):
            family_profile("x", "lorentz")

    def test_width_and_amplitude(self):
        profile = family_profile("wide", "gauss", 1.0, width=2.0, amplitude=3.0)
        assert profile.coeffs[0] == pytest.approx(3.0)
        assert profile.coeffs[2] == pytest.approx(-3.0 / 4.0)
        assert complex(profile.eval(2.0)).real == pytest.approx(3.0 * math.exp(-1.0))

    @pytest.mark.parametrize("name", ["gauss", "rational", "haar-admissible"])
    @pytest.mark.parametrize("lam", [0.5, 1.0])
    def test_origin_expansion_order(self, name, lam):
        profile = get_profile(name, lam)
        for n in range(1, 6):
            ratios = origin_expansion_ratios(profile, n)
            assert np.all(np.isfinite(ratios))
            assert np.max(ratios) <= 10.0 * ratios[0] + 1e-12

    def test_decay_metadata_truthful(self):
        w = np.logspace(0, 4, 41)
        for profile in builtin_profiles(0.5):
            envelope = profile.decay.envelope(w)
            assert np.all(np.abs(profile.eval(w)) <= envelope + 1e-300), profile.name


class TestShiftCoeffs:

    def test_zero_translation(self):
        profile = get_profile("gauss", 1.0)
        assert shift_coeffs(profile, 0.0, 6).d == profile.coeffs[:6]

    def test_hand_example(self):
        shifted = shift_coeffs(coefficient_profile((1, 1, 1)), 1.0, 3)
        np.testing.assert_allclose(shifted.d, [1, 1 + 1j, 0.5 + 1j], atol=1e-15)
        assert len(shifted) == 3
        assert shifted[1] == shifted.d[1]

    def test_vanishing_leading_coefficient(self):
        shifted = shift_coeffs(coefficient_profile((0, 1)), 2.0, 2)
        np.testing.assert_allclose(shifted.d, [0, 1], atol=1e-15)

    def test_double_loop(self):
        profile = get_profile("rational", 0.5)
        for b in (0.0, 1.0, -2.5):
            d = shift_coeffs(profile, b, 8).d
            for s in range(8):
                direct = sum((1j * b) ** r / math.factorial(r) * profile.coeffs[s - r] for r in range(s + 1))
                assert abs(d[s] - direct) <= 1e-13 * max(1.0, abs(direct))

    @pytest.mark.parametrize("b", [0.0, 1.0, -2.5])
    def test_matches_taylor_coefficients(self, b):
        # Taylor coefficients of exp(ibw) * sum c_s w^s from a contour average
        profile = get_profile("gauss", 1.0)
        n = 5
        radius = 0.5
        theta = 2 * math.pi * np.arange(64) / 64
        w = radius * np.exp(1j * theta)
        values = np.exp(1j * b * w) * sum(profile.coeffs[s] * w ** s for s in range(n))
        taylor = [np.mean(values * np.exp(-1j * k * theta)) / radius ** k for k in range(n)]
        np.testing.assert_allclose(shift_coeffs(profile, b, n).d, taylor, atol=1e-8)

    def test_negative_half_line(self):
        profile = get_profile("gauss", 1.0)
        d = shift_coeffs(profile, 1.5, 3).d
        d_neg = shift_coeffs_negative(profile, 1.5, 3).d
        np.testing.assert_allclose(d_neg, np.conj(d), atol=1e-15)

    def test_odd_parity_reflection(self):
        profile = coefficient_profile((1, 2, 3), Parity.ODD)
        assert profile.coeffs_neg == (-1, -2, -3)
        analytic = coefficient_profile((1, 2, 3), Parity.ANALYTIC)
        assert analytic.coeffs_neg == (1, -2, 3)

    def test_insufficient(self):
        profile = coefficient_profile((1, 1, 1))
        with pytest.raises(InsufficientCoefficientsError):
            shift_coeffs(profile, 0.0, 4)
        with pytest.raises(InsufficientCoefficientsError):
            shift_coeffs_negative(profile, 0.0, 4)


class TestHypotheses:

    def test_gauss_mexican_smooth(self):
        report = check_hypotheses(get_profile("gauss", 1.0), WaveletSpec.mexican_hat(), 2)
        assert report.all_passed, report.as_dict()
        assert {c.name for c in report.checks} >= {"continuity", "origin_expansion", "kernel_origin",
                                                   "decay", "growth"}

    def test_rational_morlet(self):
        report = check_hypotheses(get_profile("rational", 1.0), WaveletSpec.morlet(2.0), 0)
        assert report.all_passed, report.as_dict()

    @pytest.mark.parametrize("wavelet", [WaveletSpec.morlet(2.0), WaveletSpec.mexican_hat(), WaveletSpec.haar()])
    def test_zero_profile_passes(self, wavelet):
        assert check_hypotheses(zero_profile(), wavelet, 1).all_passed

    def test_haar_needs_vanishing_leading_coefficient(self):
        failing = check_hypotheses(get_profile("gauss", 1.0), WaveletSpec.haar(), 0)
        assert not failing.all_passed
        assert [c.name for c in failing.checks if not c.passed] == ["vanishing_d0"]
        assert check_hypotheses(get_profile("haar-admissible", 0.5), WaveletSpec.haar(), 0).all_passed

    def test_missing_growth_bound(self):
        profile = dataclasses.replace(get_profile("gauss", 1.0), sigma_bound=None)
        report = check_hypotheses(profile, WaveletSpec.mexican_hat(), 0)
        growth = [c for c in report.checks if c.name == "growth"][0]
        assert not growth.passed

    def test_report_dict(self):
        record = check_hypotheses(get_profile("gauss", 1.0), WaveletSpec.morlet(2.0), 0).as_dict()
        assert record["all_passed"] is True
        assert record["wavelet"] == "morlet:2"
        assert all(set(c) == {"name", "passed", "witness", "detail"} for c in record["checks"])

    def test_declared_decay(self):
        rational = get_profile("rational", 1.0)
        assert declared_decay_check(rational).passed
        lying = dataclasses.replace(rational, decay=DecayClass(DecayKind.GAUSSIAN))
        check = declared_decay_check(lying)
        assert not check.passed
        assert check.witness > 0
        report = check_hypotheses(lying, WaveletSpec.morlet(2.0), 0)
        assert [c.name for c in report.checks if not c.passed] == ["declared_decay"]

    def test_negative_m(self):
        with pytest.raises(ConfigError):
            check_hypotheses(zero_profile(), WaveletSpec.haar(), -1)


class TestDerivative:

    def test_orders(self):
        w = np.array([0.5, 1.0, 2.0])
        np.testing.assert_allclose(derivative(np.sin, w, 0), np.sin(w), atol=1e-15)
        np.testing.assert_allclose(derivative(np.sin, w, 1), np.cos(w), atol=1e-8)
        np.testing.assert_allclose(derivative(np.sin, w, 2), -np.sin(w), atol=1e-6)
