"""Tests for the special-function kernel."""

import math

import mpmath
import numpy as np
import pytest

from lib.error_handler import DomainError
from lib.special_fn import (
    SpecialFnAccuracy,
    erdelyi_integral,
    erfc,
    gamma,
    log_gamma,
    parabolic_cylinder_D,
    parabolic_cylinder_D_closed_order_one,
)

mpmath.mp.dps = 30


class TestGamma:

    def test_integer_values(self):
        assert gamma(1) == pytest.approx(1.0, rel=1e-15)
        assert gamma(5) == pytest.approx(24.0, rel=1e-14)

    def test_half(self):
        assert gamma(0.5) == pytest.approx(1.7724538509055159, rel=1e-14)

    @pytest.mark.parametrize("z", [0.3, 1.7, 4.2])
    def test_against_mpmath(self, z):
        reference = mpmath.gamma(z)
        assert gamma(z) == pytest.approx(float(reference), rel=1e-13)

    def test_complex_argument(self):
        z = complex(1.5, 2.0)
        reference = complex(mpmath.gamma(mpmath.mpc(1.5, 2.0)))
        value = gamma(z)
        assert isinstance(value, complex)
        assert abs(value - reference) <= 1e-12 * abs(reference)

    def test_recurrence(self):
        rng = np.random.default_rng(7)
        for z in rng.uniform(0.1, 19.0, size=100):
            assert gamma(z + 1.0) == pytest.approx(z * gamma(z), rel=1e-12)

    @pytest.mark.parametrize("z", [0.0, -1.0, -0.5, complex(-0.5, 1.0)])
    def test_domain(self, z):
        with pytest.raises(DomainError):
            gamma(z)

    def test_log_gamma(self):
        assert log_gamma(10.0) == pytest.approx(math.log(362880.0), rel=1e-14)
        with pytest.raises(DomainError):
            log_gamma(0.0)


class TestErfc:

    def test_values(self):
        assert erfc(0.0) == 1.0
        assert erfc(1.0) == pytest.approx(0.15729920705028513, rel=1e-14)
        assert erfc(30.0) <= 1e-300

    def test_range_and_monotone(self):
        x = np.linspace(-6, 6, 121)
        values = np.array([erfc(v) for v in x])
        assert np.all(np.diff(values) <= 0)
        assert np.all((values >= 0) & (values <= 2))

    def test_non_finite(self):
        with pytest.raises(DomainError):
            erfc(math.inf)


class TestParabolicCylinder:

    def test_order_zero(self):
        assert parabolic_cylinder_D(0, 2.0) == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_order_one_at_zero(self):
        assert parabolic_cylinder_D(1, 0.0) == pytest.approx(math.sqrt(math.pi / 2.0), rel=1e-12)

    @pytest.mark.parametrize("x", [-3.0, -1.0, 0.5, 1.0, 2.0])
    def test_order_one_closed_form(self, x):
        assert parabolic_cylinder_D(1, x) == pytest.approx(parabolic_cylinder_D_closed_order_one(x), rel=1e-11)

    @pytest.mark.parametrize("nu", [0.25, 0.5, 1.5, 2.5, 4.0])
    @pytest.mark.parametrize("x", [-3.0, -1.0, 0.0, 1.0, 3.0])
    def test_against_mpmath(self, nu, x):
        reference = float(mpmath.pcfd(-nu, x))
        assert parabolic_cylinder_D(nu, x) == pytest.approx(reference, rel=1e-10)

    def test_positive(self):
        for nu in (0.0, 0.5, 2.0):
            for x in np.linspace(-5, 5, 21):
                assert parabolic_cylinder_D(nu, x) > 0

    def test_domain(self):
        with pytest.raises(DomainError):
            parabolic_cylinder_D(-0.5, 1.0)
        with pytest.raises(DomainError):
            parabolic_cylinder_D(1.0, 41.0)

    def test_loose_accuracy_still_close(self):
        loose = SpecialFnAccuracy(abs_tol=1e-8, rel_tol=1e-8)
        assert parabolic_cylinder_D(1.5, 1.0, loose) == pytest.approx(float(mpmath.pcfd(-1.5, 1.0)), rel=1e-7)


class TestDefiningIntegral:
    """int_0^inf t^(s-1) exp(-t^2/2 - beta t) dt = exp(beta^2/4) Gamma(s) D_{-s}(beta)"""

    @pytest.mark.parametrize("s", [0.25, 0.5, 1.0, 2.0, 3.0])
    @pytest.mark.parametrize("beta", [-3.0, -1.0, 0.0, 1.0, 3.0])
    def test_identity(self, s, beta):
        value = erdelyi_integral(s, beta)
        second = mpmath.exp(mpmath.mpf(beta) ** 2 / 4) * mpmath.gamma(s) * mpmath.pcfd(-s, beta)
        assert value == pytest.approx(float(second), rel=1e-10)
        closed = math.exp(beta * beta / 4.0) * gamma(s) * parabolic_cylinder_D(s, beta)
        assert value == pytest.approx(closed, rel=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            erdelyi_integral(0.0, 1.0)

    def test_accuracy_validation(self):
        with pytest.raises(DomainError):
            SpecialFnAccuracy(abs_tol=0.0)
