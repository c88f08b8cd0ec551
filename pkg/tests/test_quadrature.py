"""Tests for the double-exponential and Gauss-Legendre rules."""

import math

import numpy as np
import pytest

from lib.error_handler import NonConvergenceError
from lib.quadrature import (
    exp_sinh,
    gauss_legendre_nodes,
    gauss_legendre_panels,
    tanh_sinh,
    tanh_sinh_panels,
)


class TestTanhSinh:

    def test_smooth(self):
        value, _ = tanh_sinh(np.exp, 0.0, 1.0)
        assert value == pytest.approx(math.e - 1.0, rel=1e-13)

    def test_endpoint_singularity(self):
        value, _ = tanh_sinh(lambda t: t ** -0.5, 0.0, 1.0)
        assert value == pytest.approx(2.0, rel=1e-10)

    def test_reversed_limits(self):
        forward, _ = tanh_sinh(np.cos, 0.0, 1.0)
        backward, _ = tanh_sinh(np.cos, 1.0, 0.0)
        assert backward == pytest.approx(-forward, rel=1e-15)
        assert tanh_sinh(np.cos, 1.0, 1.0) == (0.0, 0.0)

    def test_complex_integrand(self):
        value, _ = tanh_sinh(lambda t: np.exp(1j * t), 0.0, math.pi)
        assert abs(value - 2j) < 1e-13

    def test_non_convergence(self):
        with pytest.raises(NonConvergenceError) as info:
            tanh_sinh(lambda t: np.sign(t - 1.0 / 3.0), 0.0, 1.0, abs_tol=1e-15, rel_tol=1e-15, max_level=3)
        assert info.value.diagnostics["subdivisions"] == 3


class TestExpSinh:

    def test_exponential(self):
        value, _ = exp_sinh(lambda t: np.exp(-t), 0.0)
        assert value == pytest.approx(1.0, rel=1e-12)

    def test_gaussian(self):
        value, _ = exp_sinh(lambda t: np.exp(-t * t), 0.0)
        assert value == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-12)

    def test_shifted_lower_limit(self):
        value, _ = exp_sinh(lambda t: np.exp(-t), 2.0)
        assert value == pytest.approx(math.exp(-2.0), rel=1e-12)


class TestPanels:

    def test_gauss_legendre_nodes_cached(self):
        nodes, weights = gauss_legendre_nodes(24)
        assert gauss_legendre_nodes(24)[0] is nodes
        assert weights.sum() == pytest.approx(2.0, rel=1e-14)
        assert not nodes.flags.writeable

    def test_gauss_legendre_oscillatory(self):
        edges = np.linspace(0.0, 10 * math.pi, 41)
        assert abs(gauss_legendre_panels(np.cos, edges)) < 1e-12
        assert gauss_legendre_panels(np.sin, np.linspace(0.0, math.pi, 3)) == pytest.approx(2.0, rel=1e-14)

    def test_empty_edges(self):
        assert gauss_legendre_panels(np.cos, [1.0]) == 0.0
        assert tanh_sinh_panels(np.cos, [1.0]) == (0.0, 0.0)

    def test_tanh_sinh_panels(self):
        upper = 5.0
        value, _ = tanh_sinh_panels(lambda t: np.exp(1j * t), np.linspace(0.0, upper, 11))
        expected = (np.exp(1j * upper) - 1.0) / 1j
        assert abs(value - expected) < 1e-12

    def test_panels_handle_singular_first_panel(self):
        value, _ = tanh_sinh_panels(lambda t: t ** -0.5, np.linspace(0.0, 4.0, 5))
        assert value.real == pytest.approx(4.0, rel=1e-10)

    def test_panels_many_chunks(self):
        edges = np.linspace(0.0, 600.0, 601)
        value, _ = tanh_sinh_panels(lambda t: np.exp(-0.01 * t), edges)
        assert value.real == pytest.approx(100.0 * (1.0 - math.exp(-6.0)), rel=1e-12)
