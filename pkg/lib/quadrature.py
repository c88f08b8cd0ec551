"""
Quadrature Rules for wavelet-asym

Double-exponential rules (tanh-sinh on finite intervals, exp-sinh on
half-lines) with step halving, and a vectorized composite Gauss-Legendre rule
over a list of panel edges. All integrands are numpy-vectorized callables and
may be complex-valued.
"""

import logging
import math
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import expit

from lib.error_handler import NonConvergenceError

logger = logging.getLogger("wavelet_asym.quadrature")

_HALF_PI = math.pi / 2.0

# Extent of the trapezoidal grid in the auxiliary variable. The finite rule
# reaches within ~1e-270 of its endpoints, enough for algebraic singularities
# t**(s-1) with s >= 0.25.
_TANH_SINH_EXTENT = 6.0
_EXP_SINH_LOWER = -6.0
_EXP_SINH_UPPER = 4.5

Integrand = Callable[[np.ndarray], np.ndarray]


def _grid(level: int, lower: float, upper: float) -> Tuple[np.ndarray, float]:
    h = 0.5 ** (level + 1)
    k_lo = math.ceil(lower / h)
    k_hi = math.floor(upper / h)
    return np.arange(k_lo, k_hi + 1) * h, h


def _tanh_sinh_sum(f: Integrand, lo: float, hi: float, level: int):
    x, h = _grid(level, -_TANH_SINH_EXTENT, _TANH_SINH_EXTENT)
    y = _HALF_PI * np.sinh(x)
    width = hi - lo
    # distances to the nearer endpoint, computed without cancellation
    d_lo = width * expit(2.0 * y)
    d_hi = width * expit(-2.0 * y)
    t = np.where(x < 0, lo + d_lo, hi - d_hi)
    w = width * math.pi * np.cosh(x) * expit(2.0 * y) * expit(-2.0 * y) * h
    keep = np.where(x < 0, d_lo > 0, d_hi > 0) & (w > 0)
    with np.errstate(all="ignore"):
        values = f(t[keep])
    return np.sum(w[keep] * values)


def tanh_sinh(f: Integrand, lo: float, hi: float, abs_tol: float = 1e-13,
              rel_tol: float = 1e-12, max_level: int = 9):
    """Integrate f over the finite interval [lo, hi]

    The step in the auxiliary variable is halved until two successive
    estimates agree to max(abs_tol, rel_tol * |estimate|).

    Args:
        f: Vectorized integrand
        lo, hi: Finite limits
        abs_tol, rel_tol: Stopping tolerances
        max_level: Number of halvings before giving up

    Returns:
        tuple: (estimate, difference of the last two estimates)
    """
    if hi == lo:
        return 0.0, 0.0
    if hi < lo:
        value, error = tanh_sinh(f, hi, lo, abs_tol, rel_tol, max_level)
        return -value, error
    return _refine(lambda level: _tanh_sinh_sum(f, lo, hi, level),
                   abs_tol, rel_tol, max_level, f"tanh-sinh on [{lo}, {hi}]")


def _exp_sinh_sum(f: Integrand, lo: float, level: int):
    x, h = _grid(level, _EXP_SINH_LOWER, _EXP_SINH_UPPER)
    e = np.exp(_HALF_PI * np.sinh(x))
    t = lo + e
    w = _HALF_PI * np.cosh(x) * e * h
    with np.errstate(all="ignore"):
        values = f(t)
    values = np.where(np.isfinite(values), values, 0.0)
    return np.sum(w * values)


def exp_sinh(f: Integrand, lo: float, abs_tol: float = 1e-13,
             rel_tol: float = 1e-12, max_level: int = 9):
    """Integrate a rapidly decaying f over [lo, inf)

    Returns:
        tuple: (estimate, difference of the last two estimates)
    """
    return _refine(lambda level: _exp_sinh_sum(f, lo, level),
                   abs_tol, rel_tol, max_level, f"exp-sinh on [{lo}, inf)")


def _refine(step: Callable[[int], complex], abs_tol: float, rel_tol: float,
            max_level: int, label: str):
    previous = step(0)
    difference = math.inf
    for level in range(1, max_level + 1):
        current = step(level)
        difference = abs(current - previous)
        if level >= 2 and difference <= max(abs_tol, rel_tol * abs(current)):
            return current, difference
        previous = current
    raise NonConvergenceError(
        f"{label} did not converge after {max_level} halvings",
        {"last_estimate": complex(previous), "last_difference": float(difference),
         "subdivisions": max_level},
    )


_PANEL_CHUNK = 256


def _tanh_sinh_panel_sum(f: Integrand, edges: np.ndarray, level: int):
    x, h = _grid(level, -_TANH_SINH_EXTENT, _TANH_SINH_EXTENT)
    y = _HALF_PI * np.sinh(x)
    frac_lo = expit(2.0 * y)
    frac_hi = expit(-2.0 * y)
    shape = math.pi * np.cosh(x) * frac_lo * frac_hi * h
    total = 0j
    for start in range(0, edges.size - 1, _PANEL_CHUNK):
        chunk = edges[start:start + _PANEL_CHUNK + 1]
        lo = chunk[:-1, None]
        width = (chunk[1:] - chunk[:-1])[:, None]
        t = np.where(x < 0, lo + width * frac_lo, lo + width - width * frac_hi)
        w = width * shape
        keep = (np.where(x < 0, width * frac_lo > 0, width * frac_hi > 0)) & (w > 0)
        values = np.zeros(t.shape, dtype=complex)
        with np.errstate(all="ignore"):
            values[keep] = f(t[keep])
        total += np.sum(w * values)
    return total


def tanh_sinh_panels(f: Integrand, edges: np.ndarray, abs_tol: float = 1e-13,
                     rel_tol: float = 1e-12, max_level: int = 9):
    """Tanh-sinh rule applied to every panel at once

    All panels share one refinement level; the level is raised until the
    total over the panels settles.

    Returns:
        tuple: (estimate, difference of the last two estimates)
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return 0.0, 0.0
    return _refine(lambda level: _tanh_sinh_panel_sum(f, edges, level),
                   abs_tol, rel_tol, max_level,
                   f"panelled tanh-sinh on [{edges[0]}, {edges[-1]}]")


@lru_cache(maxsize=16)
def gauss_legendre_nodes(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the order-point Gauss-Legendre rule on [-1, 1]"""
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre_panels(f: Integrand, edges: np.ndarray, order: int = 24):
    """Composite Gauss-Legendre rule over consecutive panels

    Args:
        f: Vectorized integrand
        edges: Increasing panel boundaries
        order: Points per panel

    Returns:
        complex or float: Sum of the panel integrals
    """
    edges = np.asarray(edges, dtype=float)
    if edges.size < 2:
        return 0.0
    nodes, weights = gauss_legendre_nodes(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = mid[:, None] + half[:, None] * nodes[None, :]
    with np.errstate(all="ignore"):
        values = f(t.ravel()).reshape(t.shape)
    panel = half * (values @ weights)
    # pairwise summation keeps long oscillating sums honest
    return np.sum(panel)
