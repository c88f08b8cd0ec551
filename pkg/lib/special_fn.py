"""
Special Functions Module for wavelet-asym

Gamma on the right half-plane, the complementary error function, and the
parabolic cylinder function D_{-nu}(x) of non-positive order, computed from
its integral representation

    D_{-s}(x) = exp(-x**2/4) / Gamma(s) * int_0^inf t**(s-1) exp(-t**2/2 - x*t) dt.

Everything here is a pure function of its arguments and an immutable
SpecialFnAccuracy, so it is safe to call from many threads at once.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np
from scipy import special as sc

from lib.config_utils import as_float
from lib.error_handler import AccuracyError, DomainError, NonConvergenceError
from lib.quadrature import exp_sinh, tanh_sinh

logger = logging.getLogger("wavelet_asym.special_fn")

Number = Union[float, complex]

MAX_PCF_ARGUMENT = 40.0


@dataclass(frozen=True)
class SpecialFnAccuracy:
    """Tolerances for the special-function kernel"""

    abs_tol: float = 1e-14
    rel_tol: float = 1e-12

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError(f"tolerances must be positive, got {self.abs_tol}, {self.rel_tol}")

    @classmethod
    def from_config(cls, config: Dict[str, str]) -> "SpecialFnAccuracy":
        defaults = cls()
        return cls(as_float(config, "abs_tol", defaults.abs_tol),
                   as_float(config, "rel_tol", defaults.rel_tol))


DEFAULT_ACCURACY = SpecialFnAccuracy()


def gamma(z: Number) -> Number:
    """Gamma function for Re(z) > 0

    Real arguments return a float, complex arguments a complex.

    Raises:
        DomainError: if Re(z) <= 0
    """
    if isinstance(z, complex):
        if not z.real > 0:
            raise DomainError(f"gamma needs Re(z) > 0, got {z}")
        return complex(sc.gamma(z))
    z = float(z)
    if not z > 0:
        raise DomainError(f"gamma needs Re(z) > 0, got {z}")
    return float(sc.gamma(z))


def log_gamma(x: float) -> float:
    """log Gamma(x) for real x > 0"""
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return float(sc.gammaln(x))


def erfc(x: float) -> float:
    """Complementary error function (underflows to 0 beyond x ~ 27)"""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"erfc needs a finite argument, got {x}")
    return float(sc.erfc(x))


def erdelyi_integral(s: float, beta: float, accuracy: SpecialFnAccuracy = DEFAULT_ACCURACY,
                     log_scale: float = 0.0) -> float:
    """int_0^inf t**(s-1) exp(-t**2/2 - beta*t) dt, times exp(-log_scale)

    The range is split at max(1, |beta|) and each piece goes through a
    double-exponential rule.
    """
    if not s > 0:
        raise DomainError(f"the defining integral needs s > 0, got {s}")

    def integrand(t):
        with np.errstate(divide="ignore"):
            return np.exp((s - 1.0) * np.log(t) - 0.5 * t * t - beta * t - log_scale)

    # rough size of the scaled integral, so abs_tol stays meaningful at large |beta|
    if beta >= 0:
        magnitude = math.exp(sc.gammaln(s) - s * math.log(max(1.0, beta)))
    else:
        magnitude = math.exp((s - 1.0) * math.log(-beta) + 0.5 * beta * beta - log_scale) \
            if beta < -1.0 else 1.0
    abs_tol = accuracy.abs_tol * magnitude

    split = max(1.0, abs(beta))
    head, head_err = tanh_sinh(integrand, 0.0, split, abs_tol, accuracy.rel_tol)
    tail, tail_err = exp_sinh(integrand, split, abs_tol, accuracy.rel_tol)
    total = head + tail
    error = head_err + tail_err
    if error > max(abs_tol, accuracy.rel_tol * abs(total)) * 10:
        raise AccuracyError(f"defining integral for s={s}, beta={beta} only reached {error:.3g}",
                            {"estimate": float(total), "error": float(error)})
    return float(total)


def parabolic_cylinder_D(nu: float, x: float,
                         accuracy: SpecialFnAccuracy = DEFAULT_ACCURACY) -> float:
    """Parabolic cylinder function D_{-nu}(x) for nu >= 0

    Args:
        nu: Non-negative order parameter (the function is D of order -nu)
        x: Real argument with |x| <= 40
        accuracy: Quadrature tolerances

    Returns:
        float: D_{-nu}(x), always positive

    Raises:
        DomainError: nu < 0 or |x| > 40
        AccuracyError: the quadrature failed to reach the tolerance
    """
    nu = float(nu)
    x = float(x)
    if nu < 0:
        raise DomainError(f"parabolic_cylinder_D needs nu >= 0, got {nu}")
    if abs(x) > MAX_PCF_ARGUMENT:
        raise DomainError(f"parabolic_cylinder_D needs |x| <= {MAX_PCF_ARGUMENT}, got {x}")
    if nu == 0:
        return math.exp(-x * x / 4.0)

    # for x < 0 the integrand peaks at exp(x**2/2); factor it out
    shift = 0.5 * x * x if x < 0 else 0.0
    try:
        scaled = erdelyi_integral(nu, x, accuracy, log_scale=shift)
    except NonConvergenceError as error:
        raise AccuracyError(f"D_-{nu}({x}): {error}", error.diagnostics)
    return math.exp(-x * x / 4.0 + shift - log_gamma(nu)) * scaled


def parabolic_cylinder_D_closed_order_one(x: float) -> float:
    """D_{-1}(x) = exp(x**2/4) sqrt(pi/2) erfc(x/sqrt(2))"""
    return math.exp(x * x / 4.0) * math.sqrt(math.pi / 2.0) * erfc(x / math.sqrt(2.0))
