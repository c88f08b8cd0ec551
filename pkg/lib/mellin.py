"""
Mellin Transform Module for wavelet-asym

Mother wavelets as seen from the frequency side (h = conj(psi_hat)), closed
forms of their generalized Mellin transforms, and a numerical evaluator of

    M[h; z] = lim_{eps -> 0+} int_0^inf t**(z-1) h(t) exp(-eps t**p) dt

used to validate the closed forms.
"""

import cmath
import logging
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from lib.error_handler import (
    ConfigError,
    DomainError,
    NonConvergenceError,
    StripViolationError,
)
from lib.special_fn import DEFAULT_ACCURACY, SpecialFnAccuracy, gamma, parabolic_cylinder_D

logger = logging.getLogger("wavelet_asym.mellin")

SQRT_2PI = math.sqrt(2.0 * math.pi)
DEFAULT_EPS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


class WaveletKind(str, Enum):
    MORLET = "morlet"
    MEXICAN_HAT = "mexican_hat"
    HAAR = "haar"


@dataclass(frozen=True)
class TailSpec:
    """Large-argument form h(t) ~ exp(i tau t**p) sum b_s t**(-s-beta)"""

    tau: float
    p: float
    beta: float


@dataclass(frozen=True)
class WaveletSpec:
    """A mother wavelet through its conjugated Fourier transform

    rho is the origin order (h(t) = O(t**rho) as t -> 0+); tail is None for
    the Gaussian-type wavelets, whose transforms decay faster than any power.
    """

    kind: WaveletKind
    omega0: float = 0.0
    rho: float = 0.0
    tail: Optional[TailSpec] = None

    @classmethod
    def morlet(cls, omega0: float = 2.0) -> "WaveletSpec":
        if not omega0 >= 0:
            raise ConfigError(f"Morlet needs omega0 >= 0, got {omega0}")
        return cls(WaveletKind.MORLET, float(omega0), 0.0, None)

    @classmethod
    def mexican_hat(cls) -> "WaveletSpec":
        return cls(WaveletKind.MEXICAN_HAT, 0.0, 2.0, None)

    @classmethod
    def haar(cls) -> "WaveletSpec":
        return cls(WaveletKind.HAAR, 0.0, 1.0, TailSpec(tau=1.0, p=1.0, beta=1.0))

    @classmethod
    def parse(cls, text: str) -> "WaveletSpec":
        """Parse the CLI form: `morlet:OMEGA0`, `mexican` or `haar`"""
        name, _, argument = text.strip().lower().partition(":")
        if name == "morlet":
            try:
                return cls.morlet(float(argument) if argument else 2.0)
            except ValueError:
                raise ConfigError(f"bad Morlet frequency in {text!r}")
        if name in ("mexican", "mexican_hat", "mexican-hat"):
            return cls.mexican_hat()
        if name == "haar":
            return cls.haar()
        raise ConfigError(f"unknown wavelet {text!r} (expected morlet:OMEGA0, mexican or haar)")

    @property
    def label(self) -> str:
        if self.kind is WaveletKind.MORLET:
            return f"morlet:{self.omega0:g}"
        if self.kind is WaveletKind.MEXICAN_HAT:
            return "mexican"
        return "haar"

    def psi_hat(self, omega) -> np.ndarray:
        """Fourier transform of the mother wavelet, psi_hat(w) = int exp(-iwt) psi(t) dt"""
        return np.conj(self.psi_hat_conj(omega))

    def psi_hat_conj(self, omega) -> np.ndarray:
        """h(w) = conj(psi_hat(w)) on the whole real line"""
        w = np.asarray(omega, dtype=float)
        if self.kind is WaveletKind.MORLET:
            return (SQRT_2PI * np.exp(-0.5 * (w - self.omega0) ** 2)).astype(complex)
        if self.kind is WaveletKind.MEXICAN_HAT:
            return (SQRT_2PI * w * w * np.exp(-0.5 * w * w)).astype(complex)
        # -4i exp(iw/2) sin^2(w/4) / w, stable near the origin
        safe = np.where(w == 0.0, 1.0, w)
        value = -4j * np.exp(0.5j * w) * np.sin(0.25 * w) ** 2 / safe
        return np.where(w == 0.0, 0.0, value)

    def psi_time(self, t) -> np.ndarray:
        """The Haar mother wavelet in time (the only one needed there)"""
        if self.kind is not WaveletKind.HAAR:
            raise ConfigError(f"time-domain wavelet only available for Haar, not {self.label}")
        t = np.asarray(t, dtype=float)
        return np.where((t >= 0) & (t < 0.5), 1.0, np.where((t >= 0.5) & (t < 1.0), -1.0, 0.0))

    def tail_components(self, sign: int = 1):
        """(amplitude(u), frequency) pairs with h(sign * u) = sum amplitude(u) exp(i frequency u)

        Only the Haar kernel has such a slowly decaying tail; None otherwise.
        """
        if self.kind is not WaveletKind.HAAR:
            return None
        s = 1 if sign >= 0 else -1
        return (
            (lambda u: s * 1j / np.asarray(u), 0.0),
            (lambda u: -2.0 * s * 1j / np.asarray(u), 0.5 * s),
            (lambda u: s * 1j / np.asarray(u), float(s)),
        )

    @property
    def oscillation_frequency(self) -> float:
        return 1.0 if self.kind is WaveletKind.HAAR else 0.0

    def kernel_cutoff(self, tol: float = 1e-17) -> Optional[float]:
        """Argument beyond which |h| < tol on the positive axis (None when h decays like 1/t)"""
        if self.kind is WaveletKind.MORLET:
            return self.omega0 + math.sqrt(2.0 * math.log(SQRT_2PI / tol))
        if self.kind is WaveletKind.MEXICAN_HAT:
            u = 2.0
            # solve sqrt(2 pi) u^2 exp(-u^2/2) = tol by fixed-point iteration
            for _ in range(50):
                u = math.sqrt(2.0 * math.log(SQRT_2PI * u * u / tol))
            return u
        return None


@dataclass(frozen=True)
class MellinValue:
    """M[h; z] together with how it was obtained"""

    z: complex
    value: complex
    method: str
    error: float = 0.0
    strip: Tuple[float, float] = (-math.inf, math.inf)

    def __post_init__(self):
        if not cmath.isfinite(self.value):
            raise DomainError(f"Mellin value at z={self.z} is not finite")


@dataclass(frozen=True)
class OscillatoryKernel:
    """A kernel h with known large-argument structure

    value evaluates h anywhere; for t >= split the kernel equals
    sum_k amplitude_k(t) * exp(i * frequency_k * t), which lets the tail be
    integrated with Fourier-weighted quadrature.
    """

    value: Callable[[np.ndarray], np.ndarray]
    components: Tuple[Tuple[Callable[[np.ndarray], np.ndarray], float], ...]
    origin_order: float = 0.0
    split: float = 1.0


def exponential_kernel(c: float) -> OscillatoryKernel:
    """h(t) = exp(i c t)"""
    return OscillatoryKernel(
        value=lambda t: np.exp(1j * c * np.asarray(t)),
        components=((lambda t: np.ones_like(np.asarray(t), dtype=complex), c),),
    )


def haar_oscillatory_kernel(sign: int = 1) -> OscillatoryKernel:
    """Oscillatory part of conj(psi_hat)(sign * t) for the Haar wavelet

    sign=+1: (i/t)(-2 exp(it/2) + exp(it)); sign=-1: -(i/t)(-2 exp(-it/2) + exp(-it)).
    """
    s = 1 if sign >= 0 else -1

    def value(t):
        t = np.asarray(t, dtype=float)
        return s * 1j / t * (-2.0 * np.exp(0.5j * s * t) + np.exp(1j * s * t))

    return OscillatoryKernel(
        value=value,
        components=WaveletSpec.haar().tail_components(s)[1:],
        origin_order=-1.0,
    )


def _power(t: np.ndarray, z: complex) -> np.ndarray:
    return np.exp((z - 1.0) * np.log(t))


def _quad_complex(func: Callable[[float], complex], lo: float, hi: float, **kwargs) -> complex:
    real, _ = integrate.quad(lambda t: func(t).real, lo, hi, **kwargs)
    imag, _ = integrate.quad(lambda t: func(t).imag, lo, hi, **kwargs)
    return complex(real, imag)


def fourier_tail(amplitude: Callable[[float], complex], lo: float, kappa: float) -> complex:
    """int_lo^inf amplitude(t) exp(i kappa t) dt for a decaying amplitude"""
    if kappa == 0:
        return _quad_complex(amplitude, lo, np.inf, limit=500, epsabs=1e-13, epsrel=1e-11)
    w = abs(kappa)
    sign = 1.0 if kappa > 0 else -1.0
    parts = {}
    for name, take in (("r", lambda v: v.real), ("i", lambda v: v.imag)):
        for weight in ("cos", "sin"):
            parts[name + weight], _ = integrate.quad(
                lambda t: take(amplitude(t)), lo, np.inf, weight=weight, wvar=w,
                limlst=200, limit=500, epsabs=1e-13)
    real = parts["rcos"] - sign * parts["isin"]
    imag = sign * parts["rsin"] + parts["icos"]
    return complex(real, imag)


def _regularized_at(h, z: complex, p: float, eps: float) -> complex:
    damp = lambda t: math.exp(-eps * t ** p)
    if isinstance(h, OscillatoryKernel):
        split = h.split
        head = _quad_complex(
            lambda t: complex(_power(np.array(t), z) * h.value(np.array(t)) * damp(t)),
            0.0, split, limit=500, epsabs=1e-13, epsrel=1e-11)
        tail = 0j
        for amplitude, kappa in h.components:
            tail += fourier_tail(
                lambda t, amplitude=amplitude: complex(
                    _power(np.array(t), z) * amplitude(np.array(t)) * damp(t)),
                split, kappa)
        return head + tail
    integrand = lambda t: complex(_power(np.array(t), z) * np.asarray(h(np.array(t))) * damp(t))
    head = _quad_complex(integrand, 0.0, 1.0, limit=500, epsabs=1e-13, epsrel=1e-11)
    tail = _quad_complex(integrand, 1.0, np.inf, limit=500, epsabs=1e-13, epsrel=1e-11)
    return head + tail


def _extrapolate_to_zero(eps: Sequence[float], values: Sequence[complex]) -> complex:
    """Value at eps = 0 of the quadratic through three (eps, value) points"""
    total = 0j
    for k in range(3):
        weight = 1.0
        for j in range(3):
            if j != k:
                weight *= eps[j] / (eps[j] - eps[k])
        total += weight * values[k]
    return total


def mellin_regularized(h: Union[Callable, OscillatoryKernel], z: complex, p: float = 1.0,
                       eps_sequence: Sequence[float] = DEFAULT_EPS,
                       origin_order: Optional[float] = None,
                       tol: float = 1e-7) -> MellinValue:
    """Numerical generalized Mellin transform

    Each eps of the sequence gives a damped integral; the last three are
    extrapolated to eps = 0 and compared with the extrapolation of the three
    before them.

    Args:
        h: Vectorized kernel, or an OscillatoryKernel for oscillating tails
        z: Mellin variable
        p: Exponent of the damping factor exp(-eps t**p)
        eps_sequence: Strictly decreasing positive values ending at or below 1e-6
        origin_order: rho with h(t) = O(t**rho) at 0 (default from the kernel, else 0)
        tol: Accepted relative disagreement of successive extrapolations

    Returns:
        MellinValue with method "regularized_quadrature"

    Raises:
        DomainError: Re(z) + rho <= 0 or a malformed eps sequence
        NonConvergenceError: the extrapolations do not settle
    """
    z = complex(z)
    eps = [float(e) for e in eps_sequence]
    if len(eps) < 3 or any(b >= a for a, b in zip(eps, eps[1:])) or eps[-1] <= 0:
        raise DomainError("eps_sequence must hold at least three strictly decreasing positive values")
    if eps[-1] > 1e-6:
        raise DomainError(f"eps_sequence must end at or below 1e-6, got {eps[-1]}")
    if origin_order is None:
        origin_order = h.origin_order if isinstance(h, OscillatoryKernel) else 0.0
    if not z.real + origin_order > 0:
        raise DomainError(f"Mellin integral diverges at the origin for z={z}, rho={origin_order}")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        values = [_regularized_at(h, z, p, e) for e in eps]

    steps = [abs(b - a) for a, b in zip(values, values[1:])]
    estimate = _extrapolate_to_zero(eps[-3:], values[-3:])
    if len(eps) >= 4:
        previous = _extrapolate_to_zero(eps[-4:-1], values[-4:-1])
        error = abs(estimate - previous)
    else:
        error = steps[-1]
    if error > tol * (1.0 + abs(estimate)) or steps[-1] > steps[-2] * 2 + tol:
        raise NonConvergenceError(
            f"regularized Mellin integral at z={z} did not settle (error {error:.3g})",
            {"values": [complex(v) for v in values], "eps": eps},
        )
    logger.debug(f"M[h; {z}] = {estimate} (extrapolation error {error:.2g})")
    return MellinValue(z, complex(estimate), "regularized_quadrature", float(error))


def morlet_mellin(z: float, omega0: float,
                  accuracy: SpecialFnAccuracy = DEFAULT_ACCURACY) -> MellinValue:
    """M[sqrt(2 pi) exp(-(w - omega0)^2 / 2); z] = sqrt(2 pi) e^{-omega0^2/4} Gamma(z) D_{-z}(-omega0)"""
    if not z > 0:
        raise DomainError(f"morlet_mellin needs z > 0, got {z}")
    value = SQRT_2PI * math.exp(-omega0 * omega0 / 4.0) * gamma(float(z)) \
        * parabolic_cylinder_D(z, -omega0, accuracy)
    return MellinValue(complex(z), complex(value), "closed_form", strip=(0.0, math.inf))


def morlet_mellin_reflected(z: float, omega0: float,
                            accuracy: SpecialFnAccuracy = DEFAULT_ACCURACY) -> MellinValue:
    """Mellin transform of w -> conj(psi_hat)(-w) for the Morlet wavelet"""
    if not z > 0:
        raise DomainError(f"morlet_mellin_reflected needs z > 0, got {z}")
    value = SQRT_2PI * math.exp(-omega0 * omega0 / 4.0) * gamma(float(z)) \
        * parabolic_cylinder_D(z, omega0, accuracy)
    return MellinValue(complex(z), complex(value), "closed_form", strip=(0.0, math.inf))


def mexican_mellin(z: float) -> MellinValue:
    """M[sqrt(2 pi) w^2 exp(-w^2/2); z] = sqrt(pi) 2^{(z+1)/2} Gamma((z+2)/2)"""
    if not z > 0:
        raise DomainError(f"mexican_mellin needs z > 0, got {z}")
    value = math.sqrt(math.pi) * 2.0 ** ((z + 1.0) / 2.0) * gamma((z + 2.0) / 2.0)
    return MellinValue(complex(z), complex(value), "closed_form", strip=(-2.0, math.inf))


def haar_mellin_components(z: complex, c: float, cancellation: bool = False) -> MellinValue:
    """M[exp(i c t); z] = |c|^{-z} exp(sign(c) i pi z / 2) Gamma(z)

    The integral converges (conditionally) only for 0 < Re(z) < 1. Callers
    combining components whose sum is better behaved pass cancellation=True.

    Raises:
        StripViolationError: z outside (0, 1) without the cancellation context
    """
    z = complex(z)
    if c == 0:
        raise DomainError("haar_mellin_components needs a nonzero frequency")
    if not cancellation and not 0 < z.real < 1:
        raise StripViolationError(f"M[exp(ict); z] needs 0 < Re(z) < 1, got z={z}")
    sign = 1.0 if c > 0 else -1.0
    g = gamma(z) if z.imag else gamma(z.real)
    value = abs(c) ** (-z) * cmath.exp(sign * 1j * math.pi * z / 2.0) * g
    return MellinValue(z, complex(value), "closed_form",
                       strip=(0.0, 1.0) if not cancellation else (0.0, math.inf))


def haar_mellin(z: float, sign: int = 1) -> MellinValue:
    """Mellin transform of the oscillatory part of conj(psi_hat)(sign * w), Haar wavelet

    Equals -(2^z - 1) Gamma(z - 1) exp(sign i pi z / 2); the non-oscillatory
    part i/w is accounted for separately by the leading term of the expansion.
    """
    if not z > 1:
        raise StripViolationError(f"Haar oscillatory Mellin value needs z > 1, got {z}")
    s = 1 if sign >= 0 else -1
    w = z - 1.0
    half = haar_mellin_components(w, 0.5 * s, cancellation=True).value
    full = haar_mellin_components(w, 1.0 * s, cancellation=True).value
    value = s * 1j * (-2.0 * half + full)
    return MellinValue(complex(z), complex(value), "closed_form", strip=(1.0, math.inf))


def mellin_pair(wavelet: WaveletSpec, z: float,
                accuracy: SpecialFnAccuracy = DEFAULT_ACCURACY) -> Tuple[MellinValue, MellinValue]:
    """Closed-form (M+, M-) for h(w) and h(-w) of a built-in wavelet at z"""
    if wavelet.kind is WaveletKind.MORLET:
        return (morlet_mellin(z, wavelet.omega0, accuracy),
                morlet_mellin_reflected(z, wavelet.omega0, accuracy))
    if wavelet.kind is WaveletKind.MEXICAN_HAT:
        value = mexican_mellin(z)
        return value, value
    return haar_mellin(z, +1), haar_mellin(z, -1)
