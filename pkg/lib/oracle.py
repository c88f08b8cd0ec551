"""
Reference CWT Module for wavelet-asym

Brute-force evaluation of

    (W f)(b, a) = sqrt(a) / (2 pi) * int f_hat(w) exp(i b w) conj(psi_hat)(a w) dw

on the two half-lines, in the kernel variable u = a w. Panels never exceed a
quarter of the fastest oscillation period; the first panel, which may carry
an algebraic singularity at the origin, always goes through tanh-sinh. Two
rules are available:

    gauss_legendre  tanh-sinh on the first panel, fixed-order Gauss-Legendre elsewhere
    tanh_sinh       tanh-sinh on every panel with a shared refinement level

Also here: the principal-value integral behind the leading Haar term, and a
time-domain evaluation for the Haar wavelet.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from lib.config_utils import as_float, as_int
from lib.error_handler import (
    ConfigError,
    DivergenceError,
    GridCoverageError,
    NonConvergenceError,
    RuleDisagreementError,
    WrongWaveletError,
)
from lib.mellin import WaveletKind, WaveletSpec, fourier_tail
from lib.profiles import FreqProfile, family_profile, shift_coeffs, shift_coeffs_negative
from lib.quadrature import gauss_legendre_panels, tanh_sinh, tanh_sinh_panels

logger = logging.getLogger("wavelet_asym.oracle")

GAUSS_LEGENDRE = "gauss_legendre"
TANH_SINH = "tanh_sinh"
RULES = (GAUSS_LEGENDRE, TANH_SINH)


class CutoffStrategy(str, Enum):
    DECAY = "decay"
    FIXED = "fixed"


class OscillationHandling(str, Enum):
    SUBDIVIDE = "subdivide"
    NONE = "none"


@dataclass(frozen=True)
class QuadratureSettings:
    """Settings of the reference quadrature

    omega_max is the frequency cutoff of the fixed strategy, and the point
    where analytic tails take over when neither the spectrum nor the kernel
    decays fast enough to be truncated.
    """

    abs_tol: float = 1e-14
    rel_tol: float = 1e-10
    max_subdivisions: int = 400_000
    cutoff: CutoffStrategy = CutoffStrategy.DECAY
    omega_max: float = 60.0
    envelope_tol: float = 1e-16
    oscillation: OscillationHandling = OscillationHandling.SUBDIVIDE
    nodes_per_panel: int = 24
    panel_width: float = math.pi / 2.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ConfigError(f"quadrature tolerances must be positive, got {self.abs_tol}, {self.rel_tol}")
        if not self.omega_max > 0:
            raise ConfigError(f"omega_max must be positive, got {self.omega_max}")
        if not (self.envelope_tol > 0 and self.max_subdivisions > 0 and self.nodes_per_panel > 1):
            raise ConfigError("envelope_tol, max_subdivisions and nodes_per_panel must be positive")

    @classmethod
    def from_config(cls, config: Dict[str, str]) -> "QuadratureSettings":
        defaults = cls()
        try:
            cutoff = CutoffStrategy(config.get("cutoff", defaults.cutoff.value))
            oscillation = OscillationHandling(config.get("oscillation", defaults.oscillation.value))
        except ValueError as error:
            raise ConfigError(f"quadrature settings: {error}")
        return cls(
            abs_tol=as_float(config, "abs_tol", defaults.abs_tol),
            rel_tol=as_float(config, "rel_tol", defaults.rel_tol),
            max_subdivisions=as_int(config, "max_subdivisions", defaults.max_subdivisions),
            cutoff=cutoff,
            omega_max=as_float(config, "omega_max", defaults.omega_max),
            envelope_tol=as_float(config, "envelope_tol", defaults.envelope_tol),
            oscillation=oscillation,
            nodes_per_panel=as_int(config, "nodes_per_panel", defaults.nodes_per_panel),
        )

    def as_dict(self) -> Dict:
        return {
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "max_subdivisions": self.max_subdivisions,
            "cutoff": self.cutoff.value,
            "omega_max": self.omega_max,
            "envelope_tol": self.envelope_tol,
            "oscillation": self.oscillation.value,
            "nodes_per_panel": self.nodes_per_panel,
        }


DEFAULT_SETTINGS = QuadratureSettings()


def integrate_half_line(integrand: Callable[[np.ndarray], np.ndarray], upper: float,
                        frequency: float, q: QuadratureSettings, rule: str, label: str) -> complex:
    """int_0^upper integrand(x) dx over panels of at most a quarter period"""
    if upper <= 0:
        return 0j
    width = q.panel_width
    if q.oscillation is OscillationHandling.SUBDIVIDE and frequency > 0:
        width = min(width, 0.5 * math.pi / frequency)
    count = max(1, math.ceil(upper / width))
    if count > q.max_subdivisions:
        raise NonConvergenceError(
            f"{label}: {count} panels needed up to {upper:.6g}, limit is {q.max_subdivisions}",
            {"subdivisions": count, "upper": upper, "panel_width": width},
        )
    edges = np.linspace(0.0, upper, count + 1)
    if rule == GAUSS_LEGENDRE:
        head, _ = tanh_sinh(integrand, 0.0, edges[1], q.abs_tol, q.rel_tol)
        return complex(head + gauss_legendre_panels(integrand, edges[1:], q.nodes_per_panel))
    if rule == TANH_SINH:
        value, _ = tanh_sinh_panels(integrand, edges, q.abs_tol, q.rel_tol)
        return complex(value)
    raise ConfigError(f"unknown quadrature rule {rule!r}; expected one of {RULES}")


def _profile_components(profile: FreqProfile, sign: int):
    return profile.tail_pos if sign > 0 else profile.tail_neg


@dataclass(frozen=True)
class OracleHalves:
    """Contributions of w > 0 and w < 0, prefactor included"""

    positive: complex
    negative: complex

    @property
    def total(self) -> complex:
        return self.positive + self.negative


def _cwt_half(profile: FreqProfile, wavelet: WaveletSpec, b: float, a: float,
              q: QuadratureSettings, rule: str, sign: int) -> complex:
    """int_0^inf f_hat(sign w) exp(i sign b w) h(sign a w) dw"""

    def integrand(u):
        w = u / a
        return profile.eval(sign * w) * np.exp(1j * sign * b * w) * wavelet.psi_hat_conj(sign * u) / a

    frequency = abs(b) / a + wavelet.oscillation_frequency + profile.frequency / a
    label = f"CWT half-line {'+' if sign > 0 else '-'} ({profile.name}, {wavelet.label}, b={b}, a={a})"

    if q.cutoff is CutoffStrategy.FIXED:
        return integrate_half_line(integrand, a * q.omega_max, frequency, q, rule, label)

    candidates = []
    profile_cut = profile.decay.cutoff(q.envelope_tol)
    if profile_cut is not None:
        candidates.append(a * profile_cut)
    kernel_cut = wavelet.kernel_cutoff(q.envelope_tol)
    if kernel_cut is not None:
        candidates.append(kernel_cut)
    if candidates:
        return integrate_half_line(integrand, min(candidates), frequency, q, rule, label)

    # neither factor can be truncated: integrate to omega_max, then the tail analytically
    omega_split = q.omega_max
    body = integrate_half_line(integrand, a * omega_split, frequency, q, rule, label)
    f_parts = _profile_components(profile, sign)
    h_parts = wavelet.tail_components(sign)
    if f_parts is not None and h_parts is not None:
        tail = 0j
        for amplitude_f, kappa in f_parts:
            for amplitude_h, mu in h_parts:
                tail += fourier_tail(
                    lambda w, af=amplitude_f, ah=amplitude_h: complex(af(np.array(w)) * ah(np.array(a * w))),
                    omega_split, kappa + sign * b + a * mu)
        return body + tail

    # no tail model: widen the range until the envelope bound is below abs_tol
    while True:
        bound = profile.decay.tail_integral(omega_split) * 4.0 / (a * omega_split)
        if bound <= q.abs_tol:
            return integrate_half_line(integrand, a * omega_split, frequency, q, rule, label)
        omega_split *= 2.0
        if a * omega_split / min(q.panel_width, 0.5 * math.pi / max(frequency, 1e-300)) > q.max_subdivisions:
            raise NonConvergenceError(
                f"{label}: tail bound {bound:.3g} still above {q.abs_tol:.3g} at w = {omega_split:.6g}",
                {"subdivisions": q.max_subdivisions, "last_estimate": bound},
            )


def cwt_oracle_halves(profile: FreqProfile, wavelet: WaveletSpec, b: float, a: float,
                      q: QuadratureSettings = DEFAULT_SETTINGS,
                      rule: str = GAUSS_LEGENDRE) -> OracleHalves:
    """The I1 (w > 0) and I2 (w < 0) parts of the reference CWT"""
    if not a > 0:
        raise ConfigError(f"scale a must be positive, got {a}")
    prefactor = math.sqrt(a) / (2.0 * math.pi)
    positive = _cwt_half(profile, wavelet, b, a, q, rule, +1)
    negative = _cwt_half(profile, wavelet, b, a, q, rule, -1)
    return OracleHalves(prefactor * positive, prefactor * negative)


def cwt_oracle(profile: FreqProfile, wavelet: WaveletSpec, b: float, a: float,
               q: QuadratureSettings = DEFAULT_SETTINGS, rule: str = GAUSS_LEGENDRE) -> complex:
    """Reference value of (W f)(b, a) from the frequency-domain integral

    Raises:
        NonConvergenceError: too many panels, or an inner rule failed
    """
    value = cwt_oracle_halves(profile, wavelet, b, a, q, rule).total
    logger.debug(f"oracle({profile.name}, {wavelet.label}, b={b}, a={a}, {rule}) = {value}")
    return value


@dataclass(frozen=True)
class CheckedValue:
    value: complex
    second: complex
    difference: float
    tolerance: float


def cross_checked_oracle(profile: FreqProfile, wavelet: WaveletSpec, b: float, a: float,
                         q: QuadratureSettings = DEFAULT_SETTINGS) -> CheckedValue:
    """Evaluate with both rules and insist they agree

    Raises:
        RuleDisagreementError: |difference| > max(abs_tol, rel_tol * |value|)
    """
    first = cwt_oracle(profile, wavelet, b, a, q, GAUSS_LEGENDRE)
    second = cwt_oracle(profile, wavelet, b, a, q, TANH_SINH)
    difference = abs(first - second)
    tolerance = max(q.abs_tol, q.rel_tol * abs(first))
    if difference > tolerance:
        raise RuleDisagreementError(
            f"quadrature rules disagree for {profile.name}/{wavelet.label} at b={b}, a={a}: "
            f"{difference:.3g} > {tolerance:.3g}",
            {"gauss_legendre": first, "tanh_sinh": second},
        )
    return CheckedValue(first, second, difference, tolerance)


# -- the principal-value integral of the leading Haar term ---------------------

def _f_upper(profile: FreqProfile, q: QuadratureSettings) -> Tuple[float, bool]:
    cut = profile.decay.cutoff(q.envelope_tol)
    if q.cutoff is CutoffStrategy.DECAY and cut is not None:
        return cut, False
    return q.omega_max, cut is None


def _f_tail(profile: FreqProfile, b: float, lower: float, sign: int) -> complex:
    parts = _profile_components(profile, sign)
    if parts is None:
        raise NonConvergenceError(
            f"profile {profile.name} decays too slowly and has no tail model",
            {"subdivisions": 0, "last_estimate": None})
    tail = 0j
    for amplitude, kappa in parts:
        tail += fourier_tail(lambda w, amp=amplitude: complex(amp(np.array(w)) / w),
                             lower, kappa + sign * b)
    return tail


def haar_F_half(profile: FreqProfile, b: float, q: QuadratureSettings = DEFAULT_SETTINGS,
                rule: str = GAUSS_LEGENDRE) -> complex:
    """F(b) = int_0^inf exp(i b w) f_hat(w) / w dw

    Raises:
        DivergenceError: c_0 != 0, so f_hat(w) / w is not integrable at 0
    """
    if profile.coeffs[0] != 0:
        raise DivergenceError(f"f_hat(w)/w is not integrable at 0 for {profile.name} (c_0 != 0)")

    def integrand(w):
        return np.exp(1j * b * w) * profile.eval(w) / w

    upper, needs_tail = _f_upper(profile, q)
    value = integrate_half_line(integrand, upper, abs(b) + profile.frequency, q, rule,
                              f"F integral ({profile.name}, b={b})")
    if needs_tail:
        value += _f_tail(profile, b, upper, +1)
    return value


def haar_F_integral(profile: FreqProfile, b: float, q: QuadratureSettings = DEFAULT_SETTINGS,
                    rule: str = GAUSS_LEGENDRE) -> complex:
    """Principal value of int exp(i b w) f_hat(w) / w dw over the whole line

    Evaluated as int_0^inf [g(w) - g_neg(w)] / w dw with g(w) = exp(ibw) f_hat(w)
    and g_neg(w) = exp(-ibw) f_hat(-w). Close to the origin the integrand
    comes from the origin series, where the two halves cancel exactly.

    Raises:
        DivergenceError: the w**(lam-2) terms of the two halves do not cancel
    """
    n = profile.n_coeffs
    d = np.asarray(shift_coeffs(profile, b, n).d)
    d_neg = np.asarray(shift_coeffs_negative(profile, b, n).d)
    gap = d - d_neg
    if abs(gap[0]) > 1e-14 * max(1.0, abs(d[0])):
        raise DivergenceError(
            f"principal value diverges for {profile.name} at b={b}: "
            f"origin coefficients {d[0]} and {d_neg[0]} differ")
    lam = profile.lam
    switch = 0.25 * profile.series_radius / max(1.0, abs(b))

    def series(w):
        total = np.zeros_like(w, dtype=complex)
        for s in range(1, n):
            if gap[s] != 0:
                total = total + gap[s] * w ** (s + lam - 2.0)
        return total

    def direct(w):
        return (np.exp(1j * b * w) * profile.eval(w) - np.exp(-1j * b * w) * profile.eval(-w)) / w

    def integrand(w):
        w = np.asarray(w, dtype=float)
        with np.errstate(all="ignore"):
            return np.where(w < switch, series(w), direct(w))

    upper, needs_tail = _f_upper(profile, q)
    value = integrate_half_line(integrand, upper, abs(b) + profile.frequency, q, rule,
                              f"principal-value F integral ({profile.name}, b={b})")
    if needs_tail:
        value += _f_tail(profile, b, upper, +1) - _f_tail(profile, b, upper, -1)
    logger.debug(f"F({profile.name}, b={b}) = {value}")
    return complex(value)


# -- time domain ------------------------------------------------------------------

@dataclass(frozen=True)
class TimeSignal:
    """A time-domain signal known on [t_min, t_max]"""

    fn: Callable[[np.ndarray], np.ndarray]
    t_min: float = -math.inf
    t_max: float = math.inf
    name: str = "signal"

    @classmethod
    def from_samples(cls, t: Sequence[float], values: Sequence[complex],
                     name: str = "sampled") -> "TimeSignal":
        """Cubic-spline interpolant of samples on an increasing grid"""
        t = np.asarray(t, dtype=float)
        values = np.asarray(values)
        if t.ndim != 1 or t.size < 4 or np.any(np.diff(t) <= 0):
            raise ConfigError("samples need an increasing grid of at least 4 points")
        spline = CubicSpline(t, values)
        return cls(lambda x: spline(x), float(t[0]), float(t[-1]), name)


def cwt_time_domain_oracle(signal: TimeSignal, wavelet: WaveletSpec, b: float, a: float,
                           panels: int = 16, order: int = 32) -> complex:
    """(1/sqrt(a)) int f(t) psi((t - b) / a) dt for the Haar wavelet

    Raises:
        WrongWaveletError: the wavelet has no closed form in time here
        GridCoverageError: the signal does not cover [b, b + a]
    """
    if wavelet.kind is not WaveletKind.HAAR:
        raise WrongWaveletError(f"time-domain reference only supports Haar, got {wavelet.label}")
    if not a > 0:
        raise ConfigError(f"scale a must be positive, got {a}")
    if signal.t_min > b or signal.t_max < b + a:
        raise GridCoverageError(
            f"signal {signal.name} covers [{signal.t_min}, {signal.t_max}], "
            f"the wavelet needs [{b}, {b + a}]")

    def plateau(lo, hi):
        return gauss_legendre_panels(lambda t: np.asarray(signal.fn(t), dtype=complex),
                                     np.linspace(lo, hi, panels + 1), order)

    middle = b + 0.5 * a
    value = (plateau(b, middle) - plateau(middle, b + a)) / math.sqrt(a)
    return complex(value)


def gaussian_time_pair() -> Tuple[TimeSignal, FreqProfile]:
    """f(t) = exp(-t^2/4) / (2 sqrt(pi)) and its transform exp(-w^2), the gauss profile at lambda = 1"""
    signal = TimeSignal(lambda t: np.exp(-0.25 * np.asarray(t) ** 2) / (2.0 * math.sqrt(math.pi)),
                        name="gaussian")
    return signal, family_profile("gauss", "gauss", 1.0)
