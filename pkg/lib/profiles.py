"""
Test Spectra Module for wavelet-asym

A FreqProfile is a spectrum f_hat(w) together with its origin expansion

    f_hat(w) ~ sum_s c_s w**(s + lam - 1),   w -> 0+,

the expansion of f_hat(-w) on the other half-line, and what is known about
its decay. Profiles are built from a small set of families with closed-form
coefficients; custom ones come from `[profile.NAME]` config sections.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import binom, factorial

from lib.config_utils import as_float, as_int, as_list, profile_sections
from lib.error_handler import (
    ConfigError,
    InsufficientCoefficientsError,
    UnknownProfileError,
)
from lib.mellin import WaveletKind, WaveletSpec

logger = logging.getLogger("wavelet_asym.profiles")

DEFAULT_N_COEFFS = 16

# (amplitude(w), frequency): for w >= 1 the spectrum is the sum of
# amplitude(w) * exp(i * frequency * w) over its components
TailComponents = Tuple[Tuple[Callable[[np.ndarray], np.ndarray], float], ...]


class DecayKind(str, Enum):
    GAUSSIAN = "gaussian"
    POLYNOMIAL = "polynomial"
    EXPONENTIAL = "exponential"


class Parity(str, Enum):
    EVEN = "even"        # f_hat(-w) = f_hat(w)
    ODD = "odd"          # f_hat(-w) = -f_hat(w)
    ANALYTIC = "none"    # integer powers only; f_hat(-w) continues the series


@dataclass(frozen=True)
class DecayClass:
    """Large-|w| behaviour: |f_hat(w)| <= scale * envelope(w)"""

    kind: DecayKind
    order: float = 0.0
    width: float = 1.0
    scale: float = 1.0

    def envelope(self, omega) -> np.ndarray:
        x = np.abs(np.asarray(omega, dtype=float)) / self.width
        if self.kind is DecayKind.GAUSSIAN:
            return self.scale * (1.0 + x) ** 2 * np.exp(-x * x)
        if self.kind is DecayKind.POLYNOMIAL:
            return self.scale * (1.0 + x) ** (-self.order)
        return self.scale * (1.0 + x) * np.exp(-x)

    def cutoff(self, tol: float) -> Optional[float]:
        """|w| beyond which the envelope stays below tol (None for polynomial decay)"""
        if self.kind is DecayKind.POLYNOMIAL:
            return None
        if self.scale <= 0:
            return 0.0
        x = 1.0
        for _ in range(60):
            if self.kind is DecayKind.GAUSSIAN:
                x = math.sqrt(max(math.log(self.scale * (1.0 + x) ** 2 / tol), 1.0))
            else:
                x = max(math.log(self.scale * (1.0 + x) / tol), 1.0)
        return x * self.width

    def tail_integral(self, lower: float) -> float:
        """Bound on int_lower^inf of the envelope (polynomial decay of order > 1)"""
        if self.kind is not DecayKind.POLYNOMIAL:
            return 0.0
        if self.order <= 1:
            return math.inf
        x = lower / self.width
        return self.scale * self.width * (1.0 + x) ** (1.0 - self.order) / (self.order - 1.0)


@dataclass(frozen=True)
class FreqProfile:
    """A test spectrum with its origin expansions on both half-lines"""

    name: str
    lam: float
    coeffs: Tuple[complex, ...]
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    decay: DecayClass
    coeffs_neg: Tuple[complex, ...] = ()
    parity: Parity = Parity.EVEN
    sigma_bound: Optional[float] = 0.0
    smoothness_m: int = 1_000_000
    series_radius: float = 1.0
    frequency: float = 0.0
    tail_pos: Optional[TailComponents] = field(default=None, repr=False, compare=False)
    tail_neg: Optional[TailComponents] = field(default=None, repr=False, compare=False)
    family: str = ""

    def __post_init__(self):
        if not 0 < self.lam <= 1:
            raise ConfigError(f"profile {self.name}: lambda must lie in (0, 1], got {self.lam}")
        if not self.coeffs_neg:
            object.__setattr__(self, "coeffs_neg", reflect_coeffs(self.coeffs, self.parity))
        if len(self.coeffs_neg) != len(self.coeffs):
            raise ConfigError(f"profile {self.name}: coeffs and coeffs_neg differ in length")

    @property
    def n_coeffs(self) -> int:
        return len(self.coeffs)

    def eval(self, omega) -> np.ndarray:
        """f_hat(w) for real w (complex array)"""
        return np.asarray(self.evaluator(np.asarray(omega, dtype=float)), dtype=complex)

    def origin_series(self, omega, n: int, negative: bool = False) -> np.ndarray:
        """sum_{s<n} c_s w**(s+lam-1) for w > 0 (coeffs of f_hat(-w) when negative)"""
        coeffs = self.coeffs_neg if negative else self.coeffs
        w = np.asarray(omega, dtype=float)
        total = np.zeros_like(w, dtype=complex)
        for s in range(n):
            if coeffs[s] != 0:
                total = total + coeffs[s] * w ** (s + self.lam - 1.0)
        return total

    def describe(self) -> Dict:
        return {
            "name": self.name,
            "family": self.family,
            "lambda": self.lam,
            "parity": self.parity.value,
            "decay": self.decay.kind.value,
            "decay_order": self.decay.order,
            "n_coeffs": self.n_coeffs,
        }


def reflect_coeffs(coeffs: Sequence[complex], parity: Parity) -> Tuple[complex, ...]:
    if parity is Parity.EVEN:
        return tuple(coeffs)
    if parity is Parity.ODD:
        return tuple(-c for c in coeffs)
    return tuple((-1) ** s * c for s, c in enumerate(coeffs))


@dataclass(frozen=True)
class ShiftedCoeffs:
    """d_s of g(w) = exp(i b w) f_hat(w) for one translation b"""

    b: float
    d: Tuple[complex, ...]

    def __len__(self):
        return len(self.d)

    def __getitem__(self, s):
        return self.d[s]


def _shift(coeffs: Sequence[complex], b: float, n: int) -> Tuple[complex, ...]:
    taylor = (1j * b) ** np.arange(n) / factorial(np.arange(n))
    d = np.convolve(taylor, np.asarray(coeffs[:n], dtype=complex))[:n]
    return tuple(complex(v) for v in d)


def shift_coeffs(profile: FreqProfile, b: float, n: int) -> ShiftedCoeffs:
    """d_s = sum_{r<=s} (ib)^r / r! * c_{s-r} for s < n

    Raises:
        InsufficientCoefficientsError: n exceeds the stored coefficients
    """
    if n > profile.n_coeffs:
        raise InsufficientCoefficientsError(
            f"profile {profile.name} has {profile.n_coeffs} coefficients, {n} requested")
    return ShiftedCoeffs(float(b), _shift(profile.coeffs, b, n))


def shift_coeffs_negative(profile: FreqProfile, b: float, n: int) -> ShiftedCoeffs:
    """Coefficients of exp(-i b w) f_hat(-w), w > 0"""
    if n > profile.n_coeffs:
        raise InsufficientCoefficientsError(
            f"profile {profile.name} has {profile.n_coeffs} coefficients, {n} requested")
    return ShiftedCoeffs(float(b), _shift(profile.coeffs_neg, -b, n))


# -- families -----------------------------------------------------------------

def _gauss_coeffs(n: int) -> List[complex]:
    return [(-1) ** (s // 2) / math.factorial(s // 2) if s % 2 == 0 else 0.0 for s in range(n)]


def _rational_coeffs(n: int) -> List[complex]:
    return [(-1) ** (s // 2) if s % 2 == 0 else 0.0 for s in range(n)]


def _haar_admissible_coeffs(n: int) -> List[complex]:
    return [0.0 if s % 2 == 0 else (-1) ** (s // 2) / math.factorial(s // 2) for s in range(n)]


def family_profile(name: str, family: str, lam: float = 1.0, width: float = 1.0,
                   amplitude: float = 1.0, n_coeffs: int = DEFAULT_N_COEFFS) -> FreqProfile:
    """Even profile amplitude * F(|w| / width) from one of the built-in families

    gauss:            F(x) = x**(lam-1) exp(-x**2)
    rational:         F(x) = x**(lam-1) / (1 + x**2)
    haar-admissible:  F(x) = x**lam exp(-x**2)
    """
    if not width > 0:
        raise ConfigError(f"profile {name}: width must be positive, got {width}")
    if family == "gauss":
        base = _gauss_coeffs(n_coeffs)

        def shape(x):
            return x ** (lam - 1.0) * np.exp(-x * x)
        decay = DecayClass(DecayKind.GAUSSIAN, 0.0, width, abs(amplitude))
        frequency_tail = None
    elif family == "rational":
        base = _rational_coeffs(n_coeffs)

        def shape(x):
            return x ** (lam - 1.0) / (1.0 + x * x)
        decay = DecayClass(DecayKind.POLYNOMIAL, 3.0 - lam, width, 4.0 * abs(amplitude))
        frequency_tail = ((lambda w: amplitude * shape(np.abs(w) / width) + 0j, 0.0),)
    elif family == "haar-admissible":
        base = _haar_admissible_coeffs(n_coeffs)

        def shape(x):
            return x ** lam * np.exp(-x * x)
        decay = DecayClass(DecayKind.GAUSSIAN, 0.0, width, abs(amplitude))
        frequency_tail = None
    else:
        raise UnknownProfileError(
            f"profile {name}: unknown family {family!r} (gauss, rational, haar-admissible)")

    coeffs = tuple(complex(amplitude * c * width ** (-(s + lam - 1.0))) for s, c in enumerate(base))

    def evaluator(omega):
        x = np.abs(omega) / width
        with np.errstate(divide="ignore", invalid="ignore"):
            value = amplitude * shape(x)
        # the origin itself is never a quadrature node; keep it finite anyway
        return np.where(x == 0.0, amplitude * (1.0 if lam == 1.0 and family != "haar-admissible" else 0.0),
                        value).astype(complex)

    return FreqProfile(
        name=name, lam=float(lam), coeffs=coeffs, evaluator=evaluator, decay=decay,
        parity=Parity.EVEN, sigma_bound=0.0, series_radius=width,
        tail_pos=frequency_tail, tail_neg=frequency_tail, family=family,
    )


def zero_profile(n_coeffs: int = DEFAULT_N_COEFFS) -> FreqProfile:
    return FreqProfile(
        name="zero", lam=1.0, coeffs=(0j,) * n_coeffs,
        evaluator=lambda omega: np.zeros(np.shape(omega), dtype=complex),
        decay=DecayClass(DecayKind.GAUSSIAN, 0.0, 1.0, 0.0), family="zero",
    )


def haar_self_profile(n_coeffs: int = DEFAULT_N_COEFFS) -> FreqProfile:
    """f_hat = psi_hat of the Haar wavelet, so that f is the wavelet itself"""
    haar = WaveletSpec.haar()
    # psi_hat(w) = (1 - 2 exp(-iw/2) + exp(-iw)) / (iw); expand the numerator
    coeffs = []
    for s in range(n_coeffs):
        k = s + 1
        coeffs.append(complex(-1j * (-1j) ** k * (1.0 - 2.0 ** (1 - k)) / math.factorial(k)))
    tail_pos = (
        (lambda w: -1j / np.asarray(w), 0.0),
        (lambda w: 2j / np.asarray(w), -0.5),
        (lambda w: -1j / np.asarray(w), -1.0),
    )
    tail_neg = (
        (lambda w: 1j / np.asarray(w), 0.0),
        (lambda w: -2j / np.asarray(w), 0.5),
        (lambda w: 1j / np.asarray(w), 1.0),
    )
    return FreqProfile(
        name="haar-self", lam=1.0, coeffs=tuple(coeffs), evaluator=haar.psi_hat,
        decay=DecayClass(DecayKind.POLYNOMIAL, 1.0, 1.0, 8.0), parity=Parity.ANALYTIC,
        sigma_bound=0.0, series_radius=1.0, frequency=1.0,
        tail_pos=tail_pos, tail_neg=tail_neg, family="haar-self",
    )


BUILTIN_NAMES = ("gauss", "rational", "haar-admissible", "zero", "haar-self")


def builtin_profiles(lam: float = 1.0, n_coeffs: int = DEFAULT_N_COEFFS) -> List[FreqProfile]:
    """The built-in test spectra; lam applies to the three families"""
    return [
        family_profile("gauss", "gauss", lam, n_coeffs=n_coeffs),
        family_profile("rational", "rational", lam, n_coeffs=n_coeffs),
        family_profile("haar-admissible", "haar-admissible", lam, n_coeffs=n_coeffs),
        zero_profile(n_coeffs),
        haar_self_profile(n_coeffs),
    ]


def _custom_profile(name: str, keys: Dict[str, str]) -> FreqProfile:
    family = keys.get("family", "")
    lam = as_float(keys, "lambda", 1.0)
    profile = family_profile(
        name, family, lam,
        width=as_float(keys, "width", 1.0),
        amplitude=as_float(keys, "amplitude", 1.0),
        n_coeffs=as_int(keys, "n_coeffs", DEFAULT_N_COEFFS),
    )
    listed = as_list(keys, "coeffs")
    if listed:
        try:
            given = [complex(item.replace(" ", "")) for item in listed]
        except ValueError:
            raise ConfigError(f"profile {name}: coeffs must be numbers, got {keys['coeffs']!r}")
        for s, (c_given, c_family) in enumerate(zip(given, profile.coeffs)):
            if abs(c_given - c_family) > 1e-12 * max(1.0, abs(c_family)):
                raise ConfigError(
                    f"profile {name}: coefficient c_{s} = {c_given} does not match the "
                    f"{family} family value {c_family}")

    declared = keys.get("decay")
    if declared:
        try:
            kind = DecayKind(declared.strip().lower())
        except ValueError:
            raise ConfigError(f"profile {name}: decay must be gaussian, polynomial or exponential, got {declared!r}")
        order = as_float(keys, "decay_order", profile.decay.order)
        if kind is DecayKind.POLYNOMIAL and not order > 0:
            raise ConfigError(f"profile {name}: polynomial decay needs decay_order > 0, got {order}")
        decay = DecayClass(kind, order, profile.decay.width, as_float(keys, "decay_scale", profile.decay.scale))
        profile = replace(profile, decay=decay)
        check = declared_decay_check(profile)
        if not check.passed:
            raise ConfigError(f"profile {name}: declared {kind.value} decay does not bound |f_hat|; {check.detail}, "
                              f"worst excess {check.witness:.3g}")
    return profile


def get_profile(name: str, lam: Optional[float] = None,
                config_path: Optional[str] = None) -> FreqProfile:
    """Resolve a profile by name: built-ins first, then `[profile.NAME]` sections

    Raises:
        UnknownProfileError: no such profile
    """
    lam_value = 1.0 if lam is None else lam
    if name in BUILTIN_NAMES:
        for profile in builtin_profiles(lam_value):
            if profile.name == name:
                if lam is not None and profile.family in ("zero", "haar-self") and lam != 1.0:
                    raise ConfigError(f"profile {name} only exists for lambda = 1")
                return profile
    if config_path:
        custom = profile_sections(config_path)
        if name in custom:
            keys = dict(custom[name])
            if lam is not None:
                keys["lambda"] = str(lam)
            return _custom_profile(name, keys)
    raise UnknownProfileError(f"unknown profile {name!r}; built-ins are {', '.join(BUILTIN_NAMES)}")


# -- hypothesis checks ----------------------------------------------------------

def derivative(f: Callable[[np.ndarray], np.ndarray], omega, order: int) -> np.ndarray:
    """Central finite difference of the given order, step max(1e-4, 1e-4 |w|)"""
    w = np.asarray(omega, dtype=float)
    if order == 0:
        return np.asarray(f(w), dtype=complex)
    h = np.maximum(1e-4, 1e-4 * np.abs(w))
    total = np.zeros_like(w, dtype=complex)
    for k in range(order + 1):
        total = total + (-1) ** k * binom(order, k) * np.asarray(f(w + (order / 2.0 - k) * h))
    return total / h ** order


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    witness: float
    detail: str = ""


@dataclass(frozen=True)
class HypothesisReport:
    profile: str
    wavelet: str
    m: int
    epsilon: float
    checks: Tuple[HypothesisCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def as_dict(self) -> Dict:
        return {
            "profile": self.profile,
            "wavelet": self.wavelet,
            "m": self.m,
            "epsilon": self.epsilon,
            "all_passed": self.all_passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "witness": c.witness, "detail": c.detail}
                for c in self.checks
            ],
        }


ORIGIN_GRID = (1e-1, 1e-2, 1e-3)


def origin_expansion_ratios(profile: FreqProfile, n: int,
                            grid: Sequence[float] = ORIGIN_GRID) -> np.ndarray:
    """|f_hat(w) - sum_{s<n} c_s w^(s+lam-1)| / w^(n+lam-1) on the grid

    Ratios below the floating-point floor of the subtraction are reported as 0.
    """
    w = np.asarray(grid, dtype=float)
    value = profile.eval(w)
    residual = np.abs(value - profile.origin_series(w, n))
    floor = 1e-14 * (np.abs(value) + 1e-300)
    residual = np.where(residual <= floor, 0.0, residual)
    return residual / w ** (n + profile.lam - 1.0)


def _bounded(ratios: np.ndarray) -> bool:
    """Ratios sampled towards a limit point must not grow by more than 10x"""
    reference = ratios[0]
    return bool(np.all(np.isfinite(ratios)) and np.max(ratios) <= 10.0 * reference + 1e-12)


DECAY_GRID = np.logspace(0, 4, 41)


def declared_decay_check(profile: FreqProfile) -> HypothesisCheck:
    """The declared envelope must bound |f_hat| on both half-lines for |w| >= 1"""
    envelope = profile.decay.envelope(DECAY_GRID)
    excess = 0.0
    for sign in (1.0, -1.0):
        with np.errstate(all="ignore"):
            values = np.abs(profile.eval(sign * DECAY_GRID))
        gap = np.where(np.isfinite(values), values - envelope * (1.0 + 1e-12), np.inf)
        excess = max(excess, float(np.max(gap)))
    return HypothesisCheck(
        "declared_decay", excess <= 0.0, max(excess, 0.0),
        f"{profile.decay.kind.value} envelope against |f_hat| on +-[1, 1e4]")


def check_hypotheses(profile: FreqProfile, wavelet: WaveletSpec, m: int,
                     epsilon: float = 0.5) -> HypothesisReport:
    """Check the conditions under which the expansions hold with smoothness m

    Failures are reported in the result; nothing is raised.
    """
    if m < 0:
        raise ConfigError(f"m must be non-negative, got {m}")
    checks = []

    samples = np.concatenate([-np.logspace(-3, 3, 61), np.logspace(-3, 3, 61)])
    values = derivative(profile.eval, samples, m)
    finite = bool(np.all(np.isfinite(values)))
    checks.append(HypothesisCheck(
        "continuity", finite and m <= profile.smoothness_m,
        float(np.max(np.abs(values))) if finite else math.inf,
        f"f_hat^({m}) sampled on +-[1e-3, 1e3]; smoothness m = {profile.smoothness_m}"))

    worst = 0.0
    origin_ok = True
    for n in range(1, min(5, profile.n_coeffs) + 1):
        ratios = origin_expansion_ratios(profile, n)
        origin_ok = origin_ok and _bounded(ratios)
        worst = max(worst, float(np.max(ratios)))
    checks.append(HypothesisCheck(
        "origin_expansion", origin_ok, worst, "remainder ratios for n <= 5 on w = 1e-1, 1e-2, 1e-3"))

    pairing = wavelet.rho + profile.lam
    checks.append(HypothesisCheck(
        "kernel_origin", pairing > 0, pairing, "rho + lambda > 0"))

    beta = wavelet.tail.beta if wavelet.tail is not None else 0.0
    grid = np.logspace(1, 3, 21)
    worst = 0.0
    decay_ok = True
    for j in range(m + 1):
        ratio = grid ** (-beta) * np.abs(derivative(profile.eval, grid, j)) * grid ** (1.0 + epsilon)
        ratio = np.where(np.isfinite(ratio), ratio, np.inf)
        lower, upper = ratio[:11], ratio[10:]
        decay_ok = decay_ok and bool(np.max(upper) <= 10.0 * np.max(lower))
        worst = max(worst, float(np.max(ratio)))
    checks.append(HypothesisCheck(
        "decay", decay_ok, worst,
        f"w^(-beta) |f_hat^(j)(w)| w^(1+eps) on [10, 1e3], beta = {beta}, eps = {epsilon}"))

    checks.append(declared_decay_check(profile))

    if wavelet.kind is WaveletKind.MEXICAN_HAT:
        sigma = profile.sigma_bound
        if sigma is None:
            checks.append(HypothesisCheck("growth", False, math.inf, "no growth bound declared"))
        else:
            w = np.linspace(1.0, 30.0, 59)
            ratio = np.abs(profile.eval(w)) * np.exp(-sigma * w * w)
            checks.append(HypothesisCheck(
                "growth", bool(np.max(ratio[29:]) <= 10.0 * np.max(ratio[:30]) + 1e-300),
                float(np.max(ratio)), f"|f_hat(w)| exp(-{sigma} w^2) on [1, 30]"))

    if wavelet.kind is WaveletKind.HAAR:
        d0 = abs(profile.coeffs[0]) + abs(profile.coeffs_neg[0])
        checks.append(HypothesisCheck("vanishing_d0", d0 == 0.0, d0, "c_0 = 0 on both half-lines"))

    report = HypothesisReport(profile.name, wavelet.label, m, epsilon, tuple(checks))
    logger.debug(f"hypotheses for {profile.name} / {wavelet.label}: all_passed={report.all_passed}")
    return report
