"""
Asymptotic Expansion Module for wavelet-asym

Large-scale expansions of (W f)(b, a). With g(w) = exp(ibw) f_hat(w) split
into the two half-lines, every term has the form

    sqrt(a)/(2 pi) * [d_s M+(s+lam) + d-_s M-(s+lam)] * a^(-s-lam),

where M+ and M- are the Mellin transforms of conj(psi_hat)(w) and
conj(psi_hat)(-w). The wavelet-specific engines spell this out with closed
forms; display_expansion evaluates the commonly printed variants so they can
be compared against the reference quadrature.
"""

import cmath
import logging
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import yaml

from lib.error_handler import (
    ConfigError,
    HaarAdmissibilityError,
    InsufficientCoefficientsError,
    MissingMellinError,
    WrongWaveletError,
)
from lib.mellin import MellinValue, WaveletKind, WaveletSpec, mellin_pair
from lib.oracle import haar_F_integral
from lib.profiles import FreqProfile, shift_coeffs, shift_coeffs_negative
from lib.special_fn import DEFAULT_ACCURACY, SpecialFnAccuracy, gamma, parabolic_cylinder_D

logger = logging.getLogger("wavelet_asym.expansion")

REFLECTED = "reflected"
PRINCIPAL_BRANCH = "principal_branch"
NEGATIVE_AXIS_POLICIES = (REFLECTED, PRINCIPAL_BRANCH)

FORMULAS_PATH = os.path.join(os.path.dirname(__file__), "formulas.yaml")


@lru_cache(maxsize=1)
def load_formulas() -> Dict:
    with open(FORMULAS_PATH, "r", encoding="utf-8") as file:
        return yaml.safe_load(file)


def formula_notes(formula_id: str) -> Dict:
    """Constant-policy notes for one formula (copy, safe to modify)"""
    key = formula_id.replace("_display", "")
    return dict(load_formulas().get(key, {}))


@dataclass(frozen=True)
class ExpansionRequest:
    profile: FreqProfile
    wavelet: WaveletSpec
    b: float
    a: float
    n_terms: int
    m: int = 0

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigError(f"scale a must be positive, got {self.a}")
        if self.n_terms < 1:
            raise ConfigError(f"n must be at least 1, got {self.n_terms}")
        if self.n_terms > self.profile.n_coeffs:
            raise InsufficientCoefficientsError(
                f"profile {self.profile.name} has {self.profile.n_coeffs} coefficients, "
                f"{self.n_terms} terms requested")
        if not self.wavelet.rho + self.profile.lam > 0:
            raise ConfigError("the wavelet's origin order and lambda must satisfy rho + lambda > 0")

    def at_scale(self, a: float) -> "ExpansionRequest":
        return ExpansionRequest(self.profile, self.wavelet, self.b, a, self.n_terms, self.m)

    def with_terms(self, n_terms: int) -> "ExpansionRequest":
        return ExpansionRequest(self.profile, self.wavelet, self.b, self.a, n_terms, self.m)


@dataclass(frozen=True)
class ExpansionResult:
    """Terms of one expansion at fixed (b, a, n)

    terms[s] = terms_pos[s] + terms_neg[s] is the full s-th summand, a pure
    monomial a**scale_power[s]; leading_extra is the separate a**(-1/2)
    term of the Haar expansion.
    """

    terms: Tuple[complex, ...]
    partial_sums: Tuple[complex, ...]
    scale_power: Tuple[float, ...]
    formula_id: str
    terms_pos: Tuple[complex, ...] = ()
    terms_neg: Tuple[complex, ...] = ()
    leading_extra: Optional[complex] = None
    negative_axis: str = REFLECTED
    notes: Dict = field(default_factory=dict, compare=False)
    n_m: Dict = field(default_factory=dict, compare=False)

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    @property
    def approximation(self) -> complex:
        """leading_extra (when present) plus the last partial sum"""
        return (self.leading_extra or 0j) + self.partial_sums[-1]

    def as_dict(self) -> Dict:
        return {
            "formula_id": self.formula_id,
            "negative_axis": self.negative_axis,
            "terms": list(self.terms),
            "terms_pos": list(self.terms_pos),
            "terms_neg": list(self.terms_neg),
            "partial_sums": list(self.partial_sums),
            "scale_power": list(self.scale_power),
            "leading_extra": self.leading_extra,
            "approximation": self.approximation,
            "n_m": self.n_m,
            "notes": self.notes,
        }


def _check_policy(negative_axis: str):
    if negative_axis not in NEGATIVE_AXIS_POLICIES:
        raise ConfigError(f"negative_axis must be one of {NEGATIVE_AXIS_POLICIES}, got {negative_axis!r}")


def _phase(x: float) -> complex:
    """exp(i pi x), the principal-branch value of (-1)**x"""
    return cmath.exp(1j * math.pi * x)


def _n_m(req: ExpansionRequest) -> Dict:
    smallest = max(1, math.floor(req.m - req.profile.lam) + 1)
    return {"n": req.n_terms, "m": req.m, "smallest_n": smallest,
            "compatible": req.n_terms == smallest}


def _coefficients(req: ExpansionRequest) -> Tuple[Tuple[complex, ...], Tuple[complex, ...]]:
    n = req.n_terms
    return (shift_coeffs(req.profile, req.b, n).d,
            shift_coeffs_negative(req.profile, req.b, n).d)


def _check_haar(req: ExpansionRequest, d: Sequence[complex], d_neg: Sequence[complex]):
    if d[0] != 0 or d_neg[0] != 0:
        raise HaarAdmissibilityError(
            f"the Haar expansion needs d_0 = 0, profile {req.profile.name} has "
            f"d_0 = {d[0]}, d-_0 = {d_neg[0]}")


def _assemble(req: ExpansionRequest, terms_pos: List[complex], terms_neg: List[complex],
              formula_id: str, negative_axis: str,
              leading_extra: Optional[complex] = None) -> ExpansionResult:
    terms = [p + q for p, q in zip(terms_pos, terms_neg)]
    partial, running = [], 0j
    for term in terms:
        running += term
        partial.append(running)
    lam = req.profile.lam
    notes = formula_notes(formula_id)
    notes["display"] = formula_id.endswith("_display")
    return ExpansionResult(
        terms=tuple(complex(t) for t in terms),
        partial_sums=tuple(complex(p) for p in partial),
        scale_power=tuple(-s - lam + 0.5 for s in range(req.n_terms)),
        formula_id=formula_id,
        terms_pos=tuple(complex(t) for t in terms_pos),
        terms_neg=tuple(complex(t) for t in terms_neg),
        leading_extra=leading_extra,
        negative_axis=negative_axis,
        notes=notes,
        n_m=_n_m(req),
    )


def general_expansion(req: ExpansionRequest, mellin_pos: Sequence[Optional[MellinValue]],
                      mellin_neg: Sequence[Optional[MellinValue]],
                      negative_axis: str = REFLECTED) -> ExpansionResult:
    """Expansion from supplied Mellin values at z = s + lam, s = 0 .. n-1

    An entry may be None where the coefficients multiplying it vanish.

    Raises:
        MissingMellinError: a needed value is absent or sits at the wrong z
        HaarAdmissibilityError: Haar wavelet with d_0 != 0
    """
    _check_policy(negative_axis)
    n, lam, a = req.n_terms, req.profile.lam, req.a
    d, d_neg = _coefficients(req)
    if req.wavelet.kind is WaveletKind.HAAR:
        _check_haar(req, d, d_neg)
    if len(mellin_pos) < n or len(mellin_neg) < n:
        raise MissingMellinError(f"{n} Mellin values needed on each half-line, got "
                                 f"{len(mellin_pos)} and {len(mellin_neg)}")
    prefactor = math.sqrt(a) / (2.0 * math.pi)
    terms_pos, terms_neg = [], []
    for s in range(n):
        z = s + lam
        coef_neg = d_neg[s] if negative_axis == REFLECTED else d[s] * _phase(z + 1.0)
        values = []
        for label, mellin, coef in (("M+", mellin_pos[s], d[s]), ("M-", mellin_neg[s], coef_neg)):
            if mellin is None:
                if coef != 0:
                    raise MissingMellinError(f"{label} missing at z = {z}")
                values.append(0j)
                continue
            if abs(mellin.z - z) > 1e-12:
                raise MissingMellinError(f"{label} supplied at z = {mellin.z}, expected {z}")
            values.append(mellin.value)
        scale = prefactor * a ** (-z)
        terms_pos.append(scale * d[s] * values[0] if d[s] != 0 else 0j)
        terms_neg.append(scale * coef_neg * values[1] if coef_neg != 0 else 0j)
    return _assemble(req, terms_pos, terms_neg, "general", negative_axis)


def closed_form_mellin(req: ExpansionRequest,
                       accuracy: SpecialFnAccuracy = DEFAULT_ACCURACY
                       ) -> Tuple[List[Optional[MellinValue]], List[Optional[MellinValue]]]:
    """Closed-form M+ and M- at z = s + lam for the request's wavelet

    The Haar value at s = 0 does not exist (its coefficient must vanish) and is None.
    """
    pos, neg = [], []
    for s in range(req.n_terms):
        z = s + req.profile.lam
        if req.wavelet.kind is WaveletKind.HAAR and s == 0:
            pos.append(None)
            neg.append(None)
            continue
        plus, minus = mellin_pair(req.wavelet, z, accuracy)
        pos.append(plus)
        neg.append(minus)
    return pos, neg


def morlet_expansion(req: ExpansionRequest, negative_axis: str = REFLECTED,
                     accuracy: SpecialFnAccuracy = DEFAULT_ACCURACY) -> ExpansionResult:
    """Morlet expansion with K = exp(-omega0^2/4) / sqrt(2 pi)

    Raises:
        WrongWaveletError: the request's wavelet is not Morlet
    """
    if req.wavelet.kind is not WaveletKind.MORLET:
        raise WrongWaveletError(f"morlet_expansion needs a Morlet wavelet, got {req.wavelet.label}")
    _check_policy(negative_axis)
    lam, a, omega0 = req.profile.lam, req.a, req.wavelet.omega0
    d, d_neg = _coefficients(req)
    constant = math.exp(-omega0 * omega0 / 4.0) / math.sqrt(2.0 * math.pi)
    terms_pos, terms_neg = [], []
    for s in range(req.n_terms):
        z = s + lam
        scale = constant * gamma(z) * a ** (-z + 0.5)
        terms_pos.append(scale * d[s] * parabolic_cylinder_D(z, -omega0, accuracy))
        coef_neg = d_neg[s] if negative_axis == REFLECTED else d[s] * _phase(z - 1.0)
        terms_neg.append(scale * coef_neg * parabolic_cylinder_D(z, omega0, accuracy))
    return _assemble(req, terms_pos, terms_neg, "morlet", negative_axis)


def mexican_expansion(req: ExpansionRequest, negative_axis: str = REFLECTED) -> ExpansionResult:
    """Mexican-hat expansion with K = 2^((lam+1)/2) / (2 sqrt(pi))

    Raises:
        WrongWaveletError: the request's wavelet is not the Mexican hat
        ConfigError: the profile declares no growth bound below a^2/2
    """
    if req.wavelet.kind is not WaveletKind.MEXICAN_HAT:
        raise WrongWaveletError(f"mexican_expansion needs the Mexican hat, got {req.wavelet.label}")
    _check_policy(negative_axis)
    sigma = req.profile.sigma_bound
    if sigma is None or sigma >= req.a * req.a / 2.0:
        raise ConfigError(f"profile {req.profile.name} lacks a growth bound O(exp(sigma w^2)) "
                          f"with sigma < a^2/2")
    lam, a = req.profile.lam, req.a
    d, d_neg = _coefficients(req)
    constant = 2.0 ** ((lam + 1.0) / 2.0) / (2.0 * math.sqrt(math.pi))
    terms_pos, terms_neg = [], []
    for s in range(req.n_terms):
        z = s + lam
        scale = constant * 2.0 ** (s / 2.0) * gamma((z + 2.0) / 2.0) * a ** (-z + 0.5)
        terms_pos.append(scale * d[s])
        coef_neg = d_neg[s] if negative_axis == REFLECTED else d[s] * _phase(z - 1.0)
        terms_neg.append(scale * coef_neg)
    return _assemble(req, terms_pos, terms_neg, "mexican_hat", negative_axis)


def haar_expansion(req: ExpansionRequest, F_b: complex,
                   negative_axis: str = REFLECTED) -> ExpansionResult:
    """Haar expansion: leading (i/2 pi) a^(-1/2) F_b plus the series from s = 1

    Args:
        req: Request with the Haar wavelet and d_0 = 0
        F_b: Principal-value integral of exp(ibw) f_hat(w) / w over the line

    Raises:
        WrongWaveletError: the request's wavelet is not Haar
        HaarAdmissibilityError: d_0 != 0
    """
    if req.wavelet.kind is not WaveletKind.HAAR:
        raise WrongWaveletError(f"haar_expansion needs the Haar wavelet, got {req.wavelet.label}")
    _check_policy(negative_axis)
    lam, a = req.profile.lam, req.a
    d, d_neg = _coefficients(req)
    _check_haar(req, d, d_neg)
    terms_pos, terms_neg = [0j], [0j]
    for s in range(1, req.n_terms):
        z = s + lam
        scale = -gamma(z - 1.0) * (2.0 ** z - 1.0) * a ** (-z + 0.5) / (2.0 * math.pi)
        terms_pos.append(scale * d[s] * _phase(z / 2.0))
        if negative_axis == REFLECTED:
            terms_neg.append(scale * d_neg[s] * _phase(-z / 2.0))
        else:
            terms_neg.append(scale * d[s] * _phase(z + 1.0) * _phase(-z / 2.0))
    leading = 1j * complex(F_b) / (2.0 * math.pi * math.sqrt(a))
    return _assemble(req, terms_pos, terms_neg, "haar", negative_axis, leading)


def display_expansion(req: ExpansionRequest, F_b: Optional[complex] = None,
                      accuracy: SpecialFnAccuracy = DEFAULT_ACCURACY) -> ExpansionResult:
    """The commonly printed closed forms, constants and phases as printed

    Both half-lines use d_s with the principal-branch phase; the Haar series
    carries a single phase and the constant i/pi.
    """
    lam, a = req.profile.lam, req.a
    d, _ = _coefficients(req)
    kind = req.wavelet.kind
    terms = []
    leading = None
    if kind is WaveletKind.MORLET:
        omega0 = req.wavelet.omega0
        constant = math.exp(-omega0 * omega0 / 4.0)
        for s in range(req.n_terms):
            z = s + lam
            bracket = parabolic_cylinder_D(z, -omega0, accuracy) \
                + _phase(z - 1.0) * parabolic_cylinder_D(z, omega0, accuracy)
            terms.append(constant * d[s] * gamma(z) * bracket * a ** (-z + 0.5))
        formula_id = "morlet_display"
    elif kind is WaveletKind.MEXICAN_HAT:
        constant = 2.0 ** ((lam + 1.0) / 2.0) / math.sqrt(math.pi)
        for s in range(req.n_terms):
            z = s + lam
            terms.append(constant * d[s] * 2.0 ** (s / 2.0) * gamma((z + 2.0) / 2.0)
                         * (1.0 + _phase(z - 1.0)) * a ** (-z + 0.5))
        formula_id = "mexican_hat_display"
    else:
        if d[0] != 0:
            raise HaarAdmissibilityError(f"the Haar expansion needs d_0 = 0, got {d[0]}")
        if F_b is None:
            raise MissingMellinError("the Haar display form needs the F(b) integral")
        terms.append(0j)
        for s in range(1, req.n_terms):
            z = s + lam
            terms.append(1j / math.pi * d[s] * gamma(z - 1.0) * (1.0 + _phase(z - 1.0))
                         * (2.0 ** z - 1.0) * _phase(z / 2.0) * a ** (-z + 0.5))
        # (i / sqrt(a)) f^(-1)(b) with f^(-1)(b) = F_b / (2 pi i)
        leading = complex(F_b) / (2.0 * math.pi * math.sqrt(a))
        formula_id = "haar_display"
    return _assemble(req, terms, [0j] * len(terms), formula_id, PRINCIPAL_BRANCH, leading)


def expand(req: ExpansionRequest, F_b: Optional[complex] = None, negative_axis: str = REFLECTED,
           accuracy: SpecialFnAccuracy = DEFAULT_ACCURACY) -> ExpansionResult:
    """Dispatch to the engine of the request's wavelet

    For Haar, F_b is computed by the reference quadrature when not given.
    """
    kind = req.wavelet.kind
    if kind is WaveletKind.MORLET:
        return morlet_expansion(req, negative_axis, accuracy)
    if kind is WaveletKind.MEXICAN_HAT:
        return mexican_expansion(req, negative_axis)
    if F_b is None:
        F_b = haar_F_integral(req.profile, req.b)
    return haar_expansion(req, F_b, negative_axis)
