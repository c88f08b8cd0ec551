"""
Remainder Module for wavelet-asym

Truncation errors of the expansions: the gap to the reference quadrature,
an explicit remainder integral for the Haar wavelet, the convergence-order
study over a scale grid, and the comparison of re-derived against printed
constants.
"""

import cmath
import logging
import math
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from lib.async_core import evaluate_grid
from lib.error_handler import ConfigError, DegenerateFitError, HaarAdmissibilityError
from lib.expansion import (
    REFLECTED,
    ExpansionRequest,
    ExpansionResult,
    display_expansion,
    expand,
)
from lib.mellin import WaveletKind, WaveletSpec, fourier_tail
from lib.oracle import (
    DEFAULT_SETTINGS,
    GAUSS_LEGENDRE,
    QuadratureSettings,
    cwt_oracle,
    cwt_oracle_halves,
    haar_F_half,
    haar_F_integral,
    integrate_half_line,
)
from lib.profiles import DecayKind, FreqProfile, derivative, shift_coeffs

logger = logging.getLogger("wavelet_asym.remainder")

SLOPE_TOLERANCE = 0.3
MIN_DECADES = 1.5
COEFFICIENT_FLOOR = 1e-13


def remainder_by_difference(req: ExpansionRequest, oracle_value: complex,
                            result: ExpansionResult) -> complex:
    """oracle_value - result.approximation

    This is the full truncation gap sqrt(a)/(2 pi) * delta_n(a); for Haar the
    approximation includes the leading term.
    """
    if result.n_terms != req.n_terms:
        raise ConfigError(f"result has {result.n_terms} terms, request asks for {req.n_terms}")
    return complex(oracle_value) - result.approximation


def haar_i1_remainder(req: ExpansionRequest, q: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
    """The w > 0 share of the Haar truncation gap

    Reference I1 minus its share of the leading term, (i/2 pi) a^(-1/2) F(b),
    minus the w > 0 parts of the series terms.
    """
    halves = cwt_oracle_halves(req.profile, req.wavelet, req.b, req.a, q)
    leading = 1j * haar_F_half(req.profile, req.b, q) / (2.0 * math.pi * math.sqrt(req.a))
    result = expand(req, F_b=0.0)
    return halves.positive - leading - sum(result.terms_pos)


def _falling(alpha: float, m: int) -> float:
    value = 1.0
    for j in range(m):
        value *= alpha - j
    return value


def _abel_power_fourier(alpha: float, c: float, lower: float) -> complex:
    """Abel-regularized int_lower^inf w^alpha exp(icw) dw for c != 0"""
    if alpha < 0:
        return fourier_tail(lambda w: complex(w ** alpha), lower, c)
    boundary = -(lower ** alpha) * cmath.exp(1j * c * lower) / (1j * c)
    return boundary - alpha / (1j * c) * _abel_power_fourier(alpha - 1.0, c, lower)


def haar_delta_explicit(profile: FreqProfile, b: float, a: float, n: int, m: int = 0,
                        q: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
    """Remainder of the w > 0 Haar series from its integral representation

        sqrt(a)/(2 pi) (i/a)^(m+1) int_0^inf G_n^(m)(w) (exp(iaw) - 2^(m+1) exp(iaw/2)) dw

    with G_n(w) = g(w)/w - sum_{s<n} d_s w^(s+lam-2). Close to the origin
    G_n^(m) comes from the origin series; elsewhere from central differences
    of g(w)/w. Beyond the integration range the polynomial part is handled
    by Abel-regularized Fourier integrals.

    Raises:
        HaarAdmissibilityError: c_0 != 0
        ConfigError: m outside 0..2, a boundary term that does not vanish,
            or m > 0 for a slowly decaying profile
    """
    lam = profile.lam
    if profile.coeffs[0] != 0:
        raise HaarAdmissibilityError(f"profile {profile.name} has c_0 = {profile.coeffs[0]}")
    if not 0 <= m <= 2:
        raise ConfigError(f"m must be 0, 1 or 2, got {m}")
    if not 1 <= n <= profile.n_coeffs:
        raise ConfigError(f"n must lie in 1..{profile.n_coeffs}, got {n}")
    for j in range(m):
        if not n + lam - 2 - j > 0:
            raise ConfigError(f"boundary term {j} does not vanish: n + lam - 2 - j = {n + lam - 2 - j}")
    slow = profile.decay.kind is DecayKind.POLYNOMIAL
    if slow and m > 0:
        raise ConfigError(f"m > 0 needs a fast-decaying profile, {profile.name} decays polynomially")

    count = profile.n_coeffs
    d = np.asarray(shift_coeffs(profile, b, count).d)
    switch = 0.25 * profile.series_radius / max(1.0, abs(b))
    exponents = np.arange(count) + lam - 2.0

    def series(w):
        total = np.zeros_like(w, dtype=complex)
        for s in range(n, count):
            if d[s] != 0:
                total = total + d[s] * _falling(exponents[s], m) * w ** (exponents[s] - m)
        return total

    def polynomial(w):
        total = np.zeros_like(w, dtype=complex)
        for s in range(n):
            if d[s] != 0:
                total = total + d[s] * _falling(exponents[s], m) * w ** (exponents[s] - m)
        return total

    def g_over_w(w):
        return np.exp(1j * b * w) * profile.eval(w) / w

    def G(w):
        w = np.asarray(w, dtype=float)
        with np.errstate(all="ignore"):
            far = derivative(g_over_w, np.maximum(w, switch), m) - polynomial(w)
            return np.where(w < switch, series(w), far)

    weight = 2.0 ** (m + 1)

    def integrand(w):
        return G(w) * (np.exp(1j * a * w) - weight * np.exp(0.5j * a * w))

    cut = profile.decay.cutoff(q.envelope_tol)
    upper = q.omega_max if cut is None else max(cut, 2.0 * switch)
    value = integrate_half_line(integrand, upper, a + abs(b) + profile.frequency, q, GAUSS_LEGENDRE,
                                f"Haar remainder ({profile.name}, b={b}, a={a}, n={n}, m={m})")

    # beyond upper: g/w from the tail model (m = 0 only), minus the polynomial part
    if slow and profile.tail_pos is not None:
        for amplitude, kappa in profile.tail_pos:
            for c, factor in ((a, 1.0), (0.5 * a, -weight)):
                value += factor * fourier_tail(
                    lambda w, amp=amplitude: complex(amp(np.array(w)) / w), upper, kappa + b + c)
    for s in range(n):
        if d[s] == 0:
            continue
        alpha = exponents[s] - m
        scale = d[s] * _falling(exponents[s], m)
        value -= scale * (_abel_power_fourier(alpha, a, upper)
                          - weight * _abel_power_fourier(alpha, 0.5 * a, upper))

    return complex(math.sqrt(a) / (2.0 * math.pi) * (1j / a) ** (m + 1) * value)


def predicted_slope(req: ExpansionRequest) -> Optional[float]:
    """Exponent of a in the first omitted term whose coefficient does not vanish

    Scans the available coefficients; None when every omitted term vanishes.
    """
    full = expand(ExpansionRequest(req.profile, req.wavelet, req.b, 1.0, req.profile.n_coeffs, req.m),
                  F_b=0.0)
    magnitudes = [abs(t) for t in full.terms]
    floor = COEFFICIENT_FLOOR * max(magnitudes + [0.0])
    for s in range(req.n_terms, len(magnitudes)):
        if magnitudes[s] > floor:
            return full.scale_power[s]
    return None


def fit_slope(a_grid: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(a)

    Raises:
        DegenerateFitError: fewer than two points, or an error that is not positive
    """
    if len(a_grid) < 2 or len(a_grid) != len(errors):
        raise DegenerateFitError(f"cannot fit a slope through {len(errors)} errors on {len(a_grid)} scales")
    if not all(e > 0 for e in errors):
        raise DegenerateFitError("a slope needs strictly positive errors")
    return float(np.polyfit(np.log(a_grid), np.log(errors), 1)[0])


def _validate_grid(a_grid: Sequence[float]) -> Tuple[float, ...]:
    grid = tuple(float(a) for a in a_grid)
    if len(grid) < 2 or any(a <= 0 for a in grid) or any(y <= x for x, y in zip(grid, grid[1:])):
        raise ConfigError("the a-grid must be strictly increasing, positive, with at least 2 points")
    if math.log10(grid[-1] / grid[0]) < MIN_DECADES - 1e-9:
        raise ConfigError(f"the a-grid must span at least {MIN_DECADES} decades, "
                          f"got {math.log10(grid[-1] / grid[0]):.3g}")
    return grid


def _fit_above_noise(grid: Sequence[float], errors: Sequence[float],
                     floors: Sequence[float]) -> Tuple[Optional[float], int]:
    """Fit on the points before the first error at or below its noise floor"""
    usable = 0
    for error, floor in zip(errors, floors):
        if not error > floor:
            break
        usable += 1
    if usable < 2:
        return None, usable
    return fit_slope(grid[:usable], errors[:usable]), usable


@dataclass(frozen=True)
class ConvergenceReport:
    a_grid: Tuple[float, ...]
    errors: Tuple[float, ...]
    approximations: Tuple[complex, ...]
    oracle_values: Tuple[complex, ...]
    leading_extra: Tuple[Optional[complex], ...]
    fitted_slope: Optional[float]
    predicted_slope: Optional[float]
    n_terms: int
    wavelet: str
    profile: str
    b: float
    lam: float
    fit_points: int
    degenerate: bool
    slope_tolerance: float = SLOPE_TOLERANCE
    formula_id: str = ""
    negative_axis: str = REFLECTED
    notes: Dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        if self.degenerate or self.fitted_slope is None or self.predicted_slope is None:
            return False
        return self.fitted_slope <= self.predicted_slope + self.slope_tolerance

    @property
    def has_leading_extra(self) -> bool:
        return any(value is not None for value in self.leading_extra)

    def as_dict(self) -> Dict:
        return {
            "profile": self.profile,
            "wavelet": self.wavelet,
            "b": self.b,
            "lambda": self.lam,
            "n_terms": self.n_terms,
            "a_grid": list(self.a_grid),
            "errors": list(self.errors),
            "fitted_slope": self.fitted_slope,
            "predicted_slope": self.predicted_slope,
            "slope_tolerance": self.slope_tolerance,
            "fit_points": self.fit_points,
            "degenerate": self.degenerate,
            "pass": self.passed,
            "formula_id": self.formula_id,
            "negative_axis": self.negative_axis,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class _GridPoint:
    a: float
    oracle: complex
    result: ExpansionResult
    display: Optional[ExpansionResult] = None


def _evaluate_point(profile, wavelet, b, n_terms, q, F_b, negative_axis, with_display):
    def run(a: float) -> _GridPoint:
        req = ExpansionRequest(profile, wavelet, b, a, n_terms)
        oracle = cwt_oracle(profile, wavelet, b, a, q)
        result = expand(req, F_b=F_b, negative_axis=negative_axis)
        display = display_expansion(req, F_b) if with_display else None
        return _GridPoint(a, oracle, result, display)
    return run


def convergence_study(profile: FreqProfile, wavelet: WaveletSpec, b: float, n_terms: int,
                      a_grid: Sequence[float], q: QuadratureSettings = DEFAULT_SETTINGS,
                      workers: Optional[int] = None,
                      negative_axis: str = REFLECTED) -> ConvergenceReport:
    """Errors of the n-term expansion against the reference over a scale grid

    The slope is fitted on the points whose error is above the quadrature
    noise floor; fewer than two such points leave the report degenerate.

    Raises:
        ConfigError: a grid that is not increasing or spans under 1.5 decades
    """
    grid = _validate_grid(a_grid)
    F_b = haar_F_integral(profile, b, q) if wavelet.kind is WaveletKind.HAAR else None
    points = evaluate_grid(_evaluate_point(profile, wavelet, b, n_terms, q, F_b, negative_axis, False),
                           grid, workers)

    errors = tuple(abs(p.oracle - p.result.approximation) for p in points)
    floors = [max(q.abs_tol, q.rel_tol * abs(p.oracle)) for p in points]
    fitted, usable = _fit_above_noise(grid, errors, floors)
    degenerate = fitted is None
    if degenerate:
        logger.warning(f"{profile.name}/{wavelet.label} n={n_terms}: errors reach the quadrature "
                       f"noise floor, no slope fitted")
    elif usable < len(grid):
        logger.warning(f"{profile.name}/{wavelet.label} n={n_terms}: fit truncated to "
                       f"{usable} of {len(grid)} points")

    report = ConvergenceReport(
        a_grid=grid,
        errors=errors,
        approximations=tuple(p.result.approximation for p in points),
        oracle_values=tuple(p.oracle for p in points),
        leading_extra=tuple(p.result.leading_extra for p in points),
        fitted_slope=fitted,
        predicted_slope=predicted_slope(ExpansionRequest(profile, wavelet, b, grid[0], n_terms)),
        n_terms=n_terms,
        wavelet=wavelet.label,
        profile=profile.name,
        b=float(b),
        lam=profile.lam,
        fit_points=usable,
        degenerate=degenerate,
        formula_id=points[0].result.formula_id,
        negative_axis=points[0].result.negative_axis,
        notes=dict(points[0].result.notes),
    )
    logger.info(f"{profile.name}/{wavelet.label} n={n_terms}: fitted slope {report.fitted_slope}, "
                f"predicted {report.predicted_slope}, pass={report.passed}")
    return report


# -- constant adjudication -----------------------------------------------------------

DISPLAY_OFFSET_LIMIT = 0.5


@dataclass(frozen=True)
class AdjudicationReport:
    profile: str
    wavelet: str
    b: float
    n_terms: int
    a_grid: Tuple[float, ...]
    rederived_errors: Tuple[float, ...]
    display_offsets: Tuple[float, ...]
    rederived_slope: Optional[float]
    display_slope: Optional[float]
    predicted_slope: Optional[float]

    @property
    def rederived_consistent(self) -> bool:
        if self.rederived_slope is None or self.predicted_slope is None:
            return False
        return self.rederived_slope <= self.predicted_slope + SLOPE_TOLERANCE

    @property
    def display_offset(self) -> float:
        """Median relative offset |display - oracle| / |oracle| over the grid"""
        return float(statistics.median(self.display_offsets))

    @property
    def display_rejected(self) -> bool:
        return self.display_offset > DISPLAY_OFFSET_LIMIT

    def as_dict(self) -> Dict:
        return {
            "profile": self.profile,
            "wavelet": self.wavelet,
            "b": self.b,
            "n_terms": self.n_terms,
            "rederived_slope": self.rederived_slope,
            "display_slope": self.display_slope,
            "predicted_slope": self.predicted_slope,
            "rederived_consistent": self.rederived_consistent,
            "display_offset": self.display_offset,
            "display_rejected": self.display_rejected,
        }


def constant_adjudication(profile: FreqProfile, wavelet: WaveletSpec, b: float, n_terms: int,
                          a_grid: Sequence[float], q: QuadratureSettings = DEFAULT_SETTINGS,
                          workers: Optional[int] = None) -> AdjudicationReport:
    """Compare the engine's constants and the printed ones against the reference"""
    grid = _validate_grid(a_grid)
    F_b = haar_F_integral(profile, b, q) if wavelet.kind is WaveletKind.HAAR else None
    points = evaluate_grid(_evaluate_point(profile, wavelet, b, n_terms, q, F_b, REFLECTED, True),
                           grid, workers)
    floors = [max(q.abs_tol, q.rel_tol * abs(p.oracle)) for p in points]
    rederived = [abs(p.oracle - p.result.approximation) for p in points]
    display = [abs(p.oracle - p.display.approximation) for p in points]
    offsets = [err / abs(p.oracle) if p.oracle != 0 else math.inf for err, p in zip(display, points)]
    return AdjudicationReport(
        profile=profile.name,
        wavelet=wavelet.label,
        b=float(b),
        n_terms=n_terms,
        a_grid=grid,
        rederived_errors=tuple(rederived),
        display_offsets=tuple(offsets),
        rederived_slope=_fit_above_noise(grid, rederived, floors)[0],
        display_slope=_fit_above_noise(grid, display, floors)[0],
        predicted_slope=predicted_slope(ExpansionRequest(profile, wavelet, b, grid[0], n_terms)),
    )


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.4g}"


def render_adjudication(reports: Sequence[AdjudicationReport]) -> str:
    """Markdown summary of constant adjudications"""
    lines = [
        "# Constant adjudication",
        "",
        "Re-derived constants against the printed ones, both compared with the "
        "reference quadrature. A printed constant is rejected when it leaves a "
        f"median relative offset above {DISPLAY_OFFSET_LIMIT:.0%}.",
        "",
        "| wavelet | profile | b | n | predicted slope | re-derived slope | consistent "
        "| printed offset | printed rejected |",
        "|---|---|---|---|---|---|---|---|---|",
    ]
    for r in reports:
        lines.append(
            f"| {r.wavelet} | {r.profile} | {r.b:g} | {r.n_terms} | {_fmt(r.predicted_slope)} "
            f"| {_fmt(r.rederived_slope)} | {'yes' if r.rederived_consistent else 'no'} "
            f"| {r.display_offset:.4g} | {'yes' if r.display_rejected else 'no'} |")
    lines.append("")
    return "\n".join(lines)
