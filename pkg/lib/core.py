"""
Core Run Module for wavelet-asym

Orchestrates the CLI commands: resolve the run configuration, evaluate,
and emit records. Data files are deterministic; provenance goes to a
`<output>.meta.json` sidecar written from the RunMonitor report.
"""

import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from lib.config_utils import (
    as_float,
    as_int,
    get_cached_config,
    parse_a_grid,
)
from lib.error_handler import ConfigError, RunMonitor
from lib.expansion import NEGATIVE_AXIS_POLICIES, REFLECTED, ExpansionRequest, expand
from lib.mellin import WaveletKind, WaveletSpec
from lib.oracle import QuadratureSettings, cross_checked_oracle, cwt_oracle, haar_F_integral
from lib.profiles import check_hypotheses, get_profile
from lib.remainder import (
    ConvergenceReport,
    constant_adjudication,
    convergence_study,
    remainder_by_difference,
    render_adjudication,
)
from lib.special_fn import DEFAULT_ACCURACY, SpecialFnAccuracy

logger = logging.getLogger("wavelet_asym.core")

COMMANDS = ("eval", "converge", "golden", "hypotheses", "adjudicate")
MIN_CONVERGE_POINTS = 4
DEFAULT_CONFIG = "config.txt"

DEFAULTS = {
    "profile": "gauss",
    "wavelet": "mexican",
    "b": "0",
    "a": "100",
    "a_grid": "100:3162.2776601683795:8",
    "n": "1",
    "m": "0",
    "negative_axis": REFLECTED,
    "golden_dir": "golden",
}

# name, profile, lambda, wavelet, b, a, n
GOLDEN_CASES = (
    ("mexican_gauss_b0_n2", "gauss", 1.0, "mexican", 0.0, 100.0, 2),
    ("mexican_gauss_b1.5_n2", "gauss", 1.0, "mexican", 1.5, 100.0, 2),
    ("morlet2_gauss_b0_n1", "gauss", 1.0, "morlet:2", 0.0, 100.0, 1),
    ("haar_admissible_b0_n2", "haar-admissible", 0.5, "haar", 0.0, 100.0, 2),
)

# profile, lambda, wavelet, n
ADJUDICATION_CASES = (
    ("gauss", 1.0, "morlet:2", 1),
    ("gauss", 1.0, "mexican", 1),
    ("haar-admissible", 0.5, "haar", 2),
)
ADJUDICATION_GRID = (100.0, 10.0 ** 3.5, 8)


@dataclass(frozen=True)
class RunConfig:
    command: str
    profile_name: str
    wavelet: WaveletSpec
    b: float
    a: float
    a_grid: Tuple[float, float, int]
    n_terms: int
    lam: Optional[float] = None
    m: int = 0
    negative_axis: str = REFLECTED
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    accuracy: SpecialFnAccuracy = field(default_factory=SpecialFnAccuracy)
    csv_path: Optional[str] = None
    json_path: Optional[str] = None
    report_path: Optional[str] = None
    golden_dir: str = "golden"
    workers: Optional[int] = None
    config_path: Optional[str] = None

    @property
    def grid(self) -> Tuple[float, ...]:
        start, stop, points = self.a_grid
        return tuple(float(a) for a in np.logspace(math.log10(start), math.log10(stop), points))

    def as_dict(self) -> Dict:
        return {
            "command": self.command,
            "profile": self.profile_name,
            "wavelet": self.wavelet.label,
            "b": self.b,
            "a": self.a,
            "a_grid": list(self.a_grid),
            "n": self.n_terms,
            "lambda": self.lam,
            "m": self.m,
            "negative_axis": self.negative_axis,
            "quadrature": self.quadrature.as_dict(),
            "accuracy": {"abs_tol": self.accuracy.abs_tol, "rel_tol": self.accuracy.rel_tol},
            "workers": self.workers,
            "config": self.config_path,
        }


def build_run_config(command: str, flags: Dict[str, Optional[str]],
                     config_path: Optional[str] = None) -> RunConfig:
    """Merge built-in defaults < config file (general, then the command's section) < flags

    Raises:
        ConfigError: unknown command, missing config file or invalid values
    """
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    if config_path is not None and not os.path.exists(config_path):
        raise ConfigError(f"config file {config_path} not found")
    if config_path is None and os.path.exists(DEFAULT_CONFIG):
        config_path = DEFAULT_CONFIG

    values = dict(DEFAULTS)
    if config_path:
        values.update(get_cached_config(config_path, command))
    values.update({key: value for key, value in flags.items() if value is not None})

    sections = {"quadrature": {}, "accuracy": {}}
    if config_path:
        for name in sections:
            sections[name] = get_cached_config(config_path, name)

    negative_axis = values.get("negative_axis", REFLECTED)
    if negative_axis not in NEGATIVE_AXIS_POLICIES:
        raise ConfigError(f"negative_axis must be one of {NEGATIVE_AXIS_POLICIES}, got {negative_axis!r}")

    return RunConfig(
        command=command,
        profile_name=values["profile"],
        wavelet=WaveletSpec.parse(values["wavelet"]),
        b=as_float(values, "b"),
        a=as_float(values, "a"),
        a_grid=parse_a_grid(values["a_grid"]),
        n_terms=as_int(values, "n"),
        lam=as_float(values, "lambda"),
        m=as_int(values, "m", 0),
        negative_axis=negative_axis,
        quadrature=QuadratureSettings.from_config(sections["quadrature"]),
        accuracy=SpecialFnAccuracy.from_config(sections["accuracy"]),
        csv_path=values.get("csv") or None,
        json_path=values.get("json") or None,
        report_path=values.get("report") or None,
        golden_dir=values["golden_dir"],
        workers=as_int(values, "workers"),
        config_path=config_path,
    )


# -- emission ---------------------------------------------------------------------

def format_number(x: Optional[float]) -> str:
    """17 significant digits, empty for a missing value"""
    if x is None:
        return ""
    return f"{x:.17g}"


def to_record(value: Any) -> Any:
    """JSON-ready copy: complex numbers become {"re", "im"}, tuples become lists"""
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {str(k): to_record(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_record(v) for v in value]
    return value


def dumps(record: Dict) -> str:
    return json.dumps(to_record(record), indent=2, sort_keys=True) + "\n"


def write_output(path: Optional[str], text: str, monitor: Optional[RunMonitor] = None,
                 cfg: Optional[RunConfig] = None):
    """Write a data file plus its provenance sidecar; standard output when path is None"""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write(text)
    if monitor is not None:
        report = monitor.generate_report(cfg.as_dict() if cfg else None)
        with open(path + ".meta.json", "w", encoding="utf-8", newline="\n") as file:
            file.write(json.dumps(to_record(report), indent=2, sort_keys=True) + "\n")
    logger.info(f"wrote {path}")


# -- commands -----------------------------------------------------------------------

def evaluation_record(profile_name: str, lam: Optional[float], wavelet: WaveletSpec, b: float,
                      a: float, n_terms: int, m: int, q: QuadratureSettings,
                      negative_axis: str = REFLECTED, config_path: Optional[str] = None,
                      oracle_value: Optional[complex] = None,
                      accuracy: SpecialFnAccuracy = DEFAULT_ACCURACY) -> Dict:
    """Oracle, expansion, remainder and hypothesis report for one (b, a, n)"""
    profile = get_profile(profile_name, lam, config_path)
    req = ExpansionRequest(profile, wavelet, b, a, n_terms, m)
    hypotheses = check_hypotheses(profile, wavelet, m)
    if not hypotheses.all_passed:
        failed = [c.name for c in hypotheses.checks if not c.passed]
        logger.warning(f"{profile.name}/{wavelet.label}: hypotheses not met: {', '.join(failed)}")
    if oracle_value is None:
        oracle_value = cwt_oracle(profile, wavelet, b, a, q)
    F_b = haar_F_integral(profile, b, q) if wavelet.kind is WaveletKind.HAAR else None
    result = expand(req, F_b=F_b, negative_axis=negative_axis, accuracy=accuracy)
    return {
        "profile": profile.describe(),
        "wavelet": wavelet.label,
        "b": float(b),
        "a": float(a),
        "n_terms": n_terms,
        "oracle": complex(oracle_value),
        "expansion": result.as_dict(),
        "remainder": remainder_by_difference(req, oracle_value, result),
        "hypotheses": hypotheses.as_dict(),
        "quadrature": q.as_dict(),
    }


def run_eval(cfg: RunConfig, monitor: RunMonitor) -> Dict:
    """Single evaluation, emitted as JSON"""
    record = evaluation_record(cfg.profile_name, cfg.lam, cfg.wavelet, cfg.b, cfg.a, cfg.n_terms,
                               cfg.m, cfg.quadrature, cfg.negative_axis, cfg.config_path,
                               accuracy=cfg.accuracy)
    monitor.checkpoint("eval", f"{cfg.profile_name}/{cfg.wavelet.label} a={cfg.a}")
    write_output(cfg.json_path, dumps(record), monitor, cfg)
    return record


CSV_HEADER = ["a", "abs_error", "partial_sum_re", "partial_sum_im", "oracle_re", "oracle_im",
              "fitted_slope", "predicted_slope", "pass"]


def convergence_csv(report: ConvergenceReport) -> str:
    """One row per grid point; Haar reports add the leading-term magnitude"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = list(CSV_HEADER)
    if report.has_leading_extra:
        header.append("leading_extra_abs")
    writer.writerow(header)
    for i, a in enumerate(report.a_grid):
        approximation = report.approximations[i]
        oracle = report.oracle_values[i]
        row = [
            format_number(a),
            format_number(report.errors[i]),
            format_number(approximation.real),
            format_number(approximation.imag),
            format_number(oracle.real),
            format_number(oracle.imag),
            format_number(report.fitted_slope),
            format_number(report.predicted_slope),
            "true" if report.passed else "false",
        ]
        if report.has_leading_extra:
            extra = report.leading_extra[i]
            row.append(format_number(abs(extra)) if extra is not None else "")
        writer.writerow(row)
    return buffer.getvalue()


def run_converge(cfg: RunConfig, monitor: RunMonitor) -> ConvergenceReport:
    """Convergence-order study over the log-spaced grid, emitted as CSV

    Raises:
        ConfigError: fewer than 4 grid points
    """
    if cfg.a_grid[2] < MIN_CONVERGE_POINTS:
        raise ConfigError(f"converge needs at least {MIN_CONVERGE_POINTS} grid points, got {cfg.a_grid[2]}")
    profile = get_profile(cfg.profile_name, cfg.lam, cfg.config_path)
    report = convergence_study(profile, cfg.wavelet, cfg.b, cfg.n_terms, cfg.grid, cfg.quadrature,
                               cfg.workers, cfg.negative_axis)
    monitor.checkpoint("converge", f"{len(report.a_grid)} points, pass={report.passed}")
    write_output(cfg.csv_path, convergence_csv(report), monitor, cfg)
    if cfg.json_path:
        write_output(cfg.json_path, dumps(report.as_dict()), monitor, cfg)
    return report


def run_golden(cfg: RunConfig, monitor: RunMonitor) -> List[str]:
    """Regenerate the golden records

    Every case is evaluated with both quadrature rules before anything is
    written; a disagreement leaves the golden directory untouched.

    Raises:
        RuleDisagreementError: the two rules disagree on some case
    """
    records = {}
    for name, profile_name, lam, wavelet_text, b, a, n in GOLDEN_CASES:
        wavelet = WaveletSpec.parse(wavelet_text)
        profile = get_profile(profile_name, lam)
        checked = cross_checked_oracle(profile, wavelet, b, a, cfg.quadrature)
        records[name] = evaluation_record(profile_name, lam, wavelet, b, a, n, 0, cfg.quadrature,
                                          oracle_value=checked.value, accuracy=cfg.accuracy)
        monitor.checkpoint(name, f"rules differ by {checked.difference:.3g} "
                                 f"(tolerance {checked.tolerance:.3g})")

    paths = []
    for name, record in records.items():
        path = os.path.join(cfg.golden_dir, f"{name}.json")
        write_output(path, dumps(record), monitor, cfg)
        paths.append(path)
    return paths


def run_hypotheses(cfg: RunConfig, monitor: RunMonitor) -> Dict:
    """Hypothesis report; failures are data, not errors"""
    profile = get_profile(cfg.profile_name, cfg.lam, cfg.config_path)
    report = check_hypotheses(profile, cfg.wavelet, cfg.m)
    monitor.checkpoint("hypotheses", f"all passed: {report.all_passed}")
    record = report.as_dict()
    write_output(cfg.json_path, dumps(record), monitor, cfg)
    return record


def run_adjudicate(cfg: RunConfig, monitor: RunMonitor) -> str:
    """Constant adjudication of the printed closed forms, emitted as markdown"""
    start, stop, points = ADJUDICATION_GRID
    grid = tuple(float(a) for a in np.logspace(math.log10(start), math.log10(stop), points))
    reports = []
    for profile_name, lam, wavelet_text, n in ADJUDICATION_CASES:
        profile = get_profile(profile_name, lam)
        report = constant_adjudication(profile, WaveletSpec.parse(wavelet_text), cfg.b, n, grid,
                                       cfg.quadrature, cfg.workers)
        monitor.checkpoint(f"adjudicate {wavelet_text}",
                           f"printed offset {report.display_offset:.3g}")
        reports.append(report)
    markdown = render_adjudication(reports)
    write_output(cfg.report_path, markdown, monitor, cfg)
    if cfg.json_path:
        write_output(cfg.json_path, dumps({"cases": [r.as_dict() for r in reports]}), monitor, cfg)
    return markdown


RUNNERS = {
    "eval": run_eval,
    "converge": run_converge,
    "golden": run_golden,
    "hypotheses": run_hypotheses,
    "adjudicate": run_adjudicate,
}
