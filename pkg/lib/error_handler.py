"""
Error Handling and Logging Module for wavelet-asym

This module provides the exception hierarchy used across the package, the
logging setup, error classification into CLI exit codes, and a small run
monitor whose report becomes the provenance sidecar of every output file.
"""

import os
import sys
import json
import time
import logging
import traceback
from datetime import datetime
from typing import Any, Dict, List, Optional


class WaveletAsymError(Exception):
    """Base class for every error raised by the package"""

    exit_code = 1

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(WaveletAsymError):
    """Invalid configuration or request"""

    exit_code = 2


class UnknownProfileError(ConfigError):
    pass


class WrongWaveletError(ConfigError):
    pass


class InsufficientCoefficientsError(ConfigError):
    pass


class HaarAdmissibilityError(ConfigError):
    """The Haar expansion needs d_0 = 0 on both half-lines"""


class GridCoverageError(ConfigError):
    pass


class MissingMellinError(ConfigError):
    pass


class NumericError(WaveletAsymError):
    """A numerical procedure failed"""

    exit_code = 3


class DomainError(NumericError):
    pass


class AccuracyError(NumericError):
    pass


class NonConvergenceError(NumericError):
    pass


class StripViolationError(NumericError):
    pass


class DivergenceError(NumericError):
    pass


class RuleDisagreementError(NumericError):
    pass


class DegenerateFitError(NumericError):
    pass


class WaveletAsymLogger:
    """Logging system for wavelet-asym

    Console output goes to standard error so that standard output and the
    data files stay clean.
    """

    def __init__(self, log_dir: Optional[str] = None, level: int = logging.INFO):
        self.log_dir = log_dir
        self.level = level
        self.setup_logging()

    def setup_logging(self):
        """Setup console and optional file logging"""
        log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

        self.logger = logging.getLogger('wavelet_asym')
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        # Re-configuring must not stack handlers
        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self.level)
        console_handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
        self.logger.addHandler(console_handler)

        if self.log_dir:
            os.makedirs(self.log_dir, exist_ok=True)
            file_handler = logging.FileHandler(
                os.path.join(self.log_dir, f'wavelet_asym_{datetime.now().strftime("%Y%m%d")}.log')
            )
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(logging.Formatter(log_format))
            self.logger.addHandler(file_handler)

    def log_error(self, error: Exception, context: str = "", additional_info: Dict = None):
        """Log detailed error information

        Args:
            error: The exception being reported
            context: Where it happened
            additional_info: Extra key/value details

        Returns:
            dict: The structured error record
        """
        error_info = {
            "context": context,
            "error_type": type(error).__name__,
            "error_message": str(error),
            "exit_code": exit_code_for(error),
            "diagnostics": getattr(error, "diagnostics", {}),
            "traceback": traceback.format_exc(),
            "additional_info": additional_info or {}
        }

        self.logger.error(f"{context}: {error}" if context else str(error))
        self.logger.debug(f"Full error details: {json.dumps(error_info, indent=2, default=str)}")

        return error_info


def classify_error(error: Exception) -> str:
    """Classify an error for reporting

    Returns:
        str: "config_error", "numeric_error" or "unknown_error"
    """
    if isinstance(error, ConfigError):
        return "config_error"
    if isinstance(error, NumericError):
        return "numeric_error"
    # numpy/scipy domain problems surface as these
    if isinstance(error, (FloatingPointError, ZeroDivisionError, OverflowError)):
        return "numeric_error"
    if isinstance(error, (KeyError, ValueError, FileNotFoundError)):
        return "config_error"
    return "unknown_error"


def exit_code_for(error: Exception) -> int:
    """Map an error to the CLI exit code (2 config, 3 numeric)"""
    return {
        "config_error": 2,
        "numeric_error": 3,
    }.get(classify_error(error), 1)


class RunMonitor:
    """Track the stages of one CLI run

    The report is written next to the data files as provenance, so nothing
    time-dependent ever ends up inside the data themselves.
    """

    def __init__(self, logger: WaveletAsymLogger = None):
        self.logger = logger or get_logger()
        self.start_time = None
        self.command = None
        self.checkpoints = {}
        self.errors: List[Dict] = []

    def start_monitoring(self, command: str):
        self.start_time = time.time()
        self.command = command
        self.logger.logger.debug(f"Started {command}")

    def checkpoint(self, stage: str, details: str = ""):
        """Record a checkpoint in the run"""
        timestamp = time.time()
        elapsed = timestamp - self.start_time if self.start_time else 0

        self.checkpoints[stage] = {
            "elapsed": elapsed,
            "details": details
        }

        self.logger.logger.debug(f"Checkpoint - {stage}: {details} (elapsed: {elapsed:.2f}s)")

    def record_error(self, stage: str, error: Exception):
        self.errors.append({
            "stage": stage,
            "error": str(error),
            "error_type": type(error).__name__
        })
        self.logger.log_error(error, stage)

    def generate_report(self, config: Optional[Dict] = None) -> Dict:
        """Generate the provenance report for the sidecar file"""
        total_time = time.time() - self.start_time if self.start_time else 0
        return {
            "command": self.command,
            "created": datetime.now().isoformat(timespec="seconds"),
            "python": sys.version.split()[0],
            "total_time": total_time,
            "success": not self.errors,
            "checkpoints": self.checkpoints,
            "errors": self.errors,
            "config": config or {},
        }


_global_logger: Optional[WaveletAsymLogger] = None


def get_logger() -> WaveletAsymLogger:
    """Get the global logger instance"""
    global _global_logger
    if _global_logger is None:
        _global_logger = WaveletAsymLogger()
    return _global_logger


def configure_logging(log_dir: Optional[str] = None, verbose: bool = False) -> WaveletAsymLogger:
    """Replace the global logger, e.g. from the CLI flags"""
    global _global_logger
    _global_logger = WaveletAsymLogger(log_dir, logging.DEBUG if verbose else logging.INFO)
    return _global_logger
