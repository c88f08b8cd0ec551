"""
Configuration Utilities for wavelet-asym

This module reads the flat `key = value` configuration file. Lines before the
first `[section]` header are general settings; each section holds the keys of
one command (`[eval]`, `[converge]`, ...) or of a subsystem (`[accuracy]`,
`[quadrature]`, `[profile.NAME]`).
"""

import os
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from lib.error_handler import ConfigError

GENERAL = ""


def read_config_sections(filename="config.txt"):
    """Read all sections of a configuration file

    Args:
        filename (str): Path to the configuration file

    Returns:
        dict: section name -> {key: value}; general keys live under ""
    """
    sections: Dict[str, Dict[str, str]] = {GENERAL: {}}
    if not os.path.exists(filename):
        return sections

    current = GENERAL
    with open(filename, "r", encoding="utf-8") as file:
        for number, raw in enumerate(file, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1].strip()
                sections.setdefault(current, {})
                continue
            if "=" not in line:
                raise ConfigError(f"{filename}:{number}: expected 'key = value', got {raw.strip()!r}")
            key, value = line.split("=", 1)
            sections[current][key.strip()] = value.strip()
    return sections


def read_config_file(filename="config.txt", section: Optional[str] = None):
    """Read configuration from file

    Args:
        filename (str): Path to the configuration file
        section (str): Optional section whose keys override the general ones

    Returns:
        dict: Configuration values as a dictionary
    """
    sections = read_config_sections(filename)
    config = dict(sections[GENERAL])
    if section:
        config.update(sections.get(section, {}))
    return config


@lru_cache(maxsize=32)
def _read_stamped(path: str, stamp: Optional[Tuple[int, int]], section: Optional[str]):
    return read_config_file(path, section)


def get_cached_config(filename="config.txt", section: Optional[str] = None):
    """Get cached configuration, re-read when the file's mtime or size changes

    Returns a fresh dict each call; the cached one is never handed out.
    """
    path = os.path.abspath(filename)
    stamp = None
    if os.path.exists(path):
        info = os.stat(path)
        stamp = (info.st_mtime_ns, info.st_size)
    return dict(_read_stamped(path, stamp, section))


def profile_sections(filename="config.txt") -> Dict[str, Dict[str, str]]:
    """Custom profile definitions: {name: keys} from `[profile.NAME]` sections"""
    sections = read_config_sections(filename)
    return {
        name.split(".", 1)[1]: values
        for name, values in sections.items()
        if name.startswith("profile.")
    }


def as_float(config: Dict[str, str], key: str, default: Optional[float] = None) -> Optional[float]:
    if key not in config or config[key] == "":
        return default
    try:
        return float(config[key])
    except ValueError:
        raise ConfigError(f"{key} must be a real number, got {config[key]!r}")


def as_int(config: Dict[str, str], key: str, default: Optional[int] = None) -> Optional[int]:
    if key not in config or config[key] == "":
        return default
    try:
        return int(config[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {config[key]!r}")


def as_list(config: Dict[str, str], key: str) -> List[str]:
    if not config.get(key):
        return []
    return [item.strip() for item in config[key].split(",") if item.strip()]


def parse_a_grid(text: str) -> Tuple[float, float, int]:
    """Parse `START:STOP:POINTS` (log-spaced grid)"""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"a-grid must be START:STOP:POINTS, got {text!r}")
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"a-grid must be START:STOP:POINTS, got {text!r}")
    if not 0 < start < stop:
        raise ConfigError(f"a-grid needs 0 < START < STOP, got {text!r}")
    return start, stop, points
