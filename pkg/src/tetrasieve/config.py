"""Run configuration with precedence flags > environment > config file.

The config file is an INI file named by ``TETRASIEVE_CONFIG`` with a
``[tetrasieve]`` section.  Recognised keys and their environment variables:

=========  ======================  ==========================================
key        environment             meaning
=========  ======================  ==========================================
backend    TETRASIEVE_BACKEND      command line of the GP-compatible backend
timeout    TETRASIEVE_TIMEOUT      seconds per backend invocation
fixtures   TETRASIEVE_FIXTURES     directory of ray-class fixtures
jobs       TETRASIEVE_JOBS         worker processes for the sieve
=========  ======================  ==========================================
"""

from __future__ import annotations

import configparser
import os
import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional

ENV_PREFIX = "TETRASIEVE_"
CONFIG_ENV = "TETRASIEVE_CONFIG"
SECTION = "tetrasieve"

DEFAULT_TIMEOUT = 600.0
DEFAULT_FIXTURES = Path(__file__).resolve().parent / "fixtures"


def default_backend() -> List[str]:
    return [sys.executable, "-m", "tetrasieve.gpshim"]


DEFAULTS: Dict[str, str] = {
    "backend": shlex.join(default_backend()),
    "timeout": str(DEFAULT_TIMEOUT),
    "fixtures": str(DEFAULT_FIXTURES),
    "jobs": "1",
}


class ConfigError(ValueError):
    pass


@dataclass
class Settings:
    backend: List[str]
    timeout: float
    fixtures: Path
    jobs: int
    sources: Dict[str, str] = field(default_factory=dict)

    def describe(self) -> Dict[str, str]:
        """Flat description suitable for report metadata."""
        return {
            "backend": shlex.join(self.backend),
            "timeout": "%g" % self.timeout,
            "fixtures": str(self.fixtures),
            "jobs": str(self.jobs),
            "sources": ",".join("%s:%s" % kv for kv in sorted(self.sources.items())),
        }


def _file_values(env: Mapping[str, str]) -> Dict[str, str]:
    path = env.get(CONFIG_ENV)
    if not path:
        return {}
    parser = configparser.ConfigParser()
    if not parser.read(path, encoding="utf-8"):
        raise ConfigError("config file %s cannot be read" % path)
    if not parser.has_section(SECTION):
        return {}
    return {k: v for k, v in parser.items(SECTION) if k in DEFAULTS}


def resolve(flags: Optional[Mapping[str, object]] = None,
            env: Optional[Mapping[str, str]] = None) -> Settings:
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    env = os.environ if env is None else env
    from_file = _file_values(env)
    raw: Dict[str, str] = {}
    sources: Dict[str, str] = {}
    for key, default in DEFAULTS.items():
        env_key = ENV_PREFIX + key.upper()
        if key in flags:
            raw[key], sources[key] = str(flags[key]), "flag"
        elif env.get(env_key):
            raw[key], sources[key] = env[env_key], "env"
        elif key in from_file:
            raw[key], sources[key] = from_file[key], "file"
        else:
            raw[key], sources[key] = default, "default"
    try:
        timeout = float(raw["timeout"])
        jobs = int(raw["jobs"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if timeout <= 0 or jobs < 1:
        raise ConfigError("timeout must be positive and jobs at least 1")
    backend = shlex.split(raw["backend"])
    if not backend:
        raise ConfigError("empty backend command")
    return Settings(backend, timeout, Path(raw["fixtures"]), jobs, sources)
