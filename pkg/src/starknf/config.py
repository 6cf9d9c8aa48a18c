"""Run configuration: command-line flags merged over an optional key-value file."""

from __future__ import annotations

import configparser
import json
import math
from dataclasses import asdict, dataclass, field

__all__ = ["RunConfig", "ConfigError", "read_config_file", "merge"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    eps: float = 1e-3
    beta: float = 1.0
    h: float = 1.0
    k: float = 0.0
    suites: tuple[str, ...] = ()
    output: str = ""
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for n in ("eps", "beta", "h", "k"):
            if not math.isfinite(getattr(self, n)):
                raise ConfigError(f"{n} must be finite")

    def canonical(self) -> str:
        """Canonical JSON text; parsing it back gives an equal config."""
        d = asdict(self)
        d["suites"] = list(self.suites)
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_canonical(cls, text: str) -> "RunConfig":
        d = json.loads(text)
        d["suites"] = tuple(d.get("suites", ()))
        return cls(**d)

    def echo(self) -> dict:
        return json.loads(self.canonical())


_CASTS = {"eps": float, "beta": float, "h": float, "k": float, "seed": int, "output": str,
          "suites": lambda v: tuple(s.strip() for s in v.replace(",", " ").split() if s.strip())}


def read_config_file(path: str) -> dict:
    """Read ``key = value`` lines (an optional ``[starknf]`` section header is allowed)."""
    with open(path) as fh:
        text = fh.read()
    cp = configparser.ConfigParser()
    if not text.lstrip().startswith("["):
        text = "[starknf]\n" + text
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not cp.has_section("starknf"):
        raise ConfigError(f"{path}: expected a [starknf] section")
    out = {}
    for key, value in cp.items("starknf"):
        if key not in _CASTS:
            raise ConfigError(f"{path}: unknown key {key!r}")
        try:
            out[key] = _CASTS[key](value)
        except ValueError:
            raise ConfigError(f"{path}: bad value for {key}: {value!r}") from None
    return out


def merge(command: str, flags: dict, file_values: dict | None = None, extra: dict | None = None) -> RunConfig:
    """Flags win over the file; unset flags are ``None``."""
    vals = dict(file_values or {})
    vals.update({k: v for k, v in flags.items() if v is not None and k in _CASTS})
    if "suites" in vals:
        vals["suites"] = tuple(vals["suites"])
    return RunConfig(command=command, extra=dict(extra or {}), **vals)
