"""Flat ``key = value`` run configuration used by the CLI."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .errors import DomainError


class ConfigError(DomainError):
    """Malformed configuration text or value."""


def parse_key_values(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        out[key.strip()] = value.strip()
    return out


def _complex_list(text):
    return [complex(v.replace(" ", "")) for v in text.split(",") if v.strip()]


@dataclass(frozen=True)
class RunConfig:
    a: float = 1.0
    n: int = 1000
    potential: str = "zero"
    kernel_tol: float = 1e-12
    kernel_n_max: int = 60
    k_max: int = 30
    spps_tol: float = 1e-12
    lambdas: tuple = (1.0 + 0j,)
    spec: tuple = (1.0 + 0j, 0j, 0j, 1.0 + 0j)
    eig_left: float = 0.0
    eig_right: float = 1.0
    lambda_min: float = -100.0
    lambda_max: float = 0.0
    eig_count: int = 3
    eig_samples: int = 200
    weak_family_size: int = 5
    out: str = "out"

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigError(f"a: must be positive, got {self.a}")
        if self.n <= 0 or self.n % 2:
            raise ConfigError(f"n: must be a positive even integer, got {self.n}")
        for name in ("kernel_tol", "spps_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name}: must be positive")
        for name in ("kernel_n_max", "k_max", "eig_count", "eig_samples", "weak_family_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name}: must be >= 1")
        if len(self.spec) != 4:
            raise ConfigError(f"spec: expected 4 complex values, got {len(self.spec)}")
        if not self.lambda_min < self.lambda_max:
            raise ConfigError("lambda_min: must be below lambda_max")

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in mapping.items():
            if key not in known:
                raise ConfigError(f"{key}: unknown configuration key")
            try:
                kwargs[key] = _convert(key, raw, known[key].default)
            except ValueError as exc:
                raise ConfigError(f"{key}: cannot parse {raw!r} ({exc})") from exc
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_mapping(parse_key_values(Path(path).read_text()))

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **kw)


def _convert(key, raw, default):
    if key in ("lambdas", "spec"):
        return tuple(_complex_list(raw))
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw
