"""Experiment configuration: a flat UTF-8 ``key=value`` file.

Keys are the ExperimentConfig field names written in kebab-case. Blank
lines and lines starting with '#' are ignored; unknown keys are an error.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .residue import is_prime

KINDS = ("sweep-thm1", "sweep-thm2", "sweep-ap", "sqrtcancel-histogram", "identity-suite")

# sweep-thm1 takes q0 ~ q^(2/3), sweep-thm2 takes q0 ~ q^(4/5)
SPLIT_RULES = {"2/3": 2 / 3, "4/5": 4 / 5}


@dataclass
class ExperimentConfig:
    kind: str = "sweep-thm1"
    q0: int | None = None
    q1: int | None = None
    q: int | None = None
    split: str = "2/3"
    k0: str = "kl:3"
    k1: str = "chi:1"
    weight: int = 12
    z: float = 1.0
    x_values: tuple = ()
    x_start: float | None = None
    x_ratio: float = 10.0
    x_count: int = 0
    residue: int = 1
    q0_list: tuple = ()
    draws: int = 500
    zz_draws: int = 100
    resonant_draws: int = 30
    seed: int = 0
    threads: int = 1
    output: str | None = None
    cache_dir: str | None = None
    no_build: bool = False
    timing: bool = True

    def x_grid(self) -> list[float]:
        if self.x_values:
            return [float(x) for x in self.x_values]
        if self.x_start is None or self.x_count <= 0:
            return []
        return [self.x_start * self.x_ratio**i for i in range(self.x_count)]

    def moduli(self) -> tuple[int, int]:
        if self.q0 is not None and self.q1 is not None:
            return self.q0, self.q1
        if self.q is None:
            raise ConfigError("give q0 and q1, or a target q with a split rule")
        return split_modulus(self.q, self.split)

    def validate(self) -> "ExperimentConfig":
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {', '.join(KINDS)}; got {self.kind!r}")
        grid = self.x_grid()
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("X grid must be strictly increasing")
        if any(x <= 0 for x in grid):
            raise ConfigError("X values must be positive")
        if self.x_ratio <= 1 and not self.x_values and self.x_count > 1:
            raise ConfigError("x-ratio must exceed 1")
        if self.kind.startswith("sweep"):
            q0, q1 = self.moduli()
            if not (is_prime(q0) and is_prime(q1)):
                raise ConfigError(f"q0 = {q0} and q1 = {q1} must both be prime")
            if q0 == q1:
                raise ConfigError("q0 and q1 must be distinct")
        if self.kind == "sqrtcancel-histogram":
            if not self.q0_list:
                raise ConfigError("sqrtcancel-histogram needs q0-list")
            bad = [p for p in self.q0_list if not is_prime(p)]
            if bad:
                raise ConfigError(f"q0-list entries must be prime: {bad}")
        if self.split not in SPLIT_RULES:
            raise ConfigError(f"split must be one of {sorted(SPLIT_RULES)}")
        if self.z < 1:
            raise ConfigError("z must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        for name in ("draws", "zz_draws", "resonant_draws"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name.replace('_', '-')} must be >= 0")
        return self


def _nearest_prime(x: float, avoid: int | None = None) -> int:
    base = max(2, round(x))
    for step in range(0, 10 * base + 10):
        for cand in (base - step, base + step):
            if cand >= 2 and cand != avoid and is_prime(cand):
                return cand
    raise ConfigError(f"no prime found near {x}")


def split_modulus(q: int, rule: str = "2/3") -> tuple[int, int]:
    """Primes q0 ~ q^e and q1 ~ q / q0 with q0 != q1."""
    if rule not in SPLIT_RULES:
        raise ConfigError(f"unknown split rule {rule!r}")
    if q < 6:
        raise ConfigError("target q too small to split into two distinct primes")
    q0 = _nearest_prime(q ** SPLIT_RULES[rule])
    q1 = _nearest_prime(q / q0, avoid=q0)
    return q0, q1


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _key_to_field(key: str) -> str:
    return key.strip().replace("-", "_")


def _convert(name: str, raw: str):
    raw = raw.strip()
    try:
        if name in ("q0", "q1", "q", "weight", "x_count", "residue", "draws", "zz_draws", "resonant_draws",
                    "threads"):
            return int(raw)
        if name == "seed":
            return int(raw, 0)
        if name in ("z", "x_start", "x_ratio"):
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError("not finite")
            return value
        if name == "x_values":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if name == "q0_list":
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if name in ("no_build", "timing"):
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError("expected a boolean")
            return low in ("true", "1", "yes")
    except ValueError as exc:
        raise ConfigError(f"bad value for {name.replace('_', '-')}: {raw!r} ({exc})") from None
    return raw


def parse_config(text: str) -> ExperimentConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, raw = line.split("=", 1)
        name = _key_to_field(key)
        if name not in _FIELDS or "_" in key.strip():
            raise ConfigError(f"line {lineno}: unknown key {key.strip()!r}")
        if name in values:
            raise ConfigError(f"line {lineno}: duplicate key {key.strip()!r}")
        values[name] = _convert(name, raw)
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def with_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Copy of cfg with every non-None override applied."""
    return dataclasses.replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
