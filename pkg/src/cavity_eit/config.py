"""Flat ``key = value`` run configuration.

One option per line, ``#`` starts a comment, no sections or nesting.  Keys
mirror the physics parameters plus the two-photon sweep window; every
frequency is a linear frequency in MHz.  Unknown or duplicate keys are
rejected with the offending line number so typos cannot silently fall back
to defaults.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .model import PhysicsParams
from .sweep import DEFAULT_SWEEP_POINTS, DEFAULT_SWEEP_START, DEFAULT_SWEEP_STOP

_PARAM_FIELDS = [f.name for f in dataclasses.fields(PhysicsParams)]
_INT_KEYS = {"n_max", "n_atoms", "n_points"}


@dataclass(frozen=True)
class RunConfig:
    """Physics parameters plus the two-photon sweep window."""

    g: float = 3.0
    omega_con: float = 2.8
    gamma: float = 2.6
    kappa: float = 0.4
    gamma_deph: float = 0.15
    delta_p: float = 20.0
    delta_p_cav: float = 0.0
    delta: float = 0.0
    n_p: float = 0.1
    light_shift: float = 0.1
    n_max: int = 2
    n_atoms: int = 1
    omega_d: float = -201.2
    omega_f: float = 251.0
    r_d: float = 1.0
    r_e: float = 1.0
    r_f: float = 1.0
    c_d: float = 1.0
    c_e: float = 1.0
    b_d_g1: float = 0.75
    b_d_g2: float = 0.25
    b_e_g1: float = 5.0 / 12.0
    b_e_g2: float = 7.0 / 12.0
    b_f_g1: float = 0.0
    b_f_g2: float = 1.0
    start: float = DEFAULT_SWEEP_START
    stop: float = DEFAULT_SWEEP_STOP
    n_points: int = DEFAULT_SWEEP_POINTS

    def __post_init__(self):
        if not self.start < self.stop:
            raise ConfigError("sweep window needs start < stop")
        if self.n_points < 2:
            raise ConfigError("n_points must be at least 2")
        self.params()  # physics validation

    def params(self) -> PhysicsParams:
        values = {name: getattr(self, name) for name in _PARAM_FIELDS}
        return PhysicsParams(**values)

    @classmethod
    def keys(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "RunConfig":
        known = set(cls.keys())
        values: dict[str, float | int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in known:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
            try:
                values[key] = int(value) if key in _INT_KEYS else float(value)
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {value!r}") from exc
        try:
            return cls(**values)
        except ConfigError as exc:
            raise ConfigError(f"{source}: {exc}") from exc

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_text(text, source=str(path))

    def to_text(self) -> str:
        lines = []
        for name in self.keys():
            value = getattr(self, name)
            lines.append(f"{name} = {value!r}")
        return "\n".join(lines) + "\n"
