"""Experiment configuration: flat key=value files plus CLI overrides.

Recognized keys (all optional, unknown keys are errors):

    domain_a, domain_b   interval endpoints
    mesh                 comma-separated grid sizes N
    tau                  comma-separated time steps
    eps                  comma-separated epsilon values
    t_final              final time
    initial_data         "benchmark" or a snapshot file path to restart from
    h_ref, tau_ref       reference-run resolution
    output_dir           where CSV / snapshot files go
    threads              parallel runs across sweep cells
    snapshots            number of evenly spaced snapshots in a solve
    seed                 RNG seed for randomized validation
    full                 true/false: run the complete (hours-long) sweeps
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

__all__ = ["ExperimentConfig", "parse_config_file", "build_config"]


@dataclass(frozen=True)
class ExperimentConfig:
    domain_a: float = -32.0
    domain_b: float = 32.0
    mesh: tuple[int, ...] = (1024,)
    tau: tuple[float, ...] = (1e-4,)
    eps: tuple[float, ...] = (0.5,)
    t_final: float = 1.0
    initial_data: str = "benchmark"
    h_ref: float = 1.0 / 32.0
    tau_ref: float = 5e-6
    output_dir: str = "out"
    threads: int = 1
    snapshots: int = 2
    seed: int = 20260819
    full: bool = False

    def validate(self) -> None:
        if not self.domain_a < self.domain_b:
            raise ValueError(
                f"domain_a must be < domain_b, got [{self.domain_a}, {self.domain_b}]"
            )
        for n in self.mesh:
            if n < 4 or n % 2:
                raise ValueError(f"mesh sizes must be even and >= 4, got {n}")
        for tau in self.tau:
            if tau <= 0.0:
                raise ValueError(f"tau must be positive, got {tau}")
            if self.t_final > 0.0:
                steps = self.t_final / tau
                if abs(steps - round(steps)) > 1e-9 * steps:
                    raise ValueError(
                        f"t_final={self.t_final} is not an integral number of "
                        f"steps of tau={tau}"
                    )
        for eps in self.eps:
            if not 0.0 < eps <= 1.0:
                raise ValueError(f"eps must lie in (0, 1], got {eps}")
        if self.t_final < 0.0:
            raise ValueError(f"t_final must be nonnegative, got {self.t_final}")
        if self.h_ref <= 0.0 or self.tau_ref <= 0.0:
            raise ValueError("h_ref and tau_ref must be positive")
        if self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if self.snapshots < 1:
            raise ValueError(f"snapshots must be >= 1, got {self.snapshots}")

    def dump_lines(self) -> list[str]:
        """key = value lines for CSV provenance headers."""
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(repr(x) for x in v)
            out.append(f"{f.name} = {v}")
        return out


_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}


def parse_config_file(path) -> dict[str, str]:
    """Raw key -> value strings from a flat config file."""
    values: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _FIELD_NAMES:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _convert(name: str, text: str):
    if name in ("domain_a", "domain_b", "t_final", "h_ref", "tau_ref"):
        return float(text)
    if name == "mesh":
        return tuple(int(part) for part in text.split(","))
    if name in ("tau", "eps"):
        return tuple(float(part) for part in text.split(","))
    if name in ("threads", "snapshots", "seed"):
        return int(text)
    if name == "full":
        return _parse_bool(text)
    return text  # initial_data, output_dir


def build_config(
    file_values: dict[str, str] | None = None,
    defaults: dict | None = None,
    **overrides,
) -> ExperimentConfig:
    """Config from defaults, then file values, then keyword overrides.

    defaults and overrides are already-typed values (tuples for lists);
    file values are raw strings. An override of None means "not supplied".
    """
    merged = dict(defaults or {})
    for key, text in (file_values or {}).items():
        try:
            merged[key] = _convert(key, text)
        except ValueError as exc:
            raise ValueError(f"config key {key!r}: {exc}") from exc
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _FIELD_NAMES:
            raise ValueError(f"unknown config field {key!r}")
        merged[key] = value
    cfg = ExperimentConfig(**merged)
    cfg.validate()
    return cfg
