"""
BANDEDGE Configuration
======================
Experiment configuration for the band-edge runners.

Version: 1.0

Sources, lowest to highest priority:
- Built-in defaults (the default run reproduces the reference experiment)
- BANDEDGE_* environment variables
- The key = value config file given with --config
- Command-line flags (--out, --threads)

Config file format:
    # quarter-wave stack
    layer = 2.0, 0.25
    layer = 1.0, 0.5
    gap_index = 1
    edge_side = lower
    positions = 0, 0.125, 0.25
    z_min = -8
    oracle_point = 2.0, 0.25

`layer`, `position` and `oracle_point` may be repeated; `positions` also
accepts a comma-separated list.
"""

import io
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from dotenv.parser import parse_stream
from pydantic import Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings

from .photonic.crystal import DEFAULT_LAYERS, UnitCell
from .photonic.ldos import MAX_LOSS

logger = logging.getLogger(__name__)

DEFAULT_POSITIONS: Tuple[float, ...] = tuple(i / 16 for i in range(8))

# In-band points of the first band of the default cell, away from nodes
DEFAULT_ORACLE_POINTS: Tuple[Tuple[float, float], ...] = (
    (0.9, 0.0),
    (1.1, 0.15),
    (1.3, 0.3),
    (1.6, 0.05),
    (1.8, 0.2),
    (2.0, 0.25),
    (2.1, 0.4),
    (2.2, 0.1),
    (2.3, 0.35),
    (2.4, 0.0),
)

# Keys that may appear more than once in a config file, and the field they fill
_REPEATED_KEYS = {
    "layer": "layers",
    "position": "positions",
    "oracle_point": "oracle_points",
}


class ConfigError(Exception):
    """Raised when the experiment configuration cannot be read or is invalid."""
    pass


class ExperimentConfig(BaseSettings):
    """
    Settings for one band-edge experiment.

    Every field can be set from the environment as BANDEDGE_<FIELD>
    (list fields take JSON, e.g. BANDEDGE_POSITIONS='[0, 0.25]').
    """

    # =========================================================================
    # CRYSTAL
    # =========================================================================

    layers: List[Tuple[float, float]] = Field(
        default_factory=lambda: [tuple(pair) for pair in DEFAULT_LAYERS],
        description="Unit cell as (n, d) pairs, left to right; the first layer is centred at x = 0",
    )
    gap_index: int = Field(default=1, ge=1, description="1-based index of the gap whose edge is analysed")
    edge_side: Literal["lower", "upper"] = Field(
        default="lower",
        description="Which edge of the gap: lower (u = 1 - w/wc) or upper (u = w/wc - 1)",
    )
    omega_max: float = Field(default=12.0, gt=0.0, description="Upper end of the band-edge scan")
    points_per_band: int = Field(default=400, ge=16, description="Band-edge scan density")

    # =========================================================================
    # EXPONENT EXTRACTION
    # =========================================================================

    positions: List[float] = Field(
        default_factory=lambda: list(DEFAULT_POSITIONS),
        description="Fractional positions x in the unit cell (wrap modulo 1)",
    )
    z_min: float = Field(default=-8.0, description="Most negative z = log10(u)")
    z_max: float = Field(default=-1.0, description="Least negative z = log10(u)")
    z_steps: int = Field(default=71, ge=3, description="Number of z samples")
    slope_tol: float = Field(default=0.02, gt=0.0, description="Convergence tolerance in slope units")
    convergence_window: float = Field(
        default=1.0,
        gt=0.0,
        description="Decades of u between the two slopes compared for convergence",
    )
    grid_size: int = Field(default=256, ge=64, description="Bloch mode sampling grid")

    # =========================================================================
    # GREEN'S-FUNCTION ORACLE
    # =========================================================================

    oracle_periods: int = Field(default=4096, ge=1, description="Number of periods in the finite stack")
    oracle_loss: float = Field(default=1e-3, ge=0.0, le=MAX_LOSS, description="Relative imaginary frequency part")
    oracle_bound: float = Field(default=0.02, gt=0.0, description="Maximum accepted relative deviation")
    oracle_points: List[Tuple[float, float]] = Field(
        default_factory=lambda: list(DEFAULT_ORACLE_POINTS),
        description="(omega, x) pairs compared by ldos-check",
    )

    # =========================================================================
    # OUTPUT / RUNTIME
    # =========================================================================

    output_dir: Path = Field(default=Path("results"), description="Directory for CSV output")
    threads: int = Field(default=1, ge=1, description="Worker threads for per-position pipelines")
    log_level: str = Field(default="INFO", description="Root log level")

    model_config = {
        "env_prefix": "BANDEDGE_",
        "extra": "forbid",
    }

    @field_validator("layers")
    @classmethod
    def validate_layers(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        """Every layer needs n >= 1 and d > 0."""
        if not v:
            raise ValueError("at least one layer is required")
        for n, d in v:
            if not (math.isfinite(n) and n >= 1.0):
                raise ValueError(f"refractive index must be >= 1, got {n}")
            if not (math.isfinite(d) and d > 0.0):
                raise ValueError(f"layer thickness must be > 0, got {d}")
        return v

    @field_validator("positions")
    @classmethod
    def validate_positions(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("at least one position is required")
        if not all(math.isfinite(x) for x in v):
            raise ValueError("positions must be finite")
        return v

    @field_validator("oracle_points")
    @classmethod
    def validate_oracle_points(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        for omega, x in v:
            if not (math.isfinite(omega) and omega > 0.0):
                raise ValueError(f"oracle frequency must be positive, got {omega}")
            if not math.isfinite(x):
                raise ValueError(f"oracle position must be finite, got {x}")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.strip().upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {v!r}")
        return level

    @model_validator(mode="after")
    def validate_z_range(self) -> "ExperimentConfig":
        if not self.z_min < self.z_max < 0.0:
            raise ValueError(f"need z_min < z_max < 0, got z_min={self.z_min}, z_max={self.z_max}")
        return self

    def build_cell(self) -> UnitCell:
        return UnitCell.from_pairs(self.layers)

    def z_grid(self) -> np.ndarray:
        """z values from z_max down to z_min (descending)."""
        return np.linspace(self.z_max, self.z_min, self.z_steps)

    def to_display_dict(self) -> dict:
        """Return config as dict for display."""
        return {
            "Layers (n, d)": "; ".join(f"{n:g}, {d:g}" for n, d in self.layers),
            "Gap": f"{self.gap_index} ({self.edge_side} edge)",
            "Positions": ", ".join(f"{x:g}" for x in self.positions),
            "z range": f"[{self.z_min:g}, {self.z_max:g}] x {self.z_steps}",
            "Slope tol": self.slope_tol,
            "Convergence window": self.convergence_window,
            "Oracle": f"N={self.oracle_periods}, loss={self.oracle_loss:g}, bound={self.oracle_bound:g}",
            "Output Directory": str(self.output_dir),
            "Threads": self.threads,
        }


def _parse_pair(key: str, value: str, line: str) -> Tuple[float, float]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{key} needs two comma-separated numbers: {line.strip()!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"{key} has a non-numeric entry: {line.strip()!r}") from exc


def _parse_floats(key: str, value: str, line: str) -> List[float]:
    try:
        return [float(p) for p in value.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key} has a non-numeric entry: {line.strip()!r}") from exc


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a key = value config file into field values.

    Raises:
        ConfigError: unreadable file, malformed line or malformed pair
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config file {path}: {exc}") from exc

    values: Dict[str, Any] = {}
    repeated: Dict[str, list] = {}
    for binding in parse_stream(io.StringIO(text)):
        if binding.error:
            raise ConfigError(f"Malformed line in {path}: {binding.original.string.strip()!r}")
        if binding.key is None:
            continue
        key = binding.key.strip().lower()
        if binding.value is None:
            raise ConfigError(f"Missing value for {key!r} in {path}")
        value = binding.value.strip()
        line = binding.original.string

        if key in ("position", "positions"):
            repeated.setdefault("positions", []).extend(_parse_floats(key, value, line))
        elif key in _REPEATED_KEYS:
            repeated.setdefault(_REPEATED_KEYS[key], []).append(_parse_pair(key, value, line))
        else:
            if key in values:
                raise ConfigError(f"Duplicate key {key!r} in {path}")
            values[key] = value

    values.update(repeated)
    logger.debug(f"Read {len(values)} setting(s) from {path} ({len(text)} bytes)")
    return values


def _describe_validation_error(exc: ValidationError) -> str:
    problems = []
    for error in exc.errors():
        where = ".".join(str(part) for part in error["loc"]) or "config"
        problems.append(f"{where}: {error['msg']}")
    return "; ".join(problems)


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """
    Build the experiment configuration.

    Args:
        path: Optional key = value config file
        overrides: Values from the command line; None entries are ignored

    Raises:
        ConfigError: the file cannot be read or a value is invalid
    """
    values = read_config_file(path) if path is not None else {}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        config = ExperimentConfig(**values)
    except ValidationError as exc:
        raise ConfigError(f"Invalid configuration: {_describe_validation_error(exc)}") from exc
    logger.debug(f"Configuration loaded: {config.to_display_dict()}")
    return config
