"""
Run Configuration Module
TOML/JSON run files parsed into validated, frozen dataclasses
"""

import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from guardrails.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

EXPERIMENTS = ("demo-beamsplitter", "scan-binwidth", "scan-scaling", "estimate-nin")
MIN_GRID_POINTS = 64


def _linspace(start: float, stop: float, count: int) -> Tuple[float, ...]:
    step = (stop - start) / (count - 1)
    return tuple(start + i * step for i in range(count))


@dataclass(frozen=True)
class DemoConfig:
    fwhm_jsa: float = 0.05
    fwhm_bin: float = 0.1
    mean_photons: float = 1.0
    bin_offset: float = 0.25
    output_window: Tuple[float, ...] = (0.0, 2.0)
    output_centers: Tuple[float, ...] = (0.5, 1.5)
    output_fwhm: float = 0.1
    tf_source: str = "ideal"
    pm_width: float = 0.02
    jsa_profile: str = "gaussian"


@dataclass(frozen=True)
class BinWidthScanConfig:
    widths: Tuple[float, ...] = _linspace(0.005, 0.15, 30)
    mean_photons: Tuple[float, ...] = (0.25, 1.0, 2.0)
    fwhm_jsa: float = 0.05
    bin_offset: float = 0.25
    shape: str = "gaussian"


@dataclass(frozen=True)
class ScalingScanConfig:
    n_bins: Tuple[int, ...] = tuple(range(2, 21))
    widths: Tuple[float, ...] = _linspace(0.02, 0.5, 30)
    phase_patterns: Tuple[str, ...] = ("equal", "alternating")
    fwhm_jsa: Tuple[float, ...] = (0.05, 0.02, 0.01)
    mean_photons: float = 2.0
    shape: str = "box"


@dataclass(frozen=True)
class EstimatorConfig:
    """Hardware budget in THz plus the heatmap axes"""

    delta_in: float = 5.0
    delta_pump: float = 4.0
    n_out: int = 1
    delta_pdc: float = 0.01
    delta_mqpg: float = 0.02
    bandwidths: Tuple[float, ...] = _linspace(0.5, 10.0, 20)
    pm_widths: Tuple[float, ...] = _linspace(0.01, 0.2, 20)


SECTIONS = {
    "demo": DemoConfig,
    "binwidth": BinWidthScanConfig,
    "scaling": ScalingScanConfig,
    "estimator": EstimatorConfig,
}


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    grid_n: int = 1500
    output_dir: str = "results"
    threads: Optional[int] = None
    demo: DemoConfig = field(default_factory=DemoConfig)
    binwidth: BinWidthScanConfig = field(default_factory=BinWidthScanConfig)
    scaling: ScalingScanConfig = field(default_factory=ScalingScanConfig)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)

    def to_dict(self) -> Dict[str, Any]:
        """Canonical echo of every field, JSON-ready"""
        return json.loads(json.dumps(asdict(self)))

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_overrides(
        self,
        grid_n: Optional[int] = None,
        output_dir: Optional[str] = None,
        threads: Optional[int] = None
    ) -> "RunConfig":
        """Apply command-line overrides and revalidate"""
        changes = {}
        if grid_n is not None:
            changes["grid_n"] = _as_int(grid_n, "grid_n")
        if output_dir is not None:
            changes["output_dir"] = str(output_dir)
        if threads is not None:
            changes["threads"] = _as_int(threads, "threads")
        config = replace(self, **changes)
        _validate(config)
        return config


def _as_float(value: Any, key_path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"expected a number, got {value!r}", key_path=key_path)
    return float(value)


def _as_int(value: Any, key_path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"expected an integer, got {value!r}", key_path=key_path)
    return value


def _coerce(value: Any, default: Any, key_path: str) -> Any:
    """Cast a raw value to the type of the field default"""
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigurationError(f"expected a non-empty list, got {value!r}", key_path=key_path)
        item = default[0]
        return tuple(_coerce(v, item, f"{key_path}[{i}]") for i, v in enumerate(value))
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigurationError(f"expected text, got {value!r}", key_path=key_path)
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        return _as_int(value, key_path)
    return _as_float(value, key_path)


def _build_section(cls, data: Any, name: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigurationError("expected a table", key_path=name)
    defaults = cls()
    known = {f.name for f in fields(cls)}
    values = {}
    for key, value in data.items():
        key_path = f"{name}.{key}"
        if key not in known:
            raise ConfigurationError("unknown key", key_path=key_path)
        values[key] = _coerce(value, getattr(defaults, key), key_path)
    return cls(**values)


def _check_fraction(value: float, key_path: str) -> None:
    if not 0.0 < value < 1.0:
        raise ConfigurationError(f"must be a fraction in (0, 1), got {value}", key_path=key_path)


def _check_choice(value: str, choices: Tuple[str, ...], key_path: str) -> None:
    if value not in choices:
        raise ConfigurationError(f"must be one of {', '.join(choices)}, got '{value}'", key_path=key_path)


def _validate(config: RunConfig) -> None:
    _check_choice(config.experiment, EXPERIMENTS, "experiment")
    if config.grid_n < MIN_GRID_POINTS:
        raise ConfigurationError(f"must be at least {MIN_GRID_POINTS}, got {config.grid_n}", key_path="grid_n")
    if config.threads is not None and config.threads < 1:
        raise ConfigurationError(f"must be positive, got {config.threads}", key_path="threads")

    demo = config.demo
    for key in ("fwhm_jsa", "fwhm_bin", "bin_offset", "output_fwhm", "pm_width"):
        _check_fraction(getattr(demo, key), f"demo.{key}")
    if demo.mean_photons < 0:
        raise ConfigurationError("must be nonnegative", key_path="demo.mean_photons")
    if len(demo.output_window) != 2 or demo.output_window[1] <= demo.output_window[0]:
        raise ConfigurationError("needs two increasing bounds", key_path="demo.output_window")
    if len(demo.output_centers) != 2:
        raise ConfigurationError("the beamsplitter has two outputs", key_path="demo.output_centers")
    for i, center in enumerate(demo.output_centers):
        if not demo.output_window[0] < center < demo.output_window[1]:
            raise ConfigurationError("outside the output window", key_path=f"demo.output_centers[{i}]")
    _check_choice(demo.tf_source, ("ideal", "pump"), "demo.tf_source")
    _check_choice(demo.jsa_profile, ("gaussian", "sinc"), "demo.jsa_profile")

    binwidth = config.binwidth
    for i, width in enumerate(binwidth.widths):
        _check_fraction(width, f"binwidth.widths[{i}]")
    for i, n in enumerate(binwidth.mean_photons):
        if n < 0:
            raise ConfigurationError("must be nonnegative", key_path=f"binwidth.mean_photons[{i}]")
    _check_fraction(binwidth.fwhm_jsa, "binwidth.fwhm_jsa")
    _check_fraction(binwidth.bin_offset, "binwidth.bin_offset")
    _check_choice(binwidth.shape, ("gaussian", "box"), "binwidth.shape")

    scaling = config.scaling
    for i, n in enumerate(scaling.n_bins):
        if n < 1:
            raise ConfigurationError("must be positive", key_path=f"scaling.n_bins[{i}]")
    for i, width in enumerate(scaling.widths):
        _check_fraction(width, f"scaling.widths[{i}]")
    for i, width in enumerate(scaling.fwhm_jsa):
        _check_fraction(width, f"scaling.fwhm_jsa[{i}]")
    for i, pattern in enumerate(scaling.phase_patterns):
        _check_choice(pattern, ("equal", "alternating"), f"scaling.phase_patterns[{i}]")
    if scaling.mean_photons < 0:
        raise ConfigurationError("must be nonnegative", key_path="scaling.mean_photons")
    _check_choice(scaling.shape, ("gaussian", "box"), "scaling.shape")

    estimator = config.estimator
    for key in ("delta_in", "delta_pump", "n_out", "delta_pdc", "delta_mqpg"):
        if getattr(estimator, key) <= 0:
            raise ConfigurationError("must be positive", key_path=f"estimator.{key}")
    for key in ("bandwidths", "pm_widths"):
        if any(v <= 0 for v in getattr(estimator, key)):
            raise ConfigurationError("entries must be positive", key_path=f"estimator.{key}")


def config_from_dict(data: Dict[str, Any]) -> RunConfig:
    """Validated RunConfig from a parsed document"""
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a table")
    allowed = {"experiment", "grid_n", "output_dir", "threads", *SECTIONS}
    for key in data:
        if key not in allowed:
            raise ConfigurationError("unknown key", key_path=key)
    if "experiment" not in data:
        raise ConfigurationError("missing required key", key_path="experiment")

    values: Dict[str, Any] = {"experiment": data["experiment"]}
    if not isinstance(values["experiment"], str):
        raise ConfigurationError("expected text", key_path="experiment")
    if "grid_n" in data:
        values["grid_n"] = _as_int(data["grid_n"], "grid_n")
    if "output_dir" in data:
        values["output_dir"] = str(data["output_dir"])
    if "threads" in data:
        values["threads"] = _as_int(data["threads"], "threads")
    for name, cls in SECTIONS.items():
        values[name] = _build_section(cls, data.get(name), name)

    config = RunConfig(**values)
    _validate(config)
    return config


def parse_config(source: str, fmt: str = "toml") -> RunConfig:
    """
    Parse run configuration text

    Args:
        source: TOML or JSON text
        fmt: 'toml' or 'json'

    Returns:
        Validated RunConfig with defaults filled in
    """
    try:
        if fmt == "json":
            data = json.loads(source) if source.strip() else {}
        elif fmt == "toml":
            data = tomllib.loads(source)
        else:
            raise ConfigurationError(f"unknown configuration format '{fmt}'")
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"malformed configuration: {exc}") from exc
    return config_from_dict(data)


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read configuration {path}: {exc}") from exc
    fmt = "json" if path.suffix.lower() == ".json" else "toml"
    logger.info("Loading %s configuration from %s", fmt, path)
    return parse_config(text, fmt)
