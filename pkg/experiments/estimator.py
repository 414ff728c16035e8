"""
Dimensionality Estimator Module
Achievable number of input bins from the hardware budget of source and mQPG
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence

import numpy as np

from guardrails.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

FLOOR_SLACK = 1e-9

# 7 cm mQPG phasematching width; shorter devices scale as 1/length
REFERENCE_LENGTH_CM = 7.0
REFERENCE_MQPG_WIDTH_THZ = 0.02
REFERENCE_PUMP_BANDWIDTH_THZ = 4.0


@dataclass(frozen=True)
class HardwareBudget:
    """Spectral limits of the network, all in THz"""

    delta_in: float
    delta_pump: float
    n_out: int
    delta_pdc: float
    delta_mqpg: float

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ConfigurationError(f"must be positive, got {value}", key_path=f"estimator.{name}")

    @property
    def available_range(self) -> float:
        """Input range usable by every output: min(delta_in, delta_pump / n_out)"""
        return min(self.delta_in, self.delta_pump / self.n_out)

    @property
    def minimal_bin(self) -> float:
        return max(self.delta_pdc, self.delta_mqpg)


def estimate_n_in(budget: HardwareBudget) -> int:
    """floor(min(delta_in, delta_pump / N_out) / max(delta_PDC, delta_mQPG))"""
    n_in = int(np.floor(budget.available_range / budget.minimal_bin + FLOOR_SLACK))
    logger.debug("estimated %d input bins for %s", n_in, budget)
    return n_in


def seven_cm_budget(n_out: int = 1) -> HardwareBudget:
    """7 cm mQPG with a 4 THz pump behind a 5 THz broad PDC source"""
    return HardwareBudget(
        delta_in=5.0,
        delta_pump=REFERENCE_PUMP_BANDWIDTH_THZ,
        n_out=n_out,
        delta_pdc=0.01,
        delta_mqpg=REFERENCE_MQPG_WIDTH_THZ,
    )


def mqpg_width_for_length(length_cm: float) -> float:
    if length_cm <= 0:
        raise ConfigurationError(f"device length must be positive, got {length_cm}")
    return REFERENCE_MQPG_WIDTH_THZ * REFERENCE_LENGTH_CM / length_cm


def estimate_grid(bandwidths: Sequence[float], widths: Sequence[float]) -> np.ndarray:
    """
    Heatmap of N_in over available bandwidth (rows) and limiting PM width (columns)

    Each cell is the estimator with the bandwidth as the limiting input range
    and the width as the limiting bin size.
    """
    bandwidths = np.asarray(bandwidths, dtype=float)
    widths = np.asarray(widths, dtype=float)
    if np.any(bandwidths <= 0) or np.any(widths <= 0):
        raise ConfigurationError("bandwidths and widths must be positive")
    ratio = bandwidths[:, np.newaxis] / widths[np.newaxis, :]
    return np.floor(ratio + FLOOR_SLACK).astype(int)


def hardware_annotations(
    n_outputs: Sequence[int] = (1, 2, 4),
    lengths_cm: Sequence[float] = (1.0, 4.0, 7.0)
) -> Dict[str, List[Dict]]:
    """Overlay lines for the heatmap: pump-limited bandwidths and device-length PM widths"""
    return {
        "bandwidth_lines": [
            {"label": f"4 THz pump, {n} output(s)", "bandwidth_thz": REFERENCE_PUMP_BANDWIDTH_THZ / n}
            for n in n_outputs
        ],
        "width_lines": [
            {"label": f"{length:g} cm mQPG", "width_thz": mqpg_width_for_length(length)}
            for length in lengths_cm
        ],
    }
