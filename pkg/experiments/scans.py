"""
Parameter Scan Module
Bin-width and network-size scans of a single-output mQPG behind a type-0 PDC source
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from bogoliubov.transforms import PDCKernels, pdc_kernels, sfg_kernels
from experiments.demo import DEGENERACY_POINT, INPUT_WINDOW
from guardrails.exceptions import SimulationError
from network.composition import compose
from network.covariance import covariance_from_amplitudes
from network.metrics import check_physical, purity, squeezing_db
from processes.jsa import build_type0_jsa
from processes.normalization import normalize_jsa
from processes.transfer import build_mqpg_tf, set_conversion_unity
from spectral.grid import FrequencyGrid, make_grid
from spectral.modes import BinShape, ModeSet, gaussian_bin, place_bins, symmetric_bins
from spectral.pump import NetworkUnitary, even_output, phase_pattern_row

logger = logging.getLogger(__name__)

DEFAULT_BIN_WIDTHS = tuple(np.linspace(0.005, 0.15, 30))
DEFAULT_MEAN_PHOTONS = (0.25, 1.0, 2.0)
DEFAULT_N_BINS = tuple(range(2, 21))
DEFAULT_BOX_WIDTHS = tuple(np.linspace(0.02, 0.5, 30))
DEFAULT_SCALING_JSA = (0.05, 0.02, 0.01)
SCALING_MEAN_PHOTONS = 2.0

OUTPUT_CENTER = 0.5
OUTPUT_FWHM = 0.1


@dataclass
class ScanRecord:
    """
    One scan point

    feasible is the placement verdict only. A feasible point whose simulation
    raised keeps feasible=True, carries the message in error and has no
    metrics; infeasible points never carry an error.
    """

    point: Dict[str, float]
    feasible: bool = True
    purity: Optional[float] = None
    squeezing_db: Optional[float] = None
    symplectic_min: Optional[float] = None
    error: Optional[str] = None

    @property
    def status(self) -> str:
        if not self.feasible:
            return "infeasible"
        return "failed" if self.error is not None else "ok"

    def row(self, axis_names: Sequence[str]) -> List:
        return [self.point[name] for name in axis_names] + [
            self.purity, self.squeezing_db, self.feasible, self.symplectic_min
        ]


@dataclass
class ScanResult:
    """Records in row-major order over the named axes"""

    name: str
    axes: Dict[str, List[float]]
    records: List[ScanRecord] = field(default_factory=list)

    @property
    def axis_names(self) -> Tuple[str, ...]:
        return tuple(self.axes)

    def metric_grid(self, metric: str) -> np.ndarray:
        """Metric values reshaped to the axis grid, NaN where missing"""
        shape = tuple(len(values) for values in self.axes.values())
        values = [getattr(r, metric) if getattr(r, metric) is not None else np.nan for r in self.records]
        return np.array(values, dtype=float).reshape(shape)

    def summary(self) -> Dict:
        completed = [r for r in self.records if r.status == "ok"]
        failed = [r for r in self.records if r.status == "failed"]
        return {
            'scan': self.name,
            'points': len(self.records),
            'feasible_points': sum(1 for r in self.records if r.feasible),
            'infeasible_points': sum(1 for r in self.records if not r.feasible),
            'failed_points': len(failed),
            'failures': [{'point': r.point, 'error': r.error} for r in failed],
            'best_purity': max((r.purity for r in completed), default=None),
            'best_squeezing_db': max((r.squeezing_db for r in completed), default=None),
        }


def evaluate_single_output(
    pdc: PDCKernels,
    bins: ModeSet,
    U: NetworkUnitary,
    grid_out: FrequencyGrid,
    output_fwhm: float = OUTPUT_FWHM
) -> Dict[str, float]:
    """
    Metrics of the one output mode of a unity-conversion mQPG addressing U's row

    Args:
        pdc: PDC kernels of the normalized source
        bins: Orthonormal input bins
        U: 1 x N network row
        grid_out: Output frequency axis
        output_fwhm: FWHM of the Gaussian output peak

    Returns:
        Dict with purity, squeezing_db and symplectic_min
    """
    output = ModeSet.from_modes([gaussian_bin(grid_out, OUTPUT_CENTER, output_fwhm, label="O1")], [OUTPUT_CENTER])
    tf, _ = set_conversion_unity(build_mqpg_tf(U, bins, output))
    sigma = covariance_from_amplitudes(compose(pdc, sfg_kernels(tf), output))
    physical = check_physical(sigma)
    return {
        'purity': purity(sigma),
        'squeezing_db': squeezing_db(sigma),
        'symplectic_min': physical.minimum,
    }


def _normalized_source(grid: FrequencyGrid, fwhm_jsa: float, mean_photons: float) -> PDCKernels:
    jsa = build_type0_jsa(grid, DEGENERACY_POINT, fwhm_jsa)
    jsa, _ = normalize_jsa(jsa, mean_photons)
    return pdc_kernels(jsa)


def _run_points(tasks: List[Callable[[], ScanRecord]], threads: Optional[int]) -> List[ScanRecord]:
    workers = max(1, threads or os.cpu_count() or 1)
    if workers == 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        # map keeps submission order, independent of completion order
        return list(executor.map(lambda task: task(), tasks))


def _guarded(point: Dict[str, float], build: Callable[[], Tuple[bool, Optional[Dict]]]) -> ScanRecord:
    try:
        feasible, metrics = build()
    except SimulationError as exc:
        logger.warning("scan point %s failed: %s", point, exc)
        return ScanRecord(point, feasible=True, error=str(exc))
    if not feasible:
        return ScanRecord(point, feasible=False)
    return ScanRecord(point, True, metrics['purity'], metrics['squeezing_db'], metrics['symplectic_min'])


def scan_bin_width(
    widths: Sequence[float] = DEFAULT_BIN_WIDTHS,
    n_list: Sequence[float] = DEFAULT_MEAN_PHOTONS,
    grid_n: int = 800,
    fwhm_jsa: float = 0.05,
    bin_offset: float = 0.25,
    shape: str = "gaussian",
    threads: Optional[int] = None
) -> ScanResult:
    """
    Purity and squeezing of the even output (A1 + A2)/sqrt(2) versus bin width

    Args:
        widths: Bin widths (FWHM for Gaussian bins)
        n_list: Mean photon numbers of the source
        grid_n: Points per frequency axis
        fwhm_jsa: JSA cross-section FWHM
        bin_offset: Distance of each bin from the degeneracy point
        shape: Bin shape
        threads: Worker threads (default: all cores)

    Returns:
        ScanResult over (mean_photons, bin_width)
    """
    grid = make_grid(*INPUT_WINDOW, grid_n)
    grid_out = make_grid(*INPUT_WINDOW, grid_n)
    U = even_output()
    result = ScanResult("scan-binwidth", {
        'mean_photons': [float(n) for n in n_list],
        'bin_width': [float(w) for w in widths],
    })
    logger.info("bin-width scan: %d x %d points on %d grid", len(n_list), len(widths), grid_n)

    for mean_photons in result.axes['mean_photons']:
        pdc = _normalized_source(grid, fwhm_jsa, mean_photons)
        tasks = []
        for width in result.axes['bin_width']:
            def build(width=width, pdc=pdc):
                # wide bins overlap slightly; use the closest orthonormal pair
                bins = symmetric_bins(grid, DEGENERACY_POINT, bin_offset, BinShape(shape, width)).orthonormalized()
                return True, evaluate_single_output(pdc, bins, U, grid_out)
            point = {'mean_photons': mean_photons, 'bin_width': width}
            tasks.append(lambda point=point, build=build: _guarded(point, build))
        result.records.extend(_run_points(tasks, threads))
    return result


def scan_network_size(
    n_bins: Sequence[int] = DEFAULT_N_BINS,
    widths: Sequence[float] = DEFAULT_BOX_WIDTHS,
    phase_pattern: str = "equal",
    fwhm_jsa_list: Sequence[float] = DEFAULT_SCALING_JSA,
    grid_n: int = 600,
    mean_photons: float = SCALING_MEAN_PHOTONS,
    shape: str = "box",
    threads: Optional[int] = None
) -> ScanResult:
    """
    Single-output mQPG over N maximally spaced bins, versus N and bin width

    Overlapping placements are recorded as infeasible without metrics. Points
    whose simulation fails stay feasible and carry the error instead.

    Returns:
        ScanResult over (fwhm_jsa, n_bins, bin_width)
    """
    grid = make_grid(*INPUT_WINDOW, grid_n)
    grid_out = make_grid(*INPUT_WINDOW, grid_n)
    result = ScanResult("scan-scaling", {
        'fwhm_jsa': [float(f) for f in fwhm_jsa_list],
        'n_bins': [int(n) for n in n_bins],
        'bin_width': [float(w) for w in widths],
    })
    logger.info(
        "network-size scan (%s phases): %d points on %d grid",
        phase_pattern, len(fwhm_jsa_list) * len(n_bins) * len(widths), grid_n
    )

    for fwhm_jsa in result.axes['fwhm_jsa']:
        pdc = _normalized_source(grid, fwhm_jsa, mean_photons)
        tasks = []
        for n, width in product(result.axes['n_bins'], result.axes['bin_width']):
            def build(n=n, width=width, pdc=pdc):
                bins = place_bins(n, grid, DEGENERACY_POINT, width, shape)
                if not bins.feasible:
                    return False, None
                return True, evaluate_single_output(pdc, bins, phase_pattern_row(n, phase_pattern), grid_out)
            point = {'fwhm_jsa': fwhm_jsa, 'n_bins': n, 'bin_width': width}
            tasks.append(lambda point=point, build=build: _guarded(point, build))
        result.records.extend(_run_points(tasks, threads))
    return result
