"""
Physics Guardrails
Resolution checks before a run and physicality checks on every produced covariance
"""

import logging
from typing import Dict, List

import numpy as np

from network.covariance import CovarianceMatrix
from network.metrics import PHYSICAL_TOLERANCE, PURITY_SLACK, check_physical

logger = logging.getLogger(__name__)

GAUSSIAN_MIN_SAMPLES = 3.0
BOX_MIN_SAMPLES = 2.0
LARGE_GRID = 3000


class PhysicsGuardrails:
    """Guardrails keeping runs resolvable and outputs physical"""

    def __init__(self, max_grid: int = LARGE_GRID):
        self.max_grid = max_grid

    @staticmethod
    def _is_resolved(width: float, step: float, samples: float) -> bool:
        return width > samples * step

    def _width_problems(self, widths: Dict[str, float], step: float, samples: float) -> List[str]:
        return [
            f"{key} = {width:g} (needs > {samples:g} x {step:.3g})"
            for key, width in widths.items()
            if not self._is_resolved(width, step, samples)
        ]

    def validate_input(self, config) -> Dict:
        """
        Check that every width of the selected experiment resolves on the grid

        Args:
            config: RunConfig

        Returns:
            Dictionary with validation results; severity 'high' blocks the run
        """
        step = 1.0 / (config.grid_n - 1)
        experiment = config.experiment

        if experiment == "estimate-nin":
            return {
                'is_valid': True,
                'reason': 'valid',
                'message': 'Estimator needs no grid',
                'severity': 'none'
            }

        # Check 1: widths that every point needs
        if experiment == "demo-beamsplitter":
            demo = config.demo
            out_step = (demo.output_window[1] - demo.output_window[0]) / (config.grid_n - 1)
            blocking = self._width_problems(
                {'demo.fwhm_jsa': demo.fwhm_jsa, 'demo.fwhm_bin': demo.fwhm_bin}, step, GAUSSIAN_MIN_SAMPLES
            )
            blocking += self._width_problems({'demo.output_fwhm': demo.output_fwhm}, out_step, GAUSSIAN_MIN_SAMPLES)
            if demo.bin_offset >= 0.5:
                blocking.append(f"demo.bin_offset = {demo.bin_offset:g} puts the bins outside the window")
        elif experiment == "scan-binwidth":
            blocking = self._width_problems({'binwidth.fwhm_jsa': config.binwidth.fwhm_jsa}, step, GAUSSIAN_MIN_SAMPLES)
        else:
            blocking = self._width_problems(
                {f"scaling.fwhm_jsa[{i}]": w for i, w in enumerate(config.scaling.fwhm_jsa)},
                step, GAUSSIAN_MIN_SAMPLES
            )

        if blocking:
            return {
                'is_valid': False,
                'reason': 'under_resolved',
                'message': 'Widths not resolved on the grid: ' + '; '.join(blocking),
                'severity': 'high'
            }

        # Check 2: scan points that will be recorded as failures
        skipped = []
        if experiment == "scan-binwidth":
            samples = GAUSSIAN_MIN_SAMPLES if config.binwidth.shape == "gaussian" else BOX_MIN_SAMPLES
            skipped = self._width_problems(
                {f"binwidth.widths[{i}]": w for i, w in enumerate(config.binwidth.widths)}, step, samples
            )
        elif experiment == "scan-scaling":
            samples = GAUSSIAN_MIN_SAMPLES if config.scaling.shape == "gaussian" else BOX_MIN_SAMPLES
            skipped = self._width_problems(
                {f"scaling.widths[{i}]": w for i, w in enumerate(config.scaling.widths)}, step, samples
            )
        if skipped:
            return {
                'is_valid': True,
                'reason': 'points_under_resolved',
                'message': f'{len(skipped)} scan widths are under-resolved and will be recorded as failures',
                'severity': 'low',
                'warning': True,
                'details': skipped
            }

        # Check 3: memory footprint of dense n x n kernels
        if config.grid_n > self.max_grid:
            return {
                'is_valid': True,
                'reason': 'large_grid',
                'message': f'grid_n = {config.grid_n} needs several dense {config.grid_n}^2 complex matrices',
                'severity': 'medium',
                'warning': True
            }

        return {
            'is_valid': True,
            'reason': 'valid',
            'message': 'Input validated successfully',
            'severity': 'none'
        }

    def validate_output(self, sigma: CovarianceMatrix) -> Dict:
        """
        Validate a covariance matrix before it is persisted

        Args:
            sigma: Covariance matrix

        Returns:
            Dictionary with validation results and the checked quantities
        """
        entries = sigma.entries

        # Check 1: exact symmetry after assembly
        asymmetry = float(np.max(np.abs(entries - entries.T)))
        if asymmetry > 1e-10:
            return {
                'is_valid': False,
                'reason': 'asymmetric',
                'message': f'Covariance asymmetric by {asymmetry:.3e}',
                'severity': 'high'
            }

        # Check 2: uncertainty relation
        report = check_physical(sigma)
        if not report.passed:
            return {
                'is_valid': False,
                'reason': 'unphysical',
                'message': f'Smallest symplectic eigenvalue {report.minimum:.6g} below 1/2 - {PHYSICAL_TOLERANCE:g}',
                'severity': 'high',
                'symplectic_min': report.minimum
            }

        # Check 3: purity not above one
        sign, logdet = np.linalg.slogdet(entries)
        raw_purity = float(np.exp(-sigma.n_modes * np.log(2.0) - 0.5 * logdet)) if sign > 0 else float('nan')
        if not raw_purity <= 1.0 + PURITY_SLACK:
            return {
                'is_valid': False,
                'reason': 'purity_above_one',
                'message': f'Purity {raw_purity:.8f} exceeds one',
                'severity': 'high',
                'symplectic_min': report.minimum
            }

        return {
            'is_valid': True,
            'reason': 'valid',
            'message': 'Output validated successfully',
            'severity': 'none',
            'symplectic_min': report.minimum,
            'purity': raw_purity
        }
