"""
Experiment Orchestrator
Guardrails -> experiment -> output validation -> artifacts -> run ledger
"""

import json
import logging
import sqlite3
import time
from pathlib import Path
from typing import Dict, Optional

from cli import __version__
from cli.config import RunConfig
from experiments.demo import run_beamsplitter_demo
from experiments.estimator import HardwareBudget, estimate_grid, estimate_n_in, hardware_annotations
from experiments.scans import ScanResult, scan_bin_width, scan_network_size
from guardrails.exceptions import SimulationError, ValidationError
from guardrails.physics_guardrails import PhysicsGuardrails
from network.metrics import PHYSICAL_TOLERANCE, PURITY_SLACK
from storage.bundles import write_bundle
from storage.manifest import build_manifest, write_manifest
from storage.run_ledger import RunLedger
from storage.tables import write_scan_csv

logger = logging.getLogger(__name__)


class ExperimentOrchestrator:

    def __init__(self, config: RunConfig, use_ledger: bool = True):
        """Initialize all components"""
        self.config = config
        self.output_dir = Path(config.output_dir)
        self.guardrails = PhysicsGuardrails()
        self.use_ledger = use_ledger
        self.timings: Dict[str, float] = {}

    def run(self) -> Dict:
        """
        Main pipeline: Input guardrails -> Experiment -> Output guardrails -> Persist -> Ledger

        Returns:
            Result dict with success, message, exit_code, artifacts and metrics
        """
        started = time.perf_counter()
        try:
            # STEP 1: INPUT GUARDRAILS
            input_validation = self.guardrails.validate_input(self.config)
            if not input_validation['is_valid'] and input_validation['severity'] == 'high':
                result = {
                    'success': False,
                    'message': input_validation['message'],
                    'exit_code': 2,
                    'artifacts': {},
                    'metrics': {},
                    'input_validation': input_validation
                }
                return self._finish(result, started)
            if input_validation.get('warning'):
                logger.warning(input_validation['message'])

            # STEP 2: EXPERIMENT, OUTPUT GUARDRAILS AND ARTIFACTS
            self.output_dir.mkdir(parents=True, exist_ok=True)
            handlers = {
                'demo-beamsplitter': self._run_demo,
                'scan-binwidth': self._run_binwidth,
                'scan-scaling': self._run_scaling,
                'estimate-nin': self._run_estimator,
            }
            result = handlers[self.config.experiment]()
            result['input_validation'] = input_validation

        except SimulationError as e:
            logger.error("%s failed: %s", self.config.experiment, e)
            result = {
                'success': False,
                'message': f'Error: {str(e)}',
                'exit_code': e.exit_code,
                'artifacts': {},
                'metrics': {}
            }
        except OSError as e:
            logger.error("cannot write artifacts: %s", e)
            result = {
                'success': False,
                'message': f'Error: {str(e)}',
                'exit_code': 1,
                'artifacts': {},
                'metrics': {}
            }

        return self._finish(result, started)

    def _timed(self, stage: str, start: float):
        self.timings[stage] = round(time.perf_counter() - start, 6)

    def _run_demo(self) -> Dict:
        cfg = self.config.demo
        start = time.perf_counter()
        demo = run_beamsplitter_demo(
            grid_n=self.config.grid_n,
            fwhm_jsa=cfg.fwhm_jsa,
            fwhm_bin=cfg.fwhm_bin,
            mean_photons=cfg.mean_photons,
            bin_offset=cfg.bin_offset,
            output_window=tuple(cfg.output_window),
            output_centers=tuple(cfg.output_centers),
            output_fwhm=cfg.output_fwhm,
            tf_source=cfg.tf_source,
            pm_width=cfg.pm_width,
            jsa_profile=cfg.jsa_profile,
        )
        self._timed('simulation', start)

        for name, sigma in (('sigma_pdc', demo.sigma_pdc), ('sigma_out', demo.sigma_out)):
            validation = self.guardrails.validate_output(sigma)
            if not validation['is_valid']:
                raise ValidationError(f"{name}: {validation['message']}")

        start = time.perf_counter()
        provenance = self.config.config_hash()
        arrays = {
            'jsa': demo.jsa.values,
            'tf': demo.tf.values,
            'sigma_pdc': demo.sigma_pdc.entries,
            'sigma_out': demo.sigma_out.entries,
        }
        artifacts = {}
        for name, array in arrays.items():
            write_bundle(self.output_dir, name, array, provenance)
            artifacts[name] = str(self.output_dir / f"{name}.json")
        metrics_path = self.output_dir / 'metrics.json'
        with open(metrics_path, 'w') as f:
            json.dump(demo.metrics, f, indent=2, sort_keys=True)
        artifacts['metrics'] = str(metrics_path)
        self._timed('persistence', start)

        return {
            'success': True,
            'message': f"purity {demo.metrics['purity']:.6f}, squeezing {demo.metrics['squeezing_db']:.4f} dB",
            'exit_code': 0,
            'artifacts': artifacts,
            'metrics': demo.metrics
        }

    def _check_scan(self, scan: ScanResult) -> int:
        """Count scan points whose covariance failed physicality"""
        violations = 0
        for record in scan.records:
            if record.symplectic_min is not None and record.symplectic_min < 0.5 - PHYSICAL_TOLERANCE:
                violations += 1
            elif record.purity is not None and record.purity > 1.0 + PURITY_SLACK:
                violations += 1
        if violations:
            logger.warning("%s: %d unphysical points", scan.name, violations)
        return violations

    def _persist_scan(self, scan: ScanResult, filename: str, artifacts: Dict, metrics: Dict):
        path = write_scan_csv(scan, self.output_dir / filename)
        artifacts[path.stem] = str(path)
        summary = scan.summary()
        summary['physical_violations'] = self._check_scan(scan)
        metrics[path.stem] = summary

    def _run_binwidth(self) -> Dict:
        cfg = self.config.binwidth
        start = time.perf_counter()
        scan = scan_bin_width(
            widths=cfg.widths,
            n_list=cfg.mean_photons,
            grid_n=self.config.grid_n,
            fwhm_jsa=cfg.fwhm_jsa,
            bin_offset=cfg.bin_offset,
            shape=cfg.shape,
            threads=self.config.threads,
        )
        self._timed('simulation', start)

        artifacts, metrics = {}, {}
        self._persist_scan(scan, 'scan_binwidth.csv', artifacts, metrics)
        return {
            'success': True,
            'message': f"{len(scan.records)} bin-width points",
            'exit_code': 0,
            'artifacts': artifacts,
            'metrics': metrics
        }

    def _run_scaling(self) -> Dict:
        cfg = self.config.scaling
        artifacts, metrics = {}, {}
        for pattern in cfg.phase_patterns:
            start = time.perf_counter()
            scan = scan_network_size(
                n_bins=cfg.n_bins,
                widths=cfg.widths,
                phase_pattern=pattern,
                fwhm_jsa_list=cfg.fwhm_jsa,
                grid_n=self.config.grid_n,
                mean_photons=cfg.mean_photons,
                shape=cfg.shape,
                threads=self.config.threads,
            )
            self._timed(f'simulation_{pattern}', start)
            self._persist_scan(scan, f'scan_scaling_{pattern}.csv', artifacts, metrics)

        return {
            'success': True,
            'message': f"network-size scans for {', '.join(cfg.phase_patterns)} phases",
            'exit_code': 0,
            'artifacts': artifacts,
            'metrics': metrics
        }

    def _run_estimator(self) -> Dict:
        cfg = self.config.estimator
        budget = HardwareBudget(cfg.delta_in, cfg.delta_pump, cfg.n_out, cfg.delta_pdc, cfg.delta_mqpg)
        n_in = estimate_n_in(budget)

        heatmap = estimate_grid(cfg.bandwidths, cfg.pm_widths)
        write_bundle(self.output_dir, 'estimate_heatmap', heatmap.astype(float), self.config.config_hash())
        annotations_path = self.output_dir / 'estimate_axes.json'
        with open(annotations_path, 'w') as f:
            json.dump({
                'bandwidths_thz': list(cfg.bandwidths),
                'pm_widths_thz': list(cfg.pm_widths),
                'annotations': hardware_annotations(),
            }, f, indent=2)

        return {
            'success': True,
            'message': str(n_in),
            'exit_code': 0,
            'artifacts': {
                'estimate_heatmap': str(self.output_dir / 'estimate_heatmap.json'),
                'estimate_axes': str(annotations_path),
            },
            'metrics': {'n_in': n_in}
        }

    def _finish(self, result: Dict, started: float) -> Dict:
        """Write the manifest and record the run"""
        self.timings['total'] = round(time.perf_counter() - started, 6)
        if result['success']:
            manifest = build_manifest(self.config, __version__, self.timings, result['artifacts'], result['metrics'])
            manifest_path = write_manifest(manifest, self.output_dir / 'manifest.json')
            result['artifacts']['manifest'] = str(manifest_path)

        if self.use_ledger:
            try:
                self.output_dir.mkdir(parents=True, exist_ok=True)
                ledger = RunLedger(self.output_dir / 'ledger.db')
                run_id = ledger.record_run(
                    experiment=self.config.experiment,
                    config_hash=self.config.config_hash(),
                    version=__version__,
                    exit_code=result['exit_code'],
                    duration_s=self.timings['total'],
                    metrics=result['metrics'],
                    message=result['message'],
                )
                ledger.record_artifacts(run_id, result['artifacts'])
                result['run_id'] = run_id
            except (OSError, sqlite3.Error) as e:
                logger.warning("run ledger unavailable: %s", e)

        result['timings'] = dict(self.timings)
        return result

    def get_run_history(self) -> Optional[Dict]:
        """Ledger statistics of the output directory"""
        ledger_path = self.output_dir / 'ledger.db'
        if not ledger_path.exists():
            return None
        return RunLedger(ledger_path).get_run_stats()
