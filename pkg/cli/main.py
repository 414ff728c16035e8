"""
Command-Line Interface
python -m cli.main --config run.toml --out results/ [--grid N] [--threads N] [--verbose]
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional

from cli import __version__
from cli.config import RunConfig, load_config
from experiments.orchestrator import ExperimentOrchestrator
from guardrails.exceptions import SimulationError

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Simulate a PDC source feeding a multi-output quantum pulse gate."
    )
    parser.add_argument('--config', required=True, help="run configuration (.toml or .json)")
    parser.add_argument('--out', default=None, help="output directory (overrides output_dir)")
    parser.add_argument('--grid', type=int, default=None, help="points per frequency axis (overrides grid_n)")
    parser.add_argument('--threads', type=int, default=None, help="scan worker threads (default: all cores)")
    parser.add_argument('--verbose', action='store_true', help="debug logging")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    return parser.parse_args(argv)


def run(config: RunConfig) -> Dict:
    """Execute one configured experiment; the result carries the exit code"""
    return ExperimentOrchestrator(config).run()


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)

    try:
        config = load_config(args.config).with_overrides(
            grid_n=args.grid, output_dir=args.out, threads=args.threads
        )
    except SimulationError as e:
        logger.error("%s", e)
        return e.exit_code

    result = run(config)
    if not result['success']:
        logger.error("%s", result['message'])
        return result['exit_code']

    if config.experiment == 'estimate-nin':
        print(result['metrics']['n_in'])
    else:
        print(f"{config.experiment}: {result['message']} -> {config.output_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
