"""
Run Manifest Module
Config echo, provenance hash, version and timings of one run
"""

import json
import logging
import platform
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

logger = logging.getLogger(__name__)


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def build_manifest(
    config,
    version: str,
    timings: Dict[str, float],
    artifacts: Dict[str, str],
    metrics: Optional[Dict] = None
) -> Dict:
    """Assemble the manifest record of a finished run"""
    return {
        'experiment': config.experiment,
        'config': config.to_dict(),
        'config_hash': config.config_hash(),
        'version': version,
        'numpy_version': np.__version__,
        'python_version': platform.python_version(),
        'timings_s': timings,
        'artifacts': artifacts,
        'metrics': metrics or {},
        'created': datetime.now().isoformat(),
    }


def write_manifest(manifest: Dict, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True, default=_jsonable)
    logger.info("Manifest written to %s", path)
    return path


def read_manifest(path: Union[str, Path]) -> Dict:
    with open(path, encoding="utf-8") as f:
        return json.load(f)
