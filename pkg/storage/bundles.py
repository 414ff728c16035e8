"""
Array Bundle Module
Matrices on disk as raw little-endian row-major binary plus a JSON manifest
"""

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from guardrails.exceptions import UsageError, ValidationError

logger = logging.getLogger(__name__)

DTYPES = {"real64": np.dtype("<f8"), "complex128": np.dtype("<c16")}


@dataclass(frozen=True)
class ArrayBundle:
    """Manifest record of one stored matrix; complex data is interleaved (re, im)"""

    name: str
    kind: str
    shape: Tuple[int, ...]
    data_path: str
    provenance: Optional[str] = None
    byte_order: str = "little"

    @property
    def dtype(self) -> np.dtype:
        return DTYPES[self.kind]

    @property
    def nbytes(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64)) * self.dtype.itemsize

    def to_manifest(self) -> dict:
        record = asdict(self)
        record["shape"] = list(self.shape)
        return record


def write_bundle(
    directory: Union[str, Path],
    name: str,
    array: np.ndarray,
    provenance: Optional[str] = None
) -> ArrayBundle:
    """
    Write `<name>.bin` and `<name>.json` into directory

    Args:
        directory: Target directory (created if missing)
        name: Bundle name
        array: Real or complex array
        provenance: Configuration hash of the producing run

    Returns:
        The written ArrayBundle record
    """
    array = np.asarray(array)
    if np.iscomplexobj(array):
        kind = "complex128"
    elif np.issubdtype(array.dtype, np.number):
        kind = "real64"
    else:
        raise UsageError(f"cannot bundle array of dtype {array.dtype}")

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    bundle = ArrayBundle(name, kind, tuple(int(n) for n in array.shape), f"{name}.bin", provenance)
    data = np.ascontiguousarray(array, dtype=bundle.dtype)
    (directory / bundle.data_path).write_bytes(data.tobytes(order="C"))
    with open(directory / f"{name}.json", "w", encoding="utf-8") as f:
        json.dump(bundle.to_manifest(), f, indent=2)
    logger.debug("bundle %s written: %s %s", name, kind, bundle.shape)
    return bundle


def read_bundle(manifest_path: Union[str, Path]) -> Tuple[np.ndarray, ArrayBundle]:
    """Load a bundle back into an array equal bit-for-bit to the stored one"""
    manifest_path = Path(manifest_path)
    with open(manifest_path, encoding="utf-8") as f:
        record = json.load(f)
    try:
        bundle = ArrayBundle(
            record["name"], record["kind"], tuple(record["shape"]), record["data_path"],
            record.get("provenance"), record.get("byte_order", "little")
        )
    except KeyError as exc:
        raise ValidationError(f"bundle manifest {manifest_path} lacks {exc}") from exc
    if bundle.kind not in DTYPES or bundle.byte_order != "little":
        raise ValidationError(f"unsupported bundle encoding {bundle.kind}/{bundle.byte_order}")

    raw = (manifest_path.parent / bundle.data_path).read_bytes()
    if len(raw) != bundle.nbytes:
        raise ValidationError(f"bundle {bundle.name}: {len(raw)} bytes, expected {bundle.nbytes}")
    array = np.frombuffer(raw, dtype=bundle.dtype).reshape(bundle.shape)
    return array.copy(), bundle
