"""Array persistence: a JSON manifest plus one flat little-endian blob.

The manifest lists (name, shape, dtype, byte offset) per array and carries
arbitrary JSON metadata; the blob concatenates the raw array bytes. Within
one implementation the round trip is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

_SUPPORTED = {"<f8", "<i8"}


def save_arrays(path_base, arrays: dict[str, np.ndarray], meta: dict | None = None):
    """Write `{path_base}.json` and `{path_base}.blob`."""
    base = Path(path_base)
    entries = []
    offset = 0
    chunks = []
    for name, arr in arrays.items():
        dtype = "<i8" if np.issubdtype(arr.dtype, np.integer) else "<f8"
        raw = np.ascontiguousarray(arr, dtype=np.dtype(dtype)).tobytes()
        entries.append({"name": name, "shape": list(arr.shape),
                        "dtype": dtype, "offset": offset})
        offset += len(raw)
        chunks.append(raw)
    manifest = {"arrays": entries, "meta": meta or {}, "total_bytes": offset}
    base.with_suffix(".blob").write_bytes(b"".join(chunks))
    base.with_suffix(".json").write_text(
        json.dumps(manifest, sort_keys=True, indent=1) + "\n")


def load_arrays(path_base) -> tuple[dict[str, np.ndarray], dict]:
    """Read back arrays and metadata written by :func:`save_arrays`."""
    base = Path(path_base)
    manifest = json.loads(base.with_suffix(".json").read_text())
    blob = base.with_suffix(".blob").read_bytes()
    arrays: dict[str, np.ndarray] = {}
    for entry in manifest["arrays"]:
        dtype = entry["dtype"]
        if dtype not in _SUPPORTED:
            raise ValueError(f"unsupported dtype {dtype!r} in manifest")
        shape = tuple(entry["shape"])
        count = int(np.prod(shape, dtype=np.int64)) if shape else 1
        arr = np.frombuffer(blob, dtype=np.dtype(dtype),
                            count=count, offset=entry["offset"])
        arrays[entry["name"]] = arr.reshape(shape).copy()
    return arrays, manifest["meta"]
