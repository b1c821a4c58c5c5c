"""NTF1 tensor files: a minimal binary format for float64 arrays.

Layout, all little-endian:

    bytes 0..3   magic ``NTF1``
    uint32       rank
    uint64 * r   dimensions
    float64 * n  values, row-major
"""

import struct
from pathlib import Path

import numpy as np

from .errors import ParseError

__all__ = ["read_tensor", "write_tensor"]

MAGIC = b"NTF1"


def write_tensor(path, array) -> None:
    """Write ``array`` to ``path`` in NTF1 format."""
    arr = np.ascontiguousarray(np.asarray(array, dtype="<f8"))
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", arr.ndim))
        for dim in arr.shape:
            fh.write(struct.pack("<Q", dim))
        fh.write(arr.tobytes())


def read_tensor(path) -> np.ndarray:
    """Read an NTF1 file into a float64 array."""
    raw = Path(path).read_bytes()
    if len(raw) < 8 or raw[:4] != MAGIC:
        raise ParseError(f"{path}: not an NTF1 file")
    (rank,) = struct.unpack_from("<I", raw, 4)
    header_end = 8 + 8 * rank
    if len(raw) < header_end:
        raise ParseError(f"{path}: truncated NTF1 header")
    shape = struct.unpack_from(f"<{rank}Q", raw, 8)
    count = int(np.prod(shape)) if rank else 1
    if len(raw) != header_end + 8 * count:
        raise ParseError(
            f"{path}: payload holds {(len(raw) - header_end) // 8} values, "
            f"header declares {count}"
        )
    data = np.frombuffer(raw, dtype="<f8", offset=header_end, count=count)
    return data.reshape(shape).astype(np.float64)
