"""File formats.

Binary signal: little-endian header ``{magic "SFDT", version u32, n u64}``
followed by n interleaved (re, im) float64 samples.

Sparse spectrum: JSON array of ``{"index": int, "re": float, "im": float}``.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .spectral import SparseSpectrum

MAGIC = b"SFDT"
VERSION = 1
_HEADER = struct.Struct("<4sIQ")


class FormatError(ValueError):
    """Malformed or truncated signal/spectrum file."""


def write_signal(path, x) -> None:
    x = np.ascontiguousarray(x, dtype=np.complex128)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, x.size))
        fh.write(x.astype("<c16").tobytes())


def read_signal(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, version, n = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 16 * n
    if len(raw) != expected:
        raise FormatError(
            f"{path}: expected {expected} bytes for n={n}, got {len(raw)}")
    if n < 2 or n & (n - 1):
        raise FormatError(f"{path}: length {n} is not a power of two >= 2")
    return np.frombuffer(raw, dtype="<c16", offset=_HEADER.size).astype(
        np.complex128)


def write_spectrum(path, spectrum: SparseSpectrum) -> None:
    rows = [
        {"index": int(s), "re": float(v.real), "im": float(v.imag)}
        for s, v in sorted(spectrum.entries.items())
    ]
    Path(path).write_text(json.dumps(rows, indent=1) + "\n")


def read_spectrum(path, n: int) -> SparseSpectrum:
    try:
        rows = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    entries = {}
    for row in rows:
        entries[int(row["index"])] = complex(row["re"], row["im"])
    return SparseSpectrum(n, entries)
