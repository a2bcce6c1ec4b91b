"""Binary artifact helpers: checksums, JSON-headed blobs, feature matrices."""
from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import ChecksumMismatch, FormatError, MissingArtifact

FEATURE_MAGIC = b"PDFM"
_FEATURE_HEADER = struct.Struct("<4sQI")  # magic, rows, cols -> 16 bytes
_BLOB_LEN = struct.Struct("<Q")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def verify_checksums(directory, checksums: Mapping[str, str]) -> None:
    directory = Path(directory)
    for name, digest in checksums.items():
        path = directory / name
        if not path.exists():
            raise MissingArtifact(str(path))
        if sha256_file(path) != digest:
            raise ChecksumMismatch(str(path))


def canonical_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_feature_matrix(path, X: np.ndarray) -> None:
    """16-byte header (magic, rows, cols) followed by little-endian f32 rows."""
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError("feature matrix must be 2-D")
    with open(path, "wb") as fh:
        fh.write(_FEATURE_HEADER.pack(FEATURE_MAGIC, X.shape[0], X.shape[1]))
        fh.write(np.ascontiguousarray(X, dtype="<f4").tobytes())


def read_feature_matrix(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _FEATURE_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, rows, cols = _FEATURE_HEADER.unpack_from(raw)
    if magic != FEATURE_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    body = raw[_FEATURE_HEADER.size:]
    if len(body) != rows * cols * 4:
        raise FormatError(f"{path}: expected {rows * cols * 4} payload bytes, got {len(body)}")
    return np.frombuffer(body, dtype="<f4").reshape(rows, cols).astype(np.float32)


def write_json_blob(path, header: dict, arrays) -> None:
    """u64 header length, UTF-8 JSON header, then each array as little-endian f32.

    The header gains a ``"blobs"`` list of shapes so the reader can split the payload.
    """
    arrays = [np.asarray(a) for a in arrays]
    header = dict(header)
    header["blobs"] = [list(a.shape) for a in arrays]
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_BLOB_LEN.pack(len(head)))
        fh.write(head)
        for a in arrays:
            fh.write(np.ascontiguousarray(a, dtype="<f4").tobytes())


def read_json_blob(path) -> tuple[dict, list[np.ndarray]]:
    raw = Path(path).read_bytes()
    if len(raw) < _BLOB_LEN.size:
        raise FormatError(f"{path}: truncated")
    (hlen,) = _BLOB_LEN.unpack_from(raw)
    try:
        header = json.loads(raw[_BLOB_LEN.size:_BLOB_LEN.size + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: bad header: {exc}") from None
    offset = _BLOB_LEN.size + hlen
    arrays = []
    for shape in header["blobs"]:
        count = int(np.prod(shape)) if shape else 1
        nbytes = count * 4
        if offset + nbytes > len(raw):
            raise FormatError(f"{path}: truncated payload")
        arrays.append(np.frombuffer(raw[offset:offset + nbytes], dtype="<f4").reshape(shape).astype(np.float32))
        offset += nbytes
    if offset != len(raw):
        raise FormatError(f"{path}: trailing bytes")
    return header, arrays
