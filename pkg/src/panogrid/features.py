"""Feature storage and extraction backends.

Tensors travel between tools in a small self-describing binary format:

    magic "TPAF" | version u32 | dtype tag u32 | rank u32 | dims u32*rank
    payload (row-major little-endian float32) | crc32 u32 of the payload

Manifests are JSON-lines files, one record per image:
``{"id": ..., "image": ..., "caption_dense"?: ..., "caption_summary"?: ...}``.
Feature extraction is pluggable: the precomputed backend joins records
to sidecar tensor files by id; the optional onnx backend runs a model.
"""

from __future__ import annotations

import json
import struct
import zlib
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import (
    ChecksumError,
    CountError,
    DimensionError,
    EmptyInput,
    FormatError,
    IoError,
    RangeError,
)
from .metrics import FeatureSet, LogitSet
from .raster import read_png

MAGIC = b"TPAF"
VERSION = 1
DTYPE_F32 = 1
_MAX_RANK = 8

LOGIT_RENORM_TOL = 1e-4


def save_tensor(path, arr) -> None:
    """Write a float array to a tensor file (stored as float32)."""
    arr = np.asarray(arr)
    if not np.issubdtype(arr.dtype, np.floating):
        raise DimensionError(f"tensor files hold float arrays, got dtype {arr.dtype}")
    if arr.ndim < 1 or arr.ndim > _MAX_RANK:
        raise DimensionError(f"tensor rank {arr.ndim} outside 1..{_MAX_RANK}")
    if arr.size == 0:
        raise EmptyInput("refusing to write an empty tensor")
    if max(arr.shape) >= 2 ** 32:
        raise RangeError("tensor dimension does not fit in 32 bits")
    payload = np.ascontiguousarray(arr, dtype="<f4").tobytes()
    header = MAGIC + struct.pack("<III", VERSION, DTYPE_F32, arr.ndim)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    trailer = struct.pack("<I", zlib.crc32(payload) & 0xFFFFFFFF)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
            fh.write(trailer)
    except OSError as exc:
        raise IoError(f"cannot write tensor file {path}: {exc}") from exc


def load_tensor(path) -> np.ndarray:
    """Read a tensor file back into a float32 array.

    Raises FormatError (with the failing byte offset) for structural
    problems and ChecksumError when the payload CRC32 does not match.
    """
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read tensor file {path}: {exc}") from exc

    def need(upto: int, what: str):
        if len(blob) < upto:
            raise FormatError(f"truncated tensor file: {what}", offset=len(blob))

    need(4, "magic")
    if blob[:4] != MAGIC:
        raise FormatError(f"bad magic {blob[:4]!r}, expected {MAGIC!r}", offset=0)
    need(8, "version")
    version = struct.unpack_from("<I", blob, 4)[0]
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    need(12, "dtype tag")
    dtype_tag = struct.unpack_from("<I", blob, 8)[0]
    if dtype_tag != DTYPE_F32:
        raise FormatError(f"unsupported dtype tag {dtype_tag}", offset=8)
    need(16, "rank")
    rank = struct.unpack_from("<I", blob, 12)[0]
    if rank < 1 or rank > _MAX_RANK:
        raise FormatError(f"rank {rank} outside 1..{_MAX_RANK}", offset=12)
    need(16 + 4 * rank, "dims")
    dims = struct.unpack_from(f"<{rank}I", blob, 16)
    count = 1
    for i, d in enumerate(dims):
        if d == 0:
            raise FormatError(f"dimension {i} is zero", offset=16 + 4 * i)
        count *= d
    header_end = 16 + 4 * rank
    payload_end = header_end + 4 * count
    if len(blob) < payload_end + 4:
        raise FormatError(
            f"payload or checksum truncated: need {payload_end + 4} bytes, file has {len(blob)}",
            offset=len(blob),
        )
    if len(blob) > payload_end + 4:
        raise FormatError(f"{len(blob) - payload_end - 4} trailing bytes after checksum",
                          offset=payload_end + 4)
    payload = blob[header_end:payload_end]
    stored = struct.unpack_from("<I", blob, payload_end)[0]
    actual = zlib.crc32(payload) & 0xFFFFFFFF
    if stored != actual:
        raise ChecksumError(
            f"payload CRC32 mismatch in {path}: stored {stored:#010x}, computed {actual:#010x}"
        )
    arr = np.frombuffer(payload, dtype="<f4").reshape(dims)
    return arr.astype(np.float32, copy=True)


def save_features(path, features) -> None:
    """Write an (n, d) feature or logit matrix as a tensor file."""
    if isinstance(features, (FeatureSet, LogitSet)):
        features = features.data
    arr = np.asarray(features, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"feature files hold (n, d) matrices, got shape {arr.shape}")
    save_tensor(path, arr)


def load_features(path) -> FeatureSet:
    """Read a tensor file as a validated feature matrix."""
    arr = load_tensor(path)
    if arr.ndim != 2:
        raise FormatError(f"expected a rank-2 feature matrix, got rank {arr.ndim}", offset=12)
    return FeatureSet(arr.astype(np.float64))


def load_logits(path) -> LogitSet:
    """Read a tensor file as class probabilities.

    Rows whose sums drifted from 1 (float32 storage, upstream softmax)
    are renormalized when within 1e-4 of 1; larger deviations raise
    RangeError.
    """
    arr = load_tensor(path)
    if arr.ndim != 2:
        raise FormatError(f"expected a rank-2 logit matrix, got rank {arr.ndim}", offset=12)
    x = arr.astype(np.float64)
    sums = x.sum(axis=1)
    bad = np.abs(sums - 1.0) > LOGIT_RENORM_TOL
    if np.any(bad):
        i = int(np.argmax(bad))
        raise RangeError(f"logit row {i} sums to {sums[i]:.8f}, outside renormalization tolerance")
    return LogitSet(x / sums[:, None])


def read_manifest(path) -> list[dict]:
    """Read a JSON-lines manifest; every record needs string id and image."""
    records = []
    seen: set[str] = set()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise FormatError(f"manifest line {lineno} is not valid JSON: {exc}",
                                      offset=lineno) from exc
                if not isinstance(rec, dict) or not isinstance(rec.get("id"), str) \
                        or not isinstance(rec.get("image"), str):
                    raise FormatError(f"manifest line {lineno} needs string 'id' and 'image'",
                                      offset=lineno)
                if rec["id"] in seen:
                    raise FormatError(f"manifest line {lineno} repeats id {rec['id']!r}",
                                      offset=lineno)
                seen.add(rec["id"])
                records.append(rec)
    except OSError as exc:
        raise IoError(f"cannot read manifest {path}: {exc}") from exc
    if not records:
        raise EmptyInput(f"manifest {path} has no records")
    return records


def write_manifest(path, records: Sequence[dict]) -> None:
    """Write manifest records as JSON lines."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write manifest {path}: {exc}") from exc


class FeatureBackend(Protocol):
    """Anything that turns manifest records into an (n, d) feature matrix."""

    def extract(self, records: Sequence[dict]) -> np.ndarray: ...


class PrecomputedBackend:
    """Joins manifest records to sidecar tensor files by id.

    Each record's features live at ``<features_dir>/<id><suffix>``.
    Files may hold a vector (d,), a matrix (1, d), or a stack (m, d)
    of per-view vectors; ``stacks`` returns the per-view layout and
    ``extract`` the flattened single-vector layout.
    """

    def __init__(self, features_dir, suffix: str = ".tpaf"):
        self.features_dir = Path(features_dir)
        self.suffix = suffix

    def path_for(self, image_id: str) -> Path:
        return self.features_dir / f"{image_id}{self.suffix}"

    def load(self, image_id: str) -> np.ndarray:
        path = self.path_for(image_id)
        if not path.exists():
            raise KeyError(image_id)
        return load_tensor(path)

    def extract(self, records: Sequence[dict]) -> np.ndarray:
        rows = []
        dim = None
        for rec in records:
            arr = self.load(rec["id"])
            vec = arr.reshape(-1) if arr.ndim == 1 or (arr.ndim == 2 and arr.shape[0] == 1) else None
            if vec is None:
                raise DimensionError(
                    f"features for id {rec['id']!r} have shape {arr.shape}; expected a single vector"
                )
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise DimensionError(f"feature dimension mismatch for id {rec['id']!r}")
            rows.append(vec.astype(np.float64))
        return np.stack(rows)

    def stacks(self, records: Sequence[dict], expected_views: int | None = None) -> np.ndarray:
        """Per-view features: (n, views, d) from (views, d) sidecar files."""
        mats = []
        shape = None
        for rec in records:
            arr = self.load(rec["id"])
            if arr.ndim != 2:
                raise DimensionError(
                    f"features for id {rec['id']!r} have rank {arr.ndim}; expected (views, d)"
                )
            if shape is None:
                shape = arr.shape
                if expected_views is not None and shape[0] != expected_views:
                    raise CountError(
                        f"id {rec['id']!r} has {shape[0]} views, expected {expected_views}"
                    )
            elif arr.shape != shape:
                raise DimensionError(f"feature shape mismatch for id {rec['id']!r}")
            mats.append(arr.astype(np.float64))
        return np.stack(mats)


class OnnxBackend:
    """Runs an ONNX classifier or embedder over manifest images.

    Requires the optional onnxruntime dependency; constructing the
    backend without it raises BackendUnavailable.  Images are resized
    to the model input with plain bilinear sampling (no antialiasing)
    and fed as NCHW float32.
    """

    def __init__(self, model_path, input_px: int = 299,
                 input_name: str | None = None, output_name: str | None = None):
        try:
            import onnxruntime  # noqa: F401
        except ImportError as exc:
            from .errors import BackendUnavailable

            raise BackendUnavailable(
                "onnxruntime is not installed; install the 'onnx' extra to use this backend"
            ) from exc
        self._ort = onnxruntime
        self.model_path = str(model_path)
        self.input_px = input_px
        self.session = onnxruntime.InferenceSession(self.model_path)
        self.input_name = input_name or self.session.get_inputs()[0].name
        self.output_name = output_name or self.session.get_outputs()[0].name

    def _resize(self, img: np.ndarray) -> np.ndarray:
        from .raster import _bilinear_gather

        h, w = img.shape[:2]
        t = self.input_px
        rows = (np.arange(t) + 0.5) * h / t - 0.5
        cols = (np.arange(t) + 0.5) * w / t - 0.5
        cc, rr = np.meshgrid(cols, rows)
        return _bilinear_gather(img, cc, rr, wrap_cols=False)

    def extract(self, records: Sequence[dict]) -> np.ndarray:
        rows = []
        for rec in records:
            img = read_png(rec["image"])
            if img.shape[2] == 1:
                img = np.repeat(img, 3, axis=2)
            resized = self._resize(img[..., :3]).astype(np.float32)
            nchw = np.transpose(resized, (2, 0, 1))[None]
            out = self.session.run([self.output_name], {self.input_name: nchw})[0]
            rows.append(np.asarray(out, dtype=np.float64).reshape(-1))
        return np.stack(rows)


def extract_features(records: Sequence[dict], backend: FeatureBackend) -> FeatureSet:
    """Run a backend over manifest records and validate the result."""
    if not records:
        raise EmptyInput("no manifest records to extract features from")
    return FeatureSet(backend.extract(records))
