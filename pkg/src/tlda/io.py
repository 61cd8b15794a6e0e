"""TNSR tensor files, label manifests and model persistence.

A TNSR file is a little-endian header followed by float64 payload in
generalized column-major order::

    magic "TNSR" | u32 version=1 | u32 scalar_code=1 | u32 ndims | u64 dims[ndims]

Models are stored as three files: ``PATH`` (the projection tensor),
``PATH.train.tnsr`` (training projections) and ``PATH.json`` (metadata).
"""

import csv
import json
import os
import struct

import numpy as np

from .discriminant import DiscriminantModel, Method
from .errors import FormatError, ManifestError
from .robust import RobustParams
from .tl_algebra import SliceConditionReport, slice_indices
from .transforms import TransformKind, TransformSpec

__all__ = [
    "MAGIC",
    "read_tensor",
    "write_tensor",
    "read_labels",
    "write_labels",
    "save_model",
    "load_model",
    "model_metadata",
]

MAGIC = b"TNSR"
VERSION = 1
REAL64 = 1
_HEAD = struct.Struct("<4sIII")
_CHUNK = 1 << 22  # scalars per payload read


def write_tensor(path, A):
    """Write ``A`` as a TNSR file."""
    A = np.asarray(A, dtype=float)
    with open(path, "wb") as f:
        f.write(_HEAD.pack(MAGIC, VERSION, REAL64, A.ndim))
        f.write(struct.pack(f"<{A.ndim}Q", *A.shape))
        # C-order bytes of the reversed-axes view are the column-major payload of A.
        np.ascontiguousarray(A.T, dtype="<f8").tofile(f)


def read_tensor(path):
    """Read a TNSR file into an ndarray.

    Raises
    ------
    FormatError
        Bad magic, version or scalar code, or a payload of the wrong length.
    """
    with open(path, "rb") as f:
        head = f.read(_HEAD.size)
        if len(head) < _HEAD.size:
            raise FormatError(f"header truncated: {len(head)} of {_HEAD.size} bytes", len(head))
        magic, version, code, ndims = _HEAD.unpack(head)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}", 0)
        if version != VERSION:
            raise FormatError(f"unsupported version {version}", 4)
        if code != REAL64:
            raise FormatError(f"unsupported scalar code {code}", 8)
        raw = f.read(8 * ndims)
        if len(raw) < 8 * ndims:
            raise FormatError(
                f"dimension list truncated: {len(raw)} of {8 * ndims} bytes", _HEAD.size + len(raw)
            )
        dims = struct.unpack(f"<{ndims}Q", raw)
        start = _HEAD.size + 8 * ndims
        count = int(np.prod(dims, dtype=np.int64))
        expected = 8 * count
        actual = os.fstat(f.fileno()).st_size - start
        if actual != expected:
            raise FormatError(
                f"payload length {actual} bytes, expected {expected} for dims {list(dims)}",
                start + min(actual, expected),
            )
        flat = np.empty(count, dtype="<f8")
        for lo in range(0, count, _CHUNK):
            hi = min(count, lo + _CHUNK)
            f.readinto(memoryview(flat[lo:hi]).cast("B"))
    return flat.astype(float, copy=False).reshape(dims, order="F")


def write_labels(path, labels):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["index", "label"])
        for j, label in enumerate(labels):
            w.writerow([j, label])


def read_labels(path):
    """Read an ``index,label`` manifest into a list ordered by index.

    The header line is optional. Indices are zero-based and must cover
    ``0..n-1`` exactly once.
    """
    found = {}
    with open(path, newline="") as f:
        for lineno, row in enumerate(csv.reader(f), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) < 2:
                raise ManifestError(f"line {lineno}: expected 'index,label', got {row!r}")
            key = row[0].strip()
            try:
                index = int(key)
            except ValueError:
                if lineno == 1:
                    continue
                raise ManifestError(f"line {lineno}: index {key!r} is not an integer") from None
            if index in found:
                raise ManifestError(f"line {lineno}: duplicate index {index}")
            found[index] = ",".join(row[1:]).strip()
    missing = sorted(set(range(len(found))) - set(found))
    if missing or (found and min(found) < 0):
        raise ManifestError(
            f"indices must be 0..{len(found) - 1} without gaps; missing {missing[:5]}"
        )
    return [found[j] for j in range(len(found))]


def _kappas(report):
    if report is None:
        return None
    return {
        "threshold": report.threshold,
        "kappa": [repr(float(k)) for k in report.kappa],
    }


def _report(blob, spec):
    if blob is None:
        return None
    kappa = np.array([float(k) for k in blob["kappa"]])
    return SliceConditionReport(slice_indices(spec), kappa, float(blob["threshold"]))


def model_metadata(model):
    params = model.params
    meta = {
        "format": "tlda-model",
        "version": 1,
        "method": model.method.value,
        "transform": model.spec.kind.value,
        "original_dims": list(model.spec.original_dims),
        "padded_dims": list(model.spec.padded_dims),
        "p": model.p,
        "class_ids": list(model.class_ids),
        "sample_dims": list(model.sample_dims),
        "train_labels": list(model.train_labels),
        "conditioning": _kappas(model.conditioning),
        "conditioning_post": _kappas(model.conditioning_post),
    }
    if params is not None:
        meta["kappa_threshold"] = params.kappa_threshold
        meta["energy"] = params.energy
        meta["lambda_floor_ratio"] = params.lambda_floor_ratio
    return meta


def save_model(model, path):
    """Persist a model as ``path``, ``path.train.tnsr`` and ``path.json``."""
    path = os.fspath(path)
    write_tensor(path, model.U_p)
    write_tensor(path + ".train.tnsr", model.train_projections)
    with open(path + ".json", "w") as f:
        json.dump(model_metadata(model), f, indent=2, sort_keys=True)
        f.write("\n")


def load_model(path):
    path = os.fspath(path)
    try:
        with open(path + ".json") as f:
            meta = json.load(f)
    except json.JSONDecodeError as exc:
        raise FormatError(f"model metadata is not valid JSON: {exc}") from None
    if meta.get("format") != "tlda-model":
        raise FormatError("model metadata has an unknown format tag")
    spec = TransformSpec(
        TransformKind.parse(meta["transform"]),
        tuple(meta["original_dims"]),
        tuple(meta["padded_dims"]),
    )
    params = None
    if "kappa_threshold" in meta:
        params = RobustParams(meta["kappa_threshold"], meta["energy"], meta["lambda_floor_ratio"])
    return DiscriminantModel(
        U_p=read_tensor(path),
        p=int(meta["p"]),
        spec=spec,
        method=Method(meta["method"]),
        class_ids=tuple(meta["class_ids"]),
        sample_dims=tuple(meta["sample_dims"]),
        conditioning=_report(meta["conditioning"], spec),
        conditioning_post=_report(meta["conditioning_post"], spec),
        params=params,
        train_projections=read_tensor(path + ".train.tnsr"),
        train_labels=tuple(meta["train_labels"]),
    )
