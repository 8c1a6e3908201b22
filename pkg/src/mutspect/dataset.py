"""Labeled test datasets and their binary file format.

File format, version 1, little-endian:
  magic "FDST" | version u8 | point_count u32 | input_dim u32 | class_count u32
  per point: features f64 (input_dim) | label u32
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ValidationError
from .util import readonly

_MAGIC = b"FDST"
_VERSION = 1


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray  # (n, input_dim) float64
    labels: np.ndarray  # (n,) int64
    class_count: int

    def __post_init__(self):
        x = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
            raise ValidationError(
                f"features {x.shape} and labels {y.shape} do not line up"
            )
        if x.shape[0] == 0:
            raise ValidationError("dataset is empty")
        if self.class_count < 1:
            raise ValidationError("class_count must be positive")
        if not np.isfinite(x).all():
            raise ValidationError("features must be finite")
        if y.min() < 0 or y.max() >= self.class_count:
            raise ValidationError(
                f"labels must lie in [0, {self.class_count}), got "
                f"[{y.min()}, {y.max()}]"
            )
        object.__setattr__(self, "features", readonly(x))
        y = np.ascontiguousarray(y)
        y.flags.writeable = False
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def input_dim(self) -> int:
        return self.features.shape[1]

    def labels_present(self) -> np.ndarray:
        """Sorted distinct labels occurring in the dataset (the label set)."""
        return np.unique(self.labels)

    def subset(self, indices) -> "LabeledDataset":
        """Dataset restricted to the given point indices, in the given order."""
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.features[idx], self.labels[idx], self.class_count)


def save_dataset(dataset: LabeledDataset, path) -> None:
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<B", _VERSION))
        f.write(struct.pack("<III", len(dataset), dataset.input_dim, dataset.class_count))
        for row, label in zip(dataset.features, dataset.labels):
            f.write(row.astype("<f8").tobytes())
            f.write(struct.pack("<I", int(label)))


def load_dataset(path) -> LabeledDataset:
    with open(path, "rb") as f:
        data = f.read()
    offset = 0

    def take(n: int, what: str) -> bytes:
        nonlocal offset
        if offset + n > len(data):
            raise FormatError(f"truncated dataset file: need {what} at byte {offset}")
        chunk = data[offset : offset + n]
        offset += n
        return chunk

    if take(4, "magic") != _MAGIC:
        raise FormatError("bad magic at byte 0: not a dataset file")
    (version,) = struct.unpack("<B", take(1, "version"))
    if version != _VERSION:
        raise FormatError(f"unsupported dataset format version {version} at byte 4")
    count, dim, classes = struct.unpack("<III", take(12, "header"))
    features = np.empty((count, dim))
    labels = np.empty(count, dtype=np.int64)
    for i in range(count):
        features[i] = np.frombuffer(take(8 * dim, f"point {i} features"), dtype="<f8")
        (labels[i],) = struct.unpack("<I", take(4, f"point {i} label"))
    if offset != len(data):
        raise FormatError(f"trailing bytes at offset {offset}")
    return LabeledDataset(features, labels, classes)
