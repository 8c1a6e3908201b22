import numpy as np
import pytest

from mutspect.dataset import LabeledDataset, load_dataset, save_dataset
from mutspect.errors import FormatError, ValidationError


def make_dataset(n=12, dim=3, classes=4, seed=0):
    rng = np.random.default_rng(seed)
    return LabeledDataset(
        rng.normal(size=(n, dim)), rng.integers(0, classes, size=n), classes
    )


def test_round_trip_bit_exact(tmp_path):
    ds = make_dataset()
    path = tmp_path / "data.fdst"
    save_dataset(ds, path)
    loaded = load_dataset(path)
    assert loaded.features.tobytes() == ds.features.tobytes()
    assert loaded.labels.tolist() == ds.labels.tolist()
    assert loaded.class_count == ds.class_count


def test_labels_present():
    ds = LabeledDataset(np.zeros((4, 2)), np.array([2, 0, 2, 3]), 5)
    assert ds.labels_present().tolist() == [0, 2, 3]


def test_subset_preserves_order():
    ds = make_dataset()
    sub = ds.subset([5, 1, 3])
    np.testing.assert_array_equal(sub.features, ds.features[[5, 1, 3]])
    np.testing.assert_array_equal(sub.labels, ds.labels[[5, 1, 3]])


def test_validation_errors():
    with pytest.raises(ValidationError):
        LabeledDataset(np.zeros((2, 2)), np.array([0, 5]), 3)  # label out of range
    with pytest.raises(ValidationError):
        LabeledDataset(np.array([[np.nan, 0.0]]), np.array([0]), 1)
    with pytest.raises(ValidationError):
        LabeledDataset(np.zeros((0, 2)), np.zeros(0, dtype=int), 1)


def test_truncated_file(tmp_path):
    ds = make_dataset()
    path = tmp_path / "data.fdst"
    save_dataset(ds, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-3])
    with pytest.raises(FormatError, match="byte"):
        load_dataset(path)


def test_bad_magic(tmp_path):
    path = tmp_path / "data.fdst"
    path.write_bytes(b"XXXX" + b"\x00" * 20)
    with pytest.raises(FormatError, match="byte 0"):
        load_dataset(path)
