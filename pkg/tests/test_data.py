"""Dataset loading, synthesis, and the two binary formats."""

import struct

import numpy as np
import pytest

from wavepool.analysis import spectrum_energy_fraction_above
from wavepool.data import (
    CIFAR_RECORD_BYTES,
    IMAGESET_MAGIC,
    TEXTURE_NAMES,
    LabeledImageSet,
    _texture,
    encode_cifar_records,
    load_cifar100,
    load_image_set,
    make_tiny_object_set,
    read_cifar_records,
    save_image_set,
)
from wavepool.errors import (
    CorruptDataset,
    DatasetNotFound,
    InvalidConfig,
    UnsupportedFormat,
)


def make_cifar_fixture_bytes(n=5, seed=20):
    """Deterministic stand-in for a CIFAR-100 binary file."""
    rng = np.random.default_rng(seed)
    out = bytearray()
    for _ in range(n):
        out.append(int(rng.integers(0, 20)))    # coarse label
        out.append(int(rng.integers(0, 100)))   # fine label
        out.extend(rng.integers(0, 256, size=3072, dtype=np.uint8).tobytes())
    return bytes(out)


class TestCifarLoader:
    def test_golden_values_against_independent_byte_parser(self, tmp_path):
        blob = make_cifar_fixture_bytes()
        path = tmp_path / "train.bin"
        path.write_bytes(blob)

        # oracle: pure byte slicing, no library code
        record0 = blob[:CIFAR_RECORD_BYTES]
        fine0 = record0[1]
        planes = record0[2:]
        channel_means = [sum(planes[c * 1024:(c + 1) * 1024]) / 1024 for c in range(3)]

        data = load_cifar100(tmp_path, "train")
        assert data.class_count == 100
        assert int(data.labels[0]) == fine0
        for c in range(3):
            assert data.images[0, c].mean() * 255.0 == pytest.approx(
                channel_means[c], abs=1e-10
            )

    def test_pixel_range_and_shape(self, tmp_path):
        path = tmp_path / "test.bin"
        path.write_bytes(make_cifar_fixture_bytes(n=3))
        data = load_cifar100(tmp_path, "test")
        assert data.images.shape == (3, 3, 32, 32)
        assert data.images.min() >= 0.0 and data.images.max() <= 1.0
        assert data.labels.min() >= 0 and data.labels.max() <= 99

    def test_round_trip_reproduces_bytes_exactly(self, tmp_path):
        blob = make_cifar_fixture_bytes(n=4)
        path = tmp_path / "x.bin"
        path.write_bytes(blob)
        coarse, fine, images = read_cifar_records(path)
        assert encode_cifar_records(coarse, fine, images) == blob

    def test_direct_file_path_works(self, tmp_path):
        path = tmp_path / "anything.bin"
        path.write_bytes(make_cifar_fixture_bytes(n=2))
        assert len(load_cifar100(path, "train")) == 2

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(DatasetNotFound):
            load_cifar100(tmp_path / "nope.bin", "train")

    def test_truncated_file_raises(self, tmp_path):
        path = tmp_path / "train.bin"
        path.write_bytes(make_cifar_fixture_bytes(n=2)[:-7])
        with pytest.raises(CorruptDataset):
            load_cifar100(path, "train")

    def test_label_byte_out_of_range_raises(self, tmp_path):
        blob = bytearray(make_cifar_fixture_bytes(n=1))
        blob[1] = 100  # fine label must be <= 99
        path = tmp_path / "train.bin"
        path.write_bytes(bytes(blob))
        with pytest.raises(CorruptDataset):
            load_cifar100(path, "train")

    def test_bad_split_rejected(self, tmp_path):
        with pytest.raises(InvalidConfig):
            load_cifar100(tmp_path, "validation")


class TestTinyObjectSet:
    def test_empty_set_refused(self):
        with pytest.raises(InvalidConfig):
            make_tiny_object_set(0)

    def test_deterministic_per_seed(self):
        a = make_tiny_object_set(6, image_size=16, object_size=2, classes=4, seed=9)
        b = make_tiny_object_set(6, image_size=16, object_size=2, classes=4, seed=9)
        assert np.array_equal(a.images, b.images)
        assert np.array_equal(a.labels, b.labels)
        c = make_tiny_object_set(6, image_size=16, object_size=2, classes=4, seed=10)
        assert not np.array_equal(a.images, c.images)

    def test_shapes_ranges_and_labels(self):
        data = make_tiny_object_set(10, image_size=32, object_size=6, classes=3, seed=0)
        assert data.images.shape == (10, 3, 32, 32)
        assert data.images.min() >= 0.0 and data.images.max() <= 1.0
        assert data.class_count == 3
        assert set(np.unique(data.labels)) <= {0, 1, 2}

    def test_class_balance_within_one(self):
        data = make_tiny_object_set(10, image_size=32, object_size=4, classes=4, seed=3)
        counts = np.bincount(data.labels, minlength=4)
        assert counts.max() - counts.min() <= 1

    def test_checkerboard_texture_peaks_at_pi_pi(self):
        assert TEXTURE_NAMES[0] == "checkerboard"
        patch = _texture(0, 6)
        from wavepool.analysis import dft2

        spec = np.abs(dft2(patch)) ** 2
        assert np.unravel_index(spec.argmax(), spec.shape) == (3, 3)  # (pi, pi)

    @pytest.mark.parametrize("kind", range(4))
    def test_all_textures_live_above_half_band(self, kind):
        patch = _texture(kind, 6)
        assert spectrum_energy_fraction_above(patch, np.pi / 2) >= 0.5

    def test_size_validation(self):
        with pytest.raises(InvalidConfig):
            make_tiny_object_set(4, image_size=32, object_size=1)
        with pytest.raises(InvalidConfig):
            make_tiny_object_set(4, image_size=64, object_size=9)
        with pytest.raises(InvalidConfig):
            make_tiny_object_set(4, image_size=16, object_size=4)  # not < 16/4
        with pytest.raises(InvalidConfig):
            make_tiny_object_set(4, image_size=31, object_size=2)
        with pytest.raises(InvalidConfig):
            make_tiny_object_set(4, image_size=32, object_size=6, classes=1)
        with pytest.raises(InvalidConfig):
            make_tiny_object_set(4, image_size=32, object_size=6, classes=9)


class TestLabeledImageSet:
    def test_invariants_enforced(self):
        good = np.zeros((2, 3, 4, 4))
        with pytest.raises(InvalidConfig):
            LabeledImageSet(np.zeros((0, 3, 4, 4)), np.zeros(0, int), 2, "train")
        with pytest.raises(InvalidConfig):
            LabeledImageSet(np.zeros((2, 3, 5, 4)), np.zeros(2, int), 2, "train")
        with pytest.raises(InvalidConfig):
            LabeledImageSet(good, np.array([0, 2]), 2, "train")  # label out of range
        with pytest.raises(InvalidConfig):
            LabeledImageSet(good, np.zeros(3, int), 2, "train")  # length mismatch
        with pytest.raises(InvalidConfig):
            LabeledImageSet(good, np.zeros(2, int), 1, "train")  # single class
        with pytest.raises(InvalidConfig):
            LabeledImageSet(np.zeros((2, 3, 4)), np.zeros(2, int), 2, "train")

    def test_channel_stats(self):
        images = np.zeros((2, 3, 2, 2))
        images[:, 0] = 0.5          # constant channel: std floored
        images[0, 1] = 1.0          # half ones: mean 0.5, std 0.5
        data = LabeledImageSet(images, np.array([0, 1]), 2, "train")
        mean, std = data.channel_stats()
        assert mean[0] == pytest.approx(0.5)
        assert std[0] == pytest.approx(1e-8)
        assert mean[1] == pytest.approx(0.5)
        assert std[1] == pytest.approx(0.5)


class TestImageSetFormat:
    def test_round_trip(self, tmp_path):
        data = make_tiny_object_set(7, image_size=16, object_size=2, classes=3, seed=1)
        path = tmp_path / "set.wvds"
        save_image_set(path, data)
        back = load_image_set(path, "train")
        assert np.array_equal(back.images, data.images)
        assert np.array_equal(back.labels, data.labels)
        assert back.class_count == data.class_count

    def test_header_layout(self, tmp_path):
        data = make_tiny_object_set(3, image_size=16, object_size=2, classes=2, seed=1)
        path = tmp_path / "set.wvds"
        save_image_set(path, data)
        blob = path.read_bytes()
        assert blob[:4] == IMAGESET_MAGIC == b"WVDS"
        version, n, c, h, w, classes = struct.unpack_from("<6I", blob, 4)
        assert (version, n, c, h, w, classes) == (1, 3, 3, 16, 16, 2)
        assert len(blob) == 28 + 4 * n + 8 * n * c * h * w

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.wvds"
        path.write_bytes(b"XXXX" + b"\x00" * 40)
        with pytest.raises(UnsupportedFormat):
            load_image_set(path)

    def test_bad_version_rejected(self, tmp_path):
        path = tmp_path / "bad.wvds"
        path.write_bytes(b"WVDS" + struct.pack("<6I", 3, 1, 3, 4, 4, 2) + b"\x00" * 400)
        with pytest.raises(UnsupportedFormat):
            load_image_set(path)

    def test_truncated_rejected(self, tmp_path):
        data = make_tiny_object_set(3, image_size=16, object_size=2, classes=2, seed=1)
        path = tmp_path / "set.wvds"
        save_image_set(path, data)
        blob = path.read_bytes()
        path.write_bytes(blob[:-20])
        with pytest.raises(CorruptDataset):
            load_image_set(path)

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(DatasetNotFound):
            load_image_set(tmp_path / "gone.wvds")
