import math

import numpy as np
import pytest

from swarmfl.datagen import (
    DatasetSpec,
    LabeledDataset,
    NoiseSpec,
    ParticipationSchedule,
    PartitionSpec,
    corrupt_labels,
    dirichlet_partition,
    gen_dataset,
    participation_at,
    sample_client_profiles,
)
from swarmfl.errors import ConfigError


# --- client profiles ----------------------------------------------------------


def test_profile_fields_stay_in_their_ranges():
    profiles = sample_client_profiles(1000, NoiseSpec(0.5), np.random.default_rng(21))
    assert len(profiles) == 1000
    assert [p.id for p in profiles] == list(range(1000))
    for p in profiles:
        assert 0.5 <= p.det_accuracy <= 1.0
        assert 0.0 <= p.false_positive_rate <= 0.2
        assert 0.1 <= p.response_time <= 1.0
        assert 0.0 <= p.reported_accuracy <= 1.0
        assert p.label_flip_rate == 1.0 - p.det_accuracy


def test_profile_no_noise_reports_truth():
    profiles = sample_client_profiles(500, NoiseSpec(0.0), np.random.default_rng(22))
    for p in profiles:
        assert p.reported_accuracy == p.det_accuracy


def test_profile_mean_detection_accuracy():
    profiles = sample_client_profiles(100_000, NoiseSpec(0.0), np.random.default_rng(23))
    mean = sum(p.det_accuracy for p in profiles) / len(profiles)
    assert abs(mean - 0.75) < 0.01


def test_profile_draw_order_is_reproducible():
    seed, n, level = 77, 40, 0.3
    profiles = sample_client_profiles(n, NoiseSpec(level), np.random.default_rng(seed))
    mirror = np.random.default_rng(seed)
    det = mirror.uniform(0.5, 1.0, n)
    fpr = mirror.uniform(0.0, 0.2, n)
    rt = mirror.uniform(0.1, 1.0, n)
    shift = mirror.uniform(-level, level, n)
    reported = np.clip(det + shift, 0.0, 1.0)
    for i, p in enumerate(profiles):
        assert p.det_accuracy == det[i]
        assert p.false_positive_rate == fpr[i]
        assert p.response_time == rt[i]
        assert p.reported_accuracy == reported[i]


def test_profile_needs_positive_count():
    with pytest.raises(ValueError):
        sample_client_profiles(0, NoiseSpec(0.0), np.random.default_rng(0))


# --- dataset generation ---------------------------------------------------------


def test_gen_dataset_label_fraction_and_shift():
    spec = DatasetSpec()
    data = gen_dataset(spec, 100_000, (0.3, 0.7), np.random.default_rng(31))
    assert len(data) == 100_000
    frac = float(np.mean(data.labels))
    assert abs(frac - 0.7) < 0.01
    mean1 = data.features[data.labels == 1].mean(axis=0)
    mean0 = data.features[data.labels == 0].mean(axis=0)
    gap = mean1 - mean0
    expected = spec.class_separation / math.sqrt(spec.n_features)
    assert np.all(np.abs(gap - expected) < 0.05)
    assert abs(float(np.linalg.norm(gap)) - spec.class_separation) < 0.05


def test_gen_dataset_degenerate_proportions():
    spec = DatasetSpec()
    zeros = gen_dataset(spec, 500, (1.0, 0.0), np.random.default_rng(32))
    assert not zeros.labels.any()
    ones = gen_dataset(spec, 500, (0.0, 1.0), np.random.default_rng(33))
    assert ones.labels.all()


def test_gen_dataset_draw_order_is_reproducible():
    spec = DatasetSpec(n_features=4, class_separation=1.0)
    data = gen_dataset(spec, 64, (0.5, 0.5), np.random.default_rng(34))
    mirror = np.random.default_rng(34)
    labels = (mirror.random(64) < 0.5).astype(int)
    features = mirror.standard_normal((64, 4)) + labels[:, None] * (1.0 / 2.0)
    assert np.array_equal(data.labels, labels)
    assert np.array_equal(data.features, features)


def test_gen_dataset_errors():
    spec = DatasetSpec()
    rng = np.random.default_rng(35)
    with pytest.raises(ValueError):
        gen_dataset(spec, 10, (0.5, 0.3, 0.2), rng)
    with pytest.raises(ValueError):
        gen_dataset(spec, 10, (0.7, 0.7), rng)
    with pytest.raises(ValueError):
        gen_dataset(spec, 10, (-0.1, 1.1), rng)
    with pytest.raises(ValueError):
        gen_dataset(spec, 0, (0.5, 0.5), rng)


# --- partitions -------------------------------------------------------------------


def test_dirichlet_rows_are_distributions():
    parts = dirichlet_partition(0.5, 50, 2, np.random.default_rng(41))
    assert len(parts) == 50
    for p in parts:
        assert p.shape == (2,)
        assert np.all(p >= 0)
        assert abs(float(p.sum()) - 1.0) < 1e-9


def test_dirichlet_high_alpha_is_nearly_uniform():
    parts = dirichlet_partition(1e6, 1000, 2, np.random.default_rng(42))
    for p in parts:
        assert abs(float(p[0]) - 0.5) < 0.01


def test_dirichlet_low_alpha_is_skewed():
    parts = dirichlet_partition(0.1, 1000, 2, np.random.default_rng(43))
    mean_max = float(np.mean([p.max() for p in parts]))
    assert mean_max > 0.8


def test_dirichlet_errors():
    rng = np.random.default_rng(44)
    with pytest.raises(ValueError):
        dirichlet_partition(0.0, 5, 2, rng)
    with pytest.raises(ValueError):
        dirichlet_partition(0.5, 0, 2, rng)
    with pytest.raises(ValueError):
        dirichlet_partition(0.5, 5, 1, rng)


# --- label corruption ---------------------------------------------------------------


def sample_data(n, seed):
    return gen_dataset(DatasetSpec(), n, (0.5, 0.5), np.random.default_rng(seed))


def test_corrupt_rate_zero_and_one():
    data = sample_data(400, 51)
    same = corrupt_labels(data, 0.0, np.random.default_rng(52))
    assert np.array_equal(same.labels, data.labels)
    flipped = corrupt_labels(data, 1.0, np.random.default_rng(53))
    assert np.array_equal(flipped.labels, 1 - data.labels)


def test_corrupt_rate_matches_fraction():
    data = sample_data(100_000, 54)
    noisy = corrupt_labels(data, 0.3, np.random.default_rng(55))
    frac = float(np.mean(noisy.labels != data.labels))
    assert abs(frac - 0.3) < 0.02


def test_corrupt_keeps_features():
    data = sample_data(100, 56)
    noisy = corrupt_labels(data, 0.5, np.random.default_rng(57))
    assert noisy.features is data.features


def test_corrupt_rate_bounds():
    data = sample_data(10, 58)
    with pytest.raises(ValueError):
        corrupt_labels(data, -0.1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        corrupt_labels(data, 1.1, np.random.default_rng(0))


# --- participation schedules ----------------------------------------------------------


def test_schedule_fixed_is_constant():
    sched = ParticipationSchedule("fixed", 25, 25, 10)
    assert [participation_at(sched, e) for e in range(10)] == [25] * 10


def test_schedule_increasing_endpoints_and_interior():
    sched = ParticipationSchedule("increasing", 5, 25, 20)
    counts = [participation_at(sched, e) for e in range(20)]
    assert counts[0] == 5
    assert counts[-1] == 25
    assert counts[10] == 16  # 5 + 20*10/19 = 15.526... rounds half away from zero
    assert all(b >= a for a, b in zip(counts, counts[1:]))


def test_schedule_decreasing_mirrors_increasing():
    up = ParticipationSchedule("increasing", 5, 25, 20)
    down = ParticipationSchedule("decreasing", 25, 5, 20)
    ups = [participation_at(up, e) for e in range(20)]
    downs = [participation_at(down, e) for e in range(20)]
    assert downs == ups[::-1]
    assert all(b <= a for a, b in zip(downs, downs[1:]))


def test_schedule_single_epoch():
    sched = ParticipationSchedule("fixed", 7, 7, 1)
    assert participation_at(sched, 0) == 7


def test_schedule_epoch_bounds():
    sched = ParticipationSchedule("fixed", 5, 5, 3)
    with pytest.raises(ValueError):
        participation_at(sched, -1)
    with pytest.raises(ValueError):
        participation_at(sched, 3)


def test_schedule_validation():
    with pytest.raises(ConfigError):
        ParticipationSchedule("sinusoidal", 5, 25, 10)
    with pytest.raises(ConfigError):
        ParticipationSchedule("fixed", 5, 25, 10)
    with pytest.raises(ConfigError):
        ParticipationSchedule("increasing", 25, 5, 10)
    with pytest.raises(ConfigError):
        ParticipationSchedule("decreasing", 5, 25, 10)
    with pytest.raises(ConfigError):
        ParticipationSchedule("increasing", 5, 25, 1)
    with pytest.raises(ValueError):
        ParticipationSchedule("fixed", 0, 0, 10)
    with pytest.raises(ValueError):
        ParticipationSchedule("fixed", 5, 5, 0)


# --- config dataclasses -----------------------------------------------------------------


def test_dataset_spec_validation():
    with pytest.raises(ValueError):
        DatasetSpec(n_train_per_client=0)
    with pytest.raises(ValueError):
        DatasetSpec(class_separation=0.0)
    with pytest.raises(ValueError):
        DatasetSpec(n_classes=3)


def test_partition_spec_validation():
    with pytest.raises(ConfigError):
        PartitionSpec(mode="zipf")
    with pytest.raises(ValueError):
        PartitionSpec(mode="dirichlet", alpha=0.0)
    assert PartitionSpec().mode == "iid"


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec(-0.1)
    with pytest.raises(ValueError):
        NoiseSpec(1.5)


def test_labeled_dataset_validation():
    with pytest.raises(ValueError):
        LabeledDataset(features=np.zeros((3, 2)), labels=np.zeros(4, dtype=int))
    with pytest.raises(ValueError):
        LabeledDataset(features=np.zeros((2, 2)), labels=np.array([0, 2]))
    data = LabeledDataset(features=np.zeros((2, 2)), labels=np.array([0, 1]))
    assert len(data) == 2
