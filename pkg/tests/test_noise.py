import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tetroncodes.majorana import TetronLayout
from tetroncodes.noise import (
    LABELS,
    MECHANISM_MASKS,
    NoiseModel,
    block_generator,
    channel_probs,
    labels_to_bits,
    mechanism_op,
    physical_error_rate,
    sample,
    sample_labels,
)


def test_channel_examples():
    assert np.allclose(channel_probs(0.0, 1.0), [1, 0, 0, 0, 0, 0, 0, 0])
    pr = channel_probs(0.3, 0.0)
    assert np.allclose(pr, [0.7, 0.1, 0.1, 0.1, 0, 0, 0, 0])
    pr = channel_probs(0.2, 1.0)
    assert np.allclose(pr[1:4], 0.1 / 3)
    assert np.allclose(pr[4:], 0.025)
    assert pr.sum() == pytest.approx(1.0)


@given(st.floats(0, 1), st.floats(0, 100))
def test_channel_is_a_distribution(p, eta):
    pr = channel_probs(p, eta)
    assert (pr >= 0).all()
    assert pr.sum() == pytest.approx(1.0)
    m = NoiseModel(p, eta)
    assert m.p_bosonic + m.p_fermionic == pytest.approx(p)
    assert pr[1:].sum() == pytest.approx(p)


def test_physical_error_rate():
    assert physical_error_rate(NoiseModel(0.1, 0.0)) == pytest.approx(0.1)
    assert physical_error_rate(NoiseModel(0.1, 1.0)) == pytest.approx(0.05 + 0.75 * 0.05)


def test_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(1.5, 1.0)
    with pytest.raises(ValueError):
        NoiseModel(0.1, -1.0)


def test_mechanism_masks():
    # X, Y, Z in representation R, then single MZMs a..d
    assert MECHANISM_MASKS == (0b0110, 0b0101, 0b0011, 1, 2, 4, 8)
    lay = TetronLayout(2)
    assert mechanism_op(lay, 2, 0).bits == (5, 6)
    assert mechanism_op(lay, 1, 6).bits == (3,)


def test_sampling_frequencies():
    model = NoiseModel(0.4, 2.0)
    labels = sample_labels(model, 10, 40_000, block_generator(1, 0))
    counts = np.bincount(labels.ravel(), minlength=8)
    expected = model.probs() * labels.size
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < 24.3  # 7 degrees of freedom, 0.1% tail


def test_tetrons_are_independent():
    model = NoiseModel(0.5, 1.0)
    labels = sample_labels(model, 2, 50_000, block_generator(3, 0))
    a, b = labels[:, 0] > 0, labels[:, 1] > 0
    # joint error frequency factorises
    assert abs((a & b).mean() - a.mean() * b.mean()) < 0.01


def test_streams_are_reproducible_and_distinct():
    model = NoiseModel(0.3, 1.0)
    a = sample_labels(model, 7, 100, block_generator(5, 2))
    b = sample_labels(model, 7, 100, block_generator(5, 2))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_labels(model, 7, 100, block_generator(5, 3)))
    assert not np.array_equal(a, sample_labels(model, 7, 100, block_generator(6, 2)))
    assert not np.array_equal(a, sample_labels(model, 7, 100, block_generator(5, 2, stream=1)))


def test_labels_to_bits():
    labels = np.array([[0, 1, 7], [4, 2, 3]])
    bits = labels_to_bits(labels)
    assert bits.shape == (2, 12)
    assert list(np.flatnonzero(bits[0])) == [5, 6, 11]
    assert list(np.flatnonzero(bits[1])) == [0, 4, 6, 8, 9]


def test_sample_object():
    lay = TetronLayout(7)
    s = sample(NoiseModel(1.0, 1.0), lay, block_generator(0, 0))
    assert "I" not in s.labels
    assert s.n_bosonic + s.n_fermionic == 7
    assert all(lbl in LABELS for lbl in s.labels)
    assert s.op.n_maj == 28
