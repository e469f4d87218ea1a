import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from uwbsnn.encoding import EncoderConfig, SpikeTrain, concat_trains, encode_batch, encode_rate
from uwbsnn.errors import EncodingError, FormatError, ShapeError


def test_half_rate_mean_count():
    # 10^4 independent seeds, mean count for p = 0.5 over 1000 steps
    seeds = [(7, k) for k in range(10_000)]
    trains = encode_batch(np.full((10_000, 1), 0.5), steps=1000, max_rate=1.0, seeds=seeds)
    mean = trains.sum(axis=1).mean()
    assert abs(mean - 500) <= 3 * np.sqrt(250)


@pytest.mark.parametrize("seed", range(20))
def test_extremes_are_deterministic(seed):
    t = encode_rate([0.0, 1.0], EncoderConfig(steps=1000, max_rate=1.0, seed=seed))
    np.testing.assert_array_equal(t.counts(), [0, 1000])


def test_same_seed_same_train():
    x = np.linspace(0, 1, 12)
    cfg = EncoderConfig(seed=(3, 1, 4))
    assert encode_rate(x, cfg) == encode_rate(x, cfg)
    assert encode_rate(x, cfg) != encode_rate(x, EncoderConfig(seed=(3, 1, 5)))


def test_channel_stream_independent_of_length():
    a = encode_rate([0.3, 0.8], EncoderConfig(seed=9))
    b = encode_rate([0.3, 0.8, 0.5, 0.1], EncoderConfig(seed=9))
    np.testing.assert_array_equal(a.raster, b.raster[:, :2])


def test_batch_matches_single():
    x = np.random.default_rng(1).random((3, 5))
    seeds = [11, (2, 3), 5]
    batch = encode_batch(x, 40, 0.5, seeds)
    for i in range(3):
        np.testing.assert_array_equal(batch[i], encode_rate(x[i], EncoderConfig(40, 0.5, seeds[i])).raster)


@pytest.mark.parametrize("bad", [[-0.1], [1.01], [np.nan]])
def test_out_of_range_rejected(bad):
    with pytest.raises(EncodingError):
        encode_rate(bad)


@settings(max_examples=50, deadline=None)
@given(arrays(bool, st.tuples(st.integers(1, 20), st.integers(1, 8))))
def test_event_list_round_trip(raster):
    t = SpikeTrain(raster)
    assert SpikeTrain.from_events(t.to_events()) == t


def test_event_list_errors():
    with pytest.raises(FormatError):
        SpikeTrain.from_events("0 1\n")
    with pytest.raises(FormatError):
        SpikeTrain.from_events("# steps=2 channels=2\n2 0\n")
    with pytest.raises(FormatError):
        SpikeTrain.from_events("# steps=2 channels=2\n1 0\n1 0\n")


def test_concat_offsets_second_train():
    a = SpikeTrain(np.array([[1, 0], [0, 1]]))
    b = SpikeTrain(np.array([[0], [1]]))
    c = concat_trains(a, b)
    assert c.channels == 3
    np.testing.assert_array_equal(c.raster, [[1, 0, 0], [0, 1, 1]])
    assert c.total() == a.total() + b.total()
    with pytest.raises(ShapeError):
        concat_trains(a, SpikeTrain.silent(3, 1))


def test_raster_validation():
    with pytest.raises(EncodingError):
        SpikeTrain(np.array([[2, 0]]))
    with pytest.raises(ShapeError):
        SpikeTrain(np.zeros(3, dtype=bool))
