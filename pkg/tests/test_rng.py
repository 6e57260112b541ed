"""Reproducibility of the (seed, path) stream tree."""
import numpy as np

from displab.rng import RngStream


def test_same_stream_replays():
    a = RngStream(42).generator().standard_normal(16)
    b = RngStream(42).generator().standard_normal(16)
    assert np.array_equal(a, b)


def test_distinct_paths_differ():
    root = RngStream(42)
    a = root.child(0).generator().standard_normal(16)
    b = root.child(1).generator().standard_normal(16)
    c = root.child(0, 0).generator().standard_normal(16)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_child_path_composition():
    assert RngStream(7).child(1).child(2, 3).path == (1, 2, 3)
    assert RngStream(7, (1, 2)).child(3).path == (1, 2, 3)


def test_negative_and_large_components():
    a = RngStream(-5).child(2**40).generator().random(4)
    b = RngStream(-5).child(2**40).generator().random(4)
    assert np.array_equal(a, b)


def test_known_values_pin():
    # regression pin: any change here means every seeded result in the
    # package shifts, which would invalidate archived reports
    vals = RngStream(0).generator().random(3)
    expected = [0.9563318409402418, 0.7801430651474189, 0.5273238235454353]
    assert np.allclose(vals, expected, rtol=0, atol=1e-15)


def test_streams_independent_of_interleaving():
    root = RngStream(9)
    g01 = root.child(0).generator()
    direct = root.child(1).generator().random(8)
    _ = g01.random(100)  # consuming one stream does not move its siblings
    again = root.child(1).generator().random(8)
    assert np.array_equal(direct, again)
