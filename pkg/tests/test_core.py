import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vidsal.core import NormState, SaliencyMap, VideoManifest, normalize_minmax, normalize_sum, resize
from vidsal.errors import AllZeroMap, ManifestInvalid

from oracles import bilinear_reference

grids = arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)),
               elements=st.floats(0, 100, allow_nan=False))


def test_normalize_sum_uniform():
    out = normalize_sum(SaliencyMap([[2, 2], [2, 2]]))
    assert np.allclose(out.values, 0.25)
    assert out.norm_state is NormState.SUM_ONE


def test_normalize_sum_proportional():
    assert np.allclose(normalize_sum(SaliencyMap([[3, 1]])).values, [[0.75, 0.25]])


def test_normalize_sum_all_zero():
    with pytest.raises(AllZeroMap):
        normalize_sum(SaliencyMap.zeros(3, 2))


@pytest.mark.parametrize("vals, expected", [
    ([[1, 3]], [[0, 1]]),
    ([[5, 5]], [[0, 0]]),
    ([[0, 0.5, 1]], [[0, 0.5, 1]]),
])
def test_normalize_minmax(vals, expected):
    out = normalize_minmax(SaliencyMap(vals))
    assert np.allclose(out.values, expected)
    assert out.norm_state is NormState.MIN_MAX


def test_resize_constant():
    out = resize(SaliencyMap(np.full((2, 2), 0.7)), 4, 4)
    assert out.shape == (4, 4)
    assert np.allclose(out.values, 0.7, atol=1e-15)


def test_resize_identity_and_state():
    m = normalize_sum(SaliencyMap(np.random.default_rng(0).random((5, 7))))
    out = resize(m, 7, 5)
    assert np.max(np.abs(out.values - m.values)) <= 1e-12
    assert out.norm_state is NormState.RAW


def test_resize_row_matches_reference():
    out = resize(SaliencyMap([[0.0, 1.0]]), 4, 1).values[0]
    ref = bilinear_reference([[0.0, 1.0]], 4, 1)[0]
    assert np.allclose(out, ref, atol=1e-15)
    assert np.all(np.diff(out) >= 0)


@pytest.mark.parametrize("src, dst", [((3, 5), (7, 2)), ((4, 4), (9, 9)), ((6, 3), (2, 5))])
def test_resize_matches_reference(src, dst):
    g = np.random.default_rng(1).random(src)
    out = resize(SaliencyMap(g), *dst).values
    assert np.allclose(out, bilinear_reference(g.tolist(), *dst), atol=1e-13)


def test_negative_rejected():
    with pytest.raises(ValueError):
        SaliencyMap([[0.0, -0.5]])


def test_values_read_only():
    m = SaliencyMap([[1.0, 2.0]])
    with pytest.raises(ValueError):
        m.values[0, 0] = 3.0


@settings(max_examples=50, deadline=None)
@given(grids)
def test_normalize_sum_idempotent(g):
    if not g.sum() > 0:
        return
    once = normalize_sum(SaliencyMap(g))
    twice = normalize_sum(once)
    assert abs(once.total() - 1) <= 1e-9
    assert np.allclose(once.values, twice.values, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(grids)
def test_minmax_range(g):
    v = normalize_minmax(SaliencyMap(g)).values
    assert v.min() >= 0 and v.max() <= 1


@settings(max_examples=50, deadline=None)
@given(grids, st.integers(1, 9), st.integers(1, 9))
def test_resize_non_negative(g, w, h):
    assert resize(SaliencyMap(g), w, h).values.min() >= 0


def test_manifest_validation(tmp_path):
    with pytest.raises(ManifestInvalid):
        VideoManifest("v", 4, 4, 0.0, ["a.png"])
    with pytest.raises(ManifestInvalid):
        VideoManifest("v", 4, 4, 30.0, [])
    m = VideoManifest("v", 4, 4, 25.0, ["a.png", "b.png"])
    assert m.n_frames == 2 and m.frame_time(1) == pytest.approx(0.04)
