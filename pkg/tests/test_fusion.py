import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vidsal.core import SaliencyMap, normalize_minmax, normalize_sum, resize
from vidsal.errors import AllZeroMap, DegenerateScores, EmptyList, ZeroEntropyDenominator
from vidsal.fusion import (Branch, ConsistencyScores, FusionParams, compactness, consistency, entropy, fuse,
                           fuse_traced, interaction_map, select_map, spatial_ensemble_fuse)

N = 32


def pixels(points, w=N, h=N):
    v = np.zeros((h, w))
    for x, y in points:
        v[y, x] = 1.0
    return SaliencyMap(v)


def uniform(w=N, h=N):
    return SaliencyMap(np.ones((h, w)))


def mean_distance_reference(values):
    """Weighted mean distance to the weighted centroid, by explicit loops."""
    h, w = len(values), len(values[0])
    total = sum(sum(r) for r in values)
    cx = sum(values[y][x] * x for y in range(h) for x in range(w)) / total
    cy = sum(values[y][x] * y for y in range(h) for x in range(w)) / total
    return sum(values[y][x] / total * math.hypot(x - cx, y - cy) for y in range(h) for x in range(w))


positive_maps = arrays(np.float64, (6, 7), elements=st.floats(0, 10, allow_nan=False)).filter(lambda a: a.sum() > 0)


# -- entropy -------------------------------------------------------------------

def test_entropy_uniform():
    assert entropy(uniform(8, 5)) == pytest.approx(math.log(40), abs=1e-12)


def test_entropy_point():
    assert entropy(pixels([(3, 3)])) == 0.0


def test_entropy_two_pixels():
    assert entropy(pixels([(0, 0), (5, 9)])) == pytest.approx(math.log(2), abs=1e-15)


def test_entropy_all_zero():
    with pytest.raises(AllZeroMap):
        entropy(SaliencyMap.zeros(4, 4))


# -- consistency ---------------------------------------------------------------

def test_consistency_uniform():
    c = consistency(uniform(), uniform())
    assert c.c_s2t == pytest.approx(1.0, abs=1e-12) and c.c_t2s == pytest.approx(1.0, abs=1e-12)


def test_consistency_swap(rng):
    s, t = SaliencyMap(rng.random((9, 11))), SaliencyMap(rng.random((9, 11)) ** 2)
    a, b = consistency(s, t), consistency(t, s)
    assert (a.c_s2t, a.c_t2s) == (b.c_t2s, b.c_s2t)


def test_consistency_overlap_single_pixel():
    c = consistency(pixels([(1, 0), (2, 0)]), pixels([(2, 0), (3, 0)]))
    assert (c.c_s2t, c.c_t2s) == (0.0, 0.0)


def test_consistency_errors():
    with pytest.raises(AllZeroMap):
        consistency(pixels([(0, 0), (1, 0)]), pixels([(5, 5), (6, 5)]))
    with pytest.raises(ZeroEntropyDenominator):
        consistency(pixels([(0, 0)]), uniform())


# -- interaction ---------------------------------------------------------------

def test_interaction_equal_maps(rng):
    s = SaliencyMap(rng.random((5, 5)))
    out = interaction_map(s, s, ConsistencyScores(0.3, 0.8))
    assert np.allclose(out.values, normalize_sum(s).values, atol=1e-15)


def test_interaction_equal_scores(rng):
    s, t = SaliencyMap(rng.random((5, 5))), SaliencyMap(rng.random((5, 5)))
    out = interaction_map(s, t, ConsistencyScores(0.6, 0.6))
    assert np.allclose(out.values, (normalize_sum(s).values + normalize_sum(t).values) / 2, atol=1e-15)


def test_interaction_exchange_symmetry(rng):
    s, t = SaliencyMap(rng.random((5, 5))), SaliencyMap(rng.random((5, 5)))
    a = interaction_map(s, t, ConsistencyScores(0.2, 0.9))
    b = interaction_map(t, s, ConsistencyScores(0.9, 0.2))
    assert np.allclose(a.values, b.values, atol=1e-15)


def test_interaction_degenerate():
    with pytest.raises(DegenerateScores):
        interaction_map(uniform(), uniform(), ConsistencyScores(0.0, 0.0))


# -- compactness ---------------------------------------------------------------

def test_compactness_examples():
    assert compactness(pixels([(4, 7)])) == 0.0
    assert compactness(pixels([(2, 3), (12, 3)])) == pytest.approx(5.0, abs=1e-12)
    assert compactness(uniform(3, 1)) == pytest.approx(2 / 3, abs=1e-12)


def test_compactness_matches_reference(rng):
    v = rng.random((6, 9)) ** 3
    assert compactness(SaliencyMap(v)) == pytest.approx(mean_distance_reference(v.tolist()), abs=1e-12)


def test_compactness_translation_invariant(rng):
    blob = rng.random((5, 6))
    a, b = np.zeros((20, 20)), np.zeros((20, 20))
    a[2:7, 3:9] = blob
    b[11:16, 9:15] = blob
    assert compactness(SaliencyMap(a)) == pytest.approx(compactness(SaliencyMap(b)), abs=1e-12)


@pytest.mark.parametrize("r", [2, 3])
def test_compactness_scale_covariant(r):
    yy, xx = np.mgrid[:24, :24]
    m = SaliencyMap(np.exp(-((xx - 11) ** 2 + (yy - 13) ** 2) / (2 * 3.0 ** 2)))
    up = resize(m, 24 * r, 24 * r)
    assert compactness(up) == pytest.approx(r * compactness(m), rel=0.05)


def test_select_map():
    point, spread = pixels([(5, 5)]), pixels([(0, 0), (10, 0)])
    assert select_map(point, spread) is point
    a, b = pixels([(0, 0), (2, 0)]), pixels([(9, 9), (9, 11)])
    assert select_map(a, b) is a
    assert select_map(spread, spread) is spread


# -- fuse ----------------------------------------------------------------------

def test_fuse_idempotent_edge_cases():
    for s in (pixels([(7, 3)]), uniform(), pixels([(0, 0), (31, 31)])):
        assert np.max(np.abs(fuse(s, s).values - normalize_sum(s).values)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(positive_maps)
def test_fuse_idempotent(a):
    s = SaliencyMap(a)
    assert np.max(np.abs(fuse(s, s).values - normalize_sum(s).values)) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(positive_maps, positive_maps, st.floats(0.5, 4.0))
def test_fuse_output_valid_and_lambda_rule(a, b, omega):
    out, tr = fuse_traced(SaliencyMap(a), SaliencyMap(b), FusionParams(omega))
    assert out.values.min() >= 0 and abs(out.total() - 1) <= 1e-9
    assert 0 <= tr.lam <= 1
    if tr.d_int is not None and tr.d_int >= omega * min(tr.d_s, tr.d_t):
        assert tr.lam == 0


def test_fuse_uniform_takes_blend_branch():
    out, tr = fuse_traced(uniform(), uniform())
    assert tr.branch is Branch.BLEND and tr.lam == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(out.values, 1 / N ** 2, atol=1e-15)


def test_fuse_compactness_failure_trace():
    # s: two adjacent pixels (entropy ln 2, spread 0.5); t: uniform (entropy 10 ln 2).
    # product is proportional to s, so c_s2t = ln2 / (10 ln2) = 0.1 and c_t2s = 1.
    s, t = pixels([(0, 0), (1, 0)]), uniform()
    out, tr = fuse_traced(s, t)
    assert tr.scores.c_s2t == pytest.approx(0.1, abs=1e-12)
    assert tr.scores.c_t2s == pytest.approx(1.0, abs=1e-12)
    assert tr.d_s == pytest.approx(0.5, abs=1e-12)
    expected_int = (np.ones((N, N)) / N ** 2 + 0.1 * normalize_sum(s).values) / 1.1
    assert tr.d_int == pytest.approx(mean_distance_reference(expected_int.tolist()), abs=1e-9)
    assert tr.d_int >= 2.1 * 0.5
    assert tr.branch is Branch.COMPACTNESS and tr.lam == 0.0
    assert np.allclose(out.values, normalize_sum(s).values, atol=1e-15)


def test_fuse_disjoint_fallback():
    s = pixels([(x, y) for x in range(2, 5) for y in range(2, 5)])
    t = pixels([(x, y) for x in range(20, 25) for y in range(20, 25)])
    out, tr = fuse_traced(s, t)
    assert tr.branch is Branch.DEGENERATE and tr.lam == 0.0
    assert tr.selected == "spatial"
    assert np.allclose(out.values, normalize_sum(s).values, atol=1e-15)
    out2, tr2 = fuse_traced(t, s)
    assert tr2.selected == "temporal"
    assert np.allclose(out2.values, normalize_sum(s).values, atol=1e-15)


def test_fuse_lambda_clamped():
    # both scores are about 1.37 here; omega = 3 passes the compactness test
    s, t = SaliencyMap([[0.8, 0.1, 0.1]]), SaliencyMap([[0.1, 0.8, 0.1]])
    _, tr = fuse_traced(s, t, FusionParams(omega=3.0))
    assert min(tr.scores.c_s2t, tr.scores.c_t2s) > 1
    assert tr.branch is Branch.BLEND and tr.lam == 1.0
    _, tr = fuse_traced(s, t, FusionParams(omega=2.1))
    assert tr.branch is Branch.COMPACTNESS and tr.lam == 0.0


def test_fuse_one_empty_input():
    s = pixels([(3, 3), (4, 3)])
    out, tr = fuse_traced(s, SaliencyMap.zeros(N, N))
    assert tr.branch is Branch.SINGLE and tr.selected == "spatial"
    assert np.array_equal(out.values, normalize_sum(s).values)
    with pytest.raises(AllZeroMap):
        fuse(SaliencyMap.zeros(4, 4), SaliencyMap.zeros(4, 4))


def test_fusion_params_validation():
    with pytest.raises(ValueError):
        FusionParams(omega=0)


# -- spatial ensemble ----------------------------------------------------------

def test_ensemble_single(rng):
    m = SaliencyMap(rng.random((6, 6)))
    out = spatial_ensemble_fuse([m])
    assert np.allclose(out.values, normalize_sum(normalize_minmax(m)).values, atol=1e-15)


def test_ensemble_identical(rng):
    m = SaliencyMap(rng.random((6, 6)))
    assert np.allclose(spatial_ensemble_fuse([m, m]).values, spatial_ensemble_fuse([m]).values, atol=1e-15)


def test_ensemble_permutation(rng):
    maps = [SaliencyMap(rng.random((8, 8)) * k) for k in range(1, 6)]
    a = spatial_ensemble_fuse(maps).values
    b = spatial_ensemble_fuse(maps[::-1]).values
    c = spatial_ensemble_fuse([maps[i] for i in (2, 0, 4, 1, 3)]).values
    assert np.array_equal(a, b) and np.array_equal(a, c)


def test_ensemble_empty():
    with pytest.raises(EmptyList):
        spatial_ensemble_fuse([])
