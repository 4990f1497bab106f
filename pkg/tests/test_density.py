import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vidsal.density import (DensityParams, FixationRecord, default_sigma_spatial, density_map,
                            fixations_by_frame, frame_index)


def fix(x, y, t, subj="s"):
    return FixationRecord(subj, t, x, y)


@pytest.mark.parametrize("w, h, expected", [(1280, 720, 38.4), (720, 1280, 38.4), (100, 100, 3.0)])
def test_default_sigma_spatial(w, h, expected):
    assert default_sigma_spatial(w, h) == pytest.approx(expected, abs=1e-12)


def test_peak_and_one_sigma():
    params = DensityParams(sigma_d=3.0)
    m = density_map([fix(10, 10, 0.5)], 0.5, 40, 30, params).values
    assert m[10, 10] == 1.0
    assert m[10, 13] == pytest.approx(math.exp(-0.5), abs=1e-12)
    assert m[13, 10] == pytest.approx(math.exp(-0.5), abs=1e-12)


def test_fixation_before_frame_is_ignored():
    m = density_map([fix(10, 10, 0.45)], 0.5, 40, 30, DensityParams(3.0))
    assert m.is_zero()


def test_coincident_fixations_add():
    m = density_map([fix(10, 10, 0.5), fix(10, 10, 0.5, "b")], 0.5, 40, 30, DensityParams(3.0))
    assert m.values[10, 10] == pytest.approx(2.0, abs=1e-12)


def test_empty_fixations():
    m = density_map([], 0.0, 8, 6, DensityParams(2.0))
    assert m.is_zero() and m.shape == (6, 8)


def test_out_of_bounds_rejected():
    with pytest.raises(ValueError):
        density_map([fix(8, 0, 0.0)], 0.0, 8, 6, DensityParams(2.0))


def test_matches_direct_formula(rng):
    params = DensityParams(sigma_d=2.5, sigma_t=0.1, epsilon_cutoff=0.0)
    fx = [fix(float(rng.integers(0, 20)), float(rng.integers(0, 15)), float(rng.uniform(0, 0.6)))
          for _ in range(12)]
    t = 0.2
    m = density_map(fx, t, 20, 15, params).values
    ref = np.zeros((15, 20))
    for y in range(15):
        for x in range(20):
            for f in fx:
                if f.t_f >= t:
                    ref[y, x] += math.exp(-((f.x_f - x) ** 2 + (f.y_f - y) ** 2) / (2 * 2.5 ** 2)) \
                        * math.exp(-((f.t_f - t) ** 2) / (2 * 0.1 ** 2))
    assert np.allclose(m, ref, atol=1e-12)


def test_temporal_cutoff_drops_far_future():
    params = DensityParams(sigma_d=2.0, sigma_t=0.1, epsilon_cutoff=1e-4)
    # exp(-0.5 * 5^2) ~ 3.7e-6 < 1e-4
    assert density_map([fix(3, 3, 0.5)], 0.0, 8, 8, params).is_zero()


def test_radially_non_increasing():
    m = density_map([fix(12, 9, 1.0)], 1.0, 25, 20, DensityParams(4.0)).values
    ys, xs = np.indices(m.shape)
    d = np.hypot(xs - 12, ys - 9).ravel()
    v = m.ravel()[np.argsort(d, kind="stable")]
    assert np.all(np.diff(v) <= 1e-15)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 15), st.integers(0, 11), st.floats(0, 0.4)), min_size=0, max_size=6),
       st.lists(st.tuples(st.integers(0, 15), st.integers(0, 11), st.floats(0, 0.4)), min_size=0, max_size=6))
def test_additivity(a, b):
    params = DensityParams(2.0)
    fa = [fix(x, y, t) for x, y, t in a]
    fb = [fix(x, y, t) for x, y, t in b]
    both = density_map(fa + fb, 0.1, 16, 12, params).values
    sep = density_map(fa, 0.1, 16, 12, params).values + density_map(fb, 0.1, 16, 12, params).values
    assert np.allclose(both, sep, atol=1e-9, rtol=0)


def test_temporal_monotonicity():
    params = DensityParams(3.0, 0.1, 0.0)
    near = density_map([fix(5, 5, 0.02)], 0.0, 12, 12, params).values
    far = density_map([fix(5, 5, 0.07)], 0.0, 12, 12, params).values
    nz = near > 0
    ratio = far[nz] / near[nz]
    assert np.all(ratio < 1)
    assert np.allclose(ratio, math.exp(-(0.07 ** 2 - 0.02 ** 2) / (2 * 0.01)), rtol=1e-9)


def test_frame_assignment():
    assert frame_index(2 / 30, 30.0) == 2
    fx = [fix(1, 2, 0.0), fix(3, 4, 0.05), fix(5, 6, 0.034)]
    per = fixations_by_frame(fx, 3, 30.0)
    assert per == [[(1, 2)], [(3, 4), (5, 6)], []]
