import numpy as np
import pytest

from anyframe import (
    FusionMaps,
    TaskKind,
    coverage_fusion_maps,
    fill_unfillable,
    fuse,
    temporal_weights,
)
from anyframe.errors import (
    DegenerateFusionError,
    DegenerateInputError,
    InvalidInputError,
)

from oracles import fuse_oracle, weights_oracle


def test_weight_spot_values_are_exact():
    def pair(t):
        w = temporal_weights(t)
        return (w.w0, w.w1)

    assert pair(0.5) == (0.5, 0.5)
    assert pair(0.0) == (1.0, 0.0)
    assert pair(1.0) == (0.0, 1.0)
    assert pair(2.0) == (1.0 / 3.0, 2.0 / 3.0)
    assert pair(-1.0) == (2.0 / 3.0, 1.0 / 3.0)


def test_weights_match_rational_oracle():
    rng = np.random.default_rng(12)
    for t in rng.uniform(-3.0, 4.0, 1000):
        w = temporal_weights(float(t))
        e0, e1 = weights_oracle(float(t))
        assert w.w0 == pytest.approx(e0, abs=1e-12)
        assert w.w1 == pytest.approx(e1, abs=1e-12)


def test_weights_sum_to_one_and_stay_nonnegative():
    for t in np.linspace(-3.0, 4.0, 1000):
        w = temporal_weights(float(t))
        assert abs(w.w0 + w.w1 - 1.0) <= 1e-12
        assert w.w0 >= 0.0 and w.w1 >= 0.0


def test_weights_continuous_at_branch_points():
    # both formulas agree exactly where the domain splits
    for t in (0.0, 1.0):
        inside = temporal_weights(t)
        d = 1.0 - 2.0 * t
        outside = ((1.0 - t) / d, -t / d)
        assert inside.w0 == outside[0]
        assert inside.w1 == outside[1]


def test_weights_reject_nonfinite():
    with pytest.raises(InvalidInputError):
        temporal_weights(float("inf"))
    with pytest.raises(InvalidInputError):
        temporal_weights(float("nan"))


def test_coverage_maps_gate_on_epsilon():
    c0 = np.array([[1.0, 5e-5], [0.0, 2.0]])
    c1 = np.array([[0.0, 1.0], [0.0, 1.0]])
    maps = coverage_fusion_maps(c0, c1, TaskKind.INTERPOLATION)
    np.testing.assert_array_equal(maps.m0, [[1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_array_equal(maps.m1, [[0.0, 1.0], [0.0, 1.0]])
    np.testing.assert_array_equal(maps.unfillable, [[False, False], [True, False]])


def test_fuse_matches_brute_force():
    rng = np.random.default_rng(13)
    for _ in range(50):
        h, w = int(rng.integers(2, 9)), int(rng.integers(2, 9))
        chans = int(rng.choice([0, 3]))
        shape = (h, w) if chans == 0 else (h, w, chans)
        i0t = rng.random(shape)
        i1t = rng.random(shape)
        m0 = rng.integers(0, 2, (h, w)).astype(np.float64)
        m1 = rng.integers(0, 2, (h, w)).astype(np.float64)
        m1[(m0 == 0) & (m1 == 0)] = 1.0   # keep denominators alive
        t = float(rng.uniform(0.05, 0.95))
        weights = temporal_weights(t)
        residual = rng.uniform(-0.05, 0.05, shape) if rng.random() < 0.5 else None
        maps = FusionMaps(m0=m0, m1=m1, unfillable=np.zeros((h, w), bool))
        got = fuse(i0t, i1t, maps, weights, residual=residual)
        want = fuse_oracle(i0t, i1t, m0, m1, weights.w0, weights.w1, residual)
        np.testing.assert_allclose(got, want, atol=1e-12)


def test_fuse_reports_degenerate_pixels():
    i = np.zeros((3, 3))
    maps = FusionMaps(m0=np.zeros((3, 3)), m1=np.zeros((3, 3)),
                      unfillable=np.zeros((3, 3), bool))
    maps.unfillable[0, 0] = True   # one pixel is excused, the rest are not
    with pytest.raises(DegenerateFusionError) as err:
        fuse(i, i, maps, temporal_weights(0.5))
    assert (0, 0) not in err.value.pixels
    assert (1, 1) in err.value.pixels


def test_fuse_zeroes_unfillable_pixels():
    i0t = np.full((2, 2), 0.8)
    i1t = np.full((2, 2), 0.4)
    maps = FusionMaps(m0=np.array([[1.0, 0.0], [1.0, 1.0]]),
                      m1=np.array([[1.0, 0.0], [1.0, 1.0]]),
                      unfillable=np.array([[False, True], [False, False]]))
    out = fuse(i0t, i1t, maps, temporal_weights(0.5))
    assert out[0, 1] == 0.0
    assert out[0, 0] == pytest.approx(0.6)


def test_fuse_applies_one_sided_coverage():
    i0t = np.full((1, 2), 0.9)
    i1t = np.full((1, 2), 0.1)
    maps = FusionMaps(m0=np.array([[1.0, 0.0]]), m1=np.array([[0.0, 1.0]]),
                      unfillable=np.zeros((1, 2), bool))
    out = fuse(i0t, i1t, maps, temporal_weights(0.5))
    assert out[0, 0] == 0.9   # only the first frame covers this pixel
    assert out[0, 1] == 0.1


def test_fuse_clips_residual_overshoot():
    i = np.full((2, 2), 0.9)
    maps = FusionMaps(m0=np.ones((2, 2)), m1=np.ones((2, 2)),
                      unfillable=np.zeros((2, 2), bool))
    out = fuse(i, i, maps, temporal_weights(0.5), residual=np.full((2, 2), 0.5))
    assert (out == 1.0).all()


def test_fuse_rejects_residual_shape_mismatch():
    i = np.zeros((2, 2, 3))
    maps = FusionMaps(m0=np.ones((2, 2)), m1=np.ones((2, 2)),
                      unfillable=np.zeros((2, 2), bool))
    with pytest.raises(InvalidInputError):
        fuse(i, i, maps, temporal_weights(0.5), residual=np.zeros((2, 2)))


def test_fill_diffuses_into_hole():
    img = np.full((9, 9), 0.25)
    holes = np.zeros((9, 9), bool)
    holes[3:6, 3:6] = True
    img[holes] = 0.0
    out = fill_unfillable(img, holes)
    # constant boundary: diffusion converges to the same constant
    np.testing.assert_allclose(out[holes], 0.25, atol=1e-3)
    np.testing.assert_array_equal(out[~holes], img[~holes])


def test_fill_no_holes_returns_copy():
    img = np.random.default_rng(2).random((5, 5))
    out = fill_unfillable(img, np.zeros((5, 5), bool))
    np.testing.assert_array_equal(out, img)
    assert out is not img


def test_fill_all_holes_is_degenerate():
    with pytest.raises(DegenerateInputError):
        fill_unfillable(np.zeros((4, 4)), np.ones((4, 4), bool))


def test_fill_gradient_boundary_interpolates():
    # left edge 0, right edge 1, hole spanning the middle: the filled values
    # must increase monotonically along x
    img = np.zeros((5, 7))
    img[:, -1] = 1.0
    holes = np.zeros((5, 7), bool)
    holes[:, 1:-1] = True
    img[holes] = 0.0
    out = fill_unfillable(img, holes)
    mid = out[2]
    assert all(np.diff(mid) > -1e-6)
    assert 0.0 < mid[3] < 1.0


def test_fill_multichannel():
    img = np.full((6, 6, 3), 0.5)
    holes = np.zeros((6, 6), bool)
    holes[2:4, 2:4] = True
    img[holes] = 0.0
    out = fill_unfillable(img, holes)
    np.testing.assert_allclose(out[holes], 0.5, atol=1e-3)
