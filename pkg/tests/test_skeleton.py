"""Keypoint consolidation, centralization, gap repair, truncation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_raw_frame, make_series
from sensorplace.errors import (
    AllMissingSiteError,
    EmptyEnvelopeError,
    EmptyFrameError,
    GapTooLongError,
    RateMismatchError,
    SiteExcludedError,
    TooShortError,
    UnknownSiteError,
)
from sensorplace.skeleton import (
    DEFAULT_ROSTER,
    MERGE_SOURCES,
    SITE_ORDER,
    centralize,
    decimation_stride,
    infer_sample_rate,
    merge_keypoints,
    preprocess_recording,
    repair_gaps,
    select_sites,
    truncate_series,
)

FACE = MERGE_SOURCES["HD"]
HIPS = MERGE_SOURCES["PE"]


# --- merging ----------------------------------------------------------------

def test_merge_produces_twelve_sites():
    frame = merge_keypoints(make_raw_frame(seed=1))
    assert frame.points.shape == (12, 2)
    assert frame.valid.all()


def test_merge_head_is_mean_of_facial_keypoints():
    raw = make_raw_frame(seed=2)
    frame = merge_keypoints(raw)
    expected = raw.keypoints[list(FACE), :2].mean(axis=0)
    np.testing.assert_allclose(frame.point("HD"), expected, rtol=0, atol=1e-15)


def test_merge_pelvis_is_mean_of_hips():
    raw = make_raw_frame(seed=3)
    frame = merge_keypoints(raw)
    expected = raw.keypoints[list(HIPS), :2].mean(axis=0)
    np.testing.assert_allclose(frame.point("PE"), expected, rtol=0, atol=1e-15)


def test_merge_passthrough_sites_copy_coordinates():
    raw = make_raw_frame(seed=4)
    frame = merge_keypoints(raw)
    assert frame.point("LW").tolist() == raw.keypoints[9, :2].tolist()
    assert frame.point("RF").tolist() == raw.keypoints[16, :2].tolist()


def test_merge_low_confidence_site_is_missing():
    raw = make_raw_frame(seed=5)
    kps = raw.keypoints.copy()
    kps[9, 2] = 0.1  # left wrist below the default 0.3 gate
    frame = merge_keypoints(make_raw_frame(xy=kps[:, :2], conf=kps[:, 2]))
    assert not frame.is_valid("LW")
    assert frame.is_valid("RW")


def test_merge_threshold_is_inclusive():
    raw = make_raw_frame(seed=6)
    conf = np.full(17, 0.3)
    frame = merge_keypoints(make_raw_frame(xy=raw.keypoints[:, :2], conf=conf))
    assert frame.valid.all()


def test_merge_uses_only_confident_facial_sources():
    raw = make_raw_frame(seed=7)
    conf = np.ones(17)
    conf[list(FACE[1:])] = 0.0  # only the nose survives
    frame = merge_keypoints(make_raw_frame(xy=raw.keypoints[:, :2], conf=conf))
    np.testing.assert_allclose(frame.point("HD"), raw.keypoints[FACE[0], :2])


@given(st.randoms(use_true_random=False))
def test_merge_is_permutation_invariant_in_constituents(rnd):
    raw = make_raw_frame(seed=8)
    xy = raw.keypoints[:, :2].copy()
    shuffled = xy.copy()
    order = list(FACE)
    rnd.shuffle(order)
    shuffled[list(FACE)] = xy[order]
    a = merge_keypoints(make_raw_frame(xy=xy))
    b = merge_keypoints(make_raw_frame(xy=shuffled))
    np.testing.assert_allclose(a.point("HD"), b.point("HD"), rtol=0, atol=1e-12)


# --- centralization -----------------------------------------------------------

coord = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, width=64)


@given(st.lists(st.tuples(coord, coord), min_size=17, max_size=17))
def test_centralize_centroid_lands_on_center(pts):
    frame = merge_keypoints(make_raw_frame(xy=np.array(pts)))
    centered = centralize(frame)
    centroid = centered.points[centered.valid].mean(axis=0)
    np.testing.assert_allclose(centroid, [0.5, 0.5], rtol=0, atol=1e-9)


@given(st.lists(st.tuples(coord, coord), min_size=17, max_size=17))
def test_centralize_is_exactly_idempotent(pts):
    frame = merge_keypoints(make_raw_frame(xy=np.array(pts)))
    once = centralize(frame)
    twice = centralize(once)
    assert np.array_equal(once.points, twice.points)
    assert np.array_equal(once.valid, twice.valid)


@given(
    st.lists(st.tuples(coord, coord), min_size=17, max_size=17),
    st.tuples(coord, coord),
)
def test_centralize_translation_invariance(pts, offset):
    xy = np.array(pts)
    a = centralize(merge_keypoints(make_raw_frame(xy=xy)))
    b = centralize(merge_keypoints(make_raw_frame(xy=xy + np.array(offset))))
    np.testing.assert_allclose(a.points, b.points, rtol=0, atol=1e-9)


def test_centralize_ignores_missing_points():
    raw = make_raw_frame(seed=9)
    conf = np.ones(17)
    conf[9] = 0.0  # LW missing
    frame = merge_keypoints(make_raw_frame(xy=raw.keypoints[:, :2], conf=conf))
    before = frame.point("LW").copy()
    centered = centralize(frame)
    assert not centered.is_valid("LW")
    assert centered.point("LW").tolist() == before.tolist()


def test_centralize_rejects_empty_frame():
    raw = make_raw_frame(seed=10)
    frame = merge_keypoints(make_raw_frame(xy=raw.keypoints[:, :2], conf=0.0))
    with pytest.raises(EmptyFrameError):
        centralize(frame)


def test_centralize_degenerate_coincident_points():
    frame = merge_keypoints(make_raw_frame(xy=np.full((17, 2), 0.25)))
    centered = centralize(frame)
    np.testing.assert_allclose(centered.points, 0.5, rtol=0, atol=1e-15)


# --- site selection -------------------------------------------------------------

def test_select_sites_follows_roster_order():
    frame = merge_keypoints(make_raw_frame(seed=11))
    pts, valid = select_sites(frame, ("RF", "LW"))
    assert pts.shape == (2, 2)
    assert pts[0].tolist() == frame.point("RF").tolist()
    assert pts[1].tolist() == frame.point("LW").tolist()
    assert valid.all()


def test_select_sites_excludes_head_by_default():
    frame = merge_keypoints(make_raw_frame(seed=12))
    with pytest.raises(SiteExcludedError):
        select_sites(frame, ("HD", "LW"))
    pts, _ = select_sites(frame, ("HD", "LW"), allow_head=True)
    assert pts.shape == (2, 2)


def test_select_sites_rejects_unknown_and_duplicates():
    frame = merge_keypoints(make_raw_frame(seed=13))
    with pytest.raises(UnknownSiteError):
        select_sites(frame, ("LW", "XX"))
    with pytest.raises(UnknownSiteError):
        select_sites(frame, ("LW", "LW"))


# --- gap repair -------------------------------------------------------------------

def _ramp(n_sites=2, n_frames=12):
    # x walks 0,1,2,..., y = 10*x; easy to predict interpolation
    base = np.arange(n_frames, dtype=np.float64)
    points = np.stack(
        [np.stack([base + 100 * s, 10 * (base + 100 * s)], axis=1) for s in range(n_sites)]
    )
    valid = np.ones((n_sites, n_frames), dtype=bool)
    return points, valid


def test_repair_fills_single_interior_gap_linearly():
    points, valid = _ramp()
    corrupted = points.copy()
    corrupted[0, 5] = -999.0
    valid[0, 5] = False
    out = repair_gaps(corrupted, valid, max_gap=3)
    np.testing.assert_allclose(out[0, 5], points[0, 5])


def test_repair_fills_longer_run_with_even_fractions():
    points, valid = _ramp()
    corrupted = points.copy()
    corrupted[1, 3:6] = 0.0
    valid[1, 3:6] = False
    out = repair_gaps(corrupted, valid, max_gap=3)
    np.testing.assert_allclose(out[1], points[1])


def test_repair_never_touches_valid_samples():
    points, valid = _ramp()
    corrupted = points.copy()
    corrupted[0, 4:6] = 7.7
    valid[0, 4:6] = False
    out = repair_gaps(corrupted, valid, max_gap=5)
    keep = valid[0]
    np.testing.assert_array_equal(out[0][keep], points[0][keep])


def test_repair_rejects_gap_over_limit():
    points, valid = _ramp(n_frames=20)
    valid[0, 5:9] = False
    with pytest.raises(GapTooLongError) as err:
        repair_gaps(points, valid, max_gap=3, sites=("LW", "RW"))
    assert "LW" in str(err.value)


def test_repair_trims_to_all_valid_envelope():
    points, valid = _ramp(n_frames=10)
    valid[0, 0] = False   # leading miss on site 0
    valid[1, 9] = False   # trailing miss on site 1
    out = repair_gaps(points, valid, max_gap=3)
    assert out.shape[1] == 8
    np.testing.assert_array_equal(out, points[:, 1:9])


def test_repair_rejects_site_with_no_samples():
    points, valid = _ramp()
    valid[1, :] = False
    with pytest.raises(AllMissingSiteError):
        repair_gaps(points, valid)


def test_repair_rejects_empty_envelope():
    points, valid = _ramp(n_frames=6)
    valid[0, :3] = False
    valid[1, 3:] = False
    with pytest.raises(EmptyEnvelopeError):
        repair_gaps(points, valid)


@given(st.data())
def test_repair_output_is_gap_free_and_preserves_valid(data):
    n_frames = data.draw(st.integers(8, 30))
    points, valid = _ramp(n_sites=3, n_frames=n_frames)
    # knock out a few interior samples, keeping ends intact
    for s in range(3):
        for _ in range(data.draw(st.integers(0, 3))):
            i = data.draw(st.integers(1, n_frames - 2))
            valid[s, i] = False
    try:
        out = repair_gaps(points.copy(), valid, max_gap=4)
    except GapTooLongError:
        return
    assert np.isfinite(out).all()
    np.testing.assert_array_equal(
        out[valid[:, : out.shape[1]]], points[:, : out.shape[1]][valid[:, : out.shape[1]]]
    )


# --- truncation and rates ------------------------------------------------------------

def test_truncate_exact_length_is_identity():
    series = make_series("a", np.zeros((2, 500, 2)) + 0.5)
    assert truncate_series(series, 500) is series


def test_truncate_too_short_raises():
    series = make_series("a", np.zeros((2, 499, 2)) + 0.5)
    with pytest.raises(TooShortError):
        truncate_series(series, 500)


def test_truncate_first_keeps_prefix():
    pts = np.arange(2 * 10 * 2, dtype=np.float64).reshape(2, 10, 2)
    series = make_series("a", pts)
    cut = truncate_series(series, 4, mode="first")
    np.testing.assert_array_equal(cut.points, pts[:, :4])


def test_truncate_uniform_spans_whole_series():
    pts = np.arange(1 * 10 * 2, dtype=np.float64).reshape(1, 10, 2)
    series = make_series("a", pts)
    cut = truncate_series(series, 5, mode="uniform")
    np.testing.assert_array_equal(cut.points, pts[:, [0, 2, 4, 6, 8]])


def test_infer_sample_rate_uses_median_spacing():
    t = np.arange(50) / 10.0
    t[10] += 0.003  # one jittered stamp should not shift the median
    assert infer_sample_rate(t) == pytest.approx(10.0, rel=1e-6)


def test_decimation_stride_accepts_integer_multiples():
    assert decimation_stride(10.0, 10.0) == 1
    assert decimation_stride(30.0, 10.0) == 3
    assert decimation_stride(30.02, 10.0) == 3  # within relative tolerance


def test_decimation_stride_rejects_bad_ratios():
    with pytest.raises(RateMismatchError):
        decimation_stride(25.0, 10.0)
    with pytest.raises(RateMismatchError):
        decimation_stride(5.0, 10.0)


# --- full preprocessing --------------------------------------------------------------

def test_preprocess_end_to_end(raw_walk_frames):
    series = preprocess_recording(raw_walk_frames, "walk", length=50)
    assert series.activity_id == "walk"
    assert series.sites == DEFAULT_ROSTER
    assert series.length == 50
    assert series.sample_rate == pytest.approx(10.0)


def test_preprocess_full_length_when_uncapped(raw_walk_frames):
    series = preprocess_recording(raw_walk_frames, "walk", length=None)
    assert series.length == 60


def test_preprocess_is_deterministic(raw_walk_frames):
    a = preprocess_recording(raw_walk_frames, "walk", length=50)
    b = preprocess_recording(raw_walk_frames, "walk", length=50)
    assert np.array_equal(a.points, b.points)


def test_preprocess_decimates_to_target_rate(raw_walk_frames):
    fast = [
        make_raw_frame(t=i / 30.0, xy=f.keypoints[:, :2])
        for i, f in enumerate(np.repeat(raw_walk_frames, 3))
    ]
    series = preprocess_recording(fast, "walk", length=None, target_rate=10.0)
    assert series.length == 60
    assert series.sample_rate == pytest.approx(10.0)


def test_preprocess_repairs_confidence_dropouts(raw_walk_frames):
    frames = list(raw_walk_frames)
    mid = frames[30]
    conf = np.ones(17)
    conf[9] = 0.0  # LW invisible for one frame
    frames[30] = make_raw_frame(t=mid.t, xy=mid.keypoints[:, :2], conf=conf)
    series = preprocess_recording(frames, "walk", length=50)
    assert series.length == 50
    assert np.isfinite(series.points).all()


def test_preprocess_rejects_tiny_recordings():
    with pytest.raises(TooShortError):
        preprocess_recording([make_raw_frame()], "walk")


def test_preprocess_too_few_frames_after_pipeline(raw_walk_frames):
    with pytest.raises(TooShortError):
        preprocess_recording(raw_walk_frames, "walk", length=500)


def test_site_order_default_roster_come_first():
    assert SITE_ORDER[:5] == DEFAULT_ROSTER
    assert sorted(SITE_ORDER[5:]) == list(SITE_ORDER[5:])
