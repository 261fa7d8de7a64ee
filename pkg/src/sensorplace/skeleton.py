"""Pose data model and skeleton preprocessing.

Raw input is a sequence of 2D pose-estimator frames, each carrying the 17
COCO keypoints (nose, eyes, ears, shoulders, elbows, wrists, hips, knees,
ankles) with per-keypoint confidences. Preprocessing consolidates them to
12 placement sites (the five facial keypoints merge into one head point,
the two hips into one pelvis point), translates each frame so the centroid
of its valid points sits at (0.5, 0.5), selects the configured placement
roster, repairs short gaps by linear interpolation, optionally decimates
to a target sample rate, and cuts every activity to one uniform length.

Coordinates are normalized image coordinates; values outside [0, 1] are
legal (estimators can emit slightly out-of-frame points).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AllMissingSiteError,
    EmptyEnvelopeError,
    EmptyFrameError,
    GapTooLongError,
    RateMismatchError,
    SiteExcludedError,
    TooShortError,
    UnknownSiteError,
)

# COCO-17 keypoint indices
NOSE = 0
LEFT_EYE = 1
RIGHT_EYE = 2
LEFT_EAR = 3
RIGHT_EAR = 4
LEFT_SHOULDER = 5
RIGHT_SHOULDER = 6
LEFT_ELBOW = 7
RIGHT_ELBOW = 8
LEFT_WRIST = 9
RIGHT_WRIST = 10
LEFT_HIP = 11
RIGHT_HIP = 12
LEFT_KNEE = 13
RIGHT_KNEE = 14
LEFT_ANKLE = 15
RIGHT_ANKLE = 16

NUM_KEYPOINTS = 17

# Placement sites in canonical order: the five-site evaluation roster first
# (left wrist, right wrist, pelvis, left ankle, right ankle), then the
# remaining sites alphabetically. Subset labels, tie-breaks, and vector
# layouts all follow this order.
SITE_ORDER = ("LW", "RW", "PE", "LF", "RF", "HD", "LE", "LK", "LS", "RE", "RK", "RS")

SITE_NAMES = {
    "LW": "left wrist",
    "RW": "right wrist",
    "PE": "pelvis",
    "LF": "left ankle",
    "RF": "right ankle",
    "HD": "head",
    "LE": "left elbow",
    "LK": "left knee",
    "LS": "left shoulder",
    "RE": "right elbow",
    "RK": "right knee",
    "RS": "right shoulder",
}

DEFAULT_ROSTER = ("LW", "RW", "PE", "LF", "RF")

# Keypoints averaged into each site. Head and pelvis are consolidations;
# every other site passes a single keypoint through.
MERGE_SOURCES = {
    "LW": (LEFT_WRIST,),
    "RW": (RIGHT_WRIST,),
    "PE": (LEFT_HIP, RIGHT_HIP),
    "LF": (LEFT_ANKLE,),
    "RF": (RIGHT_ANKLE,),
    "HD": (NOSE, LEFT_EYE, RIGHT_EYE, LEFT_EAR, RIGHT_EAR),
    "LE": (LEFT_ELBOW,),
    "LK": (LEFT_KNEE,),
    "LS": (LEFT_SHOULDER,),
    "RE": (RIGHT_ELBOW,),
    "RK": (RIGHT_KNEE,),
    "RS": (RIGHT_SHOULDER,),
}

_SITE_INDEX = {site: i for i, site in enumerate(SITE_ORDER)}

# Centroid offsets at or below this are treated as zero, making
# centralization an exact projection (idempotent to the bit).
_CENTER_SNAP = 1e-12

_CENTER = 0.5


def site_key(site: str) -> tuple[int, str]:
    """Sort key realizing the canonical site order; unknown ids sort last,
    alphabetically."""
    return (_SITE_INDEX.get(site, len(SITE_ORDER)), site)


def canonical_sites(sites) -> tuple[str, ...]:
    """Return ``sites`` sorted canonically, rejecting duplicates."""
    sites = tuple(sites)
    if len(set(sites)) != len(sites):
        raise UnknownSiteError(f"duplicate site ids in {sites!r}")
    return tuple(sorted(sites, key=site_key))


@dataclass(frozen=True)
class RawPoseFrame:
    """One pose-estimator frame: timestamp plus a (17, 3) array of
    x, y, confidence rows in COCO keypoint order."""

    t: float
    keypoints: np.ndarray

    def __post_init__(self):
        kp = np.asarray(self.keypoints, dtype=np.float64)
        if kp.shape != (NUM_KEYPOINTS, 3):
            raise ValueError(f"expected ({NUM_KEYPOINTS}, 3) keypoints, got {kp.shape}")
        object.__setattr__(self, "keypoints", kp)


@dataclass(frozen=True)
class SkeletonFrame:
    """Twelve consolidated placement sites for one frame.

    ``points`` is (12, 2) in canonical site order; ``valid`` marks sites
    whose position is known (confidence gate passed at merge time).
    """

    points: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        ok = np.asarray(self.valid, dtype=bool)
        if pts.shape != (len(SITE_ORDER), 2) or ok.shape != (len(SITE_ORDER),):
            raise ValueError("skeleton frame must carry 12 points with a validity mask")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "valid", ok)

    def point(self, site: str) -> np.ndarray:
        return self.points[_SITE_INDEX[site]]

    def is_valid(self, site: str) -> bool:
        return bool(self.valid[_SITE_INDEX[site]])


@dataclass(frozen=True)
class SkeletonSeries:
    """Gap-free, uniform-length 2D trajectories for one activity.

    ``points`` is (n_sites, length, 2); every site has the same number of
    frames and no missing samples.
    """

    activity_id: str
    sites: tuple[str, ...]
    points: np.ndarray
    sample_rate: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        sites = tuple(self.sites)
        if pts.ndim != 3 or pts.shape[0] != len(sites) or pts.shape[2] != 2:
            raise ValueError(f"expected (n_sites, length, 2) points, got {pts.shape}")
        if pts.shape[1] < 1:
            raise ValueError("series must contain at least one frame")
        if not np.all(np.isfinite(pts)):
            raise ValueError("series contains non-finite points")
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "sites", sites)

    @property
    def length(self) -> int:
        return self.points.shape[1]

    def site_points(self, site: str) -> np.ndarray:
        try:
            return self.points[self.sites.index(site)]
        except ValueError:
            raise UnknownSiteError(f"site {site!r} not in series {self.activity_id!r}")


@dataclass(frozen=True)
class ActivitySet:
    """Two or more skeleton series sharing one site roster and length."""

    activities: tuple[SkeletonSeries, ...]

    def __post_init__(self):
        acts = tuple(self.activities)
        if len(acts) < 2:
            raise ValueError("an activity set needs at least two activities")
        ids = [a.activity_id for a in acts]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate activity ids: {ids}")
        first = acts[0]
        for a in acts[1:]:
            if a.sites != first.sites:
                raise ValueError(
                    f"site roster mismatch: {a.activity_id!r} has {a.sites}, "
                    f"{first.activity_id!r} has {first.sites}"
                )
            if a.length != first.length:
                raise ValueError(
                    f"length mismatch: {a.activity_id!r} has {a.length} frames, "
                    f"{first.activity_id!r} has {first.length}"
                )
        object.__setattr__(self, "activities", acts)

    @property
    def sites(self) -> tuple[str, ...]:
        return self.activities[0].sites

    @property
    def length(self) -> int:
        return self.activities[0].length

    def __len__(self) -> int:
        return len(self.activities)


def merge_keypoints(frame: RawPoseFrame, confidence_threshold: float = 0.3) -> SkeletonFrame:
    """Consolidate 17 COCO keypoints into the 12 placement sites.

    Head is the unweighted mean of the facial keypoints (nose, eyes, ears)
    that meet the confidence threshold; pelvis likewise averages the hips.
    Single-source sites are copied through when confident. A site whose
    sources all fall below the threshold is marked missing, never raised.
    """
    kp = frame.keypoints
    points = np.zeros((len(SITE_ORDER), 2), dtype=np.float64)
    valid = np.zeros(len(SITE_ORDER), dtype=bool)
    for row, site in enumerate(SITE_ORDER):
        sources = MERGE_SOURCES[site]
        ok = [i for i in sources if kp[i, 2] >= confidence_threshold]
        if ok:
            points[row] = kp[ok, :2].mean(axis=0)
            valid[row] = True
    return SkeletonFrame(points=points, valid=valid)


def centralize(frame: SkeletonFrame) -> SkeletonFrame:
    """Translate all valid points so their centroid lands on (0.5, 0.5).

    A single rigid offset is applied, preserving relative geometry; missing
    points stay missing. Offsets at or below 1e-12 per coordinate snap to
    zero so repeated centralization is exactly idempotent.
    """
    if not frame.valid.any():
        raise EmptyFrameError("cannot centralize a frame with no valid points")
    centroid = frame.points[frame.valid].mean(axis=0)
    offset = centroid - _CENTER
    if np.max(np.abs(offset)) <= _CENTER_SNAP:
        return frame
    points = frame.points.copy()
    points[frame.valid] -= offset
    return SkeletonFrame(points=points, valid=frame.valid.copy())


def select_sites(
    frame: SkeletonFrame,
    roster,
    allow_head: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Extract ``roster`` sites from a skeleton frame, in roster order.

    Returns (points, valid) with shapes (len(roster), 2) and (len(roster),).
    The head site is excluded from placement unless ``allow_head`` is set.
    """
    roster = tuple(roster)
    if not roster:
        raise UnknownSiteError("roster must not be empty")
    if len(set(roster)) != len(roster):
        raise UnknownSiteError(f"duplicate sites in roster {roster!r}")
    rows = []
    for site in roster:
        if site not in _SITE_INDEX:
            raise UnknownSiteError(f"unknown site id {site!r}")
        if site == "HD" and not allow_head:
            raise SiteExcludedError("the head site is excluded from placement")
        rows.append(_SITE_INDEX[site])
    return frame.points[rows].copy(), frame.valid[rows].copy()


def repair_gaps(
    points: np.ndarray,
    valid: np.ndarray,
    max_gap: int = 10,
    sites: tuple[str, ...] | None = None,
) -> np.ndarray:
    """Fill interior missing samples by per-coordinate linear interpolation.

    Parameters
    ----------
    points : (n_sites, n_frames, 2) array
        Per-site trajectories; entries at invalid positions are ignored.
    valid : (n_sites, n_frames) bool array
        Which samples are known.
    max_gap : int
        Longest run of consecutive missing frames that may be filled.
    sites : optional site ids used in error messages.

    The series is first trimmed to the envelope bounded by the first and
    last frames where every site is valid, so each remaining gap has valid
    neighbors on both sides; interior gaps longer than ``max_gap`` raise,
    reporting the offending site and frame span. Valid samples are never
    altered.
    """
    points = np.asarray(points, dtype=np.float64)
    valid = np.asarray(valid, dtype=bool)
    if valid.ndim != 2 or valid.size == 0:
        raise ValueError("expected a non-empty (n_sites, n_frames) validity mask")
    n_sites, n_frames = valid.shape
    labels = tuple(sites) if sites is not None else tuple(str(i) for i in range(n_sites))

    for s in range(n_sites):
        if not valid[s].any():
            raise AllMissingSiteError(f"site {labels[s]} has no valid sample")
    all_valid = np.flatnonzero(valid.all(axis=0))
    if all_valid.size == 0:
        raise EmptyEnvelopeError("no frame has every site valid")
    lo, hi = int(all_valid[0]), int(all_valid[-1])

    out = points[:, lo : hi + 1].copy()
    mask = valid[:, lo : hi + 1]
    for s in range(n_sites):
        missing = ~mask[s]
        if not missing.any():
            continue
        # Endpoint frames are valid for every site, so missing runs are
        # interior and transition edges pair up as (start, end).
        edges = np.flatnonzero(np.diff(missing.astype(np.int8)))
        run_starts = edges[::2] + 1
        run_ends = edges[1::2] + 1
        for a, b in zip(run_starts, run_ends):
            if b - a > max_gap:
                raise GapTooLongError(labels[s], int(lo + a), int(lo + b))
            left = out[s, a - 1]
            right = out[s, b]
            steps = b - a + 1
            for k in range(1, steps):
                frac = k / steps
                out[s, a + k - 1] = left + (right - left) * frac
    return out


def truncate_series(series: SkeletonSeries, length: int = 500, mode: str = "first") -> SkeletonSeries:
    """Cut a series to a uniform length.

    ``mode="first"`` keeps the first ``length`` frames; ``mode="uniform"``
    keeps ``length`` evenly spaced frames across the whole recording.
    Raises when the series is shorter than ``length``.
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    if series.length < length:
        raise TooShortError(series.length, length)
    if series.length == length:
        return series
    if mode == "first":
        pts = series.points[:, :length]
    elif mode == "uniform":
        idx = (np.arange(length, dtype=np.int64) * series.length) // length
        pts = series.points[:, idx]
    else:
        raise ValueError(f"unknown truncation mode {mode!r}")
    return SkeletonSeries(
        activity_id=series.activity_id,
        sites=series.sites,
        points=pts.copy(),
        sample_rate=series.sample_rate,
    )


def infer_sample_rate(timestamps) -> float:
    """Nominal sample rate from the median timestamp spacing."""
    t = np.asarray(timestamps, dtype=np.float64)
    if t.size < 2:
        raise RateMismatchError("need at least two timestamps to infer a rate")
    dt = np.median(np.diff(t))
    if dt <= 0:
        raise RateMismatchError("non-positive timestamp spacing")
    return 1.0 / float(dt)


def decimation_stride(input_rate: float, target_rate: float, tolerance: float = 0.01) -> int:
    """Integer stride mapping ``input_rate`` onto ``target_rate``.

    Rates within ``tolerance`` (relative) of an integer multiple are
    accepted; anything else is rejected rather than resampled, including
    recordings slower than the target.
    """
    if target_rate <= 0:
        raise RateMismatchError("target rate must be positive")
    ratio = input_rate / target_rate
    stride = int(round(ratio))
    if stride < 1 or abs(ratio - stride) > tolerance * ratio:
        raise RateMismatchError(
            f"input rate {input_rate:.6g} Hz is not an integer multiple of "
            f"the target rate {target_rate:.6g} Hz"
        )
    return stride


def preprocess_recording(
    frames,
    activity_id: str,
    roster=DEFAULT_ROSTER,
    length: int | None = 500,
    target_rate: float = 10.0,
    confidence_threshold: float = 0.3,
    max_gap: int = 10,
    subsample: str = "first",
    allow_head: bool = False,
) -> SkeletonSeries:
    """Run the full preprocessing pipeline over raw pose frames.

    Steps: consolidate keypoints per frame, centralize each frame's valid
    skeleton, select the roster sites, repair gaps (at the native rate),
    decimate to the target rate, and truncate to ``length`` frames. Pass
    ``length=None`` to skip truncation and keep the full decimated series.
    """
    frames = list(frames)
    if len(frames) < 2:
        raise TooShortError(len(frames), length if length is not None else 2)
    roster = tuple(roster)

    n = len(frames)
    pts = np.zeros((len(roster), n, 2), dtype=np.float64)
    ok = np.zeros((len(roster), n), dtype=bool)
    for j, raw in enumerate(frames):
        skel = merge_keypoints(raw, confidence_threshold)
        if skel.valid.any():
            skel = centralize(skel)
            p, v = select_sites(skel, roster, allow_head=allow_head)
            pts[:, j] = p
            ok[:, j] = v
        # frames with no valid point stay missing for every site

    repaired = repair_gaps(pts, ok, max_gap=max_gap, sites=roster)

    input_rate = infer_sample_rate([f.t for f in frames])
    stride = decimation_stride(input_rate, target_rate)
    if stride > 1:
        repaired = repaired[:, ::stride]

    series = SkeletonSeries(
        activity_id=activity_id,
        sites=roster,
        points=repaired,
        sample_rate=target_rate,
    )
    if length is None:
        return series
    return truncate_series(series, length, mode=subsample)
