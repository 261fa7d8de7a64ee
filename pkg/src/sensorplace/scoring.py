"""Subset scoring and placement ranking.

Each candidate placement subset turns every activity into one flat vector:
the selected sites' trajectories concatenated site-major (canonical site
order), frames in time order within a site, x before y within a frame, so
a subset of s sites over L frames yields 2*s*L values. A subset's score is
the sum over all unordered activity pairs of the absolute cosine distance
|1 - cos(u, v)| between those vectors; more mutually distinct activities
under a subset mean a higher score, and subsets are ranked score-descending.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
import math

import numpy as np

from . import _kernels
from .errors import (
    ConfigError,
    LengthMismatchError,
    SiteNotPresentError,
    UnknownSiteError,
    ZeroNormError,
    ZeroVectorError,
)
from .skeleton import ActivitySet, SkeletonSeries, canonical_sites, site_key

TIE_BREAK = "score desc, then subset size asc, then canonical site order"


@dataclass(frozen=True)
class PlacementSubset:
    """A candidate set of placement sites, held in canonical order."""

    sites: tuple[str, ...]

    def __post_init__(self):
        sites = canonical_sites(self.sites)
        if not sites:
            raise UnknownSiteError("a placement subset must contain at least one site")
        object.__setattr__(self, "sites", sites)

    @property
    def size(self) -> int:
        return len(self.sites)

    @property
    def label(self) -> str:
        return "+".join(self.sites)

    def sort_key(self):
        return tuple(site_key(s) for s in self.sites)


@dataclass(frozen=True)
class ActivityVector:
    """Flattened per-activity trajectory for one subset."""

    activity_id: str
    subset: PlacementSubset
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("activity vector must be one-dimensional")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"activity {self.activity_id!r}: vector has non-finite entries")
        if not v.any():
            raise ZeroVectorError(f"activity {self.activity_id!r}: vector is identically zero")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class ScoredSubset:
    subset: PlacementSubset
    score: float


@dataclass(frozen=True)
class Ranking:
    """Scored subsets in strict rank order, plus provenance for audit."""

    entries: tuple[ScoredSubset, ...]
    n_activities: int
    series_length: int
    roster: tuple[str, ...]
    fingerprint: str | None = None
    tie_break: str = TIE_BREAK

    def labels(self) -> list[str]:
        return [e.subset.label for e in self.entries]


def build_activity_vector(series: SkeletonSeries, subset: PlacementSubset) -> ActivityVector:
    """Concatenate the subset's site trajectories into one flat vector."""
    rows = []
    for site in subset.sites:
        if site not in series.sites:
            raise SiteNotPresentError(
                f"activity {series.activity_id!r}: site {site!r} not in series roster"
            )
        rows.append(series.sites.index(site))
    values = series.points[rows].reshape(-1)
    return ActivityVector(activity_id=series.activity_id, subset=subset, values=values)


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Absolute cosine distance |1 - u.v / (|u||v|)| between two vectors.

    0 for identical direction, 1 for orthogonal, 2 for antiparallel.
    """
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if u.shape != v.shape:
        raise LengthMismatchError(f"vector lengths differ: {u.size} vs {v.size}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroNormError("cosine distance is undefined for zero-norm vectors")
    return abs(1.0 - float(np.dot(u, v)) / (nu * nv))


def score_subset(activity_set: ActivitySet, subset: PlacementSubset) -> ScoredSubset:
    """Score one subset: sum of pairwise absolute cosine distances.

    Pairs are visited in ascending (i, j) order over the activity list so
    the accumulated value is identical across runs and thread counts.
    """
    vectors = [build_activity_vector(series, subset) for series in activity_set.activities]
    mat = np.ascontiguousarray(np.stack([v.values for v in vectors]))
    score = float(_kernels.pairwise_cosine_distance_sum(mat))
    return ScoredSubset(subset=subset, score=score)


def enumerate_subsets(roster, sizes=None) -> list[PlacementSubset]:
    """All site combinations of the requested sizes.

    ``sizes=None`` means every size 1..len(roster). Output order is size
    ascending, then lexicographic in canonical site order; a 5-site roster
    with all sizes yields 31 subsets.
    """
    roster = canonical_sites(roster)
    if not roster:
        raise ConfigError("roster must not be empty")
    if sizes is None:
        wanted = range(1, len(roster) + 1)
    else:
        wanted = sorted(set(int(s) for s in sizes))
        for s in wanted:
            if s < 1 or s > len(roster):
                raise ConfigError(
                    f"subset size {s} outside valid range 1..{len(roster)}"
                )
    subsets = [
        PlacementSubset(sites=combo)
        for s in wanted
        for combo in combinations(roster, s)
    ]
    if not subsets:
        raise ConfigError("subset size filter selects nothing")
    return subsets


def build_ranking(
    scored,
    n_activities: int,
    series_length: int,
    roster,
    fingerprint: str | None = None,
) -> Ranking:
    """Sort scored subsets into a strict ranking under the tie-break rule."""
    ordered = sorted(
        scored,
        key=lambda e: (-e.score, e.subset.size, e.subset.sort_key()),
    )
    return Ranking(
        entries=tuple(ordered),
        n_activities=n_activities,
        series_length=series_length,
        roster=canonical_sites(roster),
        fingerprint=fingerprint,
    )


def rank_placements(
    activity_set: ActivitySet,
    subsets,
    fingerprint: str | None = None,
    jobs: int = 1,
) -> Ranking:
    """Score every subset against the activity set and rank the results.

    Subsets are scored independently (optionally across ``jobs`` threads)
    and merged in canonical order before sorting, so the ranking does not
    depend on the degree of parallelism.
    """
    subsets = list(subsets)
    if not subsets:
        raise ConfigError("no subsets to rank")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scored = list(pool.map(lambda s: score_subset(activity_set, s), subsets))
    else:
        scored = [score_subset(activity_set, s) for s in subsets]
    return build_ranking(
        scored,
        n_activities=len(activity_set),
        series_length=activity_set.length,
        roster=activity_set.sites,
        fingerprint=fingerprint,
    )


def max_score(n_activities: int) -> float:
    """Upper bound on a subset score: 2 per pair over all activity pairs."""
    return 2.0 * math.comb(n_activities, 2)
