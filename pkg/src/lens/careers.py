"""Author-level profiling: careers, interdisciplinarity, productivity, venue mix."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .corpus import PublicationRecord
from .ingest import AuthorId
from .venues import AreaSet

ACTIVE_MIN_PUBS = 2
EXPERIENCED_YEARS = 10
PERIOD_YEARS = 5
COHORTS = ("single_area_top", "multi_area_top", "top_authors_in_cs")
# too few majority-voted authors to give stable per-area histograms
DEFAULT_MIX_EXCLUDED_AREAS = ("CBIO", "WWW")


@dataclass
class AuthorProfile:
    author: AuthorId
    first_year: int
    last_year: int
    pubs_by_year: dict[int, int] = field(default_factory=dict)
    pubs_by_year_and_area: dict[tuple[int, str], int] = field(default_factory=dict)
    pubs_top: int = 0
    pubs_cs: int = 0

    @property
    def career_length(self) -> int:
        return self.last_year - self.first_year + 1

    def area_counts(self) -> Counter:
        c: Counter = Counter()
        for (_, area), n in self.pubs_by_year_and_area.items():
            c[area] += n
        return c

    def area_years(self, area: str) -> dict[int, int]:
        return {y: n for (y, a), n in self.pubs_by_year_and_area.items() if a == area}


def build_profiles(
    records: Iterable[PublicationRecord],
    area_set: AreaSet,
    scope: str = "set",
) -> dict[AuthorId, AuthorProfile]:
    """Aggregate per-author profiles in one pass.

    ``scope="set"``: only authors with a paper in ``area_set``; career span
    and ``pubs_by_year`` come from set papers. ``scope="cs"``: every author,
    with span and yearly counts over the whole corpus. ``pubs_top`` and
    ``pubs_cs`` always count set papers and all papers respectively.
    """
    if scope not in ("set", "cs"):
        raise ValueError(f"unknown profile scope {scope!r}")
    profiles: dict[AuthorId, AuthorProfile] = {}
    all_years: dict[AuthorId, Counter] = defaultdict(Counter)
    for r in records:
        area = area_set.area_of(r.venue)
        for a in r.authors:
            all_years[a][r.year] += 1
            if area is None:
                continue
            p = profiles.get(a)
            if p is None:
                p = profiles[a] = AuthorProfile(a, r.year, r.year)
            key = (r.year, area)
            p.pubs_by_year_and_area[key] = p.pubs_by_year_and_area.get(key, 0) + 1
            p.pubs_top += 1

    if scope == "cs":
        for a in all_years:
            if a not in profiles:
                y = min(all_years[a])
                profiles[a] = AuthorProfile(a, y, y)

    for a, p in profiles.items():
        ys = all_years[a]
        p.pubs_cs = sum(ys.values())
        if scope == "cs":
            p.pubs_by_year = dict(sorted(ys.items()))
        else:
            by_year: Counter = Counter()
            for (y, _), n in p.pubs_by_year_and_area.items():
                by_year[y] += n
            p.pubs_by_year = dict(sorted(by_year.items()))
        p.first_year = min(p.pubs_by_year)
        p.last_year = max(p.pubs_by_year)
    return dict(sorted(profiles.items()))


# career length


def career_length_distribution(
    profiles: Iterable[AuthorProfile], area: str | None = None
) -> dict[int, float]:
    """Percentage of authors per career length (inclusive year span).

    With ``area`` the span is measured over the author's papers in that area
    and only authors who published there are counted.
    """
    counts: Counter = Counter()
    for p in profiles:
        if area is None:
            counts[p.career_length] += 1
        else:
            ys = p.area_years(area)
            if ys:
                counts[max(ys) - min(ys) + 1] += 1
    total = sum(counts.values())
    if not total:
        return {}
    return {length: 100.0 * counts[length] / total for length in sorted(counts)}


def share_longer_than(distribution: Mapping[int, float], years: int) -> float:
    return math.fsum(pct for length, pct in distribution.items() if length > years)


# interdisciplinarity


def active_areas(profile: AuthorProfile, min_pubs: int = ACTIVE_MIN_PUBS) -> set[str]:
    return {a for a, n in profile.area_counts().items() if n >= min_pubs}


def start_area(profile: AuthorProfile, min_pubs: int = ACTIVE_MIN_PUBS) -> str | None:
    """Area in which the author first reaches ``min_pubs`` papers.

    Same-year ties go to the area with more lifetime papers, then the
    smaller area id.
    """
    totals = profile.area_counts()
    best = None
    for area, total in totals.items():
        if total < min_pubs:
            continue
        running = 0
        for y, n in sorted(profile.area_years(area).items()):
            running += n
            if running >= min_pubs:
                cand = (y, -total, area)
                if best is None or cand < best:
                    best = cand
                break
    return None if best is None else best[2]


@dataclass(frozen=True)
class AreaBreadth:
    authors: int
    mean_active_areas: float | None
    single_area_share: float | None


def area_breadth(profiles: Iterable[AuthorProfile], min_pubs: int = ACTIVE_MIN_PUBS) -> AreaBreadth:
    """Mean number of active areas (all of them, start area included) and the
    share of authors active in exactly one, over authors with any active area."""
    sizes = [n for p in profiles if (n := len(active_areas(p, min_pubs)))]
    if not sizes:
        return AreaBreadth(0, None, None)
    return AreaBreadth(len(sizes), sum(sizes) / len(sizes), sizes.count(1) / len(sizes))


@dataclass
class TransitionMatrix:
    areas: tuple[str, ...]
    entries: dict[tuple[str, str], float | None]
    support: dict[str, int]

    def row(self, start: str) -> dict[str, float | None]:
        return {t: self.entries[(start, t)] for t in self.areas if t != start}

    @property
    def undefined_rows(self) -> list[str]:
        return [a for a in self.areas if self.support[a] == 0]


def transition_matrix(
    profiles: Iterable[AuthorProfile],
    areas: Sequence[str],
    min_pubs: int = ACTIVE_MIN_PUBS,
) -> TransitionMatrix:
    """P(target | start) = share of authors starting in ``start`` who are also
    active in ``target``. Rows need not sum to 1. Rows with zero support hold
    None."""
    areas = tuple(areas)
    support = {a: 0 for a in areas}
    hits: Counter = Counter()
    for p in profiles:
        start = start_area(p, min_pubs)
        if start is None or start not in support:
            continue
        support[start] += 1
        for t in active_areas(p, min_pubs):
            if t != start:
                hits[(start, t)] += 1
    entries: dict[tuple[str, str], float | None] = {}
    for s in areas:
        for t in areas:
            if s != t:
                entries[(s, t)] = hits[(s, t)] / support[s] if support[s] else None
    return TransitionMatrix(areas, entries, support)


def top_transitions(matrix: TransitionMatrix, k: int = 3) -> dict[str, list[str]]:
    """Per start area, the ``k`` most probable targets with non-zero probability.

    Ties: larger target support first, then area id.
    """
    out = {}
    for s in matrix.areas:
        row = [(t, p) for t, p in matrix.row(s).items() if p]
        row.sort(key=lambda tp: (-tp[1], -matrix.support.get(tp[0], 0), tp[0]))
        out[s] = [t for t, _ in row[:k]]
    return out


# productivity


@dataclass
class PeriodProfile:
    cohort: str
    mean_pubs_per_period: list[float]
    authors_per_period: list[int]
    author_count: int
    flags: tuple[str, ...] = ()


def select_cohort(
    top_profiles: Mapping[AuthorId, AuthorProfile],
    cs_profiles: Mapping[AuthorId, AuthorProfile],
    cohort: str,
    min_career: int = EXPERIENCED_YEARS,
) -> list[AuthorProfile]:
    """Members of a productivity cohort, as profiles of the right scope.

    Single/multi-area cohorts use TOP-scoped profiles and split on the number
    of active areas; authors with no active area belong to neither. The third
    cohort is TOP authors whose whole-corpus career reaches ``min_career``,
    returned with CS-scoped profiles.
    """
    if cohort not in COHORTS:
        raise ValueError(f"unknown cohort {cohort!r}")
    if cohort == "top_authors_in_cs":
        return [
            cs_profiles[a]
            for a in top_profiles
            if a in cs_profiles and cs_profiles[a].career_length >= min_career
        ]
    want_single = cohort == "single_area_top"
    out = []
    for p in top_profiles.values():
        if p.career_length < min_career:
            continue
        n = len(active_areas(p))
        if n == 0:
            continue
        if (n == 1) == want_single:
            out.append(p)
    return out


def author_periods(profile: AuthorProfile, period: int = PERIOD_YEARS) -> list[int]:
    n_periods = -(-profile.career_length // period)
    sums = [0] * n_periods
    for y, n in profile.pubs_by_year.items():
        sums[(y - profile.first_year) // period] += n
    return sums


def period_profile(
    profiles: Iterable[AuthorProfile], cohort: str, period: int = PERIOD_YEARS
) -> PeriodProfile:
    """Mean publications per career period; each author contributes only to
    the periods their career reaches (a partial last period included)."""
    totals: list[int] = []
    counts: list[int] = []
    n_authors = 0
    for p in profiles:
        n_authors += 1
        for i, s in enumerate(author_periods(p, period)):
            if i == len(totals):
                totals.append(0)
                counts.append(0)
            totals[i] += s
            counts[i] += 1
    if not n_authors:
        return PeriodProfile(cohort, [], [], 0, ("empty_cohort",))
    means = [t / c for t, c in zip(totals, counts)]
    return PeriodProfile(cohort, means, counts, n_authors)


# venue mix

N_BINS = 10
BIN_LABELS = tuple(f"[{10 * i},{10 * (i + 1)}{']' if i == N_BINS - 1 else ')'}" for i in range(N_BINS))


@dataclass
class VenueMixHistogram:
    percentages: list[float]
    author_count: int
    counts: list[int]
    excluded_zero_cs: int = 0
    area_id: str | None = None


def mix_bin(pubs_top: int, pubs_cs: int) -> int:
    """Decile of 100 * top / cs; exactly 100% lands in the last bin."""
    return min(N_BINS * pubs_top // pubs_cs, N_BINS - 1)


def _histogram(bins: Sequence[int], area_id=None, excluded=0) -> VenueMixHistogram:
    counts = [0] * N_BINS
    for b in bins:
        counts[b] += 1
    n = len(bins)
    pct = [100.0 * c / n for c in counts] if n else [0.0] * N_BINS
    return VenueMixHistogram(pct, n, counts, excluded, area_id)


def majority_area(profile: AuthorProfile) -> str | None:
    """Area holding most of the author's papers; ties to the earlier first
    paper in the area, then area id."""
    counts = profile.area_counts()
    if not counts:
        return None
    first_in = {a: min(profile.area_years(a)) for a in counts}
    return min(counts, key=lambda a: (-counts[a], first_in[a], a))


def venue_mix(
    profiles: Iterable[AuthorProfile],
    per_area: bool = False,
    exclude_areas: Iterable[str] = (),
) -> VenueMixHistogram | dict[str, VenueMixHistogram]:
    """Histogram of each author's top-venue share over 10% bins.

    ``per_area`` splits authors by majority area and returns one histogram
    per area; ``exclude_areas`` drops those areas from the split.
    """
    excluded = 0
    if not per_area:
        bins = []
        for p in profiles:
            if p.pubs_cs == 0:
                excluded += 1
                continue
            bins.append(mix_bin(p.pubs_top, p.pubs_cs))
        return _histogram(bins, excluded=excluded)

    skip = set(exclude_areas)
    grouped: dict[str, list[int]] = defaultdict(list)
    zero: Counter = Counter()
    for p in profiles:
        area = majority_area(p)
        if area is None or area in skip:
            continue
        if p.pubs_cs == 0:
            zero[area] += 1
            continue
        grouped[area].append(mix_bin(p.pubs_top, p.pubs_cs))
    return {
        a: _histogram(grouped[a], area_id=a, excluded=zero[a])
        for a in sorted(set(grouped) | set(zero))
    }
