"""Community time series: publication growth and population stability."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .corpus import PublicationRecord
from .graph import CoauthorshipGraph, build_graph
from .ingest import AuthorId
from .venues import AreaSet, ConfVenue

# growth


@dataclass
class GrowthSeries:
    label: str
    counts: dict[int, int]
    abs_growth: dict[int, float | None]
    rel_growth: dict[int, float | None] = field(default_factory=dict)
    reference: str | None = None

    @property
    def years(self) -> list[int]:
        return sorted(self.counts)

    def defined_abs(self) -> dict[int, float]:
        return {y: v for y, v in self.abs_growth.items() if v is not None}


def growth_series(
    records: Iterable[PublicationRecord],
    venues: Iterable[str] | None = None,
    label: str = "CS",
    reference: GrowthSeries | None = None,
) -> GrowthSeries:
    """Yearly counts and year-over-year growth for papers in ``venues``
    (all papers when None).

    Only years with at least one paper appear. Growth in year y is
    count(y) / count(y - 1) and is None when y - 1 has no papers. With a
    ``reference`` series the relative growth is the ratio of the two growth
    rates, None unless both are defined and the reference rate is positive.
    """
    keys = None if venues is None else frozenset(venues)
    counts: Counter = Counter()
    for r in records:
        if keys is None or r.venue in keys:
            counts[r.year] += 1
    counts_d = dict(sorted(counts.items()))
    abs_g: dict[int, float | None] = {}
    for y, n in counts_d.items():
        prev = counts_d.get(y - 1, 0)
        abs_g[y] = n / prev if prev > 0 else None
    series = GrowthSeries(label, counts_d, abs_g)
    if reference is not None:
        series.reference = reference.label
        for y, g in abs_g.items():
            ref = reference.abs_growth.get(y)
            series.rel_growth[y] = g / ref if g is not None and ref is not None and ref > 0 else None
    return series


def area_growth(
    records: Sequence[PublicationRecord], area_set: AreaSet, label: str | None = None
) -> tuple[GrowthSeries, dict[str, GrowthSeries]]:
    """Set-level series plus one per area, relative to the set series."""
    total = growth_series(records, area_set.venue_keys, label or area_set.set_label)
    per_area = {
        a.area_id: growth_series(records, a.keys, a.area_id, reference=total) for a in area_set.areas
    }
    return total, per_area


@dataclass
class GrowthComparison:
    rows: list[tuple[int, float | None, float | None, str]]
    mean_top: float | None
    mean_nontop: float | None
    years_compared: int
    nontop_higher: int
    ties: int

    @property
    def share_nontop_higher(self) -> float | None:
        return self.nontop_higher / self.years_compared if self.years_compared else None


def _yearly_mean(series_set: Iterable[GrowthSeries]) -> dict[int, float]:
    vals: dict[int, list[float]] = defaultdict(list)
    for s in series_set:
        for y, v in s.defined_abs().items():
            vals[y].append(v)
    return {y: math.fsum(v) / len(v) for y, v in sorted(vals.items())}


def compare_growth(
    top: Iterable[GrowthSeries], nontop: Iterable[GrowthSeries]
) -> GrowthComparison:
    """Year-by-year mean absolute growth of two series sets.

    A year counts as NONTOP-higher only under strict inequality; equal years
    are tallied as ties.
    """
    t = _yearly_mean(top)
    n = _yearly_mean(nontop)
    rows = []
    higher = ties = compared = 0
    for y in sorted(set(t) | set(n)):
        tv, nv = t.get(y), n.get(y)
        if tv is None or nv is None:
            verdict = "n/a"
        else:
            compared += 1
            if nv > tv:
                higher += 1
                verdict = "nontop"
            elif nv == tv:
                ties += 1
                verdict = "tie"
            else:
                verdict = "top"
        rows.append((y, tv, nv, verdict))
    mt = math.fsum(t.values()) / len(t) if t else None
    mn = math.fsum(n.values()) / len(n) if n else None
    return GrowthComparison(rows, mt, mn, compared, higher, ties)


# stability


@dataclass(frozen=True)
class YearStability:
    year: int
    total_authors: int
    newcomers: int
    pure_newcomers: int
    leavers: int

    @property
    def newcomer_frac(self) -> float:
        return self.newcomers / self.total_authors

    @property
    def pure_frac(self) -> float | None:
        return self.pure_newcomers / self.newcomers if self.newcomers else None

    @property
    def leaver_frac(self) -> float:
        return self.leavers / self.total_authors


@dataclass(frozen=True)
class StabilityRow:
    area_id: str
    conference: str
    first_year: int | None
    avg_newcomers: float | None
    avg_pure_newcomers: float | None
    avg_leavers: float | None
    flags: tuple[str, ...] = ()


class StabilityIndex:
    """Shared read-only index: venue -> year -> authors, plus the corpus-wide
    co-authorship graph carrying the first year each pair collaborated."""

    def __init__(self, records: Iterable[PublicationRecord], cs_graph: CoauthorshipGraph | None = None):
        records = list(records)
        self.venue_years: dict[str, dict[int, set[AuthorId]]] = defaultdict(lambda: defaultdict(set))
        for r in records:
            self.venue_years[r.venue][r.year].update(r.authors)
        self.cs_graph = cs_graph if cs_graph is not None else build_graph(records)

    def authors_by_year(self, venue_keys: Iterable[str]) -> dict[int, set[AuthorId]]:
        merged: dict[int, set[AuthorId]] = defaultdict(set)
        for k in venue_keys:
            for y, authors in self.venue_years.get(k, {}).items():
                merged[y] |= authors
        return dict(sorted(merged.items()))


def venue_year_stats(index: StabilityIndex, venue_keys: Iterable[str]) -> list[YearStability]:
    """Per-year newcomer / pure-newcomer / leaver counts for one conference.

    A newcomer in y has no paper at the venue before y. A pure newcomer is
    also without any co-authorship, formed before y at any venue, with an
    author who published at the venue before y. A leaver in y has no paper
    at the venue after y.
    """
    by_year = index.authors_by_year(venue_keys)
    first_at: dict[AuthorId, int] = {}
    last_at: dict[AuthorId, int] = {}
    for y, authors in by_year.items():
        for a in authors:
            first_at.setdefault(a, y)
            last_at[a] = y

    graph = index.cs_graph
    out = []
    for y, authors in by_year.items():
        new = [a for a in authors if first_at[a] == y]
        pure = 0
        for a in new:
            befriended = False
            for b in graph.neighbors(a):
                fb = first_at.get(b)
                if fb is not None and fb < y and graph.edge_first_year(a, b) < y:
                    befriended = True
                    break
            if not befriended:
                pure += 1
        leavers = sum(1 for a in authors if last_at[a] == y)
        out.append(YearStability(y, len(authors), len(new), pure, leavers))
    return out


def _avg(xs: list[float]) -> float | None:
    return math.fsum(xs) / len(xs) if xs else None


def summarize_stability(
    years: Sequence[YearStability], inclusive: bool = False
) -> tuple[float | None, float | None, float | None, tuple[str, ...]]:
    """Average the per-year fractions.

    Default: newcomer averages skip the first year (trivially 1.0) and the
    leaver average skips the last year (trivially 1.0). ``inclusive`` keeps
    both.
    """
    if not years:
        return None, None, None, ("no_data",)
    flags = []
    if len(years) == 1:
        flags.append("single_year")
    new_years = years if inclusive else years[1:]
    leave_years = years if inclusive else years[:-1]
    avg_new = _avg([s.newcomer_frac for s in new_years])
    avg_pure = _avg([f for s in new_years if (f := s.pure_frac) is not None])
    avg_leave = _avg([s.leaver_frac for s in leave_years])
    return avg_new, avg_pure, avg_leave, tuple(flags)


def stability_metrics(
    records: Iterable[PublicationRecord] | StabilityIndex,
    venue: str | ConfVenue,
    area_id: str = "",
    inclusive: bool = False,
) -> tuple[StabilityRow, list[YearStability]]:
    index = records if isinstance(records, StabilityIndex) else StabilityIndex(records)
    if isinstance(venue, ConfVenue):
        name, keys = venue.abbreviation, venue.keys
    else:
        name, keys = venue, (venue,)
    years = venue_year_stats(index, keys)
    avg_new, avg_pure, avg_leave, flags = summarize_stability(years, inclusive)
    row = StabilityRow(
        area_id,
        name,
        years[0].year if years else None,
        avg_new,
        avg_pure,
        avg_leave,
        flags,
    )
    return row, years


def stability_table(
    records: Iterable[PublicationRecord] | StabilityIndex,
    area_set: AreaSet,
    inclusive: bool = False,
) -> list[StabilityRow]:
    index = records if isinstance(records, StabilityIndex) else StabilityIndex(records)
    rows = []
    for area in area_set.areas:
        for conf in area.venues:
            row, _ = stability_metrics(index, conf, area.area_id, inclusive)
            rows.append(row)
    return rows
