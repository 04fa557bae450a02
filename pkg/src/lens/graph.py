"""Co-authorship graphs and collaboration statistics."""

from __future__ import annotations

import math
import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

from .corpus import PublicationRecord
from .ingest import AuthorId


class DegenerateGraphWarning(UserWarning):
    """No vertex has degree >= 2, so the clustering coefficient is a placeholder 0."""


@dataclass
class EdgeInfo:
    first_year: int
    paper_count: int = 0


def edge_key(a: AuthorId, b: AuthorId) -> tuple[AuthorId, AuthorId]:
    return (a, b) if a < b else (b, a)


@dataclass
class CoauthorshipGraph:
    """Undirected, simple graph. Authors of single-author papers are kept as
    isolated vertices."""

    scope: str = "CS"
    adj: dict[AuthorId, set[AuthorId]] = field(default_factory=dict)
    edges: dict[tuple[AuthorId, AuthorId], EdgeInfo] = field(default_factory=dict)
    first_year: dict[AuthorId, int] = field(default_factory=dict)
    last_year: dict[AuthorId, int] = field(default_factory=dict)

    def add_paper(self, authors: Sequence[AuthorId], year: int) -> None:
        for a in authors:
            self.adj.setdefault(a, set())
            if a not in self.first_year or year < self.first_year[a]:
                self.first_year[a] = year
            if a not in self.last_year or year > self.last_year[a]:
                self.last_year[a] = year
        for a, b in combinations(sorted(set(authors)), 2):
            info = self.edges.get((a, b))
            if info is None:
                info = self.edges[(a, b)] = EdgeInfo(year)
                self.adj[a].add(b)
                self.adj[b].add(a)
            elif year < info.first_year:
                info.first_year = year
            info.paper_count += 1

    @property
    def vertices(self) -> set[AuthorId]:
        return set(self.adj)

    def __len__(self) -> int:
        return len(self.adj)

    def __contains__(self, v) -> bool:
        return v in self.adj

    def degree(self, v: AuthorId) -> int:
        nbrs = self.adj.get(v)
        return len(nbrs) if nbrs is not None else 0

    def neighbors(self, v: AuthorId) -> set[AuthorId]:
        return self.adj.get(v, set())

    def edge_first_year(self, a: AuthorId, b: AuthorId) -> int | None:
        info = self.edges.get(edge_key(a, b))
        return None if info is None else info.first_year

    def singletons(self) -> list[AuthorId]:
        return [v for v, nbrs in self.adj.items() if not nbrs]

    def edge_set(self) -> set[frozenset]:
        return {frozenset(e) for e in self.edges}


def build_graph(records: Iterable[PublicationRecord], scope: str = "CS") -> CoauthorshipGraph:
    g = CoauthorshipGraph(scope)
    for r in records:
        g.add_paper(r.authors, r.year)
    return g


def local_clustering(graph: CoauthorshipGraph, v: AuthorId) -> float | None:
    """Fraction of linked neighbour pairs; None when deg(v) < 2."""
    nbrs = graph.adj[v]
    k = len(nbrs)
    if k < 2:
        return None
    # each neighbour-neighbour link is seen from both ends
    links = sum(len(graph.adj[u] & nbrs) for u in nbrs) // 2
    return 2.0 * links / (k * (k - 1))


def clustering_coefficient(graph: CoauthorshipGraph) -> float:
    """Mean local clustering over vertices of degree >= 2.

    Returns 0.0 and emits :class:`DegenerateGraphWarning` when no vertex is
    eligible.
    """
    values = [c for v in graph.adj if (c := local_clustering(graph, v)) is not None]
    if not values:
        warnings.warn(
            f"{graph.scope}: no vertex of degree >= 2; clustering coefficient set to 0",
            DegenerateGraphWarning,
            stacklevel=2,
        )
        return 0.0
    return math.fsum(values) / len(values)


@dataclass(frozen=True)
class CollaborationRow:
    area_id: str
    vertex_count: int
    first_year: int | None
    final_year: int | None
    authors_per_paper_first_year: float
    authors_per_paper_final_year: float
    coauthors_in_area_first_year: float
    coauthors_in_area_avg: float
    coauthors_in_set: float
    coauthors_in_cs: float
    singleton_pct: float
    clustering_coefficient: float
    flags: tuple[str, ...] = ()


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs) if xs else 0.0


def authors_per_paper(records: Iterable[PublicationRecord], year: int) -> float:
    return _mean([len(r.authors) for r in records if r.year == year])


def coauthors_first_year(records: Sequence[PublicationRecord], first_year: int) -> float:
    """Mean distinct-coauthor count on the graph of the area's first-year papers."""
    g = build_graph((r for r in records if r.year == first_year))
    return _mean([len(n) for n in g.adj.values()])


def collaboration_row(
    area_id: str,
    area_graph: CoauthorshipGraph,
    set_graph: CoauthorshipGraph,
    cs_graph: CoauthorshipGraph,
    records: Sequence[PublicationRecord],
) -> CollaborationRow:
    """One row of the collaboration-trends table for an area.

    ``records`` are the area's papers. Coauthor counts at the set and CS
    scopes are averaged over the area's own authors.
    """
    flags = []
    records = list(records)
    years = sorted({r.year for r in records})
    n = len(area_graph)
    if not years or n == 0:
        return CollaborationRow(area_id, 0, None, None, 0, 0, 0, 0, 0, 0, 0, 0, ("empty",))
    first, final = years[0], years[-1]
    if len(years) < 2:
        flags.append("single_year")

    verts = sorted(area_graph.adj)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DegenerateGraphWarning)
        cc = clustering_coefficient(area_graph)
    if any(issubclass(w.category, DegenerateGraphWarning) for w in caught):
        flags.append("no_cc_vertices")

    return CollaborationRow(
        area_id=area_id,
        vertex_count=n,
        first_year=first,
        final_year=final,
        authors_per_paper_first_year=authors_per_paper(records, first),
        authors_per_paper_final_year=authors_per_paper(records, final),
        coauthors_in_area_first_year=coauthors_first_year(records, first),
        coauthors_in_area_avg=_mean([area_graph.degree(v) for v in verts]),
        coauthors_in_set=_mean([set_graph.degree(v) for v in verts]),
        coauthors_in_cs=_mean([cs_graph.degree(v) for v in verts]),
        singleton_pct=100.0 * len(area_graph.singletons()) / n,
        clustering_coefficient=cc,
        flags=tuple(flags),
    )
