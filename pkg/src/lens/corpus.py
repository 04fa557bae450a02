"""Venue-resolved publication records and scope selection."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from .ingest import AuthorId, RawPublication
from .venues import AreaSet, VenueRegistry


@dataclass(frozen=True, order=True)
class PublicationRecord:
    year: int
    venue: str
    record_id: str
    authors: tuple[AuthorId, ...] = field(compare=False)

    def __post_init__(self):
        if not self.authors:
            raise ValueError(f"{self.record_id}: record without authors")
        if len(set(self.authors)) != len(self.authors):
            raise ValueError(f"{self.record_id}: duplicate author in record")


@dataclass
class ResolveStats:
    admitted: int = 0
    assigned: int = 0
    dropped_unresolved: int = 0
    dropped_duplicate: int = 0
    unresolved_tokens: Counter = field(default_factory=Counter)


def resolve_records(
    pubs: Iterable[RawPublication], registry: VenueRegistry
) -> tuple[list[PublicationRecord], ResolveStats]:
    stats = ResolveStats()
    out = []
    seen: set[str] = set()
    for pub in pubs:
        stats.admitted += 1
        if pub.dblp_key in seen:
            stats.dropped_duplicate += 1
            continue
        seen.add(pub.dblp_key)
        venue = registry.resolve(pub.venue_token)
        if venue is None and pub.booktitle:
            venue = registry.resolve(pub.booktitle)
        if venue is None:
            stats.dropped_unresolved += 1
            stats.unresolved_tokens[pub.venue_token] += 1
            continue
        stats.assigned += 1
        out.append(PublicationRecord(pub.year, venue.canonical_key, pub.dblp_key, pub.authors))
    return out, stats


def in_set(records: Iterable[PublicationRecord], area_set: AreaSet) -> Iterator[PublicationRecord]:
    keys = area_set.venue_keys
    return (r for r in records if r.venue in keys)


def in_area(
    records: Iterable[PublicationRecord], area_set: AreaSet, area_id: str
) -> Iterator[PublicationRecord]:
    keys = frozenset(area_set.area(area_id).keys)
    return (r for r in records if r.venue in keys)


def in_venues(records: Iterable[PublicationRecord], keys: Iterable[str]) -> Iterator[PublicationRecord]:
    keys = frozenset(keys)
    return (r for r in records if r.venue in keys)
