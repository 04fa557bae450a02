"""Canonical venues and topical area sets.

A conference series is identified by its DBLP key prefix (``conf/aaai``).
Every name a series was published under is kept in its history; the display
name is the name used over the longest span of years.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .ingest import ProceedingsMeta, RawPublication

logger = logging.getLogger(__name__)

SET_LABELS = ("CS", "TOP", "NONTOP")


class AreaConfigError(Exception):
    pass


@dataclass(frozen=True, order=True)
class VenueId:
    canonical_key: str
    display_name: str = field(default="", compare=False)


@dataclass(frozen=True)
class VenueEvent:
    """One observation that series ``key`` ran under ``name`` in ``year``."""

    key: str
    name: str
    year: int | None


@dataclass(frozen=True)
class NameSpan:
    name: str
    first_year: int
    last_year: int
    event_count: int

    @property
    def length(self) -> int:
        return self.last_year - self.first_year + 1


@dataclass(frozen=True)
class VenueHistory:
    venue: VenueId
    name_spans: tuple[NameSpan, ...]


def series_key(token: str) -> str | None:
    """``conf/aaai/Zhou09`` -> ``conf/aaai``; None for tokens without two segments."""
    parts = token.strip().split("/")
    if len(parts) < 2 or not parts[0] or not parts[1]:
        return None
    return f"{parts[0]}/{parts[1]}"


def _longest_history(spans: Iterable[NameSpan]) -> NameSpan:
    return min(spans, key=lambda s: (-s.length, -s.event_count, s.name))


def merge_spans(events: Iterable[tuple[str, int]]) -> tuple[NameSpan, ...]:
    """Collapse (name, year) observations into one span per name.

    Repeated observations of the same (name, year) are one event, so the
    result does not depend on input order or multiplicity.
    """
    years: dict[str, set[int]] = {}
    for name, year in events:
        years.setdefault(name, set()).add(year)
    return tuple(
        NameSpan(name, min(ys), max(ys), len(ys)) for name, ys in sorted(years.items())
    )


class VenueRegistry:
    """Immutable once built; safe to share for concurrent lookups."""

    def __init__(self, histories: dict[str, VenueHistory], quarantined: list[str] | None = None):
        self._histories = dict(sorted(histories.items()))
        self._by_name: dict[str, VenueId] = {}
        for key, hist in self._histories.items():
            name = hist.venue.display_name
            # first key (sorted) wins for colliding display names
            self._by_name.setdefault(name, hist.venue)
        self.quarantined = list(quarantined or [])

    def __len__(self) -> int:
        return len(self._histories)

    def __contains__(self, key: str) -> bool:
        return key in self._histories

    def venues(self) -> list[VenueId]:
        return [h.venue for h in self._histories.values()]

    def history(self, key: str) -> VenueHistory:
        return self._histories[key]

    def histories(self) -> list[VenueHistory]:
        return list(self._histories.values())

    def distinct_names(self) -> int:
        return len({s.name for h in self._histories.values() for s in h.name_spans})

    def merges(self) -> list[VenueHistory]:
        """Series published under more than one name."""
        return [h for h in self._histories.values() if len(h.name_spans) > 1]

    def resolve(self, token: str) -> VenueId | None:
        """Key prefix first, then exact display name."""
        key = series_key(token)
        if key is not None and key in self._histories:
            return self._histories[key].venue
        return self._by_name.get(token.strip())


def build_registry(events: Iterable[VenueEvent | ProceedingsMeta]) -> VenueRegistry:
    per_key: dict[str, list[tuple[str, int]]] = {}
    seen_keys: set[str] = set()
    quarantined: list[str] = []
    for ev in events:
        key = series_key(ev.key) if ev.key else None
        if key is None:
            quarantined.append(ev.key or ev.name)
            continue
        seen_keys.add(key)
        if ev.name and ev.year is not None:
            per_key.setdefault(key, []).append((ev.name, ev.year))

    histories = {}
    for key in seen_keys:
        spans = merge_spans(per_key.get(key, ()))
        display = _longest_history(spans).name if spans else key.split("/", 1)[1]
        histories[key] = VenueHistory(VenueId(key, display), spans)
    return VenueRegistry(histories, quarantined)


def venue_events(
    proceedings: Iterable[ProceedingsMeta], publications: Iterable[RawPublication]
) -> Iterable[VenueEvent]:
    """Registry input from both proceedings volumes and paper booktitles."""
    for meta in proceedings:
        yield VenueEvent(meta.key, meta.name, meta.year)
    for pub in publications:
        yield VenueEvent(pub.dblp_key, pub.booktitle, pub.year)


# Area sets


@dataclass(frozen=True)
class ConfVenue:
    """A conference as listed in an area table; may span several DBLP series."""

    abbreviation: str
    keys: tuple[str, ...]


@dataclass(frozen=True)
class Area:
    area_id: str
    name: str
    venues: tuple[ConfVenue, ...]
    number: int | None = None

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(k for v in self.venues for k in v.keys)


@dataclass(frozen=True)
class AreaSet:
    set_label: str
    areas: tuple[Area, ...]
    version: int = 1
    expected_areas: int | None = None

    def __post_init__(self):
        key_owner: dict[str, str] = {}
        for area in self.areas:
            for key in area.keys:
                if key in key_owner and key_owner[key] != area.area_id:
                    raise AreaConfigError(
                        f"{self.set_label}: venue {key} listed in areas "
                        f"{key_owner[key]} and {area.area_id}"
                    )
                if key in key_owner:
                    raise AreaConfigError(f"{self.set_label}: venue {key} listed twice in {area.area_id}")
                key_owner[key] = area.area_id
        object.__setattr__(self, "_key_area", key_owner)

    def area_of(self, venue_key: str) -> str | None:
        return self._key_area.get(venue_key)  # type: ignore[attr-defined]

    def area(self, area_id: str) -> Area:
        for a in self.areas:
            if a.area_id == area_id:
                return a
        raise KeyError(area_id)

    @property
    def area_ids(self) -> list[str]:
        return [a.area_id for a in self.areas]

    @property
    def venue_keys(self) -> frozenset[str]:
        return frozenset(self._key_area)  # type: ignore[attr-defined]

    def unknown_keys(self, registry: VenueRegistry) -> dict[str, list[str]]:
        """Area id -> configured keys absent from the registry."""
        out: dict[str, list[str]] = {}
        for a in self.areas:
            missing = [k for k in a.keys if k not in registry]
            if missing:
                out[a.area_id] = missing
        return out


def _parse_area_config(doc: dict, source: str) -> AreaSet:
    if not isinstance(doc, dict):
        raise AreaConfigError(f"{source}: expected a mapping at top level")
    label = doc.get("set")
    if label not in SET_LABELS:
        raise AreaConfigError(f"{source}: 'set' must be one of {SET_LABELS}, got {label!r}")
    raw_areas = doc.get("areas")
    if not raw_areas:
        raise AreaConfigError(f"{source}: no areas defined")
    expected = doc.get("expected_areas")
    areas = []
    seen_ids = set()
    for i, ra in enumerate(raw_areas, start=1):
        area_id = ra.get("id")
        if not area_id:
            raise AreaConfigError(f"{source}: area #{i} has no id")
        if area_id in seen_ids:
            raise AreaConfigError(f"{source}: duplicate area id {area_id}")
        seen_ids.add(area_id)
        venues = []
        for rv in ra.get("venues") or []:
            keys = rv.get("keys") or ([rv["key"]] if rv.get("key") else [])
            if not keys:
                raise AreaConfigError(f"{source}: venue {rv.get('abbr')!r} in area {area_id} has no key")
            for k in keys:
                if series_key(k) != k:
                    raise AreaConfigError(f"{source}: area {area_id}: malformed venue key {k!r}")
            venues.append(ConfVenue(str(rv.get("abbr", keys[0])), tuple(keys)))
        if not venues:
            raise AreaConfigError(f"{source}: area {area_id} lists no venues")
        areas.append(Area(area_id, ra.get("name", area_id), tuple(venues), ra.get("number", i)))
    if expected is not None and len(areas) != expected:
        raise AreaConfigError(
            f"{source}: expected {expected} areas, found {len(areas)} (missing area?)"
        )
    return AreaSet(label, tuple(areas), int(doc.get("version", 1)), expected)


def load_area_config(path: str | Path, registry: VenueRegistry | None = None) -> AreaSet:
    """Load and validate an area config.

    With a registry, configured venue keys the registry does not know are an
    error naming the offending area.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    area_set = _parse_area_config(doc, str(path))
    if registry is not None:
        unknown = area_set.unknown_keys(registry)
        if unknown:
            detail = "; ".join(f"{a}: {', '.join(ks)}" for a, ks in unknown.items())
            raise AreaConfigError(f"{path}: venues unknown to registry ({detail})")
    return area_set


def shipped_config_path(label: str) -> Path:
    name = {"TOP": "top_areas.yaml", "NONTOP": "nontop_areas.yaml"}[label.upper()]
    return Path(str(resources.files("lens") / "data" / name))


def load_shipped(label: str) -> AreaSet:
    return load_area_config(shipped_config_path(label))
