import random

import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from lens.corpus import resolve_records
from lens.ingest import ProceedingsMeta, RawPublication
from lens.venues import (
    AreaConfigError,
    VenueEvent,
    VenueId,
    VenueRegistry,
    build_registry,
    load_area_config,
    load_shipped,
    merge_spans,
    series_key,
)

# AAAI and the six other names its series was published under, with year spans.
AAAI_NAMES = [
    ("Agent Modeling", 1996, 1996),
    ("Deep Blue Vs kasparov: the Significance for Artificial Intelligence", 1997, 1997),
    ("AAAI Workshop on Intelligent Multimedia Interfaces", 1991, 1991),
    ("AAAI/IAAI, Vol.1", 1996, 1996),
    ("AAAI/IAAI, Vol.2", 1996, 1996),
    ("AAAI", 1980, 1996),
    ("AAAI/IAAI", 1998, 2002),
]


def aaai_events():
    for name, first, last in AAAI_NAMES:
        for y in range(first, last + 1):
            yield VenueEvent(f"conf/aaai/{y}", name, y)


def test_longest_history_rule():
    events = [ProceedingsMeta("conf/x/1999", "X Symposium", 1999)] + [
        ProceedingsMeta(f"conf/x/{y}", "Intl X", y) for y in range(2000, 2010)
    ]
    reg = build_registry(events)
    assert len(reg) == 1
    assert reg.resolve("conf/x/2005").display_name == "Intl X"


def test_aaai_name_integration():
    reg = build_registry(aaai_events())
    assert len(reg) == 1
    hist = reg.history("conf/aaai")
    assert hist.venue.display_name == "AAAI"
    assert len(hist.name_spans) == 7
    spans = {s.name: s.length for s in hist.name_spans}
    assert spans["AAAI"] == 17 and spans["AAAI/IAAI"] == 5
    assert reg.merges() == [hist]


def test_tie_break_event_count_then_name():
    # equal span length: more events wins
    spans = merge_spans([("B", 2000), ("B", 2004), ("A", 2000), ("A", 2002), ("A", 2004)])
    reg = build_registry(VenueEvent("conf/t/1", n, y) for n, y in [("B", 2000), ("B", 2004), ("A", 2000), ("A", 2002), ("A", 2004)])
    assert {s.name: s.event_count for s in spans} == {"A": 3, "B": 2}
    assert reg.resolve("conf/t").display_name == "A"
    # equal span and events: lexicographic
    reg = build_registry(VenueEvent("conf/t/1", n, 2000) for n in ["Zeta", "Alpha"])
    assert reg.resolve("conf/t").display_name == "Alpha"


def test_resolve_prefix_then_name():
    reg = build_registry([ProceedingsMeta("conf/aaai/2009", "AAAI", 2009)])
    assert reg.resolve("conf/aaai/Zhou09") == VenueId("conf/aaai")
    assert reg.resolve("AAAI").canonical_key == "conf/aaai"
    assert reg.resolve("conf/zzz/Foo") is None
    assert reg.resolve("Unknown Symposium") is None


def test_resolve_on_empty_registry():
    assert VenueRegistry({}).resolve("conf/zzz/x") is None


def test_quarantine_for_keyless_tokens():
    reg = build_registry([ProceedingsMeta("orphan", "Orphan Workshop", 2001), ProceedingsMeta("conf/a/1", "A", 2001)])
    assert len(reg) == 1
    assert reg.quarantined == ["orphan"]


FIXTURE_TOKENS = ["conf/aaai/Zhou09", "conf/aaai/1985", "AAAI", "AAAI/IAAI", "conf/none/1", "", "  AAAI  "]


def test_resolve_idempotent_over_fixture_tokens():
    reg = build_registry(aaai_events())
    first = [reg.resolve(t) for t in FIXTURE_TOKENS]
    for _ in range(3):
        assert [reg.resolve(t) for t in FIXTURE_TOKENS] == first
    # resolving the canonical key again lands on the same venue
    for v in first:
        if v is not None:
            assert reg.resolve(v.canonical_key) == v


@given(st.permutations(list(aaai_events())))
def test_merge_is_order_independent(events):
    ref = build_registry(aaai_events()).history("conf/aaai")
    assert build_registry(events).history("conf/aaai") == ref


def test_merge_associative_over_partitions():
    events = [(e.name, e.year) for e in aaai_events()]
    rng = random.Random(0)
    ref = merge_spans(events)
    for _ in range(20):
        rng.shuffle(events)
        i, j = sorted(rng.sample(range(len(events) + 1), 2))
        a, b, c = events[:i], events[i:j], events[j:]
        assert merge_spans((a + b) + c) == merge_spans(a + (c + b)) == ref


def test_series_key():
    assert series_key("conf/aaai/Zhou09") == "conf/aaai"
    assert series_key("conf/aaai") == "conf/aaai"
    assert series_key("AAAI") is None
    assert series_key("conf//x") is None


def test_resolution_conservation():
    reg = build_registry([ProceedingsMeta("conf/a/2000", "A", 2000)])
    pubs = [
        RawPublication("conf/a/1", ("x",), "t", 2000, "conf/a/2000"),
        RawPublication("conf/b/1", ("x",), "t", 2000, "conf/b/2000"),
        RawPublication("conf/c/1", ("x",), "t", 2000, "conf/c/2000", booktitle="A"),
        RawPublication("conf/a/1", ("y",), "t", 2000, "conf/a/2000"),
    ]
    recs, stats = resolve_records(pubs, reg)
    assert stats.admitted == stats.assigned + stats.dropped_unresolved + stats.dropped_duplicate
    assert (stats.assigned, stats.dropped_unresolved, stats.dropped_duplicate) == (2, 1, 1)
    assert [r.venue for r in recs] == ["conf/a", "conf/a"]


# area configs

TOP_VENUE_COUNTS = [7, 7, 5, 7, 7, 7, 7, 6, 6, 7, 7, 7, 5, 6]
TOP_AREA_IDS = ["ARCH", "AT", "CBIO", "CRYPTO", "DB", "DMML", "DP", "GV", "NET", "NLIR", "PL", "SE", "SEC", "WWW"]


def test_shipped_top_config():
    top = load_shipped("TOP")
    assert top.set_label == "TOP"
    assert top.area_ids == TOP_AREA_IDS
    assert [len(a.venues) for a in top.areas] == TOP_VENUE_COUNTS
    assert [v.abbreviation for v in top.area("AT").venues] == ["COLT", "FOCS", "ISSAC", "LICS", "SCG", "SODA", "STOC"]
    assert top.area_of("conf/soda") == "AT"


def test_shipped_nontop_config():
    nontop = load_shipped("NONTOP")
    assert len(nontop.areas) == 6
    assert all(len(a.venues) == 5 for a in nontop.areas)


def test_icwe_listed_in_both_sets():
    assert load_shipped("TOP").area_of("conf/icwe") == "WWW"
    assert load_shipped("NONTOP").area_of("conf/icwe") == "WWW"


def _write(tmp_path, doc):
    p = tmp_path / "areas.yaml"
    p.write_text(yaml.safe_dump(doc))
    return p


def test_duplicate_venue_across_areas_is_fatal(tmp_path):
    p = _write(
        tmp_path,
        {
            "set": "TOP",
            "areas": [
                {"id": "DB", "venues": [{"abbr": "VLDB", "key": "conf/vldb"}]},
                {"id": "DMML", "venues": [{"abbr": "VLDB", "key": "conf/vldb"}]},
            ],
        },
    )
    with pytest.raises(AreaConfigError, match="DB and DMML"):
        load_area_config(p)


def test_missing_area_is_fatal(tmp_path):
    p = _write(
        tmp_path,
        {"set": "NONTOP", "expected_areas": 2, "areas": [{"id": "DB", "venues": [{"abbr": "X", "key": "conf/x"}]}]},
    )
    with pytest.raises(AreaConfigError, match="expected 2 areas"):
        load_area_config(p)


def test_unknown_venue_reported_with_area(tmp_path):
    p = _write(
        tmp_path,
        {"set": "TOP", "areas": [{"id": "DB", "venues": [{"abbr": "X", "key": "conf/x"}, {"abbr": "Y", "key": "conf/y"}]}]},
    )
    reg = build_registry([ProceedingsMeta("conf/x/2000", "X", 2000)])
    with pytest.raises(AreaConfigError, match="DB: conf/y"):
        load_area_config(p, reg)


@pytest.mark.parametrize(
    "doc, msg",
    [
        ({"set": "MID", "areas": [{"id": "A", "venues": [{"key": "conf/a"}]}]}, "'set' must be"),
        ({"set": "TOP", "areas": []}, "no areas"),
        ({"set": "TOP", "areas": [{"id": "A", "venues": []}]}, "lists no venues"),
        ({"set": "TOP", "areas": [{"id": "A", "venues": [{"abbr": "A", "key": "aaa"}]}]}, "malformed"),
        ({"set": "TOP", "areas": [{"id": "A", "venues": [{"key": "conf/a"}]}, {"id": "A", "venues": [{"key": "conf/b"}]}]}, "duplicate area"),
    ],
)
def test_config_validation(tmp_path, doc, msg):
    with pytest.raises(AreaConfigError, match=msg):
        load_area_config(_write(tmp_path, doc))


def test_multi_key_venue(tmp_path):
    p = _write(tmp_path, {"set": "TOP", "areas": [{"id": "SE", "venues": [{"abbr": "FM/FME", "keys": ["conf/fm", "conf/fme"]}]}]})
    aset = load_area_config(p)
    assert aset.area_of("conf/fme") == aset.area_of("conf/fm") == "SE"
