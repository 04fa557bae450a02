import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lens.careers import (
    N_BINS,
    AuthorProfile,
    TransitionMatrix,
    active_areas,
    area_breadth,
    author_periods,
    build_profiles,
    career_length_distribution,
    majority_area,
    mix_bin,
    period_profile,
    select_cohort,
    share_longer_than,
    start_area,
    top_transitions,
    transition_matrix,
    venue_mix,
)

import oracles
from synth import area_set, random_corpus, rec

AREAS = area_set({"AT": ["conf/stoc"], "DB": ["conf/vldb"], "DMML": ["conf/kdd"], "NET": ["conf/sigcomm"]})


def profile(author, by_year_area):
    """Profile from {(year, area): n}."""
    p = AuthorProfile(author, 0, 0)
    p.pubs_by_year_and_area = dict(by_year_area)
    by_year = {}
    for (y, _), n in by_year_area.items():
        by_year[y] = by_year.get(y, 0) + n
    p.pubs_by_year = dict(sorted(by_year.items()))
    p.first_year, p.last_year = min(by_year), max(by_year)
    p.pubs_top = p.pubs_cs = sum(by_year.values())
    return p


# career length


def test_career_length_three_authors():
    records = [
        rec("1", "A", 2000, "conf/stoc"),
        rec("2", "B", 2000, "conf/stoc"),
        rec("3", "B", 2004, "conf/stoc"),
        rec("4", "C", 1995, "conf/stoc"),
        rec("5", "C", 2009, "conf/stoc"),
    ]
    dist = career_length_distribution(build_profiles(records, AREAS).values())
    assert dist == pytest.approx({1: 100 / 3, 5: 100 / 3, 15: 100 / 3})
    assert share_longer_than(dist, 10) == pytest.approx(100 / 3)


def test_career_length_per_area_uses_area_span():
    records = [rec("1", "A", 2000, "conf/stoc"), rec("2", "A", 2005, "conf/vldb"), rec("3", "A", 2002, "conf/vldb")]
    profs = build_profiles(records, AREAS).values()
    assert career_length_distribution(profs, "DB") == {4: 100.0}
    assert career_length_distribution(profs, "NET") == {}


def test_profiles_scope():
    records = [rec("1", "A", 2000, "conf/stoc"), rec("2", "A", 1998, "conf/other"), rec("3", "Z", 1999, "conf/other")]
    top = build_profiles(records, AREAS)
    cs = build_profiles(records, AREAS, scope="cs")
    assert set(top) == {"A"} and set(cs) == {"A", "Z"}
    assert top["A"].first_year == 2000 and cs["A"].first_year == 1998
    assert top["A"].pubs_top == 1 and top["A"].pubs_cs == 2
    with pytest.raises(ValueError):
        build_profiles(records, AREAS, scope="nope")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_career_distribution_sums_to_100(seed):
    records = random_corpus(random.Random(seed), venues=("conf/stoc", "conf/vldb", "conf/kdd", "conf/x"))
    dist = career_length_distribution(build_profiles(records, AREAS).values())
    assert dist and abs(sum(dist.values()) - 100) < 1e-9


# active and start areas


def test_active_areas_examples():
    assert active_areas(profile("a", {(2000, "DB"): 3, (2001, "NET"): 1})) == {"DB"}
    assert active_areas(profile("a", {(2000, "DB"): 2, (2001, "AT"): 1})) == {"DB"}
    assert active_areas(profile("a", {(2000, "DB"): 1, (2001, "AT"): 1})) == set()
    assert active_areas(profile("a", {(2000, "DB"): 3, (2001, "AT"): 2})) == {"DB", "AT"}


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(2000, 2005), st.sampled_from(["AT", "DB", "NET"])), st.integers(1, 6), min_size=1))
def test_active_areas_monotone_in_threshold(counts):
    p = profile("a", counts)
    for k in range(1, 8):
        assert active_areas(p, k + 1) <= active_areas(p, k)


def test_area_breadth():
    profs = [
        profile("a", {(2000, "DB"): 2}),
        profile("b", {(2000, "DB"): 2, (2001, "AT"): 2, (2002, "NET"): 3}),
        profile("c", {(2000, "DB"): 2, (2001, "AT"): 2}),
        profile("d", {(2000, "DB"): 1}),  # no active area, not counted
    ]
    b = area_breadth(profs)
    assert (b.authors, b.mean_active_areas, b.single_area_share) == (3, 2.0, 1 / 3)
    assert area_breadth([]).mean_active_areas is None


def test_start_area_first_to_reach_threshold():
    p = profile("a", {(2000, "AT"): 1, (2001, "DB"): 2, (2003, "AT"): 1})
    assert start_area(p) == "DB"
    assert start_area(profile("a", {(2000, "AT"): 1})) is None


def test_start_area_tie_breaks():
    # same year: more lifetime papers wins
    p = profile("a", {(2000, "DB"): 2, (2000, "AT"): 2, (2001, "DB"): 1})
    assert start_area(p) == "DB"
    # same year and total: smaller id
    assert start_area(profile("a", {(2000, "NET"): 2, (2000, "AT"): 2})) == "AT"


# transitions


def test_transition_half():
    profs = [
        profile("a", {(2000, "DB"): 2, (2002, "DMML"): 2}),
        profile("b", {(2000, "DB"): 2}),
    ]
    m = transition_matrix(profs, ["DB", "DMML"])
    assert m.entries[("DB", "DMML")] == 0.5
    assert m.support == {"DB": 2, "DMML": 0}
    assert m.entries[("DMML", "DB")] is None
    assert m.undefined_rows == ["DMML"]


def test_transition_matrix_matches_recount_oracle():
    rng = random.Random(30)
    keys = {"conf/stoc": "AT", "conf/vldb": "DB", "conf/kdd": "DMML", "conf/sigcomm": "NET"}
    records = random_corpus(rng, n_authors=30, n_papers=200, venues=tuple(keys) + ("conf/x",))
    areas = ["AT", "DB", "DMML", "NET"]
    m = transition_matrix(build_profiles(records, AREAS).values(), areas)
    expected, support = oracles.transitions_by_recount(records, keys, areas)
    assert m.support == support
    for k, v in expected.items():
        assert (m.entries[k] is None) == (v is None)
        if v is not None:
            assert m.entries[k] == pytest.approx(float(v), abs=1e-12)


def test_transitions_invariant_under_author_duplication():
    rng = random.Random(4)
    records = random_corpus(rng, n_authors=20, n_papers=120, venues=("conf/stoc", "conf/vldb", "conf/kdd"))
    doubled = records + [
        rec(r.record_id + "b", [a + "_twin" for a in r.authors], r.year, r.venue) for r in records
    ]
    areas = AREAS.area_ids
    a = transition_matrix(build_profiles(records, AREAS).values(), areas)
    b = transition_matrix(build_profiles(doubled, AREAS).values(), areas)
    assert a.entries == b.entries
    assert {k: 2 * v for k, v in a.support.items()} == b.support


def test_top_transitions_tie_breaks():
    areas = ("AT", "DB", "NET", "X")
    entries = {(s, t): 0.0 for s in areas for t in areas if s != t}
    entries.update({("X", "AT"): 0.3, ("X", "DB"): 0.3, ("X", "NET"): 0.1})
    m = TransitionMatrix(areas, entries, {"AT": 5, "DB": 7, "NET": 1, "X": 2})
    tops = top_transitions(m, 3)
    assert tops["X"] == ["DB", "AT", "NET"]
    assert tops["AT"] == []  # all-zero row


def test_single_area_author_adds_nothing_to_targets():
    m = transition_matrix([profile("a", {(2000, "DB"): 4})], ["DB", "NET"])
    assert m.support["DB"] == 1 and m.entries[("DB", "NET")] == 0.0


def test_top_transitions_lists_dmml_to_db():
    profs = [profile("a", {(2000, "DMML"): 2, (2001, "DB"): 2}), profile("b", {(2000, "DMML"): 2})]
    m = transition_matrix(profs, ["DB", "DMML", "NET"])
    tops = top_transitions(m, 3)
    assert tops["DMML"] == ["DB"]
    assert tops["DB"] == [] and tops["NET"] == []


# productivity


def test_period_split():
    p = profile("a", {(2000 + i, "DB"): n for i, n in enumerate([1, 1, 1, 1, 1, 3, 3, 3, 3, 3])})
    assert author_periods(p) == [5, 15]


def test_partial_last_period():
    p = profile("a", {(2000, "DB"): 1, (2011, "DB"): 4})
    assert author_periods(p) == [1, 0, 4]


def test_empty_cohort_flag():
    pp = period_profile([], "single_area_top")
    assert pp.flags == ("empty_cohort",) and pp.mean_pubs_per_period == []


def test_period_means_four_authors():
    profs = [
        profile("a", {(2000, "DB"): 2, (2009, "DB"): 4}),  # [2, 4]
        profile("b", {(2000, "DB"): 6, (2005, "DB"): 2, (2010, "DB"): 3}),  # [6, 2, 3]
        profile("c", {(2000, "DB"): 1, (2004, "DB"): 1}),  # [2]
        profile("d", {(1990, "DB"): 3, (1999, "DB"): 1}),  # [3, 1]
    ]
    pp = period_profile(profs, "x")
    assert pp.authors_per_period == [4, 3, 1]
    assert pp.mean_pubs_per_period == pytest.approx([13 / 4, 7 / 3, 3.0])


@given(st.integers(1, 5), st.integers(1, 6), st.integers(1, 8))
def test_constant_rate_gives_flat_profile(rate, periods, n_authors):
    profs = [profile(f"a{i}", {(2000 + y, "DB"): rate for y in range(5 * periods)}) for i in range(n_authors)]
    pp = period_profile(profs, "x")
    assert pp.mean_pubs_per_period == [5.0 * rate] * periods


def test_cohort_selection():
    top = {
        "single": profile("single", {(2000, "DB"): 2, (2010, "DB"): 1}),
        "multi": profile("multi", {(2000, "DB"): 2, (2010, "AT"): 2}),
        "none": profile("none", {(2000, "DB"): 1, (2010, "AT"): 1}),
        "short": profile("short", {(2000, "DB"): 5}),
    }
    cs = dict(top)
    cs["short"] = profile("short", {(1990, "DB"): 5, (2000, "DB"): 5})
    assert [p.author for p in select_cohort(top, cs, "single_area_top")] == ["single"]
    assert [p.author for p in select_cohort(top, cs, "multi_area_top")] == ["multi"]
    assert sorted(p.author for p in select_cohort(top, cs, "top_authors_in_cs")) == ["multi", "none", "short", "single"]
    with pytest.raises(ValueError):
        select_cohort(top, cs, "bogus")


# venue mix


def test_mix_bins():
    assert mix_bin(3, 10) == 3
    assert mix_bin(10, 10) == N_BINS - 1
    assert mix_bin(0, 10) == 0
    assert mix_bin(1, 3) == 3  # 33.3%
    assert mix_bin(2, 3) == 6  # 66.7%


def _mix_profile(name, top, cs, area="DB"):
    p = profile(name, {(2000, area): top})
    p.pubs_cs = cs
    return p


def test_venue_mix_matches_oracle_12_authors():
    rng = random.Random(12)
    pairs = []
    for i in range(12):
        cs = rng.randint(1, 40)
        pairs.append((rng.randint(1, cs), cs))
    h = venue_mix([_mix_profile(f"a{i}", t, c) for i, (t, c) in enumerate(pairs)])
    expected = [0] * N_BINS
    for t, c in pairs:
        expected[oracles.decile_bin(t, c)] += 1
    assert h.counts == expected
    assert h.percentages == pytest.approx([100 * n / 12 for n in expected])


def test_venue_mix_zero_cs_excluded_and_counted():
    p = _mix_profile("z", 1, 1)
    p.pubs_cs = 0
    h = venue_mix([p, _mix_profile("a", 1, 2)])
    assert h.author_count == 1 and h.excluded_zero_cs == 1


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 50), st.integers(0, 50)), min_size=1, max_size=40))
def test_venue_mix_sums_to_100(pairs):
    profs = [_mix_profile(f"a{i}", t, t + extra) for i, (t, extra) in enumerate(pairs)]
    h = venue_mix(profs)
    assert abs(sum(h.percentages) - 100) <= 0.01
    for (t, extra), p in zip(pairs, profs):
        assert mix_bin(t, t + extra) == oracles.decile_bin(t, t + extra)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_per_area_conserves_authors_without_exclusions(seed):
    records = random_corpus(random.Random(seed), venues=("conf/stoc", "conf/vldb", "conf/kdd", "conf/x"))
    profs = list(build_profiles(records, AREAS).values())
    per_area = venue_mix(profs, per_area=True)
    assert sum(h.author_count for h in per_area.values()) == venue_mix(profs).author_count == len(profs)
    total = [0] * N_BINS
    for h in per_area.values():
        total = [a + b for a, b in zip(total, h.counts)]
    assert total == venue_mix(profs).counts
    excluded = venue_mix(profs, per_area=True, exclude_areas=["DB"])
    assert "DB" not in excluded


def test_majority_area_tie_breaks():
    # equal counts: earlier first paper wins
    assert majority_area(profile("a", {(2001, "AT"): 2, (2000, "NET"): 2})) == "NET"
    # equal counts and first year: area id
    assert majority_area(profile("a", {(2000, "NET"): 2, (2000, "AT"): 2})) == "AT"
    assert majority_area(profile("a", {(2000, "NET"): 1, (2001, "AT"): 3})) == "AT"


def test_decile_oracle_agrees_on_boundaries():
    for cs in range(1, 41):
        for top in range(cs + 1):
            assert mix_bin(top, cs) == oracles.decile_bin(top, cs), (top, cs)
            assert Fraction(100 * top, cs) >= 10 * mix_bin(top, cs)
