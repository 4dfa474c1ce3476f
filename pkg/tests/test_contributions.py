import functools
import math

import pytest
from hypothesis import given, strategies as st

from playmaking.contributions import (AggregateStats, ContributionRecord, Measure, aggregate_counts,
                                      assists_per60, contribution, fmt2, leaderboard, off_ice_components,
                                      per60, raw_goal_decomposition, rate_decomposition, read_contrib_csv,
                                      season_contributions, unweighted_off_rate, weighted_average,
                                      weighted_decomposition, weighted_off_rate, write_contrib_csv)
from playmaking.dataset import SeasonDataset, Shift
from playmaking.errors import NoOffIceTimeError, NoSharedTimeError, UndefinedRateError

from .conftest import full_strength_game, goal, shot
from .fixtures import TOP_ALTRUISTIC_FORWARDS
from .oracles import brute_counts, brute_toi, random_season


def stats(G, g, gf):
    return AggregateStats("P", G, g, gf, 0, 0, 0, 0, 0)


@pytest.mark.parametrize("name", sorted(TOP_ALTRUISTIC_FORWARDS))
def test_raw_goals_published_rows(name):
    G, off, m, c, a = TOP_ALTRUISTIC_FORWARDS[name]
    assert raw_goal_decomposition(stats(G, c, G - off)) == (m, c, a)


def test_raw_goals_sole_scorer():
    assert raw_goal_decomposition(stats(50, 12, 12)) == (12, 12, 0)


@pytest.mark.parametrize("count, seconds, rate", [(2, 3600, 2.0), (0, 17, 0.0), (1, 60, 60.0)])
def test_per60(count, seconds, rate):
    assert per60(count, seconds) == rate


def test_per60_zero_seconds():
    with pytest.raises(UndefinedRateError):
        per60(3, 0)


# ---- aggregate counts against event enumeration

@pytest.fixture(scope="module")
def random_ds():
    shifts, events = random_season(21, n_games=12, events_per_game=40)
    return shifts, events, SeasonDataset.from_records(shifts, events)


def skaters(ds):
    return sorted(p for p, info in ds.players.items() if info.position != "G")


def test_aggregate_counts_match_enumeration(random_ds):
    shifts, events, ds = random_ds
    c = brute_counts(shifts, events)
    toi, _, team_s = brute_toi(shifts)
    for p in skaters(ds):
        st_ = aggregate_counts(ds, p)
        team = ds.players[p].team_id
        assert (st_.G, st_.S) == (c["team_G"][team], c["team_S"][team])
        assert (st_.g, st_.s, st_.gf, st_.sf) == (c["g"][p], c["s"][p], c["gf"][p], c["sf"][p])
        assert (st_.toi_s, st_.team_toi_s) == (toi[p], team_s[team])
        assert 0 <= st_.g <= st_.gf <= st_.G
        assert 0 <= st_.s <= st_.sf <= st_.S
        assert st_.g <= st_.s and st_.gf <= st_.sf
        assert assists_per60(ds, p) == pytest.approx(c["assists"][p] * 3600 / toi[p], rel=1e-15) \
            if toi[p] else True


def test_on_for_everything():
    events = [goal(10, "TA", "TA1", "TA2"), goal(20, "TA", "TA2"), shot(30, "TA", "TA0")]
    ds = SeasonDataset.from_records(full_strength_game(), events)
    st_ = aggregate_counts(ds, "TA0")
    assert (st_.G, st_.g, st_.gf, st_.S, st_.s, st_.sf) == (2, 0, 2, 3, 1, 3)


def test_never_on_for_a_goal():
    shifts = [sh for sh in full_strength_game() if sh.player_id != "TA0"]
    shifts += [Shift("G1", "TA0", "TA", "C", 0, 100), Shift("G1", "X", "TA", "C", 100, 3600)]
    ds = SeasonDataset.from_records(shifts, [goal(500, "TA", "X")])
    assert aggregate_counts(ds, "TA0").gf == 0


def test_assists_per60_examples():
    ds = SeasonDataset.from_records(full_strength_game(length=1800), [goal(5, "TA", "TA0", "TA1")])
    assert assists_per60(ds, "TA1") == 2.0
    assert assists_per60(ds, "TA2") == 0.0


# ---- GOALS60

def test_rate_decomposition_matches_hand_rates(random_ds):
    shifts, events, ds = random_ds
    c = brute_counts(shifts, events)
    toi, _, team_s = brute_toi(shifts)
    n = 0
    for p in skaters(ds):
        team = ds.players[p].team_id
        if not toi[p] or toi[p] == team_s[team]:
            continue
        r = rate_decomposition(ds, p)
        G = c["team_G"][team]
        on = G * 3600 / team_s[team]
        off = (G - c["gf"][p]) * 3600 / (team_s[team] - toi[p])
        assert r.on_rate == pytest.approx(on, rel=1e-12)
        assert r.off_rate == pytest.approx(off, rel=1e-12)
        assert r.c == pytest.approx(c["g"][p] * 3600 / toi[p], rel=1e-12)
        n += 1
    assert n > 10


def test_rate_decomposition_all_team_time():
    ds = SeasonDataset.from_records(full_strength_game(), [goal(5, "TA", "TA0")])
    with pytest.raises(UndefinedRateError, match="off-ice"):
        rate_decomposition(ds, "TA1")


def two_line_game():
    """Lines L1 and L2 alternate every 600 s with a fixed D pair and goalie."""
    shifts = []
    for team in ("TA", "TB"):
        shifts += [Shift("G1", f"{team}D1", team, "D", 0, 3600),
                   Shift("G1", f"{team}D2", team, "D", 0, 3600),
                   Shift("G1", f"{team}G", team, "G", 0, 3600)]
        for k in range(6):
            line = k % 2 + 1
            for pos in ("LW", "C", "RW"):
                shifts.append(Shift("G1", f"{team}{pos}{line}", team, pos, 600 * k, 600 * (k + 1)))
    return shifts


def test_uniform_scoring_gives_zero_margin():
    # one TA goal in every 600 s block, scored by a defenseman
    events = [goal(600 * k + 10, "TA", "TAD1") for k in range(6)]
    ds = SeasonDataset.from_records(two_line_game(), events)
    r = rate_decomposition(ds, "TAC1")
    assert r.on_rate == r.off_rate == 6.0
    assert r.m == 0 and r.c == 0 and r.a == 0


# ---- weighted off-rate

def test_weighted_average_examples():
    assert weighted_average([3.0], [120]) == 3.0
    assert weighted_average([2.0, 4.0], [50, 50]) == 3.0
    assert weighted_average([1.0, 4.0], [300, 100]) == 1.75
    with pytest.raises(NoSharedTimeError):
        weighted_average([], [])


rates = st.floats(0, 500, allow_nan=False)
weights = st.integers(1, 10 ** 6)


@given(st.lists(st.tuples(rates, weights), min_size=1, max_size=30),
       st.floats(1e-6, 1e6, allow_nan=False))
def test_weighted_average_range_and_scaling(pairs, k):
    r = [p[0] for p in pairs]
    w = [p[1] for p in pairs]
    avg = weighted_average(r, w)
    assert min(r) <= avg <= max(r)
    scaled = weighted_average(r, [x * k for x in w])
    assert abs(scaled - avg) <= 1e-12 * max(abs(avg), 1e-300) or scaled == avg


def naive_off_rate(shifts, events, player, kind):
    """Direct sum over teammates from brute counts."""
    c = brute_counts(shifts, events)
    toi, pair, _ = brute_toi(shifts)
    team_of = {sh.player_id: sh.team_id for sh in shifts}
    pos = {sh.player_id: sh.position for sh in shifts}
    num = den = 0.0
    for i in sorted(set(team_of)):
        if i == player or team_of[i] != team_of[player] or pos[i] == "G":
            continue
        w = pair[(i, player)]
        apart = toi[i] - w
        if w == 0 or apart == 0:
            continue
        gf_i = (c[kind][i] - c[kind + "_pair"][(i, player)]) * 3600 / apart
        num += gf_i * w
        den += w
    return num / den


def test_weighted_off_rate_equals_naive_sum(random_ds):
    shifts, events, ds = random_ds
    n = 0
    for p in skaters(ds)[::3]:
        for measure, kind in ((Measure.WGOALS60, "gf"), (Measure.WSHOTS60, "sf")):
            try:
                got = weighted_off_rate(ds, p, measure)
            except UndefinedRateError:
                continue
            assert got == pytest.approx(naive_off_rate(shifts, events, p, kind), rel=1e-12)
            n += 1
    assert n > 10


def test_weighted_off_rate_within_component_range(random_ds):
    _, _, ds = random_ds
    for p in skaters(ds):
        try:
            comps = off_ice_components(ds, p, Measure.WSHOTS60)
        except UndefinedRateError:
            continue
        got = weighted_off_rate(ds, p, Measure.WSHOTS60)
        assert min(r for _, r, _ in comps) <= got <= max(r for _, r, _ in comps)
        assert all(ds.players[m].position != "G" and w > 0 for m, _, w in comps)


def test_inseparable_teammate_is_excluded():
    # linemates never play apart; the D pair plays with both lines
    ds = SeasonDataset.from_records(two_line_game(), [shot(10, "TA", "TAC1")])
    comps = off_ice_components(ds, "TAC1", Measure.WSHOTS60)
    assert {m for m, _, _ in comps} == {"TAD1", "TAD2"}
    assert all(w == 1800 for _, _, w in comps)
    # a D-man is on for everything, so no teammate is ever apart from them
    with pytest.raises(NoOffIceTimeError):
        off_ice_components(ds, "TAD1", Measure.WSHOTS60)


def test_no_shared_time_error():
    ds = SeasonDataset.from_records(full_strength_game(), [], roster={"PX": ("TA", "C")})
    with pytest.raises(NoSharedTimeError):
        weighted_off_rate(ds, "PX", Measure.WGOALS60)


def test_no_off_ice_time_error():
    ds = SeasonDataset.from_records(full_strength_game(), [])
    with pytest.raises(NoOffIceTimeError):
        weighted_off_rate(ds, "TA0", Measure.WGOALS60)


def test_weighted_decomposition_zero_margin():
    # L1 and L2 each on for one TA goal per block: on-rate equals the D's off-rate
    events = [goal(600 * k + 10, "TA", "TAD1") for k in range(6)]
    ds = SeasonDataset.from_records(two_line_game(), events)
    r = weighted_decomposition(ds, "TAC1", Measure.WGOALS60)
    assert r.on_rate == r.off_rate and r.m == 0.0 and r.a == -r.c


def test_weighted_decomposition_rejects_other_measures(random_ds):
    with pytest.raises(ValueError):
        weighted_decomposition(random_ds[2], "TA_s0p0", Measure.GOALS60)


def test_unweighted_off_rate(random_ds):
    shifts, events, ds = random_ds
    c = brute_counts(shifts, events)
    toi, _, team_s = brute_toi(shifts)
    p = "TA_s1p1"
    expect = (c["team_S"]["TA"] - c["sf"][p]) * 3600 / (team_s["TA"] - toi[p])
    assert unweighted_off_rate(ds, p, Measure.WSHOTS60) == pytest.approx(expect, rel=1e-12)


# ---- identity and records

@pytest.mark.parametrize("measure", list(Measure))
def test_decomposition_identity(small_season, measure):
    _, ds = small_season
    recs = season_contributions(ds, measure)
    assert len(recs) > 20
    for r in recs:
        if measure is Measure.RAW_GOALS:
            assert r.m == r.c + r.a
        else:
            assert abs(r.m - (r.c + r.a)) <= 1e-12 * max(1.0, abs(r.m))
        if measure in (Measure.WGOALS60, Measure.WSHOTS60):
            assert r.m == r.on_rate - r.off_rate
        assert r.position != "G"
    assert [r.player_id for r in recs] == sorted(r.player_id for r in recs)


def test_contrib_csv_round_trip(tmp_path, small_season):
    _, ds = small_season
    recs = season_contributions(ds, Measure.WSHOTS60)
    write_contrib_csv(recs, tmp_path / "c.csv")
    back = read_contrib_csv(tmp_path / "c.csv")
    assert [r.player_id for r in back] == [r.player_id for r in recs]
    for a, b in zip(back, recs):
        assert a.m == pytest.approx(b.m, abs=1e-6) and a.toi_s == b.toi_s


def test_fmt2_half_even():
    assert fmt2(0.125) == "0.12"
    assert fmt2(0.375) == "0.38"
    assert fmt2(2) == "2.00"
    assert fmt2(-1.005) == "-1.00"


# ---- leaderboard

def rec(pid, a, toi, pos="C"):
    return ContributionRecord(pid, pos, "T", Measure.WGOALS60, toi, 0.0, 0.0, a, 0.0, a)


def test_leaderboard_empty_when_cutoff_too_high():
    assert leaderboard([rec("A", 1.0, 600)], min_minutes=11) == []


def test_leaderboard_tie_prefers_more_toi():
    rows = [rec("A", 1.0, 600), rec("B", 1.0, 900), rec("C", 1.0, 900), rec("D", 2.0, 60)]
    assert [r.player_id for r in leaderboard(rows)] == ["D", "B", "C", "A"]


def test_leaderboard_group_filter():
    rows = [rec("A", 1.0, 600, "D"), rec("B", 0.5, 600, "LW")]
    assert [r.player_id for r in leaderboard(rows, "defensemen")] == ["A"]
    assert [r.player_id for r in leaderboard(rows, "forwards")] == ["B"]
    assert len(leaderboard(rows, "all")) == 2
    with pytest.raises(ValueError):
        leaderboard(rows, sort_key="bogus")


def test_leaderboard_matches_oracle_sort(small_season):
    _, ds = small_season
    recs = season_contributions(ds, Measure.WSHOTS60)

    def cmp(x, y):
        for a, b in ((y.a, x.a), (y.toi_s, x.toi_s)):
            if a != b:
                return -1 if a < b else 1
        return (x.player_id > y.player_id) - (x.player_id < y.player_id)

    expect = sorted((r for r in recs if r.position in ("LW", "C", "RW") and r.toi_s >= 3000),
                    key=functools.cmp_to_key(cmp))
    assert leaderboard(recs, "forwards", 50) == expect
    assert leaderboard(recs, "forwards", 50, top_n=5) == expect[:5]


def test_contribution_dispatch(small_season):
    _, ds = small_season
    p = next(p for p, i in ds.players.items() if i.position == "C")
    assert contribution(ds, p, "RAW_GOALS").measure is Measure.RAW_GOALS
    assert contribution(ds, p, Measure.GOALS60).off_rate >= 0
    assert math.isfinite(contribution(ds, p, "WSHOTS60").a)
