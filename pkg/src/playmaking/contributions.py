"""Marginal, competitive and altruistic contributions.

Four measures are supported:

``RAW_GOALS``
    season goal counts: ``m = gf``, ``c = g``, ``a = gf - g``.
``GOALS60``
    team goals per 60 over all team time minus the rate while the player is
    off the ice; ``c`` is the player's own goals per 60.
``WGOALS60`` / ``WSHOTS60``
    on-ice goals (shots) for per 60 minus the off-ice rate of the player's
    teammates, each weighted by the time shared with the player.

In every case ``a = m - c``, so the decomposition ``m = c + a`` holds by
construction.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from enum import Enum
from typing import Iterable, Optional

from .dataset import GOALIE, GROUPS, SeasonDataset, _write_atomic
from .errors import (DataError, NoOffIceTimeError, NoSharedTimeError, UndefinedRateError)
from .toi import team_table

log = logging.getLogger(__name__)


class Measure(str, Enum):
    RAW_GOALS = "RAW_GOALS"
    GOALS60 = "GOALS60"
    WGOALS60 = "WGOALS60"
    WSHOTS60 = "WSHOTS60"


@dataclass(frozen=True)
class AggregateStats:
    player_id: str
    G: int
    g: int
    gf: int
    S: int
    s: int
    sf: int
    toi_s: int
    team_toi_s: int


@dataclass(frozen=True)
class ContributionRecord:
    player_id: str
    position: str
    team_id: str
    measure: Measure
    toi_s: int
    on_rate: float
    off_rate: float
    m: float
    c: float
    a: float


CONTRIB_HEADER = ("player_id", "position", "team_id", "measure", "toi_s",
                  "on_rate", "off_rate", "m", "c", "a")


def per60(count, seconds) -> float:
    if seconds <= 0:
        raise UndefinedRateError(f"rate over {seconds} seconds is undefined")
    return count * 3600 / seconds


def aggregate_counts(ds: SeasonDataset, player) -> AggregateStats:
    """Season 5v5 goal and shot tallies for a player and the player's team."""
    tab, i = team_table(ds, player)
    return AggregateStats(
        player_id=player,
        G=tab.team_goals, g=int(tab.goals[i]), gf=int(tab.goals_for[i, i]),
        S=tab.team_shots, s=int(tab.shots[i]), sf=int(tab.shots_for[i, i]),
        toi_s=int(tab.toi[i, i]), team_toi_s=tab.team_seconds,
    )


def raw_goal_decomposition(stats: AggregateStats) -> tuple[int, int, int]:
    """``(m, c, a)`` from raw goal counts."""
    c = stats.g
    a = stats.gf - stats.g
    return c + a, c, a


def _record(ds, player, measure, toi_s, on, off, m, c):
    info = ds.player(player)
    return ContributionRecord(player, info.position, info.team_id, measure, toi_s,
                              on, off, m, c, m - c)


def raw_goal_record(ds: SeasonDataset, player) -> ContributionRecord:
    st = aggregate_counts(ds, player)
    m, c, a = raw_goal_decomposition(st)
    return _record(ds, player, Measure.RAW_GOALS, st.toi_s, st.G, st.G - st.gf, m, c)


def rate_decomposition(ds: SeasonDataset, player) -> ContributionRecord:
    """Unweighted per-60 decomposition: team rate overall versus with the player off."""
    st = aggregate_counts(ds, player)
    off_s = st.team_toi_s - st.toi_s
    if st.toi_s <= 0:
        raise UndefinedRateError(f"{player} has no 5v5 time on ice")
    if off_s <= 0:
        raise UndefinedRateError(f"{player} was on the ice for all team time; off-ice rate undefined")
    on = per60(st.G, st.team_toi_s)
    off = per60(st.G - st.gf, off_s)
    return _record(ds, player, Measure.GOALS60, st.toi_s, on, off, on - off, per60(st.g, st.toi_s))


def _for_table(tab, measure):
    if measure in (Measure.WGOALS60, Measure.GOALS60, "goals"):
        return tab.goals_for
    if measure in (Measure.WSHOTS60, "shots"):
        return tab.shots_for
    raise ValueError(f"no on-ice table for measure {measure!r}")


def off_ice_components(ds: SeasonDataset, player, measure) -> list[tuple[str, float, int]]:
    """``(teammate, rate without player, shared seconds)`` for every teammate
    that counts towards the weighted off-ice rate.

    Goalies never count.  Teammates with no shared time carry zero weight and
    are left out; teammates with shared time but none apart are excluded
    because their without-player rate is undefined.
    """
    tab, a = team_table(ds, player)
    events = _for_table(tab, measure)
    out = []
    shared_any = False
    for i, mate in enumerate(tab.players):
        if i == a or ds.players[mate].position == GOALIE:
            continue
        w = int(tab.toi[i, a])
        if w == 0:
            continue
        shared_any = True
        apart = int(tab.toi[i, i]) - w
        if apart == 0:
            continue
        out.append((mate, per60(int(events[i, i] - events[i, a]), apart), w))
    if not shared_any:
        raise NoSharedTimeError(f"no teammate shared 5v5 ice with {player}")
    if not out:
        raise NoOffIceTimeError(f"every linemate of {player} never played apart from them")
    return out


def weighted_average(rates, weights) -> float:
    rates = list(rates)
    weights = list(weights)
    total = math.fsum(weights)
    if not rates or total <= 0:
        raise NoSharedTimeError("weighted average over zero total weight")
    avg = math.fsum(r * w for r, w in zip(rates, weights)) / total
    # exact mean lies in [min, max]; guard against the last-ulp rounding
    return min(max(avg, min(rates)), max(rates))


def weighted_off_rate(ds: SeasonDataset, player, measure) -> float:
    comps = off_ice_components(ds, player, measure)
    return weighted_average([r for _, r, _ in comps], [w for _, _, w in comps])


def unweighted_off_rate(ds: SeasonDataset, player, measure) -> float:
    """Team rate over all 5v5 time the player was off the ice."""
    tab, a = team_table(ds, player)
    events = _for_table(tab, measure)
    total = tab.team_goals if events is tab.goals_for else tab.team_shots
    return per60(total - int(events[a, a]), tab.team_seconds - int(tab.toi[a, a]))


def weighted_decomposition(ds: SeasonDataset, player, measure=Measure.WSHOTS60) -> ContributionRecord:
    measure = Measure(measure)
    if measure not in (Measure.WGOALS60, Measure.WSHOTS60):
        raise ValueError(f"weighted decomposition needs WGOALS60 or WSHOTS60, got {measure.value}")
    st = aggregate_counts(ds, player)
    if st.toi_s <= 0:
        raise UndefinedRateError(f"{player} has no 5v5 time on ice")
    goals = measure is Measure.WGOALS60
    on = per60(st.gf if goals else st.sf, st.toi_s)
    off = weighted_off_rate(ds, player, measure)
    c = per60(st.g if goals else st.s, st.toi_s)
    return _record(ds, player, measure, st.toi_s, on, off, on - off, c)


def assists_per60(ds: SeasonDataset, player) -> float:
    """Primary plus secondary 5v5 assists per 60 minutes."""
    tab, i = team_table(ds, player)
    return per60(int(tab.assists[i]), int(tab.toi[i, i]))


def contribution(ds: SeasonDataset, player, measure) -> ContributionRecord:
    measure = Measure(measure)
    if measure is Measure.RAW_GOALS:
        return raw_goal_record(ds, player)
    if measure is Measure.GOALS60:
        return rate_decomposition(ds, player)
    return weighted_decomposition(ds, player, measure)


def season_contributions(ds: SeasonDataset, measure, players: Optional[Iterable] = None) -> list[ContributionRecord]:
    """Records for every skater (or the given players), ordered by player id.

    Players whose rates are undefined (no ice time, no off-ice reference) are
    skipped and logged.
    """
    if players is None:
        players = [p for p, info in ds.players.items() if info.position != GOALIE]
    out = []
    for p in sorted(players):
        try:
            out.append(contribution(ds, p, measure))
        except UndefinedRateError as exc:
            log.info("skipping %s: %s", p, exc)
    return out


SORT_KEYS = ("m", "c", "a", "on_rate", "off_rate", "toi_s")


def leaderboard(records, group="forwards", min_minutes=0, sort_key="a", top_n=None) -> list[ContributionRecord]:
    """Filter by position group and minutes, sort descending by ``sort_key``.

    Ties go to the player with more ice time, then to the smaller player id.
    """
    if sort_key not in SORT_KEYS:
        raise ValueError(f"sort key must be one of {SORT_KEYS}")
    positions = GROUPS[group]
    rows = [r for r in records if r.position in positions and r.toi_s >= min_minutes * 60]
    rows.sort(key=lambda r: r.player_id)
    rows.sort(key=lambda r: (getattr(r, sort_key), r.toi_s), reverse=True)
    return rows if top_n is None else rows[:top_n]


def fmt2(x) -> str:
    """Two-decimal display with round-half-even on the shortest decimal repr."""
    return str(Decimal(repr(float(x))).quantize(Decimal("0.01"), rounding=ROUND_HALF_EVEN))


def _fmt(x) -> str:
    return f"{x:.6f}"


def write_contrib_csv(records: Iterable[ContributionRecord], path) -> None:
    _write_atomic(path, CONTRIB_HEADER, (
        (r.player_id, r.position, r.team_id, Measure(r.measure).value, r.toi_s,
         _fmt(r.on_rate), _fmt(r.off_rate), _fmt(r.m), _fmt(r.c), _fmt(r.a))
        for r in records))


def read_contrib_csv(path) -> list[ContributionRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CONTRIB_HEADER:
            raise DataError(f"header must be {','.join(CONTRIB_HEADER)!r}", path, 1)
        for row in reader:
            try:
                out.append(ContributionRecord(
                    row["player_id"], row["position"], row["team_id"], Measure(row["measure"]),
                    int(row["toi_s"]), *(float(row[k]) for k in ("on_rate", "off_rate", "m", "c", "a"))))
            except ValueError as exc:
                raise DataError(f"malformed row: {exc}", path, reader.line_num) from None
    return out
