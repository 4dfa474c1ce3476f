"""5v5 time on ice and on-ice event co-occurrence.

For each team we accumulate square tables indexed by the team's players:
``toi[i, j]`` is the 5v5 seconds ``i`` and ``j`` spent on the ice together
(the diagonal is each player's own 5v5 TOI), and ``goals_for`` /
``shots_for`` count the team's 5v5 goals / shots on goal with both on the
ice.  All counts are integers; rates are formed only at division time.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .dataset import SeasonDataset, _write_atomic


@dataclass
class TeamTable:
    team_id: str
    players: tuple
    index: dict = field(repr=False)
    toi: np.ndarray = field(repr=False)
    goals_for: np.ndarray = field(repr=False)
    shots_for: np.ndarray = field(repr=False)
    goals: np.ndarray = field(repr=False)
    shots: np.ndarray = field(repr=False)
    assists: np.ndarray = field(repr=False)
    team_seconds: int = 0
    team_goals: int = 0
    team_shots: int = 0

    @classmethod
    def empty(cls, team_id, players):
        n = len(players)
        sq = lambda: np.zeros((n, n), dtype=np.int64)  # noqa: E731
        vec = lambda: np.zeros(n, dtype=np.int64)  # noqa: E731
        return cls(team_id, tuple(players), {p: i for i, p in enumerate(players)},
                   sq(), sq(), sq(), vec(), vec(), vec())


def build_team_tables(ds: SeasonDataset) -> dict[str, TeamTable]:
    roster = {}
    for pid in sorted(ds.players):
        roster.setdefault(ds.players[pid].team_id, []).append(pid)
    tables = {team: TeamTable.empty(team, pids) for team, pids in roster.items()}

    for game_id, game in ds.games.items():
        five_dur = game.durations * game.five
        events = ds.events_by_game.get(game_id, [])
        seg = game.segment_at([ev.elapsed_s for ev in events])
        in_five = (seg >= 0) & game.five[np.maximum(seg, 0)] if len(events) else np.zeros(0, bool)
        ev_team = np.array([ev.team_id for ev in events], dtype=object)
        is_goal = np.array([ev.event_type == "GOAL" for ev in events], dtype=np.int64)

        for side, team in enumerate(game.teams):
            tab = tables[team]
            cols = np.flatnonzero(game.side == side)
            idx = np.array([tab.index[game.players[c]] for c in cols], dtype=np.int64)
            ix = np.ix_(idx, idx)
            sub = game.member[:, cols]
            tab.toi[ix] += kernels.cooccurrence(sub, five_dur)
            tab.team_seconds += int(five_dur.sum())

            if not len(events):
                continue
            mask = in_five & (ev_team == team)
            if not mask.any():
                continue
            rows = sub[seg[mask]]
            goals = is_goal[mask]
            tab.shots_for[ix] += kernels.cooccurrence(rows, np.ones(len(rows), dtype=np.int64))
            tab.goals_for[ix] += kernels.cooccurrence(rows, goals)
            tab.team_shots += int(mask.sum())
            tab.team_goals += int(goals.sum())
            for k in np.flatnonzero(mask):
                ev = events[k]
                tab.shots[tab.index[ev.shooter_id]] += 1
                if is_goal[k]:
                    tab.goals[tab.index[ev.shooter_id]] += 1
                    for pid in ev.assisters:
                        tab.assists[tab.index[pid]] += 1
    return tables


def team_table(ds: SeasonDataset, player) -> tuple[TeamTable, int]:
    """The player's team table and row index."""
    info = ds.player(player)
    tab = ds.team_tables[info.team_id]
    return tab, tab.index[player]


def overlap(a, b) -> int:
    """Length of the intersection of two half-open intervals."""
    return max(0, min(a[1], b[1]) - max(a[0], b[0]))


def player_toi(ds: SeasonDataset, player) -> int:
    """5v5 seconds on ice."""
    tab, i = team_table(ds, player)
    return int(tab.toi[i, i])


def _pair(ds, i, a):
    if i == a:
        raise ValueError("pair TOI needs two distinct players")
    ti, ii = team_table(ds, i)
    ta, ia = team_table(ds, a)
    if ti is not ta:
        raise ValueError(f"{i} ({ti.team_id}) and {a} ({ta.team_id}) are on different teams")
    return ti, ii, ia


def pair_toi(ds: SeasonDataset, i, a) -> int:
    """5v5 seconds with both ``i`` and ``a`` on the ice."""
    tab, ii, ia = _pair(ds, i, a)
    return int(tab.toi[ii, ia])


def toi_without(ds: SeasonDataset, i, a) -> int:
    """5v5 seconds ``i`` played while ``a`` was off the ice."""
    tab, ii, ia = _pair(ds, i, a)
    return int(tab.toi[ii, ii] - tab.toi[ii, ia])


def toi_table(ds: SeasonDataset) -> dict:
    return {p: player_toi(ds, p) for p in sorted(ds.players)}


def write_toi_csv(ds: SeasonDataset, path) -> None:
    _write_atomic(path, ("player_id", "toi_s"), sorted(toi_table(ds).items()))


def write_pair_toi_csv(ds: SeasonDataset, path) -> None:
    """Nonzero shared TOI, one row per unordered pair with ``player_i < player_j``."""
    rows = []
    for tab in ds.team_tables.values():
        for a, pa in enumerate(tab.players):
            for b, pb in enumerate(tab.players):
                if pa < pb and tab.toi[a, b]:
                    rows.append((pa, pb, int(tab.toi[a, b])))
    _write_atomic(path, ("player_i", "player_j", "seconds"), sorted(rows))


def read_toi_csv(path) -> dict:
    with open(path, newline="", encoding="utf-8") as fh:
        return {row["player_id"]: int(row["toi_s"]) for row in csv.DictReader(fh)}

