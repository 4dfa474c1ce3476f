"""Shift and event ingest, strength-state derivation and the 5v5 filter.

Every interval in this package is half-open: a shift ``[start_s, end_s)``
covers instant ``t`` iff ``start_s <= t < end_s``, so an event on a change
boundary belongs to the incoming shift.
"""
from __future__ import annotations

import csv
import logging
import os
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Optional

import numpy as np

from . import kernels
from .errors import DataError, UnknownGameError, UnknownPlayerError

log = logging.getLogger(__name__)

POSITIONS = ("C", "LW", "RW", "D", "G")
FORWARDS = frozenset({"C", "LW", "RW"})
DEFENSEMEN = frozenset({"D"})
GOALIE = "G"
EVENT_TYPES = ("SHOT", "GOAL")

SHIFT_HEADER = ("game_id", "player_id", "team_id", "position", "start_s", "end_s")
EVENT_HEADER = (
    "game_id", "elapsed_s", "event_type", "team_id", "shooter_id", "assist1_id", "assist2_id",
)

GROUPS = {"forwards": FORWARDS, "defensemen": DEFENSEMEN, "all": FORWARDS | DEFENSEMEN}


class Shift(NamedTuple):
    game_id: str
    player_id: str
    team_id: str
    position: str
    start_s: int
    end_s: int


class GameEvent(NamedTuple):
    game_id: str
    elapsed_s: int
    event_type: str
    team_id: str
    shooter_id: str
    assist1_id: Optional[str] = None
    assist2_id: Optional[str] = None

    @property
    def assisters(self) -> tuple:
        return tuple(p for p in (self.assist1_id, self.assist2_id) if p is not None)


@dataclass(frozen=True)
class StrengthInterval:
    game_id: str
    start_s: int
    end_s: int
    skaters_home: int
    skaters_away: int
    goalie_home_on: bool
    goalie_away_on: bool

    @property
    def is_five_on_five(self) -> bool:
        return (self.skaters_home == 5 and self.skaters_away == 5
                and self.goalie_home_on and self.goalie_away_on)


@dataclass(frozen=True)
class PlayerInfo:
    position: str
    team_id: str


def position_group(position: str) -> str:
    if position in FORWARDS:
        return "forwards"
    if position in DEFENSEMEN:
        return "defensemen"
    return "goalies"


# --------------------------------------------------------------------------
# file io

def _rows(path, header):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise DataError("empty file, expected header", path) from None
        if tuple(first) != header:
            raise DataError(f"header must be {','.join(header)!r}, got {','.join(first)!r}", path, 1)
        for row in reader:
            if not row:
                continue
            yield reader.line_num, row


def _int(value, field, path, line):
    try:
        return int(value)
    except ValueError:
        raise DataError(f"malformed row: {field} must be an integer, got {value!r}", path, line) from None


def parse_shifts(path) -> list[Shift]:
    """Read and validate a shifts file."""
    shifts = []
    lines = []
    for line, row in _rows(path, SHIFT_HEADER):
        if len(row) != len(SHIFT_HEADER):
            raise DataError(f"malformed row: expected {len(SHIFT_HEADER)} fields, got {len(row)}", path, line)
        game_id, player_id, team_id, position, start, end = row
        if not game_id or not player_id or not team_id:
            raise DataError("malformed row: empty identifier", path, line)
        shifts.append(Shift(game_id, player_id, team_id, position,
                            _int(start, "start_s", path, line), _int(end, "end_s", path, line)))
        lines.append(line)
    validate_shifts(shifts, path=path, lines=lines)
    return shifts


def validate_shifts(shifts: list[Shift], path=None, lines=None) -> None:
    """Check per-row invariants, roster consistency and per-player non-overlap."""
    roster = {}
    by_player = defaultdict(list)
    for k, sh in enumerate(shifts):
        line = lines[k] if lines else None
        if sh.position not in POSITIONS:
            raise DataError(f"unknown position code {sh.position!r}", path, line)
        if sh.start_s < 0:
            raise DataError("start_s must be non-negative", path, line)
        if sh.start_s >= sh.end_s:
            raise DataError(f"empty interval [{sh.start_s},{sh.end_s})", path, line)
        info = (sh.team_id, sh.position)
        if roster.setdefault(sh.player_id, info) != info:
            raise DataError(f"player {sh.player_id!r} listed with inconsistent team/position", path, line)
        by_player[(sh.game_id, sh.player_id)].append((sh.start_s, sh.end_s, line))
    for (game_id, player_id), spans in by_player.items():
        spans.sort()
        for (s0, e0, _), (s1, e1, line) in zip(spans, spans[1:]):
            if s1 < e0:
                raise DataError(
                    f"overlapping shifts for {player_id} in {game_id}: [{s0},{e0}) and [{s1},{e1})",
                    path, line,
                )


def parse_events(path) -> list[GameEvent]:
    events = []
    for line, row in _rows(path, EVENT_HEADER):
        if len(row) != len(EVENT_HEADER):
            raise DataError(f"malformed row: expected {len(EVENT_HEADER)} fields, got {len(row)}", path, line)
        game_id, elapsed, etype, team_id, shooter, a1, a2 = row
        if not game_id or not team_id or not shooter:
            raise DataError("malformed row: empty identifier", path, line)
        ev = GameEvent(game_id, _int(elapsed, "elapsed_s", path, line), etype, team_id, shooter,
                       a1 or None, a2 or None)
        validate_event(ev, path, line)
        events.append(ev)
    return events


def validate_event(ev: GameEvent, path=None, line=None) -> None:
    if ev.event_type not in EVENT_TYPES:
        raise DataError(f"unknown event type {ev.event_type!r}", path, line)
    if ev.elapsed_s < 0:
        raise DataError("elapsed_s must be non-negative", path, line)
    if ev.event_type == "SHOT" and (ev.assist1_id or ev.assist2_id):
        raise DataError("assists on non-goal", path, line)
    if ev.assist2_id and not ev.assist1_id:
        raise DataError("assist2 without assist1", path, line)
    named = [p for p in (ev.shooter_id, ev.assist1_id, ev.assist2_id) if p]
    if len(set(named)) != len(named):
        raise DataError("duplicate assister", path, line)


def _write_atomic(path, header, rows) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, path)


def write_shifts(shifts: Iterable[Shift], path) -> None:
    _write_atomic(path, SHIFT_HEADER, shifts)


def write_events(events: Iterable[GameEvent], path) -> None:
    _write_atomic(path, EVENT_HEADER,
                  ((e.game_id, e.elapsed_s, e.event_type, e.team_id, e.shooter_id,
                    e.assist1_id or "", e.assist2_id or "") for e in events))


# --------------------------------------------------------------------------
# per-game index

class GameIndex:
    """Constant-lineup segments of one game.

    ``bounds`` has one more entry than there are segments; ``member[k, j]``
    says whether ``players[j]`` is on the ice in segment ``k``.  Side 0 is
    the lexicographically smaller team id, reported as "home".
    """

    def __init__(self, game_id, teams, players, side, goalie, bounds, member):
        self.game_id = game_id
        self.teams = teams
        self.players = players
        self.col = {p: j for j, p in enumerate(players)}
        self.side = side
        self.goalie = goalie
        self.bounds = bounds
        self.member = member
        self.end_s = int(bounds[-1])
        skater = ~goalie
        self.skaters = np.stack(
            [member[:, skater & (side == s)].sum(axis=1) for s in (0, 1)], axis=1)
        self.goalies = np.stack(
            [member[:, goalie & (side == s)].sum(axis=1) for s in (0, 1)], axis=1)
        self.five = ((self.skaters[:, 0] == 5) & (self.skaters[:, 1] == 5)
                     & (self.goalies[:, 0] >= 1) & (self.goalies[:, 1] >= 1))

    @classmethod
    def build(cls, game_id, shifts: list[Shift]) -> "GameIndex":
        teams = tuple(sorted({sh.team_id for sh in shifts}))
        if len(teams) > 2:
            raise DataError(f"game {game_id} has more than two teams: {', '.join(teams)}")
        pos = {}
        for sh in shifts:
            pos.setdefault(sh.player_id, (sh.team_id, sh.position))
        players = tuple(sorted(pos))
        col = {p: j for j, p in enumerate(players)}
        side = np.array([teams.index(pos[p][0]) for p in players], dtype=np.int8)
        goalie = np.array([pos[p][1] == GOALIE for p in players], dtype=bool)
        starts = np.fromiter((sh.start_s for sh in shifts), np.int64, len(shifts))
        ends = np.fromiter((sh.end_s for sh in shifts), np.int64, len(shifts))
        cols = np.fromiter((col[sh.player_id] for sh in shifts), np.int64, len(shifts))
        game_end = int(ends.max()) if len(shifts) else 0
        bounds, member = kernels.sweep_membership(starts, ends, cols, len(players), game_end)
        if member.size and member.max() > 1:
            k, j = np.argwhere(member > 1)[0]
            raise DataError(f"overlapping shifts for {players[j]} in {game_id} at t={bounds[k]}")
        return cls(game_id, teams, players, side, goalie, bounds, member)

    @property
    def durations(self) -> np.ndarray:
        return np.diff(self.bounds)

    @property
    def five_seconds(self) -> int:
        return int(self.durations[self.five].sum())

    def segment_at(self, t) -> np.ndarray:
        """Segment index for each time, or -1 outside ``[0, end_s)``."""
        t = np.asarray(t, dtype=np.int64)
        k = np.searchsorted(self.bounds, t, side="right") - 1
        return np.where((t >= 0) & (t < self.end_s), k, -1)

    def on_ice(self, t: int) -> tuple[frozenset, frozenset]:
        k = int(self.segment_at(t))
        if k < 0:
            raise ValueError(f"t={t} outside game {self.game_id} span [0,{self.end_s})")
        row = self.member[k].astype(bool)
        return tuple(
            frozenset(p for p, on, s in zip(self.players, row, self.side) if on and s == side)
            for side in (0, 1)
        )

    def strength_intervals(self) -> list[StrengthInterval]:
        out = []
        if len(self.bounds) < 2:
            return out
        state = np.column_stack([self.skaters, self.goalies >= 1])
        change = np.ones(len(state), dtype=bool)
        change[1:] = np.any(state[1:] != state[:-1], axis=1)
        starts = np.flatnonzero(change)
        stops = np.append(starts[1:], len(state))
        for a, b in zip(starts, stops):
            sh, sa, gh, ga = (int(v) for v in state[a])
            out.append(StrengthInterval(self.game_id, int(self.bounds[a]), int(self.bounds[b]),
                                        sh, sa, bool(gh), bool(ga)))
        return out


def derive_strength_intervals(shifts: list[Shift]) -> list[StrengthInterval]:
    """Maximal constant-manpower intervals partitioning one game."""
    if not shifts:
        return []
    games = {sh.game_id for sh in shifts}
    if len(games) != 1:
        raise ValueError("derive_strength_intervals expects the shifts of exactly one game")
    return GameIndex.build(games.pop(), shifts).strength_intervals()


# --------------------------------------------------------------------------
# season

class SeasonDataset:
    """Validated shifts and events with per-game lineup indexes.

    Instances are immutable once built; ``filter_five_on_five`` returns a new
    dataset rather than editing this one.
    """

    def __init__(self, shifts, events, players, games, filtered=False):
        self.shifts = shifts
        self.events = events
        self.players = players
        self.games = games
        self.filtered = filtered

    @classmethod
    def from_records(cls, shifts: list[Shift], events: list[GameEvent], roster=None,
                     permissive=False, validate=True) -> "SeasonDataset":
        """Build a dataset.

        ``roster`` optionally adds ``player_id -> (position, team_id)`` entries
        for players without shifts.  With ``permissive`` a shooter who is not on
        the ice is logged instead of raising.
        """
        if validate:
            validate_shifts(shifts)
        players = {}
        for pid, (position, team_id) in (roster or {}).items():
            players[pid] = PlayerInfo(position, team_id)
        by_game = defaultdict(list)
        for sh in shifts:
            info = players.setdefault(sh.player_id, PlayerInfo(sh.position, sh.team_id))
            if info.team_id != sh.team_id or info.position != sh.position:
                raise DataError(f"player {sh.player_id!r} listed with inconsistent team/position")
            by_game[sh.game_id].append(sh)
        games = {g: GameIndex.build(g, rows) for g, rows in sorted(by_game.items())}
        ds = cls(list(shifts), list(events), players, games)
        ds._check_events(permissive, validate)
        return ds

    def _check_events(self, permissive, validate):
        for ev in self.events:
            if validate:
                validate_event(ev)
            game = self.games.get(ev.game_id)
            if game is None:
                raise DataError(f"event references game {ev.game_id!r} with no shifts")
            if ev.team_id not in game.teams:
                raise DataError(f"event team {ev.team_id!r} did not play in {ev.game_id}")
            for pid in (ev.shooter_id, *ev.assisters):
                info = self.players.get(pid)
                if info is None or info.team_id != ev.team_id:
                    raise DataError(f"{pid!r} is not a player of {ev.team_id} ({ev.game_id} t={ev.elapsed_s})")
            k = int(game.segment_at(ev.elapsed_s))
            j = game.col.get(ev.shooter_id)
            if k < 0 or j is None or not game.member[k, j]:
                msg = f"shooter {ev.shooter_id} not on ice in {ev.game_id} at t={ev.elapsed_s}"
                if not permissive:
                    raise DataError(msg)
                log.warning(msg)

    # ---- queries

    def game(self, game_id) -> GameIndex:
        try:
            return self.games[game_id]
        except KeyError:
            raise UnknownGameError(game_id) from None

    def player(self, player_id) -> PlayerInfo:
        try:
            return self.players[player_id]
        except KeyError:
            raise UnknownPlayerError(player_id) from None

    def on_ice_at(self, game_id, t: int) -> tuple[frozenset, frozenset]:
        """(home, away) players, goalies included, on the ice at instant ``t``."""
        return self.game(game_id).on_ice(t)

    def is_five_on_five(self, ev: GameEvent) -> bool:
        game = self.game(ev.game_id)
        k = int(game.segment_at(ev.elapsed_s))
        return k >= 0 and bool(game.five[k])

    @cached_property
    def five_on_five(self) -> list[StrengthInterval]:
        return [iv for g in self.games.values() for iv in g.strength_intervals() if iv.is_five_on_five]

    @cached_property
    def events_by_game(self) -> dict:
        out = defaultdict(list)
        for ev in self.events:
            out[ev.game_id].append(ev)
        return out

    @property
    def teams(self) -> list:
        return sorted({info.team_id for info in self.players.values()})

    @cached_property
    def team_tables(self):
        from .toi import build_team_tables
        return build_team_tables(self)

    def subset(self, game_ids) -> "SeasonDataset":
        """Dataset restricted to the given games; lineup indexes are reused."""
        keep = set(game_ids)
        games = {g: idx for g, idx in self.games.items() if g in keep}
        shifts = [sh for sh in self.shifts if sh.game_id in keep]
        events = [ev for ev in self.events if ev.game_id in keep]
        return SeasonDataset(shifts, events, dict(self.players), games, self.filtered)


def filter_five_on_five(ds: SeasonDataset) -> SeasonDataset:
    """Keep only events inside 5v5 intervals with both goalies on."""
    events = [ev for ev in ds.events if ds.is_five_on_five(ev)]
    return SeasonDataset(ds.shifts, events, ds.players, ds.games, filtered=True)


def load_season(shifts_path, events_path, permissive=False) -> SeasonDataset:
    """Parse both files and return the 5v5-filtered dataset."""
    shifts = parse_shifts(shifts_path)
    events = parse_events(events_path)
    ds = SeasonDataset.from_records(shifts, events, permissive=permissive, validate=False)
    return filter_five_on_five(ds)
