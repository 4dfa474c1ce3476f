"""Synthetic seasons with known latent shooting and playmaking abilities.

Each team dresses ``forward_lines`` lines of LW/C/RW, ``defense_pairs``
pairs and one goalie who plays the whole game.  Lines and pairs rotate in
order with random shift lengths; with ``match_top_units`` the top pair jumps
on whenever the top line starts a shift, the way coaches deploy top units.
Only 5v5 play is generated.

While a unit is on the ice its shots arrive as a Poisson process with rate
``sum_i shoot_rate_i * prod_{j != i} playmake_boost_j`` (clamped at
``max_unit_rate``).  The shooter is drawn proportional to ``shoot_rate``, the
shot scores with the shooter's ``goal_prob``, and up to two assisters are
drawn from the other skaters proportional to ``playmake_boost``.
"""
from __future__ import annotations

import dataclasses
import math
import os
import zlib
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import NamedTuple, Optional

import numpy as np

from .dataset import GameEvent, Shift, _write_atomic, write_events, write_shifts
from .errors import DataError

FORWARD_SLOTS = ("LW", "C", "RW")
TRUTH_HEADER = ("player_id", "position", "shoot_rate", "playmake_boost", "goal_prob")

# (shoot_rate, playmake_boost, goal_prob) for the two ability levels of the
# two-level teams of the linemate-bias scenario; defensemen use the *_d variants.
LEVELS = {
    "above": (10.0, 1.15, 0.10),
    "below": (5.0, 0.95, 0.07),
    "above_d": (5.0, 1.15, 0.06),
    "below_d": (2.5, 0.95, 0.04),
}


class LatentPlayer(NamedTuple):
    player_id: str
    team_id: str
    position: str
    shoot_rate: float
    playmake_boost: float
    goal_prob: float


@dataclass
class SimConfig:
    seed: int
    teams: int = 10
    games: int = 40
    shift_len_s: float = 45.0
    d_shift_factor: float = 1.25
    game_len_s: int = 3600
    season_start: date = date(2010, 10, 7)
    forward_lines: int = 4
    defense_pairs: int = 3
    line_usage: tuple = (1.25, 1.05, 0.9, 0.8)
    pair_usage: tuple = (1.15, 1.0, 0.85)
    match_top_units: bool = True
    fwd_shoot_rate: float = 7.0
    def_shoot_rate: float = 3.5
    shoot_rate_sd: float = 0.25
    boost_sd: float = 0.2
    goal_prob: float = 0.085
    goal_prob_sd: float = 0.015
    assist_probs: tuple = (0.1, 0.25, 0.65)
    max_unit_rate: float = 150.0
    two_level_teams: tuple = ()

    def validate(self) -> None:
        if self.teams < 2:
            raise DataError("need at least two teams")
        if self.games < 1:
            raise DataError("need at least one game per team")
        if self.forward_lines < 1 or self.defense_pairs < 1:
            raise DataError("invalid roster: need at least one line and one pair")
        if len(self.line_usage) != self.forward_lines or len(self.pair_usage) != self.defense_pairs:
            raise DataError("invalid roster: usage weights must match line/pair counts")
        rates = (self.shift_len_s, self.d_shift_factor, self.game_len_s, self.fwd_shoot_rate,
                 self.def_shoot_rate, self.max_unit_rate, *self.line_usage, *self.pair_usage)
        if any(not (r > 0) for r in rates):
            raise DataError("non-positive rate, length or usage in config")
        if not (0 <= self.goal_prob <= 1):
            raise DataError("goal_prob must lie in [0, 1]")
        if len(self.assist_probs) != 3 or min(self.assist_probs) < 0 or not math.isclose(sum(self.assist_probs), 1.0):
            raise DataError("assist_probs must be three non-negative probabilities summing to 1")
        if any(not (0 <= t < self.teams) for t in self.two_level_teams):
            raise DataError("two_level_teams index out of range")


def linemate_bias_scenario(seed: int, games: int = 82) -> SimConfig:
    """Two teams; team index 0 has an above-average top line and pair and
    below-average depth, with one below-average left wing on the top line."""
    return SimConfig(seed=seed, teams=2, games=games, two_level_teams=(0,))


def weak_top_liner(config: SimConfig) -> str:
    """Id of the below-average left wing on the first two-level team's top line."""
    return _pid(config.two_level_teams[0], "LW", 1)


# --------------------------------------------------------------------------
# config file

def _convert(value: str, current):
    if isinstance(current, bool):
        low = value.strip().lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"not a boolean: {value!r}")
        return low in ("true", "1", "yes")
    if isinstance(current, int):
        return int(value)
    if isinstance(current, float):
        return float(value)
    if isinstance(current, date):
        return date.fromisoformat(value.strip())
    if isinstance(current, tuple):
        cast = int if not current or isinstance(current[0], int) else float
        return tuple(cast(v) for v in value.split(",") if v.strip())
    return value


def read_config(path) -> SimConfig:
    """Read ``key = value`` lines (``#`` starts a comment); ``seed`` is required."""
    raw = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError("expected key = value", path, line_no)
            key, value = (s.strip() for s in line.split("=", 1))
            raw[key] = (value, line_no)
    if "seed" not in raw:
        raise DataError("config must set seed", path)
    template = SimConfig(seed=0)
    known = {f.name for f in dataclasses.fields(SimConfig)}
    kwargs = {}
    for key, (value, line_no) in raw.items():
        if key not in known:
            raise DataError(f"unknown config key {key!r}", path, line_no)
        try:
            kwargs[key] = _convert(value, getattr(template, key))
        except ValueError as exc:
            raise DataError(f"bad value for {key}: {exc}", path, line_no) from None
    cfg = SimConfig(**kwargs)
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# rosters and schedule

def _team_id(t: int) -> str:
    return f"T{t + 1:02d}"


def _pid(t: int, slot: str, unit: int) -> str:
    return f"{_team_id(t)}_{slot}{unit}"


def _roster(config: SimConfig, rng) -> list[list[LatentPlayer]]:
    """Per team: forwards line by line (LW, C, RW), then defensemen pair by pair, then the goalie."""
    teams = []
    for t in range(config.teams):
        team = _team_id(t)
        players = []
        two_level = t in config.two_level_teams
        for line in range(1, config.forward_lines + 1):
            for slot in FORWARD_SLOTS:
                if two_level:
                    level = "above" if line == 1 and slot != "LW" else "below"
                    s, b, g = LEVELS[level]
                else:
                    s = config.fwd_shoot_rate * float(np.exp(rng.normal(0, config.shoot_rate_sd)))
                    b = float(np.clip(np.exp(rng.normal(0, config.boost_sd)), 0.5, 2.0))
                    g = float(np.clip(rng.normal(config.goal_prob, config.goal_prob_sd), 0.01, 0.3))
                players.append(LatentPlayer(_pid(t, slot, line), team, slot, s, b, g))
        for pair in range(1, config.defense_pairs + 1):
            for side in "ab":
                if two_level:
                    s, b, g = LEVELS["above_d" if pair == 1 else "below_d"]
                else:
                    s = config.def_shoot_rate * float(np.exp(rng.normal(0, config.shoot_rate_sd)))
                    b = float(np.clip(np.exp(rng.normal(0, config.boost_sd)), 0.5, 2.0))
                    g = float(np.clip(rng.normal(config.goal_prob / 2, config.goal_prob_sd / 2), 0.005, 0.3))
                players.append(LatentPlayer(_pid(t, "D", f"{pair}{side}"), team, "D", s, b, g))
        players.append(LatentPlayer(_pid(t, "G", 1), team, "G", 0.0, 1.0, 0.0))
        teams.append(players)
    return teams


def schedule(config: SimConfig) -> list[tuple[str, int, int]]:
    """``(game_id, team_index, team_index)`` by the circle method, one round per day.

    Game ids start with the ISO date of their round so they sort by date.
    """
    n = config.teams
    slots = list(range(n)) + ([None] if n % 2 else [])
    m = len(slots)
    games = []
    for r in range(config.games):
        k = r % (m - 1)
        rot = [slots[0]] + slots[1:][-k:] + slots[1:][:-k] if k else list(slots)
        day = config.season_start + timedelta(days=r)
        g = 0
        for i in range(m // 2):
            a, b = rot[i], rot[m - 1 - i]
            if a is None or b is None:
                continue
            g += 1
            games.append((f"{day.isoformat()}-{g:03d}", min(a, b), max(a, b)))
    return games


# --------------------------------------------------------------------------
# one game

class _TeamModel:
    """Per-unit rates and draw tables for one team."""

    def __init__(self, players: list[LatentPlayer], config: SimConfig):
        L, P = config.forward_lines, config.defense_pairs
        self.players = players
        self.lines = [players[3 * i:3 * i + 3] for i in range(L)]
        self.pairs = [players[3 * L + 2 * i:3 * L + 2 * i + 2] for i in range(P)]
        self.goalie = players[-1]
        units = [(l, p) for l in range(L) for p in range(P)]
        self.unit_players = []
        rate = np.zeros(len(units))
        shoot_cum = np.zeros((len(units), 5))
        for u, (l, p) in enumerate(units):
            sk = self.lines[l] + self.pairs[p]
            self.unit_players.append(sk)
            s = np.array([x.shoot_rate for x in sk])
            b = np.array([x.playmake_boost for x in sk])
            others = np.array([np.prod(np.delete(b, i)) for i in range(5)])
            rate[u] = min(float(s @ others), config.max_unit_rate)
            shoot_cum[u] = np.cumsum(s) / s.sum() if s.sum() > 0 else np.arange(1, 6) / 5
        self.rate = rate
        self.shoot_cum = shoot_cum
        self.n_pairs = P


def _rotation(rng, n_units, usage, mean_len, game_len, forced_starts=None):
    """Shift starts/ends and unit indices for a cyclic rotation.

    ``forced_starts`` are times at which unit 0 must begin a shift (top-unit
    matching); the unit on the ice is cut short and the rotation resumes after 0.
    """
    forced = list(forced_starts or [])
    fi = 0
    out = []
    t, unit = 0, 0
    while t < game_len:
        length = max(10, int(round(mean_len * usage[unit] * rng.gamma(8.0, 1 / 8.0))))
        end = min(t + length, game_len)
        while fi < len(forced) and forced[fi] <= t:
            fi += 1
        if unit != 0 and fi < len(forced) and forced[fi] < end:
            end = forced[fi]
            if end > t:
                out.append((t, end, unit))
            t, unit = end, 0
            continue
        out.append((t, end, unit))
        t, unit = end, (unit + 1) % n_units
    return out


def _simulate_team(rng, model: _TeamModel, game_id, config: SimConfig, shifts, events):
    team = model.goalie.team_id
    glen = config.game_len_s
    fwd = _rotation(rng, config.forward_lines, config.line_usage, config.shift_len_s, glen)
    forced = [s for s, _, u in fwd if u == 0] if config.match_top_units else None
    dfn = _rotation(rng, config.defense_pairs, config.pair_usage,
                    config.shift_len_s * config.d_shift_factor, glen, forced)
    for s, e, u in fwd:
        for p in model.lines[u]:
            shifts.append(Shift(game_id, p.player_id, team, p.position, s, e))
    for s, e, u in dfn:
        for p in model.pairs[u]:
            shifts.append(Shift(game_id, p.player_id, team, p.position, s, e))
    shifts.append(Shift(game_id, model.goalie.player_id, team, "G", 0, glen))

    # constant-unit segments
    cuts = np.unique(np.array([0, glen] + [e for _, e, _ in fwd] + [e for _, e, _ in dfn]))
    seg_s, seg_e = cuts[:-1], cuts[1:]
    f_start = np.array([s for s, _, _ in fwd])
    d_start = np.array([s for s, _, _ in dfn])
    f_unit = np.array([u for _, _, u in fwd])[np.searchsorted(f_start, seg_s, side="right") - 1]
    d_unit = np.array([u for _, _, u in dfn])[np.searchsorted(d_start, seg_s, side="right") - 1]
    unit = f_unit * model.n_pairs + d_unit
    counts = rng.poisson(model.rate[unit] * (seg_e - seg_s) / 3600.0)
    if not counts.any():
        return
    seg_of_shot = np.repeat(np.arange(len(unit)), counts)
    times = rng.integers(seg_s[seg_of_shot], seg_e[seg_of_shot])
    shot_unit = unit[seg_of_shot]
    u01 = rng.random(len(shot_unit))
    shooter_slot = (u01[:, None] > model.shoot_cum[shot_unit]).sum(axis=1)
    shooter_slot = np.minimum(shooter_slot, 4)
    score_u = rng.random(len(shot_unit))
    for t, su, slot, su01 in zip(times.tolist(), shot_unit.tolist(), shooter_slot.tolist(), score_u.tolist()):
        skaters = model.unit_players[su]
        shooter = skaters[slot]
        if su01 >= shooter.goal_prob:
            events.append(GameEvent(game_id, t, "SHOT", team, shooter.player_id))
            continue
        n_ast = int(rng.choice(3, p=config.assist_probs))
        mates = [p for k, p in enumerate(skaters) if k != slot]
        w = np.array([p.playmake_boost for p in mates])
        picked = rng.choice(4, size=n_ast, replace=False, p=w / w.sum()) if n_ast else []
        ast = [mates[k].player_id for k in picked] + [None, None]
        events.append(GameEvent(game_id, t, "GOAL", team, shooter.player_id, ast[0], ast[1]))


def game_rng(seed: int, game_id: str) -> np.random.Generator:
    """Independent stream per game, derived from the season seed and the game id."""
    return np.random.default_rng([seed, 1, zlib.crc32(game_id.encode())])


# --------------------------------------------------------------------------
# season

@dataclass
class SimulatedSeason:
    config: SimConfig
    shifts: list = field(repr=False)
    events: list = field(repr=False)
    truth: list = field(repr=False)

    @property
    def roster(self) -> dict:
        return {p.player_id: (p.position, p.team_id) for p in self.truth}


def generate_season(config: SimConfig) -> SimulatedSeason:
    config.validate()
    rosters = _roster(config, np.random.default_rng([config.seed, 0]))
    models = [_TeamModel(players, config) for players in rosters]
    shifts, events = [], []
    for game_id, a, b in schedule(config):
        rng = game_rng(config.seed, game_id)
        game_events = []
        _simulate_team(rng, models[a], game_id, config, shifts, game_events)
        _simulate_team(rng, models[b], game_id, config, shifts, game_events)
        game_events.sort(key=lambda e: e.elapsed_s)
        events.extend(game_events)
    truth = [p for players in rosters for p in players]
    return SimulatedSeason(config, shifts, events, truth)


def write_truth(truth, path) -> None:
    _write_atomic(path, TRUTH_HEADER, (
        (p.player_id, p.position, f"{p.shoot_rate:.6f}", f"{p.playmake_boost:.6f}", f"{p.goal_prob:.6f}")
        for p in truth))


def write_season(season: SimulatedSeason, out_dir) -> dict:
    """Write ``shifts.csv``, ``events.csv`` and ``truth.csv``; return their paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {name: os.path.join(out_dir, f"{name}.csv") for name in ("shifts", "events", "truth")}
    write_shifts(season.shifts, paths["shifts"])
    write_events(season.events, paths["events"])
    write_truth(season.truth, paths["truth"])
    return paths


def unit_rate(skaters: list[LatentPlayer], max_rate: Optional[float] = None) -> float:
    """Expected team shots per 60 for a five-skater unit."""
    total = 0.0
    for i, p in enumerate(skaters):
        boost = 1.0
        for j, q in enumerate(skaters):
            if j != i:
                boost *= q.playmake_boost
        total += p.shoot_rate * boost
    return total if max_rate is None else min(total, max_rate)
