"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--teams 10] [--games 40] [--repeat 5]

Times the two kernels on one simulated game and the full team-table build
on a simulated season, and checks both backends give identical tables.
"""
import argparse
import sys
import timeit

import numpy as np

from playmaking import kernels
from playmaking.dataset import SeasonDataset
from playmaking.simulate import SimConfig, generate_season
from playmaking.toi import build_team_tables


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--teams", type=int, default=10)
    ap.add_argument("--games", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    if "cython" not in kernels.BACKENDS:
        print("compiled extension not built; only the python backend is available", file=sys.stderr)

    season = generate_season(SimConfig(seed=1, teams=args.teams, games=args.games))
    ds = SeasonDataset.from_records(season.shifts, season.events, roster=season.roster)
    game = next(iter(ds.games.values()))
    col = {p: i for i, p in enumerate(game.players)}
    gs = [sh for sh in season.shifts if sh.game_id == game.game_id]
    starts = np.array([sh.start_s for sh in gs])
    ends = np.array([sh.end_s for sh in gs])
    cols = np.array([col[sh.player_id] for sh in gs])
    n_cols = len(game.players)
    weights = np.diff(game.bounds)

    print(f"season: {args.teams} teams x {args.games} games, {len(ds.games)} games, "
          f"{len(season.shifts)} shifts; one game has {len(game.bounds) - 1} segments")
    print(f"{'backend':<8}{'sweep (us)':>14}{'cooccur (us)':>14}{'tables (ms)':>14}")
    timings, tables = {}, {}
    before = kernels.BACKEND
    for name in sorted(kernels.BACKENDS):
        kernels.use_backend(name)
        sweep = best(lambda: kernels.sweep_membership(starts, ends, cols, n_cols, game.end_s), args.repeat, 50)
        co = best(lambda: kernels.cooccurrence(game.member, weights), args.repeat, 50)
        build = best(lambda: build_team_tables(ds), args.repeat, 1)
        tables[name] = build_team_tables(ds)
        timings[name] = (sweep, co, build)
        print(f"{name:<8}{sweep * 1e6:>14.1f}{co * 1e6:>14.1f}{build * 1e3:>14.1f}")
    kernels.use_backend(before)

    if len(tables) == 2:
        a, b = tables["cython"], tables["python"]
        same = all(np.array_equal(getattr(a[t], f), getattr(b[t], f))
                   for t in a for f in ("toi", "goals_for", "shots_for"))
        speed = [p / c for p, c in zip(timings["python"], timings["cython"])]
        print(f"speedup (python / cython): sweep {speed[0]:.1f}x, cooccur {speed[1]:.1f}x, tables {speed[2]:.1f}x")
        print(f"tables identical: {same}")
        return 0 if same else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
