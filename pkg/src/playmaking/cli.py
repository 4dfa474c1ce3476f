"""Command-line pipeline: simulate, contrib, playmaking, evaluate, report.

Exit status is 0 on success, 1 on a data or validation error and 2 on a
usage error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

from .contributions import (Measure, fmt2, leaderboard, read_contrib_csv,
                            season_contributions, weighted_decomposition, write_contrib_csv,
                            assists_per60)
from .dataset import GROUPS, _write_atomic, load_season
from .errors import PlaymakingError, UndefinedRateError
from .regression import (DEFAULT_FOLDS, DEFAULT_MIN_MINUTES, Model, SplitKind, SplitSpec,
                         build_samples, consistency_report, expected_assists, fit_models,
                         kfold_cv, predict_playmaking, split_dataset)
from .simulate import generate_season, read_config, write_season
from .toi import player_toi

OUT_ENV = "PLAYMAKING_OUT_DIR"
PLAYMAKING_HEADER = ("player_id", "position", "A_per60", "Alt_per60", "play_per60",
                     "expected_assists", "toi_s")
EVALUATION_HEADER = ("metric", "split", "group", "min_minutes", "correlation", "n")
FIT_GROUPS = ("forwards", "defensemen")

log = logging.getLogger("playmaking")


def _f(x) -> str:
    return f"{x:.6f}"


def _progress(args, msg):
    if not args.quiet:
        print(msg, file=sys.stderr)


def _out_dir(args):
    out = args.out or os.environ.get(OUT_ENV)
    if not out:
        raise _Usage(f"--out is required (or set {OUT_ENV})")
    os.makedirs(out, exist_ok=True)
    return out


def _groups(args):
    return (args.group,) if args.group else FIT_GROUPS


class _Usage(Exception):
    pass


def _load_periods(args):
    if len(args.shifts) != len(args.events):
        raise _Usage("give the same number of --shifts and --events files")
    seasons = [load_season(s, e, permissive=args.permissive) for s, e in zip(args.shifts, args.events)]
    if args.split == "half":
        if len(seasons) != 1:
            raise _Usage("--split half takes one shifts file and one events file")
        return split_dataset(seasons[0], SplitSpec(SplitKind.HALF_SEASON))
    if len(seasons) != 2:
        raise _Usage("--split seasons takes two shifts files and two events files, earlier season first")
    return split_dataset(seasons[0], SplitSpec(SplitKind.SEASON_TO_SEASON), seasons[1])


# --------------------------------------------------------------------------
# subcommands

def cmd_simulate(args):
    config = read_config(args.config)
    out = _out_dir(args)
    _progress(args, f"simulating {config.teams} teams x {config.games} games (seed {config.seed})")
    paths = write_season(generate_season(config), out)
    for p in paths.values():
        _progress(args, f"wrote {p}")


def cmd_contrib(args):
    ds = load_season(args.shifts, args.events, permissive=args.permissive)
    records = season_contributions(ds, Measure(args.measure))
    if not args.out:
        out_dir = _out_dir(args)
        args.out = os.path.join(out_dir, "contrib.csv")
    elif os.path.dirname(args.out):
        os.makedirs(os.path.dirname(args.out), exist_ok=True)
    write_contrib_csv(records, args.out)
    _progress(args, f"wrote {len(records)} {args.measure} records to {args.out}")


def _fit_group(p1, p2, group, min_minutes, folds, seed):
    samples = build_samples(p1, p2, group, min_minutes)
    fits = fit_models(samples)
    cv = {m: kfold_cv(samples, m, folds, seed) for m in Model}
    return samples, fits, cv


def _summary_lines(group, samples, fits, cv, min_minutes):
    lines = [f"{group}: n = {len(samples)} players with >= {min_minutes} minutes in both periods",
             f"  {'model':<14}{'b0':>10}{'bA':>10}{'bAlt':>10}{'adjR2':>10}{'AIC':>12}{'Cp':>10}{'CV MSE':>12}"]
    for m in Model:
        f = fits[m]
        coef = list(f.coefficients) + [float("nan")] * (3 - len(f.coefficients))
        alt = "" if m is Model.ASSISTS_ONLY else f"{coef[2]:.4f}"
        lines.append(f"  {m.value:<14}{coef[0]:>10.4f}{coef[1]:>10.4f}{alt:>10}{f.adj_r2:>10.4f}"
                     f"{f.aic:>12.3f}{f.cp:>10.3f}{cv[m]:>12.6f}")
    return lines


def cmd_playmaking(args):
    out = _out_dir(args)
    p1, p2 = _load_periods(args)
    rows, summary = [], []
    for group in _groups(args):
        try:
            samples, fits, cv = _fit_group(p1, p2, group, args.min_minutes, args.folds, args.seed)
        except PlaymakingError as exc:
            print(f"warning: no {group} model: {exc}", file=sys.stderr)
            continue
        summary += _summary_lines(group, samples, fits, cv, args.min_minutes) + [""]
        fit = fits[Model.PLAYMAKING]
        for pid in sorted(p2.players):
            info = p2.players[pid]
            if info.position not in GROUPS[group]:
                continue
            toi = player_toi(p2, pid)
            if toi < args.min_minutes * 60 or toi == 0:
                continue
            try:
                alt = weighted_decomposition(p2, pid, Measure.WSHOTS60).a
            except UndefinedRateError:
                continue
            a60 = assists_per60(p2, pid)
            play = predict_playmaking(fit, a60, alt)
            rows.append((pid, info.position, _f(a60), _f(alt), _f(play),
                         _f(expected_assists(play, toi)), toi))
    if not summary:
        raise PlaymakingError("no position group had enough qualifying players to fit")
    rows.sort()
    _write_atomic(os.path.join(out, "playmaking.csv"), PLAYMAKING_HEADER, rows)
    _write_text(os.path.join(out, "model_summary.txt"), summary)
    print("\n".join(summary).rstrip())
    _progress(args, f"wrote {len(rows)} players to {os.path.join(out, 'playmaking.csv')}")


def cmd_evaluate(args):
    out = _out_dir(args)
    p1, p2 = _load_periods(args)
    rows, summary = [], []
    for group in _groups(args):
        for cutoff in args.cutoffs:
            try:
                rows += consistency_report(p1, p2, [cutoff], group, args.split)
            except PlaymakingError as exc:
                print(f"warning: {group} at {cutoff} minutes skipped: {exc}", file=sys.stderr)
        try:
            samples, fits, cv = _fit_group(p1, p2, group, args.min_minutes, args.folds, args.seed)
        except PlaymakingError as exc:
            print(f"warning: no {group} model: {exc}", file=sys.stderr)
            continue
        summary += _summary_lines(group, samples, fits, cv, args.min_minutes) + [""]
    if not rows and not summary:
        raise PlaymakingError("nothing to evaluate: no group met any cutoff")
    _write_atomic(os.path.join(out, "evaluation.csv"), EVALUATION_HEADER,
                  ((r.metric, r.split, r.group, f"{r.min_minutes:g}", _f(r.correlation), r.n) for r in rows))
    _write_text(os.path.join(out, "evaluation_summary.txt"), summary)
    for r in rows:
        print(f"{r.group:<11} {r.metric:<14} cutoff {r.min_minutes:>6g}  r = {r.correlation:+.3f}  (n = {r.n})")
    if summary:
        print()
        print("\n".join(summary).rstrip())


def _write_text(path, lines):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines).rstrip() + "\n")
    os.replace(tmp, path)


def _table(header, rows, align):
    widths = [max(len(str(h)), *(len(str(r[i])) for r in rows)) if rows else len(str(h))
              for i, h in enumerate(header)]
    def line(cells):
        return "  ".join(str(c).ljust(w) if a == "l" else str(c).rjust(w)
                         for c, w, a in zip(cells, widths, align))
    return [line(header), line(["-" * w for w in widths])] + [line(r) for r in rows]


def report_contrib(records, top, group, sort_key, min_minutes):
    if not records:
        return ["(no contribution records)"]
    measure = records[0].measure
    board = leaderboard(records, group, min_minutes, sort_key, top)
    title = f"Top {top} {group} by {sort_key} ({Measure(measure).value})"
    if measure is Measure.RAW_GOALS:
        header = ("Player", "Pos", "Team", "u_T(T)", "u_Ac(Ac)", "m", "c", "a", "Mins")
        rows = [(r.player_id, r.position, r.team_id, int(r.on_rate), int(r.off_rate),
                 int(r.m), int(r.c), int(r.a), r.toi_s // 60) for r in board]
        align = "lll" + "r" * 6
    else:
        header = ("Rk", "Player", "Pos", "Team", "on", "off", "m", "c", "a", "Mins")
        rows = [(k, r.player_id, r.position, r.team_id, fmt2(r.on_rate), fmt2(r.off_rate),
                 fmt2(r.m), fmt2(r.c), fmt2(r.a), r.toi_s // 60) for k, r in enumerate(board, 1)]
        align = "rlll" + "r" * 6
    return [title] + _table(header, rows, align)


def report_playmaking(path, top, group):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.DictReader(fh) if r["position"] in GROUPS[group]]
    rows.sort(key=lambda r: r["player_id"])
    rows.sort(key=lambda r: (float(r["expected_assists"]), int(r["toi_s"])), reverse=True)
    table = [(r["player_id"], r["position"],
              round(float(r["A_per60"]) * int(r["toi_s"]) / 3600),
              round(float(r["expected_assists"])), fmt2(float(r["play_per60"])), int(r["toi_s"]) // 60)
             for r in rows[:top]]
    return [f"Top {top} {group} in playmaking (expected assists)"] + _table(
        ("Player", "Pos", "A", "PLAY", "PLAY/60", "Mins"), table, "llrrrr")


def cmd_report(args):
    contrib = os.path.join(args.input, "contrib.csv")
    play = os.path.join(args.input, "playmaking.csv")
    if not os.path.exists(contrib) and not os.path.exists(play):
        raise PlaymakingError(f"{args.input}: neither contrib.csv nor playmaking.csv found")
    blocks = []
    if os.path.exists(contrib):
        blocks.append(report_contrib(read_contrib_csv(contrib), args.top, args.group,
                                     args.sort_key, args.min_minutes))
    if os.path.exists(play):
        blocks.append(report_playmaking(play, args.top, args.group))
    print("\n\n".join("\n".join(b) for b in blocks))


# --------------------------------------------------------------------------
# argument parsing

def _number(text):
    """Float that keeps integral values as ints, so 300 prints as 300."""
    v = float(text)
    return int(v) if v.is_integer() else v


def _minutes(text):
    try:
        v = _number(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("minutes must be non-negative")
    return v


def _cutoffs(text):
    try:
        values = [_minutes(v) for v in text.split(",") if v.strip()]
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"cutoffs must be comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty cutoff list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="playmaking", description=__doc__.splitlines()[0])
    parser.add_argument("--quiet", action="store_true", help="suppress progress messages")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic season")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV})")

    def data_args(p, multi):
        nargs = "+" if multi else None
        p.add_argument("--shifts", required=True, nargs=nargs)
        p.add_argument("--events", required=True, nargs=nargs)
        p.add_argument("--permissive", action="store_true",
                       help="log shooter-not-on-ice instead of failing")

    p = sub.add_parser("contrib", help="player contributions under one measure")
    data_args(p, False)
    p.add_argument("--measure", default=Measure.WGOALS60.value, choices=[m.value for m in Measure])
    p.add_argument("--out", help="output csv (default $PLAYMAKING_OUT_DIR/contrib.csv)")

    for name, helptext in (("playmaking", "fit the playmaking model and score players"),
                           ("evaluate", "consistency and model comparison")):
        p = sub.add_parser(name, help=helptext)
        data_args(p, True)
        p.add_argument("--split", choices=("half", "seasons"), default="half")
        p.add_argument("--min-minutes", type=_minutes, default=DEFAULT_MIN_MINUTES)
        p.add_argument("--group", choices=FIT_GROUPS, help="fit one position group only (default both)")
        p.add_argument("--folds", type=int, default=DEFAULT_FOLDS)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help=f"output directory (default ${OUT_ENV})")
        if name == "evaluate":
            p.add_argument("--cutoffs", type=_cutoffs, default=[DEFAULT_MIN_MINUTES],
                           help="comma-separated minimum-minute cutoffs")

    p = sub.add_parser("report", help="print leaderboards from a results directory")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--group", choices=sorted(GROUPS), default="forwards")
    p.add_argument("--sort-key", default="a", choices=("m", "c", "a", "on_rate", "off_rate", "toi_s"))
    p.add_argument("--min-minutes", type=_minutes, default=0)
    return parser


COMMANDS = {
    "simulate": cmd_simulate, "contrib": cmd_contrib, "playmaking": cmd_playmaking,
    "evaluate": cmd_evaluate, "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"playmaking: error: {exc}", file=sys.stderr)
        return 2
    except (PlaymakingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
