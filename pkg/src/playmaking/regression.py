"""Playmaking regression, model selection and consistency evaluation.

Two nested models predict a player's assists per 60 in one period from the
previous period:

* ``ASSISTS_ONLY``: ``y = b0 + b1 * A``
* ``PLAYMAKING``:   ``y = b0 + bA * A + bAlt * Alt``

where ``A`` is assists per 60 and ``Alt`` the shot-based altruistic
contribution per 60.  The fitted value of the second model is the
playmaking metric, in expected assists per 60.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from datetime import date
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .contributions import Measure, assists_per60, weighted_decomposition
from .dataset import GROUPS, SeasonDataset
from .errors import (DegenerateSplitError, InsufficientSamplesError, RankDeficientError,
                     UndefinedRateError, UndefinedStatisticError)
from .toi import player_toi

DEFAULT_MIN_MINUTES = 300
DEFAULT_FOLDS = 10
RANK_RTOL = 1e-10


class Model(str, Enum):
    ASSISTS_ONLY = "ASSISTS_ONLY"
    PLAYMAKING = "PLAYMAKING"

    @property
    def n_predictors(self) -> int:
        return 1 if self is Model.ASSISTS_ONLY else 2


class SplitKind(str, Enum):
    HALF_SEASON = "HALF_SEASON"
    SEASON_TO_SEASON = "SEASON_TO_SEASON"


@dataclass(frozen=True)
class SplitSpec:
    kind: SplitKind = SplitKind.HALF_SEASON
    boundary: Optional[str] = None


@dataclass(frozen=True)
class Sample:
    player_id: str
    group: str
    A_prev: float
    Alt_prev: float
    y: float
    toi_prev_s: int
    toi_next_s: int
    Alt_next: float = float("nan")


@dataclass(frozen=True)
class FitResult:
    model: Model
    coefficients: tuple
    n: int
    p: int
    rss: float
    r2: float
    adj_r2: float
    aic: Optional[float] = None
    cp: Optional[float] = None


# --------------------------------------------------------------------------
# splits and samples

def game_date(game_id: str) -> date:
    try:
        return date.fromisoformat(game_id[:10])
    except ValueError:
        raise DegenerateSplitError(
            f"unordered game identifier {game_id!r}: expected a YYYY-MM-DD prefix") from None


def split_dataset(ds: SeasonDataset, spec: SplitSpec = SplitSpec(), other: Optional[SeasonDataset] = None):
    """Two disjoint periods.

    ``HALF_SEASON`` cuts the league at the median game date; games on or
    before it form the first half.  ``SEASON_TO_SEASON`` pairs ``ds`` with
    the later season ``other``.
    """
    kind = SplitKind(spec.kind)
    if kind is SplitKind.SEASON_TO_SEASON:
        if other is None:
            raise ValueError("season-to-season split needs two datasets")
        if set(ds.games) & set(other.games):
            raise DegenerateSplitError("the two seasons share game ids")
        if not ds.games or not other.games:
            raise DegenerateSplitError("empty period")
        return ds, other
    dates = {g: game_date(g) for g in ds.games}
    if not dates:
        raise DegenerateSplitError("empty period")
    ordered = sorted(dates.values())
    median = ordered[(len(ordered) - 1) // 2]
    first = [g for g, d in dates.items() if d <= median]
    second = [g for g, d in dates.items() if d > median]
    if not second:
        raise DegenerateSplitError("degenerate split: every game falls on the median date")
    return ds.subset(first), ds.subset(second)


def _group_of(position):
    for name in ("forwards", "defensemen"):
        if position in GROUPS[name]:
            return name
    return None


def build_samples(period1: SeasonDataset, period2: SeasonDataset, group="forwards",
                  min_minutes=DEFAULT_MIN_MINUTES) -> list[Sample]:
    """One sample per player with at least ``min_minutes`` of 5v5 TOI in both periods."""
    positions = GROUPS[group]
    cutoff = min_minutes * 60
    out = []
    for pid in sorted(set(period1.players) & set(period2.players)):
        info = period1.players[pid]
        if info.position not in positions:
            continue
        toi1, toi2 = player_toi(period1, pid), player_toi(period2, pid)
        if toi1 < cutoff or toi2 < cutoff or toi1 == 0 or toi2 == 0:
            continue
        try:
            alt1 = weighted_decomposition(period1, pid, Measure.WSHOTS60).a
            alt2 = weighted_decomposition(period2, pid, Measure.WSHOTS60).a
        except UndefinedRateError:
            continue
        out.append(Sample(pid, _group_of(info.position), assists_per60(period1, pid), alt1,
                          assists_per60(period2, pid), toi1, toi2, alt2))
    return out


# --------------------------------------------------------------------------
# least squares

def design_matrix(samples: Sequence[Sample], model) -> np.ndarray:
    model = Model(model)
    cols = [np.ones(len(samples)), [s.A_prev for s in samples]]
    if model is Model.PLAYMAKING:
        cols.append([s.Alt_prev for s in samples])
    return np.column_stack(cols).astype(float)


def check_rank(X: np.ndarray) -> None:
    sv = np.linalg.svd(X, compute_uv=False)
    if sv[0] == 0 or sv[-1] <= RANK_RTOL * sv[0]:
        raise RankDeficientError(
            f"design matrix is rank deficient (condition {sv[0] / max(sv[-1], 1e-300):.3g})")


def lstsq_qr(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares coefficients via Householder QR."""
    if X.shape[0] < X.shape[1]:
        raise InsufficientSamplesError(f"{X.shape[0]} samples for {X.shape[1]} coefficients")
    check_rank(X)
    q, r = np.linalg.qr(X, mode="reduced")
    return solve_triangular(r, q.T @ y, lower=False)


def ols_fit(samples: Sequence[Sample], model) -> FitResult:
    model = Model(model)
    p = model.n_predictors
    n = len(samples)
    if n < p + 2:
        raise InsufficientSamplesError(f"{n} samples; need at least {p + 2} for {model.value}")
    X = design_matrix(samples, model)
    y = np.array([s.y for s in samples], dtype=float)
    beta = lstsq_qr(X, y)
    resid = y - X @ beta
    rss = float(resid @ resid)
    tss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - rss / tss if tss > 0 else 1.0
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)
    return FitResult(model, tuple(float(b) for b in beta), n, p, rss, r2, adj)


def information_criteria(fit: FitResult, full_fit: FitResult) -> tuple[float, float]:
    """``(AIC, Cp)``; the error variance for Cp comes from ``full_fit``."""
    if full_fit.n != fit.n:
        raise ValueError("models must be fitted on the same samples")
    if fit.rss <= 0:
        raise UndefinedStatisticError("AIC undefined for a perfect fit (RSS = 0)")
    if full_fit.rss <= 0:
        raise UndefinedStatisticError("Cp undefined: full model has RSS = 0")
    n = fit.n
    aic = n * math.log(fit.rss / n) + 2 * (fit.p + 2)
    # ratio first so the full model's own Cp is exactly p + 1
    cp = (fit.rss / full_fit.rss) * (n - full_fit.p - 1) - n + 2 * (fit.p + 1)
    return aic, cp


def fit_models(samples: Sequence[Sample]) -> dict:
    """Both models with AIC and Cp filled in."""
    fits = {m: ols_fit(samples, m) for m in Model}
    full = fits[Model.PLAYMAKING]
    out = {}
    for m, f in fits.items():
        aic, cp = information_criteria(f, full)
        out[m] = replace(f, aic=aic, cp=cp)
    return out


def _canonical(samples):
    return sorted(samples, key=lambda s: (s.player_id, s.A_prev, s.Alt_prev, s.y))


def kfold_cv(samples: Sequence[Sample], model, k=DEFAULT_FOLDS, seed=0) -> float:
    """Mean squared prediction error over ``k`` seeded contiguous folds."""
    n = len(samples)
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise InsufficientSamplesError(f"k={k} folds for {n} samples")
    ordered = _canonical(samples)
    X = design_matrix(ordered, model)
    y = np.array([s.y for s in ordered], dtype=float)
    perm = np.random.default_rng(seed).permutation(n)
    sse = 0.0
    for fold in np.array_split(perm, k):
        train = np.setdiff1d(perm, fold, assume_unique=True)
        beta = lstsq_qr(X[train], y[train])
        err = y[fold] - X[fold] @ beta
        sse += float(err @ err)
    return sse / n


# --------------------------------------------------------------------------
# consistency and prediction

def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("pearson needs two equal-length series")
    if len(x) < 2:
        raise InsufficientSamplesError("pearson needs at least two points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise UndefinedStatisticError("correlation undefined: zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def predict_playmaking(fit: FitResult, A60, Alt60):
    """Expected assists per 60 from a PLAYMAKING fit."""
    if Model(fit.model) is not Model.PLAYMAKING:
        raise ValueError(f"playmaking prediction needs a PLAYMAKING fit, got {Model(fit.model).value}")
    b0, ba, balt = fit.coefficients
    return b0 + ba * A60 + balt * Alt60


def expected_assists(per60, toi_s) -> float:
    if toi_s < 0:
        raise ValueError("toi_s must be non-negative")
    return per60 * toi_s / 3600


def _metric_pearson(metric, x, y):
    try:
        return pearson(x, y)
    except UndefinedStatisticError as exc:
        raise UndefinedStatisticError(f"{metric}: {exc}") from None


@dataclass(frozen=True)
class ConsistencyRow:
    metric: str
    split: str
    group: str
    min_minutes: float
    correlation: float
    n: int


def consistency_report(period1: SeasonDataset, period2: SeasonDataset, cutoffs=(DEFAULT_MIN_MINUTES,),
                       group="forwards", split="half") -> list[ConsistencyRow]:
    """Period-to-period correlation of assists/60 and of the playmaking metric.

    For each cutoff the PLAYMAKING model is fitted on that cutoff's samples,
    and its prediction is evaluated identically on both periods' inputs.
    """
    rows = []
    for cutoff in cutoffs:
        samples = build_samples(period1, period2, group, cutoff)
        if len(samples) < 3:
            raise InsufficientSamplesError(
                f"{len(samples)} {group} meet {cutoff} minutes in both periods; need at least 3")
        a1 = np.array([s.A_prev for s in samples])
        a2 = np.array([s.y for s in samples])
        rows.append(ConsistencyRow("assists_per60", split, group, cutoff,
                                   _metric_pearson("assists_per60", a1, a2), len(samples)))
        fit = ols_fit(samples, Model.PLAYMAKING)
        p1 = predict_playmaking(fit, a1, np.array([s.Alt_prev for s in samples]))
        p2 = predict_playmaking(fit, a2, np.array([s.Alt_next for s in samples]))
        rows.append(ConsistencyRow("playmaking", split, group, cutoff,
                                   _metric_pearson("playmaking", p1, p2), len(samples)))
    return rows
