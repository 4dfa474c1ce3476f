"""Marginal, competitive and altruistic player contributions from hockey
shift and event data, and a playmaking metric built on them."""
from .contributions import (AggregateStats, ContributionRecord, Measure, aggregate_counts,
                            assists_per60, contribution, leaderboard, per60,
                            raw_goal_decomposition, rate_decomposition, season_contributions,
                            unweighted_off_rate, weighted_decomposition, weighted_off_rate)
from .dataset import (GameEvent, SeasonDataset, Shift, StrengthInterval,
                      derive_strength_intervals, filter_five_on_five, load_season,
                      parse_events, parse_shifts)
from .errors import (DataError, PlaymakingError, RankDeficientError, UndefinedRateError,
                     UndefinedStatisticError)
from .kernels import BACKEND as KERNEL_BACKEND
from .regression import (FitResult, Model, Sample, SplitKind, SplitSpec, build_samples,
                         consistency_report, expected_assists, fit_models, information_criteria,
                         kfold_cv, ols_fit, pearson, predict_playmaking, split_dataset)
from .simulate import SimConfig, generate_season, linemate_bias_scenario
from .toi import overlap, pair_toi, player_toi, toi_without

__version__ = "0.1.0"
