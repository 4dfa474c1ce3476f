import numpy as np
import pytest

from playmaking import kernels
from playmaking.dataset import GameEvent, SeasonDataset, Shift, filter_five_on_five
from playmaking.simulate import SimConfig, generate_season


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    """Run a test once per available kernel backend."""
    before = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(before)


def full_strength_game(game_id="G1", length=3600, teams=("TA", "TB")):
    """Five skaters and a goalie per side, each on for the whole game."""
    shifts = []
    for team in teams:
        for k, pos in enumerate(("C", "LW", "RW", "D", "D")):
            shifts.append(Shift(game_id, f"{team}{k}", team, pos, 0, length))
        shifts.append(Shift(game_id, f"{team}G", team, "G", 0, length))
    return shifts


@pytest.fixture
def full_game():
    return full_strength_game()


@pytest.fixture(scope="session")
def small_season():
    season = generate_season(SimConfig(seed=11, teams=4, games=12))
    ds = SeasonDataset.from_records(season.shifts, season.events, roster=season.roster)
    return season, filter_five_on_five(ds)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def goal(t, team, shooter, a1=None, a2=None, game_id="G1"):
    return GameEvent(game_id, t, "GOAL", team, shooter, a1, a2)


def shot(t, team, shooter, game_id="G1"):
    return GameEvent(game_id, t, "SHOT", team, shooter)


# acceptance criteria report: (number, passed, detail), filled by test_acceptance
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
