import pytest
from hypothesis import given, strategies as st

from playmaking.dataset import SeasonDataset, Shift
from playmaking.errors import UnknownPlayerError
from playmaking.toi import (overlap, pair_toi, player_toi, read_toi_csv, toi_without,
                            write_pair_toi_csv, write_toi_csv)

from .conftest import full_strength_game
from .oracles import brute_toi, random_season


@pytest.mark.parametrize("a, b, expect", [
    ((0, 10), (5, 20), 5),
    ((0, 10), (10, 20), 0),
    ((3, 9), (3, 9), 6),
    ((5, 20), (0, 10), 5),
    ((0, 100), (20, 30), 10),
])
def test_overlap(a, b, expect):
    assert overlap(a, b) == expect


@given(st.integers(0, 50), st.integers(1, 50), st.integers(0, 50), st.integers(1, 50))
def test_overlap_matches_set_intersection(s1, d1, s2, d2):
    a, b = (s1, s1 + d1), (s2, s2 + d2)
    assert overlap(a, b) == len(set(range(*a)) & set(range(*b))) == overlap(b, a)


def game_with(extra, end_five=3600):
    """Full-strength base game plus extra TA skaters (who make TA six-a-side
    while on, so base skaters are swapped out to keep 5v5)."""
    return SeasonDataset.from_records(full_strength_game(length=end_five) + extra, [])


def test_player_toi_full_game():
    ds = game_with([])
    assert player_toi(ds, "TA0") == 3600


def test_player_toi_partly_outside_five_on_five():
    # TB skater missing outside [100, 200) means 5v5 only there
    shifts = [sh._replace(start_s=100, end_s=200) if sh.player_id == "TB0" else sh
              for sh in full_strength_game(length=300)]
    ds = SeasonDataset.from_records(shifts, [])
    assert player_toi(ds, "TA0") == 100


def test_player_without_shifts_has_zero():
    ds = SeasonDataset.from_records(full_strength_game(), [], roster={"PX": ("TA", "C")})
    assert player_toi(ds, "PX") == 0


def test_unknown_player():
    with pytest.raises(UnknownPlayerError):
        player_toi(game_with([]), "nobody")


def swap_game():
    """TA0 and X1 split slot 0; TA1 and X2 split slot 1 with an offset."""
    base = [sh for sh in full_strength_game(length=200) if sh.player_id not in ("TA0", "TA1")]
    base += [Shift("G1", "TA0", "TA", "C", 0, 100), Shift("G1", "X1", "TA", "C", 100, 200),
             Shift("G1", "TA1", "TA", "LW", 50, 150), Shift("G1", "X2", "TA", "LW", 0, 50),
             Shift("G1", "X2", "TA", "LW", 150, 200)]
    return SeasonDataset.from_records(base, [])


def test_pair_examples():
    ds = swap_game()
    assert pair_toi(ds, "TA2", "TA3") == player_toi(ds, "TA2") == 200
    assert pair_toi(ds, "TA0", "X1") == 0
    assert pair_toi(ds, "TA0", "TA1") == 50
    assert toi_without(ds, "TA0", "X1") == player_toi(ds, "TA0") == 100
    assert toi_without(ds, "TA2", "TA3") == 0
    assert toi_without(ds, "TA2", "TA0") == 100


def test_pair_errors():
    ds = swap_game()
    with pytest.raises(ValueError, match="different teams"):
        pair_toi(ds, "TA0", "TB0")
    with pytest.raises(ValueError):
        toi_without(ds, "TA0", "TA0")


def test_brute_force_oracle_on_random_games(backend):
    # 120 random games across 12 seasons
    checked = 0
    for seed in range(12):
        shifts, _ = random_season(seed, n_games=10, events_per_game=0)
        ds = SeasonDataset.from_records(shifts, [])
        toi, pair, team_seconds = brute_toi(shifts)
        for team, tab in ds.team_tables.items():
            assert tab.team_seconds == team_seconds[team]
            for i in tab.players:
                assert player_toi(ds, i) == toi[i]
                assert player_toi(ds, i) <= tab.team_seconds
                for a in tab.players:
                    if a == i:
                        continue
                    w = pair_toi(ds, i, a)
                    assert w == pair[(i, a)] == pair_toi(ds, a, i)
                    assert toi_without(ds, i, a) == toi[i] - pair[(i, a)]
                    assert w <= min(toi[i], toi[a])
                    checked += 1
    assert checked > 1000


def test_csv_exports(tmp_path):
    ds = swap_game()
    write_toi_csv(ds, tmp_path / "toi.csv")
    write_pair_toi_csv(ds, tmp_path / "pair.csv")
    assert read_toi_csv(tmp_path / "toi.csv") == {p: player_toi(ds, p) for p in ds.players}
    lines = (tmp_path / "pair.csv").read_text().splitlines()
    assert lines[0] == "player_i,player_j,seconds"
    for line in lines[1:]:
        i, j, s = line.split(",")
        assert i < j and int(s) == pair_toi(ds, i, j) > 0
    assert "TA0,X1" not in "\n".join(lines)
