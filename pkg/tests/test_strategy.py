import pytest

from adaptdfo.geometry import IterationOutcome
from adaptdfo.strategy import PROFILE_STRATEGIES, SizeRule, Strategy, enumerate_strategies, next_size, sample_size_for

L, B, M, Q = SizeRule.LIN, SizeRule.BILIN, SizeRule.MEAN, SizeRule.QUA


def hand_sizes(n):
    lin, qua = n + 1, (n + 1) * (n + 2) // 2
    return {L: lin, B: 2 * n + 1, M: (lin + qua) // 2, Q: qua}


@pytest.mark.parametrize(
    "n,expected",
    [(2, (3, 5, 4, 6)), (3, (4, 7, 7, 10)), (10, (11, 21, 38, 66)), (20, (21, 41, 126, 231))],
)
def test_sizes_against_hand_arithmetic(n, expected):
    assert tuple(sample_size_for(r, n) for r in (L, B, M, Q)) == expected
    assert tuple(hand_sizes(n)[r] for r in (L, B, M, Q)) == expected


def test_mean_and_bilin_coincide_at_three():
    assert sample_size_for(M, 3) == sample_size_for(B, 3) == 7
    assert Strategy(L, M, L) != Strategy(L, B, L)


@pytest.mark.parametrize("n", range(1, 31))
def test_size_ordering(n):
    s = {r: sample_size_for(r, n) for r in SizeRule}
    assert n + 1 == s[L] <= s[M] <= s[Q] == (n + 1) * (n + 2) // 2
    assert s[L] <= s[B] <= s[Q]


def test_next_size_dispatch():
    s = Strategy(L, L, B)
    assert next_size(s, IterationOutcome.SERIOUS, 10) == 11
    assert next_size(s, IterationOutcome.NULL_TYPE2, 10) == 21
    assert next_size(Strategy(Q, M, L), IterationOutcome.NULL_TYPE1, 2) == 4


def test_enumeration():
    all_s = enumerate_strategies()
    assert len(all_s) == 64 == len(set(all_s))
    assert all_s[0] == Strategy(L, L, L)
    assert all_s[-1] == Strategy(Q, Q, Q)
    assert all_s == sorted(all_s)
    assert sum(not s.is_adaptive for s in all_s) == 4


def test_parse_and_render():
    s = Strategy.parse("lin/2n/quad")
    assert (s.n_s, s.n_n1, s.n_n2) == (L, B, Q)
    assert str(s) == "lin/2n/quad"
    for bad in ("lin/lin", "lin/cubic/lin", ""):
        with pytest.raises(ValueError):
            Strategy.parse(bad)


def test_profile_selection():
    assert [str(s) for s in PROFILE_STRATEGIES] == ["lin/lin/lin", "quad/quad/quad", "lin/lin/2n", "lin/2n/lin"]
