from fractions import Fraction as F

import pytest

from secrecy.cryptosystem import check_correctness, induced_channel, is_doubly_stochastic
from secrecy.errors import ValidationError
from secrecy.gap_example import GapParams, gap_matrix, gap_report


def test_two_by_two_extreme_is_identity():
    ch = gap_matrix(GapParams(2, F(1, 2)))
    assert [list(r) for r in ch.rows()] == [[1, 0], [0, 1]]


def test_four_by_four_columns_alternate():
    ch = gap_matrix(GapParams(4, F(1, 8)))
    a = (F(3, 8), F(1, 8), F(1, 4), F(1, 4))
    b = (F(1, 8), F(3, 8), F(1, 4), F(1, 4))
    assert [c.weights for c in ch.columns] == [a, b, a, b]


@pytest.mark.parametrize("n", [2, 4, 6, 10, 20])
def test_always_doubly_stochastic(n):
    for d in (F(1, n), F(1, 2 * n), F(1, 7 * n)):
        assert is_doubly_stochastic(gap_matrix(GapParams(n, d)))


@pytest.mark.parametrize(
    "n, d, ind, sm",
    [
        (4, F(1, 8), F(1, 4), F(1, 4)),
        (8, F(1, 8), F(1, 4), F(1, 2)),
        (100, F(1, 100), F(1, 50), F(1, 2)),
    ],
)
def test_report_values(n, d, ind, sm):
    rep = gap_report(GapParams(n, d))
    assert rep.eps_ind == ind
    assert rep.eps_ps_sm_uniform == sm
    assert rep.insecure_probability == F(2, n)
    assert check_correctness(rep.cipher) == []
    assert induced_channel(rep.cipher) == gap_matrix(GapParams(n, d))


def test_small_report_runs_sweeps():
    rep = gap_report(GapParams(4, F(1, 8)))
    assert rep.skipped == ()
    assert list(rep.per_cryptogram.values()) == [F(1, 4), F(1, 4), 0, 0]
    assert rep.eps_ps_cs_sup.value == rep.eps_ind
    assert rep.eps_ind / 2 <= rep.eps_ps_cm_sup.value <= rep.eps_ind
    assert rep.eps_ind / 4 <= rep.eps_ss_sup.value <= rep.eps_ind
    # uniform is on the grid, so the sweep cannot fall below the closed form
    assert rep.eps_ps_sm_sup.value >= rep.eps_ps_sm_uniform


def test_large_report_skips_sweeps():
    rep = gap_report(GapParams(10, F(1, 10)))
    assert rep.eps_ss_sup is None and rep.eps_ps_cs_sup is None
    assert set(rep.skipped) == {"eps_ps_cs_sup", "eps_ps_cm_sup", "eps_ps_sm_sup", "eps_ss_sup"}


def test_ss_skipped_when_over_its_cap():
    rep = gap_report(GapParams(4, F(1, 8)), ss_cap=3)
    assert rep.skipped == ("eps_ss_sup",)
    assert rep.eps_ps_cm_sup is not None


@pytest.mark.parametrize(
    "n, d",
    [(3, F(1, 8)), (5, F(1, 10)), (0, F(1, 8)), (4, F(0)), (4, F(1, 3)), (4, F(-1, 8))],
)
def test_invalid_params(n, d):
    with pytest.raises(ValidationError):
        GapParams(n, d)
