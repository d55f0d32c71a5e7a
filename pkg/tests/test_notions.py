from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

import oracles
from secrecy.errors import EnumerationTooLargeError, ValidationError
from secrecy.gap_example import GapParams, gap_matrix
from secrecy.instances import random_birkhoff_mixture, random_prob_vector
from secrecy.notions import (
    BinaryJoint,
    analyze,
    eps_ind,
    eps_ps_cm,
    eps_ps_cm_sup,
    eps_ps_cs,
    eps_ps_cs_sup,
    eps_ps_sm,
    eps_ps_sm_sup,
    eps_ss,
    eps_ss_sup,
    lemma1_check,
    minimize_max_abs_affine,
    per_cryptogram_sm,
    ss_witness_bound,
)
from secrecy.prob_core import (
    ChannelMatrix,
    ProbVector,
    marginal_c,
    posterior,
    simplex_grid,
    variational_distance,
)

HALF = ChannelMatrix.from_rows([["1/2", "1/2"], ["1/2", "1/2"]])
IDENT2 = ChannelMatrix.from_rows([[1, 0], [0, 1]])


def identity(n):
    return ChannelMatrix.from_rows([[int(i == j) for j in range(n)] for i in range(n)])


def gap(n, d):
    return gap_matrix(GapParams(n, F(d)))


def uniform(ch):
    return ProbVector.uniform(ch.message_alphabet)


def point_masses(ch):
    return [ProbVector.point_mass(ch.message_alphabet, m) for m in ch.message_alphabet]


@st.composite
def channels(draw, max_c=4, max_m=4):
    """Arbitrary column-stochastic channels, not necessarily square."""
    nc = draw(st.integers(1, max_c))
    nm = draw(st.integers(1, max_m))
    cols = []
    for _ in range(nm):
        raw = draw(st.lists(st.integers(0, 9), min_size=nc, max_size=nc).filter(any))
        cols.append([F(x, sum(raw)) for x in raw])
    rows = [[cols[j][i] for j in range(nm)] for i in range(nc)]
    return ChannelMatrix.from_rows(rows)


@st.composite
def channel_and_prior(draw, **kw):
    ch = draw(channels(**kw))
    nm = len(ch.message_alphabet)
    raw = draw(st.lists(st.integers(0, 9), min_size=nm, max_size=nm).filter(any))
    return ch, ProbVector(ch.message_alphabet, [F(x, sum(raw)) for x in raw])


# ---------------------------------------------------------------- IND


def test_ind_examples():
    assert eps_ind(HALF)[0] == 0
    assert eps_ind(IDENT2)[0] == 1
    for n, d in [(2, "1/4"), (4, "1/8"), (6, "1/12"), (8, "1/16")]:
        value, (a, b) = eps_ind(gap(n, d))
        assert value == 2 * F(d)
        i, j = int(a[1:]), int(b[1:])
        assert (i + j) % 2 == 1


@given(channels())
def test_ind_matches_pairwise_max(ch):
    value, (a, b) = eps_ind(ch)
    assert value == oracles.ind_brute(ch)
    col = dict(zip(ch.message_alphabet, ch.columns))
    assert variational_distance(col[a], col[b]) == value


# ---------------------------------------------------------------- PS-cs


def test_ps_cs_examples():
    assert eps_ps_cs(HALF, ProbVector(HALF.message_alphabet, ["1/3", "2/3"]))[0] == 0
    g = gap(4, "1/8")
    value, m = eps_ps_cs(g, ProbVector.point_mass(g.message_alphabet, "m1"))
    assert (value, m) == (F(1, 4), "m2")
    for n in (2, 3, 5):
        ch = identity(n)
        pc = marginal_c(ch, uniform(ch))
        assert eps_ps_cs(ch, uniform(ch))[0] == 1 - F(1, n)
        assert all(variational_distance(col, pc) == 1 - F(1, n) for col in ch.columns)


def test_ps_cs_sup_examples():
    assert eps_ps_cs_sup(HALF, simplex_grid(HALF.message_alphabet, 4)).value == 0
    assert eps_ps_cs_sup(IDENT2, simplex_grid(IDENT2.message_alphabet, 4)).value == 1
    g = gap(4, "1/8")
    assert eps_ps_cs_sup(g, simplex_grid(g.message_alphabet, 3)).value == F(1, 4)


@given(channel_and_prior())
def test_ps_cs_matches_oracle(cp):
    ch, pm = cp
    assert eps_ps_cs(ch, pm)[0] == oracles.ps_cs_brute(ch, pm)


# ---------------------------------------------------------------- PS-cm


def test_ps_cm_examples():
    g = gap(4, "1/8")
    for pm in point_masses(g):
        assert eps_ps_cm(g, pm) == 0
    assert eps_ps_cm(HALF, ProbVector(HALF.message_alphabet, ["1/5", "4/5"])) == 0
    msgs = g.message_alphabet
    for a in range(4):
        for b in range(a + 1, 4):
            pm = ProbVector(msgs, [F(1, 2) if t in (a, b) else 0 for t in range(4)])
            assert eps_ps_cm(g, pm) == variational_distance(g.columns[a], g.columns[b]) / 2


def test_ps_cm_sup_examples():
    res = eps_ps_cm_sup(IDENT2, simplex_grid(IDENT2.message_alphabet, 4))
    assert res.value == F(1, 2)
    assert res.prior.weights == (F(1, 2), F(1, 2))
    for n, d in [(2, F(1, 4)), (4, F(1, 8)), (4, F(1, 4))]:
        g = gap(n, d)
        v = eps_ps_cm_sup(g, simplex_grid(g.message_alphabet, 4)).value
        assert d <= v <= 2 * d


@given(channel_and_prior())
def test_ps_cm_matches_oracle(cp):
    ch, pm = cp
    assert eps_ps_cm(ch, pm) == oracles.ps_cm_brute(ch, pm)


# ---------------------------------------------------------------- PS-sm


def test_ps_sm_examples():
    assert eps_ps_sm(HALF, ProbVector(HALF.message_alphabet, ["1/3", "2/3"]))[0] == 0
    for n, d in [(4, F(1, 8)), (6, F(1, 12)), (8, F(1, 8))]:
        g = gap(n, d)
        per = per_cryptogram_sm(g, uniform(g))
        assert list(per.values()) == [n * d / 2] * 2 + [0] * (n - 2)
        value, c = eps_ps_sm(g, uniform(g))
        assert value == n * d / 2 and c in ("c1", "c2")
    for n in (2, 3, 5):
        assert eps_ps_sm(identity(n), uniform(identity(n)))[0] == 1 - F(1, n)


def test_ps_sm_skips_impossible_cryptograms():
    pm = ProbVector.point_mass(IDENT2.message_alphabet, "m1")
    assert per_cryptogram_sm(IDENT2, pm) == {"c1": 0, "c2": None}
    assert eps_ps_sm(IDENT2, pm) == (0, "c1")


def test_ps_sm_sup_examples():
    assert eps_ps_sm_sup(HALF, simplex_grid(HALF.message_alphabet, 4)).value == 0
    g = gap(4, "1/8")
    assert eps_ps_sm_sup(g, simplex_grid(g.message_alphabet, 4)).value >= F(1, 4)
    # a grid of point masses only never moves the posterior
    for ch in (g, IDENT2, identity(3)):
        assert eps_ps_sm_sup(ch, point_masses(ch)).value == 0


@given(channel_and_prior())
def test_ps_sm_matches_oracle(cp):
    ch, pm = cp
    assert eps_ps_sm(ch, pm)[0] == oracles.ps_sm_brute(ch, pm)
    pc = marginal_c(ch, pm)
    for c, v in per_cryptogram_sm(ch, pm).items():
        if pc[c]:
            assert v == variational_distance(posterior(ch, pm, c), pm)
        else:
            assert v is None


# ---------------------------------------------------------------- SS


def test_ss_examples():
    assert eps_ss(HALF, ProbVector(HALF.message_alphabet, ["1/3", "2/3"]))[0] == 0
    g = gap(4, "1/8")
    for ch in (g, IDENT2, HALF):
        for pm in point_masses(ch):
            assert eps_ss(ch, pm)[0] == 0


@pytest.mark.parametrize("d", [F(1, 8), F(1, 4), F(1, 2), F(1, 10)])
def test_ss_two_by_two_gap(d):
    g = gap(2, d)
    value, _ = eps_ss(g, uniform(g))
    assert value == oracles.ss_brute(g, uniform(g)) == d
    assert d / 2 <= value <= 2 * d


def test_ss_sup_examples():
    assert eps_ss_sup(HALF, simplex_grid(HALF.message_alphabet, 4)).value == 0
    v = eps_ss_sup(IDENT2, simplex_grid(IDENT2.message_alphabet, 4)).value
    assert F(1, 4) <= v <= 1
    for n, d in [(2, F(1, 4)), (4, F(1, 8)), (4, F(1, 4))]:
        g = gap(n, d)
        v = eps_ss_sup(g, simplex_grid(g.message_alphabet, 4), check_witness=True).value
        assert d / 2 <= v <= 2 * d


@given(channel_and_prior())
def test_ss_matches_both_oracles(cp):
    ch, pm = cp
    value, w = eps_ss(ch, pm)
    assert value == oracles.ss_brute(ch, pm) == oracles.ss_weighted_median(ch, pm)


@given(channel_and_prior())
def test_ss_witness_achieves_value(cp):
    # the reported (f, q, h) attains the value for that f, and no h does better at q
    ch, pm = cp
    value, w = eps_ss(ch, pm)
    pj = oracles.joint_table(ch, pm)
    msgs, cgs = ch.message_alphabet, ch.cryptogram_alphabet
    nm = len(msgs)

    def gap_for(h):
        agree = sum(
            pj[i][j] for i, c in enumerate(cgs) for j, m in enumerate(msgs) if (c in w.f) == (m in h)
        )
        p1 = sum(pm.weights[j] for j, m in enumerate(msgs) if m in h)
        return abs(agree - (w.q * p1 + (1 - w.q) * (1 - p1)))

    assert 0 <= w.q <= 1
    assert gap_for(w.h) == value
    everything = [frozenset(m for j, m in enumerate(msgs) if mask >> j & 1) for mask in range(1 << nm)]
    assert max(gap_for(h) for h in everything) == value


def test_ss_caps():
    ch = identity(4)
    with pytest.raises(EnumerationTooLargeError):
        eps_ss(ch, uniform(ch), cap_c=3, cap_m=10)
    with pytest.raises(EnumerationTooLargeError):
        ss_witness_bound(ch, uniform(ch), cap_c=10, cap_m=3)


def test_witness_bound_examples():
    assert ss_witness_bound(HALF, uniform(HALF)) == 0
    assert ss_witness_bound(IDENT2, uniform(IDENT2)) == F(1, 2)
    for pm in point_masses(IDENT2):
        assert ss_witness_bound(IDENT2, pm) == 0


@given(channel_and_prior())
def test_witness_bound_sandwich(cp):
    ch, pm = cp
    assert eps_ss(ch, pm)[0] <= ss_witness_bound(ch, pm) <= eps_ind(ch)[0]


def test_minimize_max_abs_affine_against_dense_scan():
    import random

    rng = random.Random(7)
    for _ in range(300):
        lines = [
            (F(rng.randint(-6, 6), rng.randint(1, 4)), F(rng.randint(-6, 6), rng.randint(1, 4)), t)
            for t in range(rng.randint(1, 5))
        ]
        value, q, tag = minimize_max_abs_affine(lines)
        assert 0 <= q <= 1
        assert value == max(abs(s * q + b) for s, b, _ in lines)
        # compare with every breakpoint of the envelope
        cands = {F(0), F(1)}
        for s1, b1, _ in lines:
            for s2, b2, _ in lines:
                for sign in (1, -1):
                    if s1 != sign * s2:
                        cands.add((sign * b2 - b1) / (s1 - sign * s2))
            if s1:
                cands.add(-b1 / s1)
        best = min(max(abs(s * x + b) for s, b, _ in lines) for x in cands if 0 <= x <= 1)
        assert value == best


# ---------------------------------------------------------------- sweeps on random doubly stochastic channels


@given(st.integers(2, 4), st.randoms(use_true_random=False))
def test_sup_relations(n, rng):
    ch, _ = random_birkhoff_mixture(rng, n)
    grid = simplex_grid(ch.message_alphabet, 4)
    ind = eps_ind(ch)[0]
    assert eps_ps_cs_sup(ch, grid).value == ind
    assert ind / 2 <= eps_ps_cm_sup(ch, grid).value <= ind
    assert ind / 4 <= eps_ss_sup(ch, grid).value <= ind


@given(st.integers(2, 4), st.randoms(use_true_random=False))
def test_finer_grid_never_lowers_sup(n, rng):
    # grid 4 contains grid 2, so every sup is monotone
    ch, _ = random_birkhoff_mixture(rng, n)
    g2 = simplex_grid(ch.message_alphabet, 2)
    g4 = simplex_grid(ch.message_alphabet, 4)
    for fn in (eps_ps_cm_sup, eps_ps_sm_sup, eps_ss_sup):
        assert fn(ch, g2).value <= fn(ch, g4).value


@given(channels(), st.integers(0, 8), st.randoms(use_true_random=False))
def test_mixing_two_columns_never_raises_ind(ch, t8, rng):
    nm = len(ch.message_alphabet)
    if nm < 2:
        return
    a, b = rng.sample(range(nm), 2)
    t = F(t8, 16)  # t in [0, 1/2]
    cols = [list(c.weights) for c in ch.columns]
    ca, cb = cols[a], cols[b]
    cols[a] = [(1 - t) * x + t * y for x, y in zip(ca, cb)]
    cols[b] = [(1 - t) * y + t * x for x, y in zip(ca, cb)]
    mixed = ChannelMatrix(ch.message_alphabet, ch.cryptogram_alphabet, cols)
    assert eps_ind(mixed)[0] <= eps_ind(ch)[0]


@given(st.integers(2, 4), st.randoms(use_true_random=False))
def test_zero_iff_zero(n, rng):
    ch, _ = random_birkhoff_mixture(rng, n)
    pm = random_prob_vector(rng, ch.message_alphabet)
    if eps_ind(ch)[0] == 0:
        assert eps_ps_cs(ch, pm)[0] == eps_ps_cm(ch, pm) == eps_ps_sm(ch, pm)[0] == eps_ss(ch, pm)[0] == 0


# ---------------------------------------------------------------- binary lemma


@pytest.mark.parametrize("p, q", [(F(1, 3), F(1, 2)), (F(0), F(1, 5)), (F(2, 7), F(3, 4))])
def test_lemma_independent(p, q):
    r = lemma1_check(BinaryJoint(p * q, p * (1 - q), (1 - p) * q, (1 - p) * (1 - q)))
    assert r.lhs == r.rhs == r.det == 0


def test_lemma_examples():
    r = lemma1_check(BinaryJoint(F(1, 2), 0, 0, F(1, 2)))
    assert (r.lhs, r.rhs, r.det) == (F(1, 2), F(1, 4), F(1, 4))
    r = lemma1_check(BinaryJoint(1, 0, 0, 0))
    assert (r.lhs, r.rhs, r.det) == (0, 0, 0)


@given(st.lists(st.integers(0, 50), min_size=4, max_size=4).filter(any))
def test_lemma_lhs_is_twice_rhs(raw):
    total = sum(raw)
    r = lemma1_check(BinaryJoint(*(F(x, total) for x in raw)))
    assert r.holds and r.lhs == 2 * r.det and r.rhs == r.det


def test_binary_joint_validation():
    with pytest.raises(ValidationError):
        BinaryJoint(F(1, 2), F(1, 2), F(1, 2), F(-1, 2))
    with pytest.raises(ValidationError):
        BinaryJoint(F(1, 2), 0, 0, 0)


# ---------------------------------------------------------------- report


def test_analyze_certificates_reproduce_values():
    g = gap(4, "1/8")
    rep = analyze(g)
    c = rep.certificates
    assert rep.eps_ind == F(1, 4)
    a, b = c["ind"]["pair"]
    col = dict(zip(g.message_alphabet, g.columns))
    assert variational_distance(col[a], col[b]) == rep.eps_ind
    assert eps_ps_cs(g, c["ps_cs"]["prior"])[0] == rep.eps_ps_cs_sup
    assert eps_ps_cm(g, c["ps_cm"]["prior"]) == rep.eps_ps_cm_sup
    assert eps_ps_sm(g, c["ps_sm"]["prior"])[0] == rep.eps_ps_sm_sup
    assert eps_ss(g, c["ss"]["prior"])[0] == rep.eps_ss_sup


def test_analyze_all_half_is_all_zero():
    rep = analyze(HALF)
    assert [rep.eps_ind, rep.eps_ps_cs_sup, rep.eps_ps_cm_sup, rep.eps_ps_sm_sup, rep.eps_ss_sup] == [0] * 5


def test_analyze_cap_and_skip():
    ch = identity(4)
    with pytest.raises(EnumerationTooLargeError):
        analyze(ch, ss_cap=3)
    rep = analyze(ch, ss_cap=3, include_ss=False)
    assert rep.eps_ss_sup is None and "ss" not in rep.certificates
