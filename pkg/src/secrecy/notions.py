"""Minimal epsilon for each statistical secrecy notion, with witnesses.

Notation used throughout: ``col_m`` is the cryptogram distribution given
message ``m`` and ``d`` the variational distance.

* ``eps_ind``    max over message pairs of ``d(col_m0, col_m1)``
* ``eps_ps_cs``  max over ``m`` of ``d(col_m, P_C)``
* ``eps_ps_cm``  ``d(P_CM, P_C x P_M)``
* ``eps_ps_sm``  max over cryptograms ``c`` of ``d(P(.|c), P_M)``
* ``eps_ss``     semantic-security advantage, see :func:`eps_ss`

The prior-dependent notions are swept over a finite set of priors (normally
:func:`~secrecy.prob_core.simplex_grid`). For PS-cs, PS-cm and SS the sweep is
checked against the bounds relating them to ``eps_ind``; a violated bound
raises :class:`~secrecy.errors.InvariantViolationError`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import EnumerationTooLargeError, InvariantViolationError, ValidationError
from .prob_core import (
    ONE,
    ZERO,
    ChannelMatrix,
    ProbVector,
    as_fraction,
    joint,
    marginal_c,
    posterior,
    product_dist,
    _require_same,
    simplex_grid,
    variational_distance,
)

DEFAULT_SS_CAP = 10


@dataclass(frozen=True)
class SSWitness:
    """The distinguisher ``f`` (cryptograms it maps to 1), the best coin bias ``q``
    and the predicate ``h`` (messages it maps to 1) that is hardest against it."""

    f: frozenset[str]
    q: Fraction
    h: frozenset[str]


@dataclass(frozen=True)
class SupResult:
    """Largest value found over a set of priors, with the prior and inner witness."""

    value: Fraction
    prior: ProbVector | None
    witness: object = None


# ---------------------------------------------------------------- IND


def eps_ind(ch: ChannelMatrix) -> tuple[Fraction, tuple[str, str]]:
    msgs = ch.message_alphabet
    # repeated columns cannot raise the max; keep the first message of each
    distinct: dict[tuple[Fraction, ...], int] = {}
    for j, col in enumerate(ch.columns):
        distinct.setdefault(col.weights, j)
    idx = list(distinct.values())
    best = ZERO
    cert = (msgs[0], msgs[0])
    for a, b in itertools.combinations(idx, 2):
        d = variational_distance(ch.columns[a], ch.columns[b])
        if d > best:
            best, cert = d, (msgs[a], msgs[b])
    return best, cert


# ---------------------------------------------------------------- PS variants


def eps_ps_cs(ch: ChannelMatrix, pm: ProbVector) -> tuple[Fraction, str]:
    pc = marginal_c(ch, pm)
    best, cert = ZERO, ch.message_alphabet[0]
    for m, col in zip(ch.message_alphabet, ch.columns):
        d = variational_distance(col, pc)
        if d > best:
            best, cert = d, m
    return best, cert


def eps_ps_cm(ch: ChannelMatrix, pm: ProbVector) -> Fraction:
    pj = joint(ch, pm)
    pp = product_dist(marginal_c(ch, pm), pm)
    return sum((abs(x - y) for x, y in zip(pj.flat(), pp.flat())), ZERO) / 2


def eps_ps_sm(ch: ChannelMatrix, pm: ProbVector) -> tuple[Fraction, str | None]:
    """Worst posterior shift; cryptograms of probability zero are skipped."""
    pc = marginal_c(ch, pm)
    best, cert = ZERO, None
    for c, w in pc.items():
        if w == 0:
            continue
        d = variational_distance(posterior(ch, pm, c), pm)
        if cert is None or d > best:
            best, cert = d, c
    return best, cert


def per_cryptogram_sm(ch: ChannelMatrix, pm: ProbVector) -> dict[str, Fraction | None]:
    """``d(P(.|c), P_M)`` for every cryptogram, ``None`` where ``P_C(c) = 0``."""
    # d(P(.|c), P_M) = sum_m |P(c,m) - P(c) P(m)| / (2 P(c)), without building posteriors
    _require_same(ch.message_alphabet, pm.alphabet, "per_cryptogram_sm")
    out: dict[str, Fraction | None] = {}
    for i, c in enumerate(ch.cryptogram_alphabet):
        num = [col.weights[i] * w for col, w in zip(ch.columns, pm.weights)]
        pc = sum(num, ZERO)
        if pc == 0:
            out[c] = None
            continue
        out[c] = sum((abs(x - pc * w) for x, w in zip(num, pm.weights)), ZERO) / (2 * pc)
    return out


def _sweep(values) -> SupResult:
    best = None
    for pm, value, witness in values:
        if best is None or value > best.value:
            best = SupResult(value, pm, witness)
    if best is None:
        raise ValidationError("empty grid of priors")
    return best


def _check_bracket(name: str, lo: Fraction, value: Fraction, hi: Fraction) -> None:
    if not lo <= value <= hi:
        raise InvariantViolationError(f"{name}: expected {lo} <= {value} <= {hi}")


def eps_ps_cs_sup(ch: ChannelMatrix, grid: Sequence[ProbVector]) -> SupResult:
    """Sweep PS-cs over ``grid``; must land exactly on ``eps_ind``."""
    ind, _ = eps_ind(ch)

    def rows():
        for pm in grid:
            v, m = eps_ps_cs(ch, pm)
            if v > ind:
                raise InvariantViolationError(f"PS-cs {v} exceeds IND {ind} at prior {pm.weights}")
            yield pm, v, m

    res = _sweep(rows())
    if res.value != ind:
        raise InvariantViolationError(f"PS-cs sup {res.value} != IND {ind}")
    return res


def eps_ps_cm_sup(ch: ChannelMatrix, grid: Sequence[ProbVector]) -> SupResult:
    """Sweep PS-cm over ``grid``; bracketed by ``eps_ind / 2`` and ``eps_ind``."""
    ind, _ = eps_ind(ch)

    def rows():
        for pm in grid:
            v = eps_ps_cm(ch, pm)
            if v > ind:
                raise InvariantViolationError(f"PS-cm {v} exceeds IND {ind} at prior {pm.weights}")
            yield pm, v, None

    res = _sweep(rows())
    _check_bracket("PS-cm sup", ind / 2, res.value, ind)
    return res


def eps_ps_sm_sup(ch: ChannelMatrix, grid: Sequence[ProbVector]) -> SupResult:
    """Largest PS-sm value over ``grid``: a lower bound on the sup over all priors."""
    return _sweep((pm, *eps_ps_sm(ch, pm)) for pm in grid)


# ---------------------------------------------------------------- SS


def _check_caps(ch: ChannelMatrix, cap_c: int, cap_m: int) -> None:
    nc, nm = ch.shape
    if nc > cap_c or nm > cap_m:
        raise EnumerationTooLargeError(
            f"semantic-security enumeration over |C|={nc}, |M|={nm} exceeds caps "
            f"({cap_c}, {cap_m})"
        )


def _f_masks(nc: int):
    # f and its complement have the same optimum (q -> 1 - q), so fix f(c_last) = 0
    return range(1 << max(nc - 1, 0)) if nc > 1 else range(2)


def _signed_sums(us: Sequence[Fraction], vs: Sequence[Fraction]):
    """All ``(sum s_m u_m, sum s_m v_m, mask)`` with ``s_0 = +1`` and other signs free.

    ``mask`` has bit ``m`` set where ``s_m = +1``. Together with negation this
    covers every sign pattern, i.e. every predicate ``h``.
    """
    acc = [(us[0], vs[0], 1)]
    for m in range(1, len(us)):
        u, v, bit = us[m], vs[m], 1 << m
        acc = [(a + u, b + v, k | bit) for a, b, k in acc] + [(a - u, b - v, k) for a, b, k in acc]
    return acc


def _hardest_predicates(ch: ChannelMatrix, pm: ProbVector, fmask: int):
    """Affine functions ``q -> intercept + slope * q``, one per predicate ``h``.

    For a predicate ``h`` and a coin ``G`` with ``Pr[G=1] = q`` independent of
    ``M``, ``Pr[f(C)=h(M)] - Pr[G=h(M)]`` equals ``sum_m s_m P_M(m) (phi_m - q)``
    with ``s_m = +1`` iff ``h(m) = 1`` and ``phi_m = Pr[f(C)=1 | M=m]``. Only one
    of each ``(h, not h)`` pair is returned; the other is the negation.
    """
    idx = [i for i in range(ch.shape[0]) if fmask >> i & 1]
    phis = [sum((col.weights[i] for i in idx), ZERO) for col in ch.columns]
    us = [p * phi for p, phi in zip(pm.weights, phis)]
    return phis, _signed_sums(us, list(pm.weights))


def _upper_hull(lines: list[tuple[Fraction, Fraction, int]]):
    """Lines ``(slope, intercept, tag)`` that appear on the upper envelope, by slope."""
    best: dict[Fraction, tuple[Fraction, Fraction, int]] = {}
    for s, b, tag in lines:
        cur = best.get(s)
        if cur is None or b > cur[1]:
            best[s] = (s, b, tag)
    hull: list[tuple[Fraction, Fraction, int]] = []
    for ln in sorted(best.values()):
        while len(hull) >= 2:
            (s1, b1, _), (s2, b2, _) = hull[-2], hull[-1]
            s3, b3 = ln[0], ln[1]
            # hull[-1] is redundant if line 3 overtakes line 1 no later than line 2 does
            if (b3 - b1) * (s2 - s1) >= (b2 - b1) * (s3 - s1):
                hull.pop()
            else:
                break
        hull.append(ln)
    return hull


def minimize_max_abs_affine(lines: Sequence[tuple[Fraction, Fraction, int]]):
    """Exact ``min_{q in [0,1]} max_t |b_t + s_t q|`` for ``lines = [(s_t, b_t, tag_t)]``.

    The objective is convex and piecewise linear, so its minimum sits at an
    endpoint or at a breakpoint of the envelope. Returns ``(value, q, tag)``
    where ``tag`` identifies the line attaining the max at ``q`` and is
    negated (``~tag``) when the mirrored line ``-(b + s q)`` attains it.
    """
    both = [(s, b, t) for s, b, t in lines] + [(-s, -b, ~t) for s, b, t in lines]
    hull = _upper_hull(both)
    # first hull line with non-negative slope; the envelope's minimiser is where it starts
    k = next(i for i, ln in enumerate(hull) if ln[0] >= 0)
    if k == 0:
        q = ZERO
    else:
        (s1, b1, _), (s2, b2, _) = hull[k - 1], hull[k]
        q = min(max((b1 - b2) / (s2 - s1), ZERO), ONE)
    value, tag = max((b + s * q, t) for s, b, t in hull)
    return value, q, tag


def eps_ss(
    ch: ChannelMatrix,
    pm: ProbVector,
    cap_c: int = DEFAULT_SS_CAP,
    cap_m: int = DEFAULT_SS_CAP,
) -> tuple[Fraction, SSWitness]:
    """Semantic-security advantage of the channel under prior ``pm``.

    ``max_f min_q max_h |Pr[f(C)=h(M)] - Pr[G=h(M)]|`` over binary tests ``f``
    of the cryptogram, coins ``G`` independent of ``M`` with ``Pr[G=1] = q``,
    and binary predicates ``h`` of the message. Exhaustive over ``f`` and ``h``,
    hence the caps on alphabet sizes.
    """
    _check_caps(ch, cap_c, cap_m)
    msgs, cgs = ch.message_alphabet, ch.cryptogram_alphabet
    best = None
    for fmask in _f_masks(len(cgs)):
        _, signed = _hardest_predicates(ch, pm, fmask)
        # line for mask k: sum s_m u_m - q * sum s_m v_m
        lines = [(-v, u, k) for u, v, k in signed]
        value, q, tag = minimize_max_abs_affine(lines)
        if best is None or value > best[0]:
            hmask = tag if tag >= 0 else ~tag ^ ((1 << len(msgs)) - 1)
            best = (value, fmask, q, hmask)
    value, fmask, q, hmask = best
    witness = SSWitness(
        f=frozenset(c for i, c in enumerate(cgs) if fmask >> i & 1),
        q=q,
        h=frozenset(m for i, m in enumerate(msgs) if hmask >> i & 1),
    )
    return value, witness


def ss_witness_bound(
    ch: ChannelMatrix,
    pm: ProbVector,
    cap_c: int = DEFAULT_SS_CAP,
    cap_m: int = DEFAULT_SS_CAP,
) -> Fraction:
    """SS advantage when the coin is ``f(C*)`` for an independent re-encryption ``C*``.

    ``C*`` is the cryptogram of an independent message drawn from the same
    prior, so it is distributed as ``P_C`` and independent of ``M``. Fixing
    ``G = f(C*)`` can only do worse than the optimal coin, so this bounds
    :func:`eps_ss` from above.
    """
    _check_caps(ch, cap_c, cap_m)
    pj = joint(ch, pm)
    pstar = product_dist(marginal_c(ch, pm), pm)
    delta = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(pj.probs, pstar.probs)]
    nc, nm = ch.shape
    best = ZERO
    for fmask in _f_masks(nc):
        # Pr[f(C)=1, M=m] - Pr[f(C*)=1, M=m]; the f=0 part is its negation, so
        # the gap for predicate h is |sum_m s_m d_m| with s_m = +1 iff h(m) = 1
        d = [sum((delta[i][m] for i in range(nc) if fmask >> i & 1), ZERO) for m in range(nm)]
        gap = max(abs(a) for a, _, _ in _signed_sums(d, d))
        if gap > best:
            best = gap
    return best


def eps_ss_sup(
    ch: ChannelMatrix,
    grid: Sequence[ProbVector],
    cap_c: int = DEFAULT_SS_CAP,
    cap_m: int = DEFAULT_SS_CAP,
    check_witness: bool = False,
) -> SupResult:
    """Sweep SS over ``grid``; bracketed by ``eps_ind / 4`` and ``eps_ind``.

    With ``check_witness`` every prior also confirms
    ``eps_ss <= ss_witness_bound <= eps_ind``.
    """
    _check_caps(ch, cap_c, cap_m)
    ind, _ = eps_ind(ch)

    def rows():
        for pm in grid:
            v, w = eps_ss(ch, pm, cap_c, cap_m)
            if check_witness:
                bound = ss_witness_bound(ch, pm, cap_c, cap_m)
                if not v <= bound <= ind:
                    raise InvariantViolationError(
                        f"SS {v} <= witness {bound} <= IND {ind} fails at prior {pm.weights}"
                    )
            yield pm, v, w

    res = _sweep(rows())
    _check_bracket("SS sup", ind / 4, res.value, ind)
    return res


# ---------------------------------------------------------------- binary lemma


@dataclass(frozen=True)
class BinaryJoint:
    """Joint law of two bits: ``a=P(0,0)``, ``b=P(0,1)``, ``c=P(1,0)``, ``d=P(1,1)``."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self) -> None:
        for name in "abcd":
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValidationError("binary joint has a negative entry")
        total = self.a + self.b + self.c + self.d
        if total != ONE:
            raise ValidationError(f"binary joint sums to {total}, expected 1")


@dataclass(frozen=True)
class Lemma1Result:
    lhs: Fraction
    rhs: Fraction
    det: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs == 2 * self.rhs


def lemma1_check(j: BinaryJoint) -> Lemma1Result:
    """Both sides of the binary agreement/correlation identity.

    ``lhs = |Pr[X=Y] - sum_l Pr[X=l]Pr[Y=l]|`` and
    ``rhs = max_l |Pr[X=Y=l] - Pr[X=l]Pr[Y=l]|``; for bits ``lhs = 2 rhs = 2|ad-bc|``.
    """
    a, b, c, d = j.a, j.b, j.c, j.d
    px0, px1 = a + b, c + d
    py0, py1 = a + c, b + d
    lhs = abs(a + d - px0 * py0 - px1 * py1)
    rhs = max(abs(a - px0 * py0), abs(d - px1 * py1))
    return Lemma1Result(lhs, rhs, abs(a * d - b * c))


# ---------------------------------------------------------------- report


@dataclass(frozen=True)
class NotionReport:
    eps_ind: Fraction
    eps_ps_cs_sup: Fraction
    eps_ps_cm_sup: Fraction
    eps_ps_sm_sup: Fraction
    eps_ss_sup: Fraction | None
    certificates: dict = field(default_factory=dict)
    grid_resolution: int = 4
    caps: dict = field(default_factory=dict)


def analyze(
    ch: ChannelMatrix,
    grid_resolution: int = 4,
    ss_cap: int = DEFAULT_SS_CAP,
    include_ss: bool = True,
) -> NotionReport:
    """Every notion for one channel, swept over ``simplex_grid(messages, grid_resolution)``."""
    if include_ss:
        _check_caps(ch, ss_cap, ss_cap)
    grid = simplex_grid(ch.message_alphabet, grid_resolution)
    ind, pair = eps_ind(ch)
    cs = eps_ps_cs_sup(ch, grid)
    cm = eps_ps_cm_sup(ch, grid)
    sm = eps_ps_sm_sup(ch, grid)
    certs = {
        "ind": {"pair": pair},
        "ps_cs": {"prior": cs.prior, "message": cs.witness},
        "ps_cm": {"prior": cm.prior},
        "ps_sm": {"prior": sm.prior, "cryptogram": sm.witness},
    }
    ss_value = None
    if include_ss:
        ss = eps_ss_sup(ch, grid, ss_cap, ss_cap)
        ss_value = ss.value
        certs["ss"] = {"prior": ss.prior, "f": ss.witness.f, "q": ss.witness.q, "h": ss.witness.h}
    if (ind == 0) != (sm.value == 0) or (ss_value is not None and (ind == 0) != (ss_value == 0)):
        raise InvariantViolationError("zero-epsilon notions disagree")
    return NotionReport(
        eps_ind=ind,
        eps_ps_cs_sup=cs.value,
        eps_ps_cm_sup=cm.value,
        eps_ps_sm_sup=sm.value,
        eps_ss_sup=ss_value,
        certificates=certs,
        grid_resolution=grid_resolution,
        caps={"ss": ss_cap if include_ss else None},
    )
