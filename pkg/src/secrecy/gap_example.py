"""A cipher that is nearly indistinguishable yet leaks through rare cryptograms.

The channel is uniform except in its first two rows, which alternate
``1/n + delta`` and ``1/n - delta`` in opposite phase. Columns then differ by
at most ``2 delta``, while under a uniform prior the posterior for ``c1`` or
``c2`` sits ``n delta / 2`` away from the prior. With ``delta = 1/n`` the
first number vanishes as ``n`` grows and the second stays at ``1/2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cryptosystem import Cryptosystem, induced_channel, is_doubly_stochastic
from .errors import EnumerationTooLargeError, InvariantViolationError, ValidationError
from .notions import (
    DEFAULT_SS_CAP,
    SupResult,
    eps_ind,
    eps_ps_cm_sup,
    eps_ps_cs_sup,
    eps_ps_sm_sup,
    eps_ss_sup,
    per_cryptogram_sm,
)
from .prob_core import ChannelMatrix, ProbVector, as_fraction, marginal_c, simplex_grid
from .synthesis import synthesize

DEFAULT_SWEEP_CAP = 6


@dataclass(frozen=True)
class GapParams:
    n: int
    delta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if not isinstance(self.n, int) or self.n < 2 or self.n % 2:
            raise ValidationError(f"n must be an even integer >= 2, got {self.n!r}")
        if not 0 < self.delta <= Fraction(1, self.n):
            raise ValidationError(f"delta must lie in (0, 1/{self.n}], got {self.delta}")


def gap_matrix(p: GapParams) -> ChannelMatrix:
    n, base = p.n, Fraction(1, p.n)
    hi, lo = base + p.delta, base - p.delta
    rows = [
        [hi if j % 2 == 0 else lo for j in range(n)],
        [lo if j % 2 == 0 else hi for j in range(n)],
    ]
    rows += [[base] * n for _ in range(n - 2)]
    ch = ChannelMatrix.from_rows(rows)
    if not is_doubly_stochastic(ch):
        raise InvariantViolationError("gap matrix is not doubly stochastic")
    return ch


@dataclass(frozen=True)
class GapReport:
    params: GapParams
    eps_ind: Fraction
    eps_ps_sm_uniform: Fraction
    per_cryptogram: dict[str, Fraction | None]
    insecure_probability: Fraction
    cipher: Cryptosystem
    grid_resolution: int | None
    eps_ps_cs_sup: SupResult | None = None
    eps_ps_cm_sup: SupResult | None = None
    eps_ps_sm_sup: SupResult | None = None
    eps_ss_sup: SupResult | None = None
    skipped: tuple[str, ...] = ()


def gap_report(
    p: GapParams,
    grid_resolution: int = 4,
    ss_cap: int = DEFAULT_SS_CAP,
    sweep_cap: int = DEFAULT_SWEEP_CAP,
) -> GapReport:
    """Closed-form quantities for the gap cipher, checked against the generic code.

    Prior sweeps run only when ``n <= sweep_cap`` (their grids grow like
    ``n**k``); SS additionally needs ``n <= ss_cap``. Anything not run is listed
    in ``skipped``.
    """
    ch = gap_matrix(p)
    n, delta = p.n, p.delta
    ind, _ = eps_ind(ch)
    if ind != 2 * delta:
        raise InvariantViolationError(f"IND {ind} != 2*delta {2 * delta}")
    uniform = ProbVector.uniform(ch.message_alphabet)
    per_c = per_cryptogram_sm(ch, uniform)
    sm = max(v for v in per_c.values() if v is not None)
    shape = [n * delta / 2] * 2 + [Fraction(0)] * (n - 2)
    if sm != n * delta / 2 or list(per_c.values()) != shape:
        raise InvariantViolationError(f"posterior shift {list(per_c.values())} != {shape}")
    pc = marginal_c(ch, uniform)
    insecure = pc["c1"] + pc["c2"]

    cipher = synthesize(ch)
    if induced_channel(cipher) != ch:
        raise InvariantViolationError("synthesised cipher does not reproduce the gap matrix")

    sweeps: dict[str, SupResult] = {}
    skipped = []
    if n <= sweep_cap:
        grid = simplex_grid(ch.message_alphabet, grid_resolution)
        sweeps["eps_ps_cs_sup"] = eps_ps_cs_sup(ch, grid)
        sweeps["eps_ps_cm_sup"] = eps_ps_cm_sup(ch, grid)
        sweeps["eps_ps_sm_sup"] = eps_ps_sm_sup(ch, grid)
        try:
            sweeps["eps_ss_sup"] = eps_ss_sup(ch, grid, ss_cap, ss_cap)
        except EnumerationTooLargeError:
            skipped.append("eps_ss_sup")
    else:
        skipped += ["eps_ps_cs_sup", "eps_ps_cm_sup", "eps_ps_sm_sup", "eps_ss_sup"]

    return GapReport(
        params=p,
        eps_ind=ind,
        eps_ps_sm_uniform=sm,
        per_cryptogram=per_c,
        insecure_probability=insecure,
        cipher=cipher,
        grid_resolution=grid_resolution if n <= sweep_cap else None,
        skipped=tuple(skipped),
        **sweeps,
    )
