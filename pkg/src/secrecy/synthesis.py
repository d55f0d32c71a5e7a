"""Realise a doubly stochastic channel as a cipher via Birkhoff-von Neumann.

The decomposition peels off one permutation matrix at a time from the
support of the residual matrix. Each permutation is the lexicographically
smallest perfect matching (message ``j`` -> cryptogram ``perm[j]``) of the
bipartite graph of positive entries, so output is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .cryptosystem import Cryptosystem, permutation_cipher, require_doubly_stochastic
from .errors import InvariantViolationError, ValidationError
from .prob_core import ONE, ZERO, Alphabet, ChannelMatrix

Permutation = tuple[int, ...]


def max_terms(n: int) -> int:
    """Dimension of the Birkhoff polytope plus one."""
    return n * n - 2 * n + 2


@dataclass(frozen=True)
class BirkhoffDecomposition:
    n: int
    terms: tuple[tuple[Fraction, Permutation], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValidationError("a decomposition needs at least one term")
        for w, perm in self.terms:
            if w <= 0:
                raise ValidationError(f"non-positive weight {w}")
            if sorted(perm) != list(range(self.n)):
                raise ValidationError(f"{perm} is not a permutation of {self.n} indices")
        total = sum((w for w, _ in self.terms), ZERO)
        if total != ONE:
            raise ValidationError(f"weights sum to {total}, expected 1")

    @property
    def weights(self) -> list[Fraction]:
        return [w for w, _ in self.terms]

    def recompose(self) -> list[list[Fraction]]:
        """The |C| x |M| matrix sum of ``weight * permutation_matrix``."""
        out = [[ZERO] * self.n for _ in range(self.n)]
        for w, perm in self.terms:
            for j, i in enumerate(perm):
                out[i][j] += w
        return out


def _try_augment(j, adj, match_row, seen) -> bool:
    for i in adj[j]:
        if i in seen:
            continue
        seen.add(i)
        if match_row.get(i) is None or _try_augment(match_row[i], adj, match_row, seen):
            match_row[i] = j
            return True
    return False


def _kuhn(adj, left, warm: dict[int, int] | None = None) -> dict[int, int] | None:
    """Augmenting-path bipartite matching, columns ``left`` into rows.

    ``warm`` maps rows to columns and seeds the search; entries whose edge is
    missing from ``adj`` are dropped. Returns ``{row: column}`` or ``None``.
    """
    match_row: dict[int, int] = {}
    if warm:
        match_row = {i: j for i, j in warm.items() if i in adj[j]}
    matched = set(match_row.values())
    for j in left:  # cheap greedy pass before augmenting
        if j not in matched:
            i = next((i for i in adj[j] if i not in match_row), None)
            if i is not None:
                match_row[i] = j
                matched.add(j)
    for j in left:
        if j not in matched and not _try_augment(j, adj, match_row, set()):
            return None
    return match_row


def has_perfect_matching(adj: Sequence[Sequence[int]], left: Sequence[int]) -> bool:
    """Kuhn's augmenting-path test that every vertex in ``left`` can be matched."""
    return _kuhn(adj, left) is not None


def lex_min_perfect_matching(support: Sequence[Sequence[bool]]) -> Permutation | None:
    """Smallest ``perm`` (as a tuple) with ``support[perm[j]][j]`` for every column ``j``.

    ``support`` is indexed ``[row][col]``. Returns ``None`` if no perfect
    matching exists.
    """
    n = len(support)
    return _lex_min([[i for i in range(n) if support[i][j]] for j in range(n)])


def _lex_min(adj: list[list[int]], warm: dict[int, int] | None = None) -> Permutation | None:
    # Start from any perfect matching, then fix columns left to right. Column j
    # can move to a smaller row i iff the column holding i has an alternating
    # path to j's current row through unfixed rows; candidates are tried in
    # ascending order and rows proven dead stay dead for the whole column.
    n = len(adj)
    matching = _kuhn(adj, range(n), warm)
    if matching is None:
        return None
    match_row = [0] * n
    row_of = [0] * n
    for i, j in matching.items():
        match_row[i], row_of[j] = j, i
    fixed = [False] * n  # by row
    # unfixed rows per column; any path will do inside chain, so sets are fine
    live = [set(rows) for rows in adj]
    cols_of: list[list[int]] = [[] for _ in range(n)]
    for j, rows in enumerate(adj):
        for i in rows:
            cols_of[i].append(j)

    def chain(start: int, target: int, banned: int, seen: list[bool]) -> list[int] | None:
        # rows taken in turn by start, match_row[first], ... ending at target
        if target in live[start]:
            return [target]
        stack = [(start, iter(live[start]))]
        path: list[int] = []
        while stack:
            col, it = stack[-1]
            for r in it:
                if r == banned or seen[r]:
                    continue
                seen[r] = True
                path.append(r)
                nxt = match_row[r]
                if target in live[nxt]:
                    path.append(target)
                    return path
                stack.append((nxt, iter(live[nxt])))
                break
            else:
                stack.pop()
                if path:
                    path.pop()
        return None

    for j in range(n):
        old = row_of[j]
        seen = [False] * n
        for i in adj[j]:
            if i == old:
                break
            if fixed[i]:
                continue
            path = chain(match_row[i], old, i, seen)
            if path is None:
                continue
            c = match_row[i]
            for r in path:
                prev = match_row[r]
                match_row[r], row_of[c] = c, r
                c = prev
            match_row[i], row_of[j] = j, i
            break
        r = row_of[j]
        fixed[r] = True
        for c in cols_of[r]:
            live[c].discard(r)
    return tuple(row_of)


def birkhoff_decompose(ch: ChannelMatrix) -> BirkhoffDecomposition:
    """Write a doubly stochastic channel as a convex mix of permutation matrices.

    Greedy: take the lexicographically smallest permutation inside the
    support of the residual, subtract it with the largest weight that keeps
    the residual non-negative, repeat. Each step empties at least one entry.
    """
    require_doubly_stochastic(ch)
    n = ch.shape[0]
    denom = lcm(*(x.denominator for col in ch.columns for x in col.weights))
    # residual[j][i] = denom * P(c_i | m_j), column-major, exact integers
    residual = [[x.numerator * (denom // x.denominator) for x in col.weights] for col in ch.columns]
    terms: list[tuple[Fraction, Permutation]] = []
    remaining = denom
    warm = None
    while remaining > 0:
        adj = [[i for i, x in enumerate(col) if x > 0] for col in residual]
        perm = _lex_min(adj, warm)
        if perm is None:
            raise InvariantViolationError("residual of a doubly stochastic matrix has no perfect matching")
        theta = min(residual[j][i] for j, i in enumerate(perm))
        for j, i in enumerate(perm):
            residual[j][i] -= theta
        remaining -= theta
        terms.append((Fraction(theta, denom), perm))
        if len(terms) > max_terms(n):
            raise InvariantViolationError(f"more than {max_terms(n)} terms for n={n}")
        warm = {i: j for j, i in enumerate(perm)}
    if any(x != 0 for col in residual for x in col):
        raise InvariantViolationError("residual did not vanish")
    return BirkhoffDecomposition(n, tuple(terms))


def cryptosystem_from_decomposition(
    dec: BirkhoffDecomposition,
    msg_alphabet: Alphabet,
    cg_alphabet: Alphabet,
    key_prefix: str = "k",
) -> Cryptosystem:
    """Key ``k_t`` has probability ``weight_t`` and encrypts by ``perm_t``."""
    if len(msg_alphabet) != dec.n or len(cg_alphabet) != dec.n:
        raise ValidationError(
            f"alphabets of size {len(msg_alphabet)}/{len(cg_alphabet)} "
            f"do not fit permutations of degree {dec.n}"
        )
    perms = {}
    weights = {}
    for t, (w, perm) in enumerate(dec.terms, start=1):
        k = f"{key_prefix}{t}"
        perms[k] = {msg_alphabet[j]: cg_alphabet[i] for j, i in enumerate(perm)}
        weights[k] = w
    return permutation_cipher(perms, weights, msg_alphabet, cg_alphabet)


def synthesize(ch: ChannelMatrix) -> Cryptosystem:
    """A cipher whose induced channel is exactly ``ch``."""
    dec = birkhoff_decompose(ch)
    return cryptosystem_from_decomposition(dec, ch.message_alphabet, ch.cryptogram_alphabet)
