"""Seeded random instances: doubly stochastic channels, priors, binary joints.

All weights are drawn as small positive integers and normalised, so every
instance is exactly rational and reproducible from the seed alone.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .notions import BinaryJoint
from .prob_core import Alphabet, ChannelMatrix, ProbVector


def random_weights(rng: random.Random, t: int, max_weight: int = 12) -> list[Fraction]:
    raw = [rng.randint(1, max_weight) for _ in range(t)]
    total = sum(raw)
    return [Fraction(x, total) for x in raw]


def random_birkhoff_mixture(
    rng: random.Random, n: int, terms: int | None = None, max_weight: int = 12
) -> tuple[ChannelMatrix, list[tuple[Fraction, tuple[int, ...]]]]:
    """A doubly stochastic channel built as a mix of ``terms`` random permutations.

    ``terms`` defaults to a random count in ``1..n``. Returns the channel and
    the mixture used to build it (permutation ``p`` sends message ``j`` to
    cryptogram ``p[j]``).
    """
    t = terms if terms is not None else rng.randint(1, n)
    mixture = []
    for w in random_weights(rng, t, max_weight):
        perm = list(range(n))
        rng.shuffle(perm)
        mixture.append((w, tuple(perm)))
    rows = [[Fraction(0)] * n for _ in range(n)]
    for w, perm in mixture:
        for j, i in enumerate(perm):
            rows[i][j] += w
    return ChannelMatrix.from_rows(rows), mixture


def random_prob_vector(
    rng: random.Random, alphabet: Alphabet, max_weight: int = 12, zero_chance: float = 0.25
) -> ProbVector:
    """Random distribution; some entries are zeroed so supports vary."""
    n = len(alphabet)
    raw = [0 if rng.random() < zero_chance else rng.randint(1, max_weight) for _ in range(n)]
    if not any(raw):
        raw[rng.randrange(n)] = 1
    total = sum(raw)
    return ProbVector(alphabet, (Fraction(x, total) for x in raw))


def random_binary_joint(rng: random.Random, max_weight: int = 30) -> BinaryJoint:
    raw = [rng.randint(0, max_weight) for _ in range(4)]
    if not any(raw):
        raw[rng.randrange(4)] = 1
    total = sum(raw)
    return BinaryJoint(*(Fraction(x, total) for x in raw))


def binary_joint_grid(denominator: int) -> list[BinaryJoint]:
    """Every ``(a, b, c, d)`` with entries in ``{0, 1/D, ..., 1}`` summing to 1."""
    out = []
    D = denominator
    for a in range(D + 1):
        for b in range(D + 1 - a):
            for c in range(D + 1 - a - b):
                d = D - a - b - c
                out.append(BinaryJoint(Fraction(a, D), Fraction(b, D), Fraction(c, D), Fraction(d, D)))
    return out
