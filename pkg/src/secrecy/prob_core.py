"""Exact finite probability: alphabets, distributions, channels, joints.

Every probability is a :class:`fractions.Fraction`. Nothing here ever touches a
float, so equalities such as "weights sum to 1" are checked exactly.
"""
from __future__ import annotations

import itertools
from math import comb
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    AlphabetMismatchError,
    EnumerationTooLargeError,
    UndefinedConditioningError,
    ValidationError,
)

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_TEST_CAP = 20


def as_fraction(value) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Integers, rationals, ``Decimal`` and strings such as ``"3/8"`` or
    ``"0.25"`` are accepted. Floats are refused because their binary
    expansion is almost never the number the caller meant.
    """
    if isinstance(value, bool):
        raise ValidationError(f"not a probability: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise ValidationError(
            f"float {value!r} is not exact; pass a Fraction or a 'p/q' string"
        )
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot read {value!r} as an exact rational") from exc


@dataclass(frozen=True)
class Alphabet:
    """A finite, ordered set of string labels; index ``i`` is label ``i``."""

    symbols: tuple[str, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __init__(self, symbols: Iterable[str]) -> None:
        syms = tuple(str(s) for s in symbols)
        if not syms:
            raise ValidationError("alphabet must be non-empty")
        if len(set(syms)) != len(syms):
            dupes = sorted({s for s in syms if syms.count(s) > 1})
            raise ValidationError(f"alphabet labels must be distinct, repeated: {dupes}")
        object.__setattr__(self, "symbols", syms)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(syms)})

    @classmethod
    def numbered(cls, prefix: str, n: int, start: int = 1) -> "Alphabet":
        """``Alphabet.numbered("m", 3)`` is ``m1, m2, m3``."""
        return cls(f"{prefix}{i}" for i in range(start, start + n))

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise ValidationError(f"unknown symbol {symbol!r}") from None

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._index

    def __getitem__(self, i: int) -> str:
        return self.symbols[i]


@dataclass(frozen=True)
class ProbVector:
    """An exact probability distribution over an :class:`Alphabet`."""

    alphabet: Alphabet
    weights: tuple[Fraction, ...]

    def __init__(self, alphabet: Alphabet, weights: Iterable) -> None:
        w = tuple(as_fraction(x) for x in weights)
        if len(w) != len(alphabet):
            raise ValidationError(
                f"{len(w)} weights for an alphabet of {len(alphabet)} symbols"
            )
        for sym, x in zip(alphabet, w):
            if x < 0:
                raise ValidationError(f"negative probability {x} at {sym!r}")
        total = sum(w, ZERO)
        if total != ONE:
            raise ValidationError(f"weights sum to {total}, expected 1")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_mapping(cls, alphabet: Alphabet, probs: Mapping[str, object]) -> "ProbVector":
        extra = set(probs) - set(alphabet)
        if extra:
            raise ValidationError(f"symbols outside the alphabet: {sorted(extra)}")
        return cls(alphabet, (probs.get(s, 0) for s in alphabet))

    @classmethod
    def uniform(cls, alphabet: Alphabet) -> "ProbVector":
        n = len(alphabet)
        return cls(alphabet, [Fraction(1, n)] * n)

    @classmethod
    def point_mass(cls, alphabet: Alphabet, symbol: str) -> "ProbVector":
        i = alphabet.index(symbol)
        return cls(alphabet, (ONE if j == i else ZERO for j in range(len(alphabet))))

    def __getitem__(self, symbol: str) -> Fraction:
        return self.weights[self.alphabet.index(symbol)]

    def __len__(self) -> int:
        return len(self.weights)

    def items(self) -> Iterator[tuple[str, Fraction]]:
        return zip(self.alphabet.symbols, self.weights)

    def support(self) -> tuple[str, ...]:
        return tuple(s for s, x in self.items() if x > 0)

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.items())


@dataclass(frozen=True)
class ChannelMatrix:
    """A conditional distribution P(c|m): one column over cryptograms per message.

    ``columns[j]`` is the distribution of the cryptogram given message ``j``;
    ``entry(i, j)`` is P(c_i | m_j), matching the usual |C| x |M| layout.
    """

    message_alphabet: Alphabet
    cryptogram_alphabet: Alphabet
    columns: tuple[ProbVector, ...]

    def __init__(
        self,
        message_alphabet: Alphabet,
        cryptogram_alphabet: Alphabet,
        columns: Iterable[ProbVector | Sequence],
    ) -> None:
        cols = []
        for m, col in itertools.zip_longest(message_alphabet, columns):
            if m is None or col is None:
                raise ValidationError("need exactly one column per message")
            if isinstance(col, ProbVector):
                if col.alphabet != cryptogram_alphabet:
                    raise AlphabetMismatchError(
                        f"column for {m!r} is not over the cryptogram alphabet"
                    )
            else:
                try:
                    col = ProbVector(cryptogram_alphabet, col)
                except ValidationError as exc:
                    raise ValidationError(f"column {m!r}: {exc}") from exc
            cols.append(col)
        object.__setattr__(self, "message_alphabet", message_alphabet)
        object.__setattr__(self, "cryptogram_alphabet", cryptogram_alphabet)
        object.__setattr__(self, "columns", tuple(cols))

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence],
        messages: Alphabet | None = None,
        cryptograms: Alphabet | None = None,
    ) -> "ChannelMatrix":
        """Build from a row-major |C| x |M| matrix (row i = cryptogram c_i)."""
        if not rows or not rows[0]:
            raise ValidationError("matrix must be non-empty")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValidationError("matrix rows have unequal lengths")
        messages = messages or Alphabet.numbered("m", width)
        cryptograms = cryptograms or Alphabet.numbered("c", len(rows))
        if len(messages) != width or len(cryptograms) != len(rows):
            raise ValidationError(
                f"matrix is {len(rows)}x{width} but alphabets are "
                f"{len(cryptograms)}x{len(messages)}"
            )
        cols = [[as_fraction(rows[i][j]) for i in range(len(rows))] for j in range(width)]
        return cls(messages, cryptograms, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.cryptogram_alphabet), len(self.message_alphabet)

    @property
    def is_square(self) -> bool:
        return len(self.cryptogram_alphabet) == len(self.message_alphabet)

    def entry(self, i: int, j: int) -> Fraction:
        return self.columns[j].weights[i]

    def column(self, message: str) -> ProbVector:
        return self.columns[self.message_alphabet.index(message)]

    def rows(self) -> list[list[Fraction]]:
        nc, nm = self.shape
        return [[self.columns[j].weights[i] for j in range(nm)] for i in range(nc)]

    def row_sums(self) -> list[Fraction]:
        return [sum(r, ZERO) for r in self.rows()]


@dataclass(frozen=True)
class JointDist:
    """A joint distribution over cryptograms x messages; ``probs[i][j]`` = P(c_i, m_j)."""

    cryptogram_alphabet: Alphabet
    message_alphabet: Alphabet
    probs: tuple[tuple[Fraction, ...], ...]

    def __init__(
        self,
        cryptogram_alphabet: Alphabet,
        message_alphabet: Alphabet,
        probs: Iterable[Iterable],
    ) -> None:
        table = tuple(tuple(as_fraction(x) for x in row) for row in probs)
        if len(table) != len(cryptogram_alphabet) or any(
            len(row) != len(message_alphabet) for row in table
        ):
            raise ValidationError("joint table shape does not match its alphabets")
        if any(x < 0 for row in table for x in row):
            raise ValidationError("joint distribution has a negative entry")
        total = sum((x for row in table for x in row), ZERO)
        if total != ONE:
            raise ValidationError(f"joint distribution sums to {total}, expected 1")
        object.__setattr__(self, "cryptogram_alphabet", cryptogram_alphabet)
        object.__setattr__(self, "message_alphabet", message_alphabet)
        object.__setattr__(self, "probs", table)

    def __getitem__(self, key: tuple[str, str]) -> Fraction:
        c, m = key
        return self.probs[self.cryptogram_alphabet.index(c)][self.message_alphabet.index(m)]

    def flat(self) -> list[Fraction]:
        return [x for row in self.probs for x in row]

    def marginal_messages(self) -> ProbVector:
        return ProbVector(
            self.message_alphabet,
            (sum(col, ZERO) for col in zip(*self.probs)),
        )

    def marginal_cryptograms(self) -> ProbVector:
        return ProbVector(self.cryptogram_alphabet, (sum(row, ZERO) for row in self.probs))


def _require_same(a: Alphabet, b: Alphabet, what: str) -> None:
    if a != b:
        raise AlphabetMismatchError(f"{what}: alphabets differ ({a.symbols} vs {b.symbols})")


def _l1_half(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> Fraction:
    return sum((abs(x - y) for x, y in zip(xs, ys)), ZERO) / 2


def variational_distance(p: ProbVector, q: ProbVector) -> Fraction:
    """Half the L1 distance between two distributions on the same alphabet."""
    _require_same(p.alphabet, q.alphabet, "variational distance")
    return _l1_half(p.weights, q.weights)


def variational_distance_via_tests(
    p: ProbVector, q: ProbVector, cap: int = DEFAULT_TEST_CAP
) -> Fraction:
    """Best advantage of a binary test ``f`` at telling ``p`` from ``q``.

    Enumerates all ``2**n`` subsets of the alphabet, so ``n`` must not exceed ``cap``.
    """
    _require_same(p.alphabet, q.alphabet, "variational distance")
    n = len(p.alphabet)
    if n > cap:
        raise EnumerationTooLargeError(
            f"alphabet of size {n} exceeds the test-enumeration cap {cap}"
        )
    diffs = [x - y for x, y in zip(p.weights, q.weights)]
    best = ZERO
    for mask in range(1 << n):
        adv = sum((diffs[i] for i in range(n) if mask >> i & 1), ZERO)
        if abs(adv) > best:
            best = abs(adv)
    return best


def marginal_c(ch: ChannelMatrix, pm: ProbVector) -> ProbVector:
    """Cryptogram distribution induced by the message prior ``pm``."""
    _require_same(ch.message_alphabet, pm.alphabet, "marginal_c")
    nc = len(ch.cryptogram_alphabet)
    out = [ZERO] * nc
    for col, w in zip(ch.columns, pm.weights):
        if w:
            for i, x in enumerate(col.weights):
                out[i] += x * w
    return ProbVector(ch.cryptogram_alphabet, out)


def joint(ch: ChannelMatrix, pm: ProbVector) -> JointDist:
    _require_same(ch.message_alphabet, pm.alphabet, "joint")
    nc = len(ch.cryptogram_alphabet)
    table = [
        [col.weights[i] * w for col, w in zip(ch.columns, pm.weights)] for i in range(nc)
    ]
    return JointDist(ch.cryptogram_alphabet, ch.message_alphabet, table)


def posterior(ch: ChannelMatrix, pm: ProbVector, c: str) -> ProbVector:
    """P(m | c) by Bayes' rule.

    Raises :class:`UndefinedConditioningError` if ``c`` has probability zero.
    """
    _require_same(ch.message_alphabet, pm.alphabet, "posterior")
    i = ch.cryptogram_alphabet.index(c)
    num = [col.weights[i] * w for col, w in zip(ch.columns, pm.weights)]
    pc = sum(num, ZERO)
    if pc == 0:
        raise UndefinedConditioningError(f"cryptogram {c!r} has probability zero")
    return ProbVector(pm.alphabet, (x / pc for x in num))


def product_dist(pc: ProbVector, pm: ProbVector) -> JointDist:
    return JointDist(
        pc.alphabet,
        pm.alphabet,
        [[x * y for y in pm.weights] for x in pc.weights],
    )


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    # stars and bars, in lexicographically decreasing order of the first part
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def simplex_grid(alphabet: Alphabet, resolution: int) -> list[ProbVector]:
    """All distributions with weights in ``{0, 1/k, ..., 1}`` plus the witness families.

    Point masses and uniform distributions on two symbols are always included,
    whatever ``k`` is, because the equivalence proofs for the
    indistinguishability-based notions extremise over exactly those.
    """
    if resolution < 1:
        raise ValidationError("grid resolution must be at least 1")
    n = len(alphabet)
    seen: dict[tuple[Fraction, ...], None] = {}
    for comp in _compositions(resolution, n):
        seen.setdefault(tuple(Fraction(j, resolution) for j in comp), None)
    for i in range(n):
        seen.setdefault(tuple(ONE if j == i else ZERO for j in range(n)), None)
    half = Fraction(1, 2)
    for i, j in itertools.combinations(range(n), 2):
        seen.setdefault(tuple(half if t in (i, j) else ZERO for t in range(n)), None)
    return [ProbVector(alphabet, w) for w in seen]


def grid_size(n: int, resolution: int) -> int:
    """Number of lattice points in ``simplex_grid`` before augmentation."""
    return comb(resolution + n - 1, n - 1)
