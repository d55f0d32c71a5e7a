"""Deterministic symmetric-key ciphers with an independent key, and their channels."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import NotApplicableError, NotDoublyStochasticError, ValidationError
from .prob_core import ONE, ZERO, Alphabet, ChannelMatrix, ProbVector


@dataclass(frozen=True)
class Violation:
    message: str
    key: str
    cryptogram: str | None
    decrypted: str | None

    def __str__(self) -> str:
        return (
            f"dec(enc({self.message!r}, {self.key!r}), {self.key!r}) = "
            f"{self.decrypted!r} via cryptogram {self.cryptogram!r}"
        )


@dataclass(frozen=True)
class Cryptosystem:
    """A cipher ``(P_K, Enc, Dec)`` stored as explicit lookup tables.

    ``enc[m][k]`` is the cryptogram for message ``m`` under key ``k`` and
    ``dec[c][k]`` the message recovered from ``c``. When there are more
    cryptograms than messages, ``dec`` only needs entries for cryptograms that
    ``enc`` can actually produce under that key.

    Construction checks table shapes and the key distribution but not
    correctness; see :func:`check_correctness`.
    """

    message_alphabet: Alphabet
    key_alphabet: Alphabet
    cryptogram_alphabet: Alphabet
    key_dist: ProbVector
    enc: Mapping[str, Mapping[str, str]]
    dec: Mapping[str, Mapping[str, str]]

    def __post_init__(self) -> None:
        if self.key_dist.alphabet != self.key_alphabet:
            raise ValidationError("key distribution is not over the key alphabet")
        for m in self.message_alphabet:
            row = self.enc.get(m)
            if row is None:
                raise ValidationError(f"enc has no entry for message {m!r}")
            for k in self.key_alphabet:
                c = row.get(k)
                if c is None:
                    raise ValidationError(f"enc[{m!r}] has no entry for key {k!r}")
                if c not in self.cryptogram_alphabet:
                    raise ValidationError(f"enc[{m!r}][{k!r}] = {c!r} is not a cryptogram")
        for c, row in self.dec.items():
            if c not in self.cryptogram_alphabet:
                raise ValidationError(f"dec has unknown cryptogram {c!r}")
            for k, m in row.items():
                if k not in self.key_alphabet:
                    raise ValidationError(f"dec[{c!r}] has unknown key {k!r}")
                if m not in self.message_alphabet:
                    raise ValidationError(f"dec[{c!r}][{k!r}] = {m!r} is not a message")
        if len(self.message_alphabet) > len(self.cryptogram_alphabet):
            raise ValidationError("fewer cryptograms than messages: no key can be injective")

    def encrypt(self, m: str, k: str) -> str:
        return self.enc[m][k]

    def decrypt(self, c: str, k: str) -> str | None:
        return self.dec.get(c, {}).get(k)


def check_correctness(sys: Cryptosystem) -> list[Violation]:
    """Every ``(m, k)`` for which decryption fails to invert encryption."""
    out = []
    for m in sys.message_alphabet:
        for k in sys.key_alphabet:
            c = sys.encrypt(m, k)
            got = sys.decrypt(c, k)
            if got != m:
                out.append(Violation(m, k, c, got))
    return out


def induced_channel(sys: Cryptosystem) -> ChannelMatrix:
    """P(c|m) = total key probability of keys sending ``m`` to ``c``."""
    bad = check_correctness(sys)
    if bad:
        raise ValidationError(f"cryptosystem is not correct: {bad[0]}")
    nc = len(sys.cryptogram_alphabet)
    cols = []
    for m in sys.message_alphabet:
        col = [ZERO] * nc
        for k, pk in sys.key_dist.items():
            col[sys.cryptogram_alphabet.index(sys.encrypt(m, k))] += pk
        cols.append(col)
    return ChannelMatrix(sys.message_alphabet, sys.cryptogram_alphabet, cols)


def is_doubly_stochastic(ch: ChannelMatrix) -> bool:
    if not ch.is_square:
        raise NotApplicableError(
            f"doubly stochastic is only defined for square channels, got {ch.shape}"
        )
    return all(s == ONE for s in ch.row_sums())


def require_doubly_stochastic(ch: ChannelMatrix) -> None:
    """Raise :class:`NotDoublyStochasticError` naming the first bad row."""
    if not ch.is_square:
        raise NotApplicableError(
            f"doubly stochastic is only defined for square channels, got {ch.shape}"
        )
    for c, s in zip(ch.cryptogram_alphabet, ch.row_sums()):
        if s != ONE:
            raise NotDoublyStochasticError(c, s)


def permutation_cipher(
    perms: Mapping[str, Mapping[str, str]],
    key_weights: Mapping[str, Fraction],
    messages: Alphabet,
    cryptograms: Alphabet,
) -> Cryptosystem:
    """Cipher whose key ``k`` encrypts by the injection ``perms[k]`` (message -> cryptogram)."""
    keys = Alphabet(perms)
    enc = {m: {k: perms[k][m] for k in keys} for m in messages}
    dec: dict[str, dict[str, str]] = {}
    for k in keys:
        for m, c in perms[k].items():
            dec.setdefault(c, {})[k] = m
    return Cryptosystem(
        messages,
        keys,
        cryptograms,
        ProbVector(keys, (key_weights[k] for k in keys)),
        enc,
        dec,
    )
