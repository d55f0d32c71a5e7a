"""Reading channels and ciphers from JSON, and writing reports.

Rationals are always written as ``"p/q"`` strings. On input, ``"p/q"``,
integers and finite decimals (``"0.25"`` or a bare JSON number ``0.25``) are
accepted and converted exactly.

Input schemas::

    {"channel": {"messages": [...], "cryptograms": [...],
                 "matrix": [["p/q", ...], ...]}}          # row i = cryptogram i

    {"cryptosystem": {"messages": [...], "cryptograms": [...],
                      "keys": [...], "key_dist": ["p/q", ...],
                      "enc": {m: {k: c}}, "dec": {c: {k: m}}}}

``messages`` and ``cryptograms`` are optional for channels (default
``m1..``, ``c1..``); for ciphers they default to the key order of ``enc`` and
``dec``.
"""
from __future__ import annotations

import csv
import io
import json
from decimal import Decimal
from fractions import Fraction
from typing import Any

from .cryptosystem import Cryptosystem
from .errors import ValidationError
from .notions import NotionReport
from .prob_core import Alphabet, ChannelMatrix, ProbVector


class ParseError(ValidationError):
    """Malformed input; the message names the offending field or line."""


def fmt(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or value is None:
        raise ParseError(f"{where}: expected a rational, got {value!r}")
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "..." in text or "(" in text or "…" in text:
            raise ParseError(
                f"{where}: repeating decimal {value!r} is not exact; write it as 'p/q'"
            )
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"{where}: cannot read {value!r} as 'p/q' or a decimal") from None
    raise ParseError(f"{where}: expected a rational string, got {type(value).__name__}")


def loads(text: str) -> Any:
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _labels(obj: dict, key: str, where: str, default: list[str] | None) -> Alphabet:
    raw = obj.get(key, default)
    if not isinstance(raw, list):
        raise ParseError(f"{where}.{key}: expected a list of labels")
    try:
        return Alphabet(raw)
    except ValidationError as exc:
        raise ParseError(f"{where}.{key}: {exc}") from None


def _decimal_hint(rows) -> str:
    if any(isinstance(x, Decimal) or (isinstance(x, str) and "." in x) for r in rows for x in r):
        return " (decimal inputs must be exact; write repeating values such as 1/3 as 'p/q')"
    return ""


def channel_from_obj(obj: Any, where: str = "channel") -> ChannelMatrix:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    rows = obj.get("matrix")
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{where}.matrix: expected a non-empty list of rows")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ParseError(f"{where}.matrix[{i}]: has {len(r)} entries, expected {width}")
    cryptograms = _labels(obj, "cryptograms", where, [f"c{i + 1}" for i in range(len(rows))])
    messages = _labels(obj, "messages", where, [f"m{j + 1}" for j in range(width)])
    if len(messages) != width or len(cryptograms) != len(rows):
        raise ParseError(
            f"{where}: matrix is {len(rows)}x{width} but there are "
            f"{len(cryptograms)} cryptograms and {len(messages)} messages"
        )
    values = [
        [parse_rational(x, f"{where}.matrix[{i}][{j}]") for j, x in enumerate(r)]
        for i, r in enumerate(rows)
    ]
    try:
        return ChannelMatrix.from_rows(values, messages, cryptograms)
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}{_decimal_hint(rows)}") from None


def cryptosystem_from_obj(obj: Any, where: str = "cryptosystem") -> Cryptosystem:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    enc = obj.get("enc")
    dec = obj.get("dec", {})
    if not isinstance(enc, dict) or not all(isinstance(v, dict) for v in enc.values()):
        raise ParseError(f"{where}.enc: expected an object of objects {{message: {{key: cryptogram}}}}")
    if not isinstance(dec, dict) or not all(isinstance(v, dict) for v in dec.values()):
        raise ParseError(f"{where}.dec: expected an object of objects {{cryptogram: {{key: message}}}}")
    messages = _labels(obj, "messages", where, list(enc))
    raw = obj.get("key_dist")
    default_keys = list(raw) if isinstance(raw, dict) else list(next(iter(enc.values()), {}))
    keys = _labels(obj, "keys", where, default_keys)
    seen_c = list(dict.fromkeys([*dec, *(c for row in enc.values() for c in row.values())]))
    cryptograms = _labels(obj, "cryptograms", where, seen_c)
    if isinstance(raw, dict):
        weights = [parse_rational(raw.get(k, "0"), f"{where}.key_dist.{k}") for k in keys]
    elif isinstance(raw, list):
        if len(raw) != len(keys):
            raise ParseError(f"{where}.key_dist: {len(raw)} weights for {len(keys)} keys")
        weights = [parse_rational(x, f"{where}.key_dist[{i}]") for i, x in enumerate(raw)]
    else:
        raise ParseError(f"{where}.key_dist: expected a list or an object")
    try:
        key_dist = ProbVector(keys, weights)
    except ValidationError as exc:
        raise ValidationError(f"{where}.key_dist: {exc}") from None
    return Cryptosystem(messages, keys, cryptograms, key_dist, enc, dec)


def load_input(text: str) -> ChannelMatrix | Cryptosystem:
    """Parse a document holding either a ``channel`` or a ``cryptosystem``."""
    doc = loads(text)
    if not isinstance(doc, dict):
        raise ParseError("top level: expected an object with a 'channel' or 'cryptosystem' key")
    kinds = [k for k in ("channel", "cryptosystem") if k in doc]
    if len(kinds) != 1:
        raise ParseError("top level: expected exactly one of 'channel' or 'cryptosystem'")
    if kinds[0] == "channel":
        return channel_from_obj(doc["channel"])
    return cryptosystem_from_obj(doc["cryptosystem"])


# ---------------------------------------------------------------- writing


def channel_to_obj(ch: ChannelMatrix) -> dict:
    return {
        "messages": list(ch.message_alphabet),
        "cryptograms": list(ch.cryptogram_alphabet),
        "matrix": [[fmt(x) for x in row] for row in ch.rows()],
    }


def cryptosystem_to_obj(sys: Cryptosystem) -> dict:
    return {
        "messages": list(sys.message_alphabet),
        "cryptograms": list(sys.cryptogram_alphabet),
        "keys": list(sys.key_alphabet),
        "key_dist": [fmt(w) for w in sys.key_dist.weights],
        "enc": {m: {k: sys.enc[m][k] for k in sys.key_alphabet} for m in sys.message_alphabet},
        "dec": {
            c: {k: sys.dec[c][k] for k in sys.key_alphabet if k in sys.dec.get(c, {})}
            for c in sys.cryptogram_alphabet
            if c in sys.dec
        },
    }


def prior_to_obj(pm: ProbVector) -> dict[str, str]:
    return {s: fmt(w) for s, w in pm.items()}


def _ordered(labels, alphabet: Alphabet) -> list[str]:
    return [s for s in alphabet if s in labels]


def _cert_to_obj(name: str, cert: dict, msgs: Alphabet, cgs: Alphabet) -> dict:
    out: dict[str, Any] = {}
    for k, v in cert.items():
        if isinstance(v, ProbVector):
            out[k] = prior_to_obj(v)
        elif isinstance(v, Fraction):
            out[k] = fmt(v)
        elif k == "f":
            out[k] = _ordered(v, cgs)
        elif k == "h":
            out[k] = _ordered(v, msgs)
        elif isinstance(v, tuple):
            out[k] = list(v)
        else:
            out[k] = v
    return out


NOTIONS = ("eps_ind", "eps_ps_cs_sup", "eps_ps_cm_sup", "eps_ps_sm_sup", "eps_ss_sup")
_CERT_KEY = dict(zip(NOTIONS, ("ind", "ps_cs", "ps_cm", "ps_sm", "ss")))


def report_to_obj(report: NotionReport, msgs: Alphabet, cgs: Alphabet) -> dict:
    notions = {}
    for name in NOTIONS:
        value = getattr(report, name)
        cert = report.certificates.get(_CERT_KEY[name])
        notions[name] = {
            "value": None if value is None else fmt(value),
            "certificate": None if cert is None else _cert_to_obj(name, cert, msgs, cgs),
        }
    return {
        "messages": list(msgs),
        "cryptograms": list(cgs),
        "grid_resolution": report.grid_resolution,
        "caps": report.caps,
        "notions": notions,
    }


def report_from_obj(obj: dict) -> NotionReport:
    """Inverse of :func:`report_to_obj`."""
    msgs = Alphabet(obj["messages"])
    certs = {}
    values = {}
    for name in NOTIONS:
        entry = obj["notions"][name]
        values[name] = None if entry["value"] is None else Fraction(entry["value"])
        raw = entry["certificate"]
        if raw is None:
            continue
        cert: dict[str, Any] = {}
        for k, v in raw.items():
            if k == "prior":
                cert[k] = ProbVector.from_mapping(msgs, v)
            elif k == "pair":
                cert[k] = tuple(v)
            elif k in ("f", "h"):
                cert[k] = frozenset(v)
            elif k == "q":
                cert[k] = Fraction(v)
            else:
                cert[k] = v
        certs[_CERT_KEY[name]] = cert
    return NotionReport(
        certificates=certs,
        grid_resolution=obj["grid_resolution"],
        caps=obj["caps"],
        **values,
    )


def report_rows(report: NotionReport, msgs: Alphabet, cgs: Alphabet) -> list[tuple[str, str, str]]:
    obj = report_to_obj(report, msgs, cgs)["notions"]
    return [
        (
            name,
            "" if obj[name]["value"] is None else obj[name]["value"],
            "" if obj[name]["certificate"] is None else json.dumps(obj[name]["certificate"], separators=(",", ":")),
        )
        for name in NOTIONS
    ]


def to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"
