"""Command-line entry point: ``secrecy <command> [options]``.

Exit codes: 0 success, 1 a proven invariant failed, 2 invalid or
malformed input, 3 an enumeration cap was exceeded.
"""
from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import formats
from .cryptosystem import Cryptosystem, check_correctness, induced_channel, is_doubly_stochastic
from .errors import (
    EnumerationTooLargeError,
    InvariantViolationError,
    NotApplicableError,
    ValidationError,
)
from .formats import fmt
from .gap_example import DEFAULT_SWEEP_CAP, GapParams, gap_report
from .instances import binary_joint_grid, random_binary_joint, random_birkhoff_mixture
from .notions import (
    DEFAULT_SS_CAP,
    BinaryJoint,
    analyze,
    eps_ind,
    eps_ps_cm,
    eps_ps_cm_sup,
    eps_ps_cs,
    eps_ps_cs_sup,
    eps_ps_sm_sup,
    eps_ss_sup,
    lemma1_check,
)
from .prob_core import (
    ChannelMatrix,
    ProbVector,
    as_fraction,
    simplex_grid,
    variational_distance,
    variational_distance_via_tests,
)
from .synthesis import birkhoff_decompose, max_terms, synthesize

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID, EXIT_CAP = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def _read_input(args) -> ChannelMatrix | Cryptosystem:
    if args.inline is not None:
        text = args.inline
    elif args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"cannot read {args.input}: {exc.strerror}", EXIT_INVALID) from None
    return formats.load_input(text)


def _as_channel(obj: ChannelMatrix | Cryptosystem) -> ChannelMatrix:
    if isinstance(obj, ChannelMatrix):
        return obj
    bad = check_correctness(obj)
    if bad:
        listing = "; ".join(str(v) for v in bad[:5])
        more = f" (+{len(bad) - 5} more)" if len(bad) > 5 else ""
        raise CliError(f"cryptosystem fails decryption: {listing}{more}", EXIT_INVALID)
    return induced_channel(obj)


# ---------------------------------------------------------------- analyze


def cmd_analyze(args) -> str:
    ch = _as_channel(_read_input(args))
    report = analyze(ch, args.grid, args.ss_cap, include_ss=not args.skip_ss)
    msgs, cgs = ch.message_alphabet, ch.cryptogram_alphabet
    if args.format == "json":
        return formats.dumps(formats.report_to_obj(report, msgs, cgs))
    rows = formats.report_rows(report, msgs, cgs)
    if args.format == "csv":
        return formats.to_csv(["notion", "value", "certificate"], rows)
    lines = [f"channel {len(cgs)}x{len(msgs)}, grid k={report.grid_resolution}"]
    lines += [f"{name:<14} {value or 'skipped':>10}  {cert}" for name, value, cert in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- synthesize


def cmd_synthesize(args) -> str:
    obj = _read_input(args)
    ch = _as_channel(obj)
    dec = birkhoff_decompose(ch)
    cipher = synthesize(ch)
    if args.format == "json":
        return formats.dumps({"cryptosystem": formats.cryptosystem_to_obj(cipher)})
    rows = []
    for k, (w, _) in zip(cipher.key_alphabet, dec.terms):
        mapping = " ".join(f"{m}->{cipher.enc[m][k]}" for m in cipher.message_alphabet)
        rows.append((k, fmt(w), mapping))
    if args.format == "csv":
        return formats.to_csv(["key", "weight", "encryption"], rows)
    lines = [f"{len(rows)} keys for a {dec.n}x{dec.n} channel"]
    lines += [f"{k:<6} {w:>10}  {mapping}" for k, w, mapping in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- gap-demo


def _sup_obj(res) -> dict | None:
    if res is None:
        return None
    return {"value": fmt(res.value), "prior": formats.prior_to_obj(res.prior)}


def cmd_gap_demo(args) -> str:
    try:
        params = GapParams(args.n, as_fraction(args.delta))
    except ValidationError as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    rep = gap_report(params, args.grid, args.ss_cap, args.sweep_cap)
    n, delta = params.n, params.delta
    obj = {
        "n": n,
        "delta": fmt(delta),
        "eps_ind": fmt(rep.eps_ind),
        "eps_ps_sm_uniform": fmt(rep.eps_ps_sm_uniform),
        "per_cryptogram": {c: None if v is None else fmt(v) for c, v in rep.per_cryptogram.items()},
        "insecure_probability": fmt(rep.insecure_probability),
        "brackets": {
            "ps_cm": [fmt(rep.eps_ind / 2), fmt(rep.eps_ind)],
            "ss": [fmt(rep.eps_ind / 4), fmt(rep.eps_ind)],
        },
        "grid_resolution": rep.grid_resolution,
        "eps_ps_cs_sup": _sup_obj(rep.eps_ps_cs_sup),
        "eps_ps_cm_sup": _sup_obj(rep.eps_ps_cm_sup),
        "eps_ps_sm_sup": _sup_obj(rep.eps_ps_sm_sup),
        "eps_ss_sup": _sup_obj(rep.eps_ss_sup),
        "skipped": list(rep.skipped),
        "cipher_keys": len(rep.cipher.key_alphabet),
        "cipher_key_dist": [fmt(w) for w in rep.cipher.key_dist.weights],
    }
    if args.with_cipher:
        obj["cipher"] = formats.cryptosystem_to_obj(rep.cipher)
    if args.format == "json":
        return formats.dumps(obj)
    rows = [
        ("eps_ind", obj["eps_ind"]),
        ("eps_ps_sm_uniform", obj["eps_ps_sm_uniform"]),
        ("insecure_probability", obj["insecure_probability"]),
    ]
    for name in ("eps_ps_cs_sup", "eps_ps_cm_sup", "eps_ps_sm_sup", "eps_ss_sup"):
        rows.append((name, obj[name]["value"] if obj[name] else "skipped"))
    rows.append(("cipher_keys", str(obj["cipher_keys"])))
    if args.format == "csv":
        return formats.to_csv(["quantity", "value"], rows)
    head = f"gap cipher n={n} delta={fmt(delta)}"
    return "\n".join([head] + [f"{k:<22} {v}" for k, v in rows]) + "\n"


# ---------------------------------------------------------------- verify-theorems

CHECKS = (
    "distance_forms",
    "synthesis_round_trip",
    "ps_cs_equals_ind",
    "ps_cm_bracket",
    "ss_bracket",
    "zero_collapse",
    "binary_agreement",
)


@dataclass
class Tally:
    passed: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CHECKS, 0))
    skipped: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CHECKS, 0))
    lines: list[str] = field(default_factory=list)


class Counterexample(Exception):
    def __init__(self, check: str, detail: str, instance: dict) -> None:
        super().__init__(f"{check}: {detail}")
        self.check, self.detail, self.instance = check, detail, instance


def _require(cond: bool, check: str, detail: str, instance: dict) -> None:
    if not cond:
        raise Counterexample(check, detail, instance)


def verify_channel(ch: ChannelMatrix, grid_k: int, ss_cap: int, ss_max_size: int, tally: Tally) -> dict:
    """Run every channel-level check on ``ch``; returns the values it computed."""
    inst = {"channel": formats.channel_to_obj(ch)}
    n = ch.shape[0]

    def guarded(check: str, fn: Callable[[], bool | None]) -> None:
        try:
            ran = fn()
        except InvariantViolationError as exc:
            raise Counterexample(check, str(exc), inst) from None
        if ran is False:
            tally.skipped[check] += 1
        else:
            tally.passed[check] += 1

    ind, _ = eps_ind(ch)
    grid = simplex_grid(ch.message_alphabet, grid_k)
    out: dict[str, Fraction | None] = {"eps_ind": ind}

    def distance_forms():
        for a in ch.columns:
            for b in ch.columns:
                _require(
                    variational_distance(a, b) == variational_distance_via_tests(a, b),
                    "distance_forms", "sum form and test form differ", inst,
                )

    def synthesis_round_trip():
        dec = birkhoff_decompose(ch)
        cipher = synthesize(ch)
        _require(not check_correctness(cipher), "synthesis_round_trip", "synthesised cipher is incorrect", inst)
        _require(induced_channel(cipher) == ch, "synthesis_round_trip", "round trip changed the channel", inst)
        _require(len(dec.terms) <= max_terms(n), "synthesis_round_trip", f"{len(dec.terms)} terms", inst)
        _require(is_doubly_stochastic(induced_channel(cipher)), "synthesis_round_trip", "not doubly stochastic", inst)

    def ps_cs_equals_ind():
        res = eps_ps_cs_sup(ch, grid)
        for pm in grid:
            _require(eps_ps_cs(ch, pm)[0] <= ind, "ps_cs_equals_ind", "PS-cs above IND", inst)
        out["eps_ps_cs_sup"] = res.value

    def ps_cm_bracket():
        res = eps_ps_cm_sup(ch, grid)
        msgs = ch.message_alphabet
        for a in range(len(msgs)):
            for b in range(a + 1, len(msgs)):
                pm = ProbVector(msgs, (Fraction(1, 2) if t in (a, b) else 0 for t in range(len(msgs))))
                half = variational_distance(ch.columns[a], ch.columns[b]) / 2
                _require(eps_ps_cm(ch, pm) == half, "ps_cm_bracket", f"two-point prior on {msgs[a]},{msgs[b]}", inst)
        out["eps_ps_cm_sup"] = res.value

    def ss_bracket():
        if n > min(ss_cap, ss_max_size):
            out["eps_ss_sup"] = None
            return False
        res = eps_ss_sup(ch, grid, ss_cap, ss_cap, check_witness=True)
        out["eps_ss_sup"] = res.value

    def zero_collapse():
        sm = eps_ps_sm_sup(ch, grid).value
        out["eps_ps_sm_sup"] = sm
        zeros = {ind == 0, out["eps_ps_cs_sup"] == 0, out["eps_ps_cm_sup"] == 0, sm == 0}
        if out.get("eps_ss_sup") is not None:
            zeros.add(out["eps_ss_sup"] == 0)
        _require(len(zeros) == 1, "zero_collapse", "notions disagree on epsilon = 0", inst)

    for name, fn in (
        ("distance_forms", distance_forms),
        ("synthesis_round_trip", synthesis_round_trip),
        ("ps_cs_equals_ind", ps_cs_equals_ind),
        ("ps_cm_bracket", ps_cm_bracket),
        ("ss_bracket", ss_bracket),
        ("zero_collapse", zero_collapse),
    ):
        guarded(name, fn)
    return out


def run_verify(count: int, min_size: int, max_size: int, seed: int, grid_k: int,
               ss_cap: int, ss_max_size: int, lemma_denominator: int = 12) -> Tally:
    """Deterministic property sweep; raises :class:`Counterexample` on the first failure."""
    rng = random.Random(seed)
    tally = Tally()
    for idx in range(count):
        n = rng.randint(min_size, max_size)
        ch, mixture = random_birkhoff_mixture(rng, n)
        vals = verify_channel(ch, grid_k, ss_cap, ss_max_size, tally)
        parts = " ".join(f"{k}={'-' if v is None else fmt(v)}" for k, v in vals.items())
        tally.lines.append(f"instance {idx} n={n} terms={len(mixture)} {parts}")
    joints = [random_binary_joint(rng) for _ in range(count)] + binary_joint_grid(lemma_denominator)
    for j in joints:
        r = lemma1_check(j)
        _require(
            r.holds and r.lhs == 2 * r.det,
            "binary_agreement",
            f"lhs={fmt(r.lhs)} rhs={fmt(r.rhs)}",
            {"binary_joint": [fmt(j.a), fmt(j.b), fmt(j.c), fmt(j.d)]},
        )
        tally.passed["binary_agreement"] += 1
    return tally


def cmd_verify_theorems(args) -> str:
    if args.min_size < 1 or args.max_size < args.min_size:
        raise CliError("need 1 <= --min-size <= --max-size", EXIT_INVALID)
    header = {
        "seed": args.seed,
        "count": args.count,
        "sizes": [args.min_size, args.max_size],
        "grid_resolution": args.grid,
        "ss_cap": args.ss_cap,
        "ss_max_size": args.ss_max_size,
    }
    try:
        tally = run_verify(args.count, args.min_size, args.max_size, args.seed, args.grid,
                           args.ss_cap, args.ss_max_size)
    except Counterexample as cx:
        payload = {**header, "ok": False, "check": cx.check, "detail": cx.detail, "counterexample": cx.instance}
        raise CliError(formats.dumps(payload), EXIT_VIOLATION) from None
    if args.format == "json":
        return formats.dumps({**header, "ok": True, "passed": tally.passed, "skipped": tally.skipped,
                              "instances": tally.lines})
    if args.format == "csv":
        return formats.to_csv(["check", "passed", "skipped"],
                              [(k, v, tally.skipped[k]) for k, v in tally.passed.items()])
    head = " ".join(f"{k}={v}" for k, v in header.items())
    summary = [
        f"{k}: {v} passed" + (f", {tally.skipped[k]} skipped (size)" if tally.skipped[k] else "")
        for k, v in tally.passed.items()
    ]
    return "\n".join([f"verify-theorems {head}", *tally.lines, *summary, "all checks passed"]) + "\n"


# ---------------------------------------------------------------- lemma-check


def cmd_lemma_check(args) -> str:
    try:
        j = BinaryJoint(*(formats.parse_rational(x, name) for x, name in zip(args.values, "abcd")))
    except ValidationError as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    r = lemma1_check(j)
    obj = {"lhs": fmt(r.lhs), "rhs": fmt(r.rhs), "abs_ad_minus_bc": fmt(r.det), "lhs_equals_2rhs": r.holds}
    if args.format == "json":
        return formats.dumps(obj)
    if args.format == "csv":
        return formats.to_csv(list(obj), [list(obj.values())])
    return "\n".join(f"{k:<16} {v}" for k, v in obj.items()) + "\n"


# ---------------------------------------------------------------- plumbing


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _cap(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("caps must be >= 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="secrecy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=True):
        sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
        if grid:
            sp.add_argument("--grid", type=_positive, default=4, metavar="K",
                            help="prior grid resolution: weights are multiples of 1/K")
            sp.add_argument("--ss-cap", type=_cap, default=DEFAULT_SS_CAP, metavar="N",
                            help="largest alphabet for exhaustive semantic-security search")

    def source(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--input", metavar="PATH", help="JSON file ('-' for stdin)")
        g.add_argument("--inline", metavar="JSON", help="JSON document given directly")

    a = sub.add_parser("analyze", help="minimal epsilon under every notion")
    source(a)
    common(a)
    a.add_argument("--skip-ss", action="store_true", help="omit semantic security")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("synthesize", help="cipher realising a doubly stochastic channel")
    source(s)
    common(s, grid=False)
    s.set_defaults(func=cmd_synthesize)

    g = sub.add_parser("gap-demo", help="the PS-sm separating example")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--delta", required=True, help="rational in (0, 1/n]")
    g.add_argument("--sweep-cap", type=int, default=DEFAULT_SWEEP_CAP,
                   help="largest n for which prior sweeps are run")
    g.add_argument("--with-cipher", action="store_true", help="include the synthesised cipher")
    common(g)
    g.set_defaults(func=cmd_gap_demo)

    v = sub.add_parser("verify-theorems", help="seeded property sweep over random instances")
    v.add_argument("--count", type=int, default=100)
    v.add_argument("--min-size", type=int, default=2)
    v.add_argument("--max-size", type=int, default=6)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--ss-max-size", type=int, default=4,
                   help="largest n on which the semantic-security sweep runs")
    common(v)
    v.set_defaults(func=cmd_verify_theorems, format="text")

    lc = sub.add_parser("lemma-check", help="binary agreement lemma for one joint (a b c d)")
    lc.add_argument("values", nargs=4, metavar="X")
    common(lc, grid=False)
    lc.set_defaults(func=cmd_lemma_check, format="text")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except CliError as exc:
        sys.stderr.write(str(exc).rstrip("\n") + "\n")
        return exc.code
    except EnumerationTooLargeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CAP
    except InvariantViolationError as exc:
        sys.stderr.write(f"invariant violated: {exc}\n")
        return EXIT_VIOLATION
    except (ValidationError, NotApplicableError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
