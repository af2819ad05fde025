"""Command line front end: one subcommand per check.

Exit codes: 0 computed (whatever the verdict), 2 bad input, 3 data gap,
4 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from .dataio.formats import parse_rational
from .dataio.store import FixtureStore, load_field, load_newforms
from .errors import DataGapError, DomainError, FermatCheckError, ParseError
from .numberfield import NumberField, dedekind_factor
from .obstruction import condition_c_scan, survivor_primes

log = logging.getLogger("fermatcheck")


def _store(args) -> FixtureStore:
    return FixtureStore(cache_root=Path(args.cache_dir) if args.cache_dir else None)


def _field(args) -> NumberField:
    return load_field(args.field, _store(args))


def _prime(s) -> int:
    from sympy import isprime

    try:
        p = int(s)
    except ValueError:
        raise DomainError(f"not an integer: {s!r}") from None
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    return p


def _newforms(args):
    client = None
    if not args.offline:
        from .dataio.lmfdb import LmfdbClient

        client = LmfdbClient()
    return load_newforms(args.field, 2, _store(args), offline=args.offline, client=client)


def _element(K: NumberField, text: str, basis: str):
    coords = [parse_rational(c.strip(), "--elem") for c in text.split(",")]
    if len(coords) > K.d:
        raise DomainError(f"{len(coords)} coordinates for a field of degree {K.d}")
    if basis == "integral":
        return K.element(coords + [Fraction(0)] * (K.d - len(coords)))
    return K.from_power(coords)


# ---------------------------------------------------------------------------
# subcommands; each returns (verdict, result dict, human lines)


def cmd_nf_factor(args):
    K = _field(args)
    p = _prime(args.prime)
    primes = dedekind_factor(K, p)
    res = {"field": K.label, "p": p, "primes": [q.describe() for q in primes]}
    shape = " ".join(f"(e={q.e},f={q.f})" for q in primes)
    return shape, res, [f"{p} O_K = {shape}"]


def cmd_rk(args):
    from .units import UnitCertificate, rk_multiple

    K = _field(args)
    units = getattr(K, "rk_units", None) or []
    if not units:
        raise DataGapError(f"{K.label}: fixture has no totally positive units")
    certs = [UnitCertificate.of(K, u) for _, u in units]
    cert = rk_multiple(certs, K.d, args.depth)
    lines = [f"A_{n + 1} = {a}" for n, a in enumerate(cert.A)] + [f"R_multiple = {cert.R_multiple}"]
    return ("conclusive" if cert.conclusive else "inconclusive"), cert.to_json(), lines


def cmd_condition_c(args):
    forms, header = _newforms(args)
    rep = condition_c_scan(forms)
    res = rep.to_json()
    res["field"] = args.field
    lines = [f"|H| = {rep.count}, rational: {rep.rational_count}", f"condition (C): {rep.verdict}"]
    for f in rep.forms:
        if f.witness:
            lines.append(f"  {f.label}: a_q = {f.witness['a_q']} at Norm(q) = {f.witness['norm']}")
    return rep.verdict, res, lines


def cmd_survivors(args):
    forms, _ = _newforms(args)
    wanted = {_prime(p) for p in args.primes.split(",")} if args.primes else None
    out, lines = [], []
    for f in forms:
        keys = [k for k in f.eigenvalues if wanted is None or k[0] in wanted]
        if not keys:
            out.append({"label": f.label, "verdict": "no eigenvalues at the requested primes"})
            continue
        sv = survivor_primes(f, keys)
        out.append(sv.to_json())
        for r in sv.reports:
            lines.append(f"{f.label} q|{r.prime[0]}: Norm(B) = {r.norm}")
        lines.append(f"{f.label}: survivors {sv.survivors}")
    if not out:
        raise DataGapError(f"{args.field}: no newforms to scan")
    return "computed", {"field": args.field, "forms": out}, lines


def cmd_narrow_class(args):
    from .units import narrow_class_report

    K = _field(args)
    rep = narrow_class_report(K)
    return f"h+ = {rep.h_plus}", rep.to_json(), [f"h_K = {K.h}, h+ = {rep.h_plus}"]


def _modulus(K: NumberField, text: str):
    if text in ("4O_K", "4", "O_K", "1"):
        return text
    p_text, _, idx = text.partition(":")
    p = _prime(p_text)
    primes = dedekind_factor(K, p)
    if not idx:
        if len(primes) != 1:
            raise DomainError(f"several primes above {p}; use {p}:<index> with index in 0..{len(primes) - 1}")
        return primes[0]
    i = int(idx)
    if not 0 <= i < len(primes):
        raise DomainError(f"index {i} out of range for the primes above {p}")
    return primes[i]


def cmd_rayclass(args):
    from .units import ray_class_number

    K = _field(args)
    m = _modulus(K, args.modulus)
    rep = ray_class_number(K, m, include_all_infinite=args.infinite == "all")
    return f"ray class number {rep.ray_class_number}", rep.to_json(), [
        f"modulus {rep.modulus}, infinite places: {args.infinite}",
        f"|(O/m)^* x signs| = {rep.group_order}, unit image = {rep.unit_image_order}",
        f"ray class number = {rep.ray_class_number}",
    ]


def cmd_frey(args):
    from . import frey

    K = _field(args)
    p = _prime(args.p)
    try:
        blob = json.loads(Path(args.triple).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{args.triple}: {exc}") from None
    basis = blob.get("basis", "power")

    def el(key):
        v = blob.get(key)
        if v is None:
            return None
        coords = [parse_rational(c, f"{args.triple}:{key}") for c in v]
        return K.element(coords) if basis == "integral" else K.from_power(coords)

    a, b, c = el("a"), el("b"), el("c")
    if a is None or b is None:
        raise ParseError(f"{args.triple}: need entries 'a' and 'b'")
    res = {"field": K.label, "p": p}
    if c is None:
        inv = frey.frey_from_powers(K, a**p, b**p, p)
    else:
        inv = frey.frey_invariants(K, a, b, c, p)
    res["invariants"] = inv.to_json()
    lines = [f"v_L(c4, c6, Delta) = {inv.valuations()}"]
    verdict = "invariants computed"
    if K.two_totally_ramified and p > 4 * K.d:
        norm = frey.normalize_solution(K, a, b, c, p)
        res["normalization"] = norm.to_json()
        verdict = "multiplicative at L" if norm.multiplicative else "not multiplicative at L"
        lines.append(f"(W): v_L(c4) = {norm.v_c4_W}, v_L(Delta) = {norm.v_disc_W}")
    elif K.two_totally_ramified and K.d == 4 and p == 13:
        chain = frey.lemma14_chain(K, a, b, p, c)
        res["chain"] = chain.to_json()
        verdict = "valuation chain computed"
        lines.append(f"chain {chain.initial} -> {chain.scaled} -> {chain.possibly_reduced}")
    return verdict, res, lines


def cmd_fs_check(args):
    from .frey import fs_witness_check

    K = _field(args)
    a = _element(K, args.elem, args.basis)
    w = fs_witness_check(K, a)
    res = w.to_json()
    res["field"] = K.label
    lines = [f"Norm(a) = {w.norm_a}, Norm(1-a) = {w.norm_b}, v_L(a) = {w.v_a}, 4d = {w.threshold}", w.verdict]
    if w.v_c4_W is not None:
        lines.append(f"(W): v_L(c4) = {w.v_c4_W}, v_L(Delta) = {w.v_disc_W}")
    return w.verdict, res, lines


def cmd_fermat_report(args):
    from .report import build_report

    K = _field(args)
    try:
        nf = _newforms(args)
    except DataGapError:
        nf = None
    rep = build_report(K, args.pmin, nf)
    lines = [f"{K.label}: {rep['verdict']}"]
    for item in rep["checklist"]:
        tag = "[machine]" if item["kind"] == "MACHINE-VERIFIED" else "[assumed]"
        extra = f" ({item['citation']})" if item.get("citation") else ""
        lines.append(f"  {tag} {item['name']}: {item['status']}{extra}")
    if rep["exceptional"]:
        lines.append("  exceptional: " + ", ".join(f"{e['p']} ({e['reason']})" for e in rep["exceptional"]))
    for r in rep["exceptional_ranges"]:
        lines.append(f"  exceptional range from {r['from']} to {r['to'] or 'infinity'}: {r['reason']}")
    return rep["verdict"], rep, lines


COMMANDS = {
    "nf-factor": cmd_nf_factor,
    "rk": cmd_rk,
    "condition-c": cmd_condition_c,
    "survivors": cmd_survivors,
    "narrow-class": cmd_narrow_class,
    "rayclass": cmd_rayclass,
    "frey": cmd_frey,
    "fs-check": cmd_fs_check,
    "fermat-report": cmd_fermat_report,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine readable output")
    common.add_argument("--offline", action="store_true", help="never touch the network")
    common.add_argument("--cache-dir", help="cache root (default: $FERMATCHECK_CACHE)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = _Parser(prog="fermatcheck", description="Exact checks for the Fermat equation over totally real fields.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("nf-factor", parents=[common], help="factor a rational prime in O_K")
    s.add_argument("--field", required=True)
    s.add_argument("--prime", required=True)

    s = sub.add_parser("rk", parents=[common], help="tower certificate for R_K")
    s.add_argument("--field", required=True)
    s.add_argument("--units-from-fixture", action="store_true", default=True)
    s.add_argument("--depth", type=int)

    s = sub.add_parser("condition-c", parents=[common], help="scan newforms for condition (C)")
    s.add_argument("--field", required=True)

    s = sub.add_parser("survivors", parents=[common], help="prime divisors of Norm(B_(f,q))")
    s.add_argument("--field", required=True)
    s.add_argument("--primes", help="comma separated rational primes below the q to use")

    s = sub.add_parser("narrow-class", parents=[common], help="narrow class number from unit signs")
    s.add_argument("--field", required=True)

    s = sub.add_parser("rayclass", parents=[common], help="ray class number for h_K = 1")
    s.add_argument("--field", required=True)
    s.add_argument("--modulus", required=True, help="4O_K, O_K, p or p:index")
    s.add_argument("--infinite", choices=["all", "none"], default="none")

    s = sub.add_parser("frey", parents=[common], help="Frey curve invariants and normalisation")
    s.add_argument("--field", required=True)
    s.add_argument("--triple", required=True, help="JSON file with a, b and optionally c")
    s.add_argument("--p", required=True)

    s = sub.add_parser("fs-check", parents=[common], help="check an (FS) witness")
    s.add_argument("--field", required=True)
    s.add_argument("--elem", required=True, help="comma separated rational coordinates")
    s.add_argument("--basis", choices=["power", "integral"], default="power")

    s = sub.add_parser("fermat-report", parents=[common], help="full checklist for one field")
    s.add_argument("--field", required=True)
    s.add_argument("--pmin", type=int, default=5)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    t0 = time.perf_counter()
    inputs = {k: v for k, v in vars(args).items() if k not in ("json", "verbose", "command")}
    try:
        verdict, result, lines = COMMANDS[args.command](args)
    except FermatCheckError as exc:
        if args.json:
            print(json.dumps({"command": args.command, "inputs": inputs, "error": type(exc).__name__,
                              "message": str(exc), "exit_code": exc.exit_code}, indent=1))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ArithmeticError, AssertionError) as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 4
    wall = time.perf_counter() - t0
    if args.json:
        print(json.dumps({"command": args.command, "inputs": inputs, "verdict": verdict,
                          "certificates": result, "wall_time": round(wall, 3)}, indent=1, default=str))
    else:
        print("\n".join(lines))
    return 0


if __name__ == "__main__":
    sys.exit(main())
