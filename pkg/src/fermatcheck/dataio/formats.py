"""JSON formats for fields and newform tables.

Rationals are decimal strings "n" or "n/d"; integers that are not field
coordinates (discriminants, class numbers) are plain JSON integers.  All
writers go through dump_json so files round-trip byte for byte.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from ..algebra.poly import Poly
from ..errors import ParseError
from ..numberfield import NumberField
from ..obstruction import HeckeField, NewformRecord

NEWFORM_SCHEMA = "fermatcheck-newforms/1"
_RAT = re.compile(r"^-?\d+(/\d+)?$")


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=1) + "\n"


def parse_rational(s, where: str = "") -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise ParseError(f"{where}: expected a rational string, got {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if not _RAT.match(s):
        raise ParseError(f"{where}: malformed rational {s!r}")
    q = Fraction(s)
    if str(q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}") != s:
        raise ParseError(f"{where}: rational {s!r} is not in lowest terms")
    return q


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _require(blob: dict, key: str, where: str):
    if key not in blob:
        raise ParseError(f"{where}: missing key {key!r}")
    return blob[key]


def _int_list(v, where: str) -> list[int]:
    if not isinstance(v, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in v):
        raise ParseError(f"{where}: expected a list of integers")
    return v


def _rat_matrix(v, where: str) -> list[list[Fraction]]:
    if not isinstance(v, list):
        raise ParseError(f"{where}: expected a list of rows")
    return [[parse_rational(c, f"{where}[{i}][{j}]") for j, c in enumerate(row)] for i, row in enumerate(v)]


def field_from_json(blob: dict, check: bool = True) -> NumberField:
    label = _require(blob, "label", "field")
    where = f"field {label}"
    poly = Poly(_int_list(_require(blob, "min_poly", where), f"{where}.min_poly"))
    basis = _rat_matrix(_require(blob, "integral_basis", where), f"{where}.integral_basis")
    disc = _require(blob, "disc", where)
    h = _require(blob, "h_K", where)
    units = _rat_matrix(_require(blob, "fundamental_units", where), f"{where}.fundamental_units")
    K = NumberField(label, poly, basis, disc, h, units, blob.get("notes", ""), check=check)
    if len(units) != K.d - 1:
        raise ParseError(f"{where}: expected {K.d - 1} fundamental units, got {len(units)}")
    K.rk_units = [
        (u.get("name", f"u{i + 1}"), K.from_power([parse_rational(c, f"{where}.rk_units[{i}]") for c in u["power_basis"]]))
        for i, u in enumerate(blob.get("rk_units", []))
    ]
    K.provenance = blob.get("provenance")
    K.tags = tuple(blob["tags"]) if "tags" in blob else None
    return K


def field_to_json(K: NumberField) -> dict:
    out = {
        "label": K.label,
        "min_poly": [int(c) for c in K.min_poly.coeffs],
        "integral_basis": [[format_rational(c) for c in row] for row in K.basis],
        "disc": K.disc,
        "h_K": K.h,
        "fundamental_units": [[format_rational(c) for c in u.coords] for u in K.fundamental_units],
        "notes": K.notes,
    }
    if getattr(K, "provenance", None) is not None:
        out["provenance"] = K.provenance
    if getattr(K, "tags", None) is not None:
        out["tags"] = list(K.tags)
    if getattr(K, "rk_units", None):
        out["rk_units"] = [
            {"name": name, "power_basis": [format_rational(c) for c in K.to_power(u.coords)]} for name, u in K.rk_units
        ]
    return out


def _eigen_key(entry: dict, where: str) -> tuple:
    p = _require(entry, "p", where)
    f = entry.get("f", 1)
    idx = entry.get("factor_index")
    if not isinstance(p, int) or not isinstance(f, int) or (idx is not None and not isinstance(idx, int)):
        raise ParseError(f"{where}: p, f, factor_index must be integers")
    return (p, f, idx)


def newforms_from_json(blob: dict) -> tuple[list[NewformRecord], dict]:
    """Parse a newform table; returns the records and the header fields."""
    if blob.get("schema") != NEWFORM_SCHEMA:
        raise ParseError(f"unknown newform schema {blob.get('schema')!r}; excerpt {json.dumps(blob)[:200]}")
    field_label = _require(blob, "field_label", "newforms")
    level = _require(blob, "level_norm", f"newforms {field_label}")
    forms = []
    for i, fb in enumerate(_require(blob, "forms", f"newforms {field_label}")):
        where = f"newforms {field_label}.forms[{i}]"
        hp = fb.get("hecke_poly")
        H = HeckeField(Poly(_int_list(hp, f"{where}.hecke_poly"))) if hp is not None else None
        eig = {}
        for j, e in enumerate(fb.get("eigenvalues", [])):
            ew = f"{where}.eigenvalues[{j}]"
            if H is None:
                raise ParseError(f"{ew}: eigenvalue without a Hecke polynomial")
            key = _eigen_key(e, ew)
            eig[key] = H.element([parse_rational(c, f"{ew}.aq") for c in _require(e, "aq", ew)])
        forms.append(
            NewformRecord(
                _require(fb, "label", where), field_label, level, H, eig,
                fb.get("hecke_degree"), fb.get("galois_orbit_size", 1),
            )
        )
    header = {k: v for k, v in blob.items() if k != "forms"}
    total = sum(f.orbit_size for f in forms)
    if "count" in blob and blob["count"] != total:
        raise ParseError(f"newforms {field_label}: count {blob['count']} but orbits add up to {total}")
    return forms, header


def newforms_to_json(forms: list[NewformRecord], header: dict) -> dict:
    out = dict(header)
    out["schema"] = NEWFORM_SCHEMA
    fl = []
    for f in forms:
        d = {"label": f.label, "hecke_poly": None if f.hecke_field is None else [int(c) for c in f.hecke_field.poly.coeffs]}
        if f.hecke_field is None:
            d["hecke_degree"] = f.hecke_degree
        if f.orbit_size != 1 or f.hecke_field is None:
            d["galois_orbit_size"] = f.orbit_size
        d["eigenvalues"] = [
            {"p": k[0], "f": k[1], "factor_index": k[2], "aq": [format_rational(c) for c in v.coords]}
            for k, v in f.eigenvalues.items()
        ]
        fl.append(d)
    keys = ["field_label", "level_norm", "schema", "source", "count"]
    ordered = {k: out[k] for k in keys if k in out}
    ordered.update({k: v for k, v in out.items() if k not in ordered})
    ordered["forms"] = fl
    return ordered
