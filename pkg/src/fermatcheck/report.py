"""The per-field pipeline behind ``fermat-report``.

The report is a checklist.  MACHINE-VERIFIED items are computed here;
LITERATURE-ASSUMED items are stated with a citation and never checked.
The exceptional set lists the exponents p >= pmin that the verified items
plus the assumed ones do not rule out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sympy import factorint, primerange

from . import literature as lit
from .errors import ConfigurationError
from .numberfield import NumberField, dedekind_factor
from .obstruction import condition_c_scan, survivor_primes
from .units import (
    UnitCertificate,
    narrow_class_number,
    ray_class_number,
    rk_multiple,
    theorem17_check,
)

MACHINE = "MACHINE-VERIFIED"
LITERATURE = "LITERATURE-ASSUMED"


@dataclass
class Item:
    name: str
    kind: str
    status: str
    detail: dict = field(default_factory=dict)
    citation: str | None = None

    def to_json(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "status": self.status, "detail": self.detail}
        if self.citation:
            out["citation"] = self.citation
        return out


def _primes(n: int) -> list[int]:
    return sorted(int(p) for p in factorint(abs(n))) if n else []


def ray_class_elimination(K: NumberField, ell: int) -> dict:
    """Check the pattern ell O = P^2 Q with P of degree 1, Q unramified, and
    [K^(m_inf P) : K] = 2.  Other shapes are left undecided."""
    try:
        primes = dedekind_factor(K, ell)
    except ConfigurationError as exc:
        return {"eliminated": False, "reason": str(exc)}
    ram = [q for q in primes if q.e > 1]
    unram = [q for q in primes if q.e == 1]
    shape = [(q.e, q.f) for q in primes]
    if len(ram) != 1 or len(unram) != 1 or ram[0].e != 2 or ram[0].f != 1:
        return {"eliminated": False, "decomposition": shape, "reason": "decomposition does not fit the ray class argument"}
    rep = ray_class_number(K, ram[0], include_all_infinite=True)
    n = rep.ray_class_number
    return {"eliminated": n == 2, "decomposition": shape, "ray_class_number": n}


def build_report(K: NumberField, pmin: int, newforms=None) -> dict:
    """newforms: (records, header) or None when no table is available."""
    d = K.d
    items: list[Item] = []
    exceptional: dict[int, str] = {}
    ranges: list[dict] = []
    gaps: list[str] = []

    tr = K.two_totally_ramified
    items.append(Item("2 totally ramified", MACHINE, "pass" if tr else "fail",
                      {"frobenius_rank_mod_2": K.two_adic_frobenius_rank}))
    hp = narrow_class_number(K)
    items.append(Item("narrow class number", MACHINE, "pass" if hp == 1 else "fail", {"h_plus": hp}))
    if not tr or hp != 1:
        return _finish(K, pmin, items, exceptional, ranges, gaps, "criteria not met: need 2 totally ramified and h+ = 1")

    if d <= 8:
        v = theorem17_check(K)
        items.append(Item("K equals its ray class field mod 4", MACHINE, "pass" if v.passes else "fail", v.to_json()))

    # semistable range p > 4d
    small = [p for p in primerange(pmin, 4 * d + 1)]
    for p in small:
        exceptional[p] = "p <= 4d: the Frey curve need not be semistable"

    # irreducibility via the tower certificate
    DR = None
    units = getattr(K, "rk_units", None) or []
    if units and d >= 2:
        certs = [UnitCertificate.of(K, u) for _, u in units]
        rk = rk_multiple(certs, d)
        DR = abs(K.disc * rk.R_multiple) if rk.conclusive else None
        items.append(Item("R_K multiple from supplied totally positive units", MACHINE,
                          "pass" if rk.conclusive else "inconclusive",
                          {"A_n": [str(a) for a in rk.A], "R_multiple": str(rk.R_multiple),
                           "primes_of_D_K_R": _primes(DR) if DR else None}))
    else:
        gaps.append("no totally positive units recorded for the tower certificate")
        items.append(Item("R_K multiple from supplied totally positive units", MACHINE, "inconclusive",
                          {"reason": "no units in the fixture"}))

    p0, p0_cite = lit.FIELD_TORSION_P0.get(K.label, lit.TORSION_P0.get(d, (None, None)))
    items.append(Item("torsion prime bound p0", LITERATURE, "assumed", {"p0": p0}, p0_cite))
    items.append(Item("modularity of the Frey curve", LITERATURE, "assumed", {}, lit.MODULARITY))
    items.append(Item("level lowering", LITERATURE, "assumed", {}, lit.LEVEL_LOWERING))

    if DR is not None:
        for ell in _primes(DR):
            if ell < pmin or ell <= 4 * d or ell == 2:
                continue
            res = ray_class_elimination(K, ell)
            items.append(Item(f"ray class step at {ell}", MACHINE, "pass" if res["eliminated"] else "fail", res))
            if not res["eliminated"]:
                exceptional[ell] = "divides D_K R_multiple and the ray class step does not apply"
        items.append(Item("isogeny character argument at primes of D_K", LITERATURE, "assumed", {}, lit.RAY_CLASS_STEP))
    else:
        ranges.append({"from": max(pmin, 4 * d + 1), "to": None, "reason": "irreducibility not certified"})

    if p0 is not None:
        lo = max(pmin, 4 * d + 1)
        extra = [p for p in primerange(lo, p0 + 1) if p not in exceptional]
        if d == 3 and DR is not None:
            three = [(q.e, q.f) for q in dedekind_factor(K, 3)] if K.index % 3 else None
            inert = three == [(1, 3)]
            ok13 = three is not None and not inert and DR % 13 != 0
            items.append(Item("cubic premises at 13", MACHINE, "pass" if ok13 else "fail",
                              {"3_decomposition": three, "13_divides_D_K_R": DR % 13 == 0}))
            if ok13:
                items.append(Item("irreducibility at 13", LITERATURE, "assumed", {}, lit.CUBIC_13))
                extra = [p for p in extra if p != 13]
            ok57 = three is not None and not inert and DR % 5 != 0 and DR % 7 != 0
            items.append(Item("cubic modularity premises", MACHINE, "pass" if ok57 else "fail",
                              {"3_not_inert": three is not None and not inert, "5_7_prime_to_D_K_R": DR % 35 != 0}))
        if len(extra) > 50:
            ranges.append({"from": extra[0], "to": extra[-1], "reason": "p <= p0: rational p-torsion not excluded"})
        else:
            for p in extra:
                exceptional.setdefault(p, "p <= p0: rational p-torsion not excluded")
    else:
        gaps.append(f"no torsion prime bound recorded for degree {d}")

    # condition (C) and B_{f,q}
    if newforms is None:
        gaps.append("no newform table at level L")
        items.append(Item("condition (C)", MACHINE, "data gap", {}))
    else:
        forms, header = newforms
        scan = condition_c_scan(forms)
        items.append(Item("condition (C)", MACHINE, "pass" if scan.satisfied else "inconclusive", scan.to_json()))
        if any(not f.is_rational for f in forms):
            items.append(Item("non-rational forms have a non-integral eigenvalue", LITERATURE, "assumed", {},
                              lit.NONRATIONAL_EIGENVALUE))
        for f in forms:
            keys = [k for k in f.eigenvalues if k[0] != 2]
            if not keys:
                gaps.append(f"{f.label}: no eigenvalues, B_(f,q) not evaluated")
                continue
            sv = survivor_primes(f, keys)
            items.append(Item(f"obstruction for {f.label}", MACHINE, "pass" if not sv.method_fails else "fail", sv.to_json()))
            if sv.method_fails:
                ranges.append({"from": pmin, "to": None, "reason": f"{f.label}: every B_(f,q) vanishes"})
            else:
                for p in sv.survivors:
                    if p >= pmin:
                        exceptional.setdefault(p, f"divides Norm(B_(f,q)) for {f.label}")
    if gaps:
        verdict = "incomplete: " + "; ".join(gaps)
    elif exceptional or ranges:
        verdict = "exceptional exponents remain"
    else:
        verdict = f"no exceptional exponents p >= {pmin} beyond the literature items"
    return _finish(K, pmin, items, exceptional, ranges, gaps, verdict)


def _finish(K, pmin, items, exceptional, ranges, gaps, verdict) -> dict:
    return {
        "field": K.label,
        "degree": K.d,
        "disc": str(K.disc),
        "pmin": pmin,
        "verdict": verdict,
        "exceptional": [{"p": p, "reason": r} for p, r in sorted(exceptional.items())],
        "exceptional_ranges": ranges,
        "data_gaps": gaps,
        "checklist": [i.to_json() for i in items],
    }
