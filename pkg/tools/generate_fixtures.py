"""Regenerate the bundled field and newform fixtures.

Needs cypari (PARI/GP), which is not a runtime dependency of the package.
Field invariants come from PARI (bnfinit with certification where it is
cheap).  Newform eigenvalues cannot be computed here and are transcribed by
hand in NEWFORMS below.

    python tools/generate_fixtures.py [--out src/fermatcheck/data]
"""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from cypari import pari

pari.allocatemem(2 * 10**9)

CUBICS_H1 = [
    148, 404, 564, 756, 1300, 1524, 1620, 2228, 2708, 2804, 3124, 3252,
    3508, 3540, 3604, 3892, 4628, 4692, 4852, 5172, 5204, 5940, 6420, 7028,
    7668, 7700, 7796, 8308, 8372, 8628, 8692, 9044, 9076, 9204, 9300, 9460,
    9812, 10164, 10260, 10292, 10324, 10580, 10868, 11060, 11092, 11476, 12660, 12788,
    12852, 13172, 13684, 13748, 13972, 14420, 14516, 14964, 15252, 15284, 15380, 15444,
    15700, 16084, 16116, 16180, 16532, 17556, 17684, 17716, 17780, 18292, 18644, 18740,
    19252, 19348, 19572, 20276, 20436, 20724, 20788, 20948,
]
CUBICS_LMFDB = [148, 404, 564, 756, 788, 1076, 1300, 1396, 1492, 1524, 1556, 1620, 1940]
QUARTICS_LMFDB = [2048, 2304, 4352, 6224, 7168, 7488, 11344, 12544, 13824, 14336, 14656,
                  15952, 16448, 18432, 18688]

# fields written with the defining polynomial used in the text they come from
NAMED = {
    "3.3.148.1": ("x^3-x^2-3*x+1", "named cubic, alpha^3-alpha^2-3alpha+1"),
    "3.3.404.1": ("x^3-x^2-5*x-1", "named cubic"),
    "3.3.564.1": ("x^3-x^2-5*x+3", "named cubic"),
    "5.5.126032.1": ("x^5-6*x^3+6*x-2", "smallest quintic with 2 totally ramified and h+ = 1"),
    "6.6.2803712.1": ("x^6+2*x^5-11*x^4-16*x^3+15*x^2+14*x-1", "smallest sextic of its kind"),
    "4.4.2048.1": ("x^4-4*x^2+2", "K2, maximal real subfield of Q(zeta_16), alpha = 2cos(pi/8)"),
    "8.8.2147483648.1": ("x^8-8*x^6+20*x^4-16*x^2+2", "K3, maximal real subfield of Q(zeta_32)"),
    "1.1.1.1": ("x-1", "rationals"),
    "2.2.8.1": ("x^2-2", "Q(sqrt 2)"),
    "2.2.12.1": ("x^2-3", "Q(sqrt 3), h+ = 2"),
    "2.2.456.1": ("x^2-114", "Q(sqrt 114), h = 2"),
    "fs3": ("x^3-32*x+2", "cubic where (FS) fails via a = 16 alpha"),
    "fs4": ("x^4-12*x^2-18*x-5", "quartic where (FS) fails"),
}

# totally positive units used by the tower certificates, in the power basis
RK_UNITS = {
    "3.3.148.1": [("alpha^2", "x^2")],
    "3.3.404.1": [("alpha^2", "x^2")],
    "3.3.564.1": [("(alpha+2)^2", "(x+2)^2")],
    "5.5.126032.1": [("(alpha-1)^2", "(x-1)^2"), ("(alpha^2+alpha-1)^2", "(x^2+x-1)^2")],
    "6.6.2803712.1": [
        ("u1", "(4*x^5+19*x^4-28*x^3-170*x^2-16*x+41)^2/58^2"),
        ("u2", "(14*x^5+23*x^4-156*x^3-160*x^2+176*x+13)^2/58^2"),
    ],
    "4.4.2048.1": [("(alpha+1)^2", "(x+1)^2")],
    "8.8.2147483648.1": [
        ("u1", "(-x^6-2*x^5+5*x^4+10*x^3-4*x^2-9*x-1)^2"),
        ("u2", "(x^7+x^6-6*x^5-5*x^4+9*x^3+5*x^2-3*x-1)^2"),
        ("u3", "(-2*x^7-2*x^6+11*x^5+10*x^4-13*x^3-9*x^2+x+1)^2"),
    ],
}


def q(x):
    x = Fraction(str(x))
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def coeffs(f):
    return [int(c) for c in reversed(list(pari.Vec(f)))]


def poly_to_row(p, d):
    p = pari(p)
    return [q(pari.polcoef(p, i)) for i in range(d)]


def field_record(label, f, notes, tags):
    f = pari(f)
    d = int(pari.poldegree(f))
    nf = pari.nfinit(f)
    D = int(pari.nfdisc(f))
    basis = [poly_to_row(b, d) for b in pari(f"nfinit({f}).zk")]
    if d == 1:
        h, fu, hplus, certified = 1, [], 1, True
    else:
        bnf = pari.bnfinit(f, 1)
        h = int(pari(f"bnfinit({f},1).no"))
        fu = [[q(c) for c in pari.nfalgtobasis(nf, u)] for u in pari(f"bnfinit({f},1).fu")]
        hplus = int(pari("bnrinit(%s,[1,%s]).no" % (f"bnfinit({f},1)", [1] * d)))
        certified = d <= 6 and abs(D) < 10**7 and int(pari.bnfcertify(bnf)) == 1
    dec2 = [(int(P[2]), int(P[3])) for P in pari.idealprimedec(nf, 2)]
    rec = {
        "label": label if not label.startswith("fs") else f"{d}.{d}.{D}.1",
        "min_poly": coeffs(f),
        "integral_basis": basis,
        "disc": D,
        "h_K": h,
        "fundamental_units": fu,
        "notes": notes,
        "provenance": {
            "basis": "PARI nfbasis of min_poly",
            "units": "PARI bnfinit" + (" (bnfcertify)" if certified else " (GRH-conditional)"),
            "h_plus_reference": hplus,
            "two_decomposition": dec2,
        },
        "tags": sorted(set(tags)),
    }
    if label in RK_UNITS:
        rk = []
        for name, expr in RK_UNITS[label]:
            e = pari(expr)
            rk.append({"name": name, "power_basis": [q(pari.polcoef(e % f, i)) for i in range(d)]})
        rec["rk_units"] = rk
    return rec


def find_by_disc(D, d, want_two_ramified=True):
    groups = {3: ["C3", "S3"], 4: ["C4", "V4", "D4", "A4", "S4"]}[d]
    hits = []
    for G in groups:
        for f in pari(f'nflist("{G}",{D},0)'):
            nf = pari.nfinit(f)
            dec = [(int(P[2]), int(P[3])) for P in pari.idealprimedec(nf, 2)]
            if not want_two_ramified or dec == [(d, 1)]:
                hits.append(pari.polredabs(f))
    return hits


def all_fields():
    out = {}
    tags = {}
    for D in sorted(set(CUBICS_H1) | set(CUBICS_LMFDB)):
        label = f"3.3.{D}.1"
        t = []
        if D in CUBICS_H1:
            t.append("table-narrow-one")
        if D in CUBICS_LMFDB:
            t.append("lmfdb-cubic")
        if label in NAMED:
            out[label] = (NAMED[label][0], NAMED[label][1])
        else:
            hits = find_by_disc(D, 3)
            if len(hits) != 1:
                raise SystemExit(f"{label}: {len(hits)} candidate fields")
            out[label] = (str(hits[0]), "polredabs polynomial from PARI nflist")
        tags[label] = t
    for D in QUARTICS_LMFDB:
        label = f"4.4.{D}.1"
        if label in NAMED:
            out[label] = NAMED[label]
        else:
            hits = find_by_disc(D, 4)
            if len(hits) != 1:
                raise SystemExit(f"{label}: {len(hits)} candidate fields")
            out[label] = (str(hits[0]), "polredabs polynomial from PARI nflist")
        tags[label] = ["lmfdb-quartic"]
    for label, (f, n) in NAMED.items():
        if label not in out:
            out[label] = (f, n)
            tags[label] = []
    tags["5.5.126032.1"].append("table-narrow-one")
    tags["6.6.2803712.1"].append("table-narrow-one")
    z = pari("polredabs(minpoly(Mod(x+x^47, polcyclo(48))))")
    out["8.8.%d.1" % int(pari.nfdisc(z))] = (str(z), "maximal real subfield of Q(zeta_48)")
    tags["8.8.%d.1" % int(pari.nfdisc(z))] = []
    return out, tags


# Hecke eigenvalues transcribed from the literature; aq entries are coordinates
# over 1, beta, ..., with beta a root of hecke_poly (ascending coefficients).
# factor_index is the position in the sorted factorisation of min_poly mod p,
# left null when several primes share (p, f) and the source does not say which.
NEWFORMS = {
    "3.3.148.1": {"count": 0, "forms": []},
    "3.3.404.1": {
        "count": 1,
        "forms": [
            {"label": "3.3.404.1-2.1-a", "hecke_poly": [0, 1],
             "eigenvalues": [{"p": 7, "f": 1, "factor_index": 0, "aq": ["-2"]}]},
        ],
    },
    "3.3.564.1": {
        "count": 2,
        "forms": [
            {"label": "3.3.564.1-2.1-a", "hecke_poly": [-1, 3, 1], "galois_orbit_size": 2,
             "eigenvalues": [{"p": 3, "f": 1, "factor_index": None, "aq": ["0", "1"]}]},
        ],
    },
    "5.5.126032.1": {
        "count": 2,
        "forms": [
            {"label": "5.5.126032.1-2.1-a", "hecke_poly": [-3, 1, 1], "galois_orbit_size": 2,
             "eigenvalues": [{"p": 3, "f": 1, "factor_index": 0, "aq": ["0", "1"]}]},
        ],
    },
    "6.6.2803712.1": {
        "count": 2,
        "forms": [
            {"label": "6.6.2803712.1-2.1-a", "hecke_poly": [-21, -1, 1], "galois_orbit_size": 2,
             "eigenvalues": [
                 {"p": 17, "f": 1, "factor_index": None, "aq": ["0", "1"]},
                 {"p": 23, "f": 1, "factor_index": None, "aq": ["-2", "1"]},
             ]},
        ],
    },
    "8.8.2147483648.1": {
        "count": 40,
        "forms": [
            {"label": f"8.8.2147483648.1-2.1-{c}", "hecke_poly": None, "hecke_degree": deg,
             "galois_orbit_size": deg, "eigenvalues": []}
            for c, deg in zip("abcde", [4, 4, 4, 4, 24])
        ],
    },
}


for _D in QUARTICS_LMFDB:
    if _D != 16448:
        NEWFORMS[f"4.4.{_D}.1"] = {"count": 0, "forms": []}
NEWFORMS["8.8.1358954496.1"] = {
    "count": 16,
    "forms": [
        {"label": f"8.8.1358954496.1-2.1-{c}", "hecke_poly": None, "hecke_degree": 4,
         "galois_orbit_size": 4, "eigenvalues": []}
        for c in "abcd"
    ],
}


def newform_files(label_of_fs):
    out = {}
    for label, blob in NEWFORMS.items():
        out[label] = {
            "field_label": label,
            "level_norm": 2,
            "schema": "fermatcheck-newforms/1",
            "source": "transcribed",
            "count": blob["count"],
            "forms": blob["forms"],
        }
    return out


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/fermatcheck/data"))
    ap.add_argument("--only", nargs="*")
    args = ap.parse_args(argv)
    root = Path(args.out)
    (root / "fields").mkdir(parents=True, exist_ok=True)
    (root / "newforms").mkdir(parents=True, exist_ok=True)
    if args.only == ["newforms"]:
        for label, blob in newform_files({}).items():
            (root / "newforms" / f"{label}.json").write_text(json.dumps(blob, indent=1) + "\n")
        return
    fields, tags = all_fields()
    labels = {}
    for label, (f, notes) in sorted(fields.items()):
        if args.only and label not in args.only:
            continue
        rec = field_record(label, f, notes, tags.get(label, []))
        labels[label] = rec["label"]
        path = root / "fields" / f"{rec['label']}.json"
        path.write_text(json.dumps(rec, indent=1) + "\n")
        print(rec["label"], rec["disc"], "h =", rec["h_K"], "h+ =", rec["provenance"]["h_plus_reference"], file=sys.stderr)
    for label, blob in newform_files(labels).items():
        (root / "newforms" / f"{label}.json").write_text(json.dumps(blob, indent=1) + "\n")


if __name__ == "__main__":
    main()
