"""A small read-only client for the LMFDB Hilbert modular form API."""

from __future__ import annotations

import json
import logging
import re
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from typing import Callable

import sympy

from ..errors import DataGapError, ParseError
from .formats import NEWFORM_SCHEMA, format_rational, newforms_from_json

log = logging.getLogger(__name__)

BASE_URL = "https://www.lmfdb.org/api"
UPSTREAM_SCHEMA = "lmfdb-api/hmf_forms+hmf_fields"

# transport(url) -> (status, body bytes)
Transport = Callable[[str], tuple[int, bytes]]


def urllib_transport(url: str, timeout: float = 30.0) -> tuple[int, bytes]:
    req = urllib.request.Request(url, headers={"User-Agent": "fermatcheck"})
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read() or b""


@dataclass
class LmfdbQuery:
    endpoint: str
    params: dict
    offset: int = 0

    def url(self, base: str = BASE_URL) -> str:
        q = dict(self.params)
        q["_format"] = "json"
        if self.offset:
            q["_offset"] = self.offset
        return f"{base}/{self.endpoint}/?{urllib.parse.urlencode(q)}"


@dataclass
class LmfdbClient:
    transport: Transport = urllib_transport
    min_interval: float = 1.0
    retries: int = 3
    backoff: float = 2.0
    base_url: str = BASE_URL
    clock: Callable[[], float] = time.monotonic
    sleep: Callable[[float], None] = time.sleep
    _last: float | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.min_interval < 1.0:
            raise ValueError("rate limit must be at least one second between requests")

    def _wait(self):
        if self._last is not None:
            gap = self.clock() - self._last
            if gap < self.min_interval:
                self.sleep(self.min_interval - gap)
        self._last = self.clock()

    def get(self, query: LmfdbQuery) -> dict:
        url = query.url(self.base_url)
        delay = self.backoff
        for attempt in range(self.retries + 1):
            self._wait()
            try:
                status, body = self.transport(url)
            except OSError as exc:
                status, body = None, str(exc).encode()
            if status == 200:
                try:
                    return json.loads(body)
                except json.JSONDecodeError:
                    raise ParseError(f"non-JSON response from {url}: {body[:200]!r}") from None
            log.warning("GET %s failed (%s), attempt %d", url, status, attempt + 1)
            if attempt < self.retries:
                self.sleep(delay)
                delay *= 2
        raise DataGapError(f"GET {url} failed after {self.retries + 1} attempts")

    def get_all(self, query: LmfdbQuery) -> list[dict]:
        out = []
        while True:
            page = self.get(query)
            if "data" not in page:
                raise ParseError(f"unexpected payload shape: {json.dumps(page)[:200]}")
            out.extend(page["data"])
            nxt = page.get("next")
            if not nxt or not page["data"]:
                return out
            query = LmfdbQuery(query.endpoint, query.params, query.offset + len(page["data"]))

    def fetch_newforms(self, field_label: str, level_norm: int, store=None):
        fields = self.get_all(LmfdbQuery("hmf_fields", {"label": field_label}))
        if len(fields) != 1:
            raise DataGapError(f"LMFDB has no Hilbert modular form field {field_label}")
        forms = self.get_all(LmfdbQuery("hmf_forms", {"field_label": field_label, "level_norm": level_norm}))
        blob = convert_payload(field_label, level_norm, fields[0], forms)
        if store is not None:
            store.cache_put("lmfdb", field_label, level_norm, blob, UPSTREAM_SCHEMA)
        return newforms_from_json(blob)


_LEADING_INT = re.compile(r"^\s*\[?\s*(\d+)")


def _prime_norm(desc) -> int:
    """Norm of a prime given as "[norm, p, generator]" or as a list."""
    if isinstance(desc, (list, tuple)) and desc and isinstance(desc[0], int):
        return desc[0]
    m = _LEADING_INT.match(str(desc))
    if not m:
        raise ParseError(f"cannot read prime descriptor {desc!r}")
    return int(m.group(1))


def _poly_coeffs(expr: str, var: str) -> list[int]:
    x = sympy.Symbol(var)
    try:
        P = sympy.Poly(sympy.sympify(expr.replace("^", "**"), locals={var: x}), x)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError):
        raise ParseError(f"cannot parse polynomial {expr!r}") from None
    return [int(c) for c in reversed(P.all_coeffs())]


def _element_coords(expr: str, hecke: list[int], var: str = "e") -> list[str]:
    x = sympy.Symbol(var)
    deg = len(hecke) - 1
    try:
        val = sympy.Poly(sympy.sympify(str(expr).replace("^", "**"), locals={var: x}), x, domain="QQ")
    except (sympy.SympifyError, sympy.PolynomialError, TypeError):
        raise ParseError(f"cannot parse eigenvalue {expr!r}") from None
    m = sympy.Poly(list(reversed(hecke)), x, domain="QQ")
    r = val.rem(m) if deg > 0 else val
    c = [sympy.Rational(v) for v in reversed(r.all_coeffs())]
    c += [sympy.Rational(0)] * (max(deg, 1) - len(c))
    return [format_rational(f"{v.p}/{v.q}") for v in c]


def convert_payload(field_label: str, level_norm: int, field_rec: dict, form_recs: list[dict]) -> dict:
    """Map raw hmf_fields / hmf_forms records to the bundled newform schema."""
    try:
        primes = field_rec["primes"]
    except KeyError:
        raise ParseError(f"hmf_fields record lacks 'primes': {json.dumps(field_rec)[:200]}") from None
    keyed = []
    seen: dict[tuple, int] = {}
    for desc in primes:
        n = _prime_norm(desc)
        (p, f), = sympy.factorint(n).items()
        idx = seen.get((p, f), 0)
        seen[(p, f)] = idx + 1
        keyed.append((int(p), int(f), idx))
    forms = []
    for rec in form_recs:
        try:
            label = rec["label"]
            hp = rec["hecke_polynomial"]
            eig = rec["hecke_eigenvalues"]
        except KeyError as exc:
            raise ParseError(f"hmf_forms record lacks {exc}: {json.dumps(rec)[:200]}") from None
        hecke = [0, 1] if hp in ("x", "e") else _poly_coeffs(hp, "x")
        if len(hecke) == 2 and hecke != [0, 1]:
            hecke = [0, 1]
        entries = []
        for (p, f, idx), a in zip(keyed, eig):
            if p == 2:
                continue
            entries.append({"p": p, "f": f, "factor_index": idx, "aq": _element_coords(a, hecke)})
        forms.append({"label": label, "hecke_poly": hecke, "eigenvalues": entries})
    return {
        "field_label": field_label,
        "level_norm": level_norm,
        "schema": NEWFORM_SCHEMA,
        "source": "lmfdb",
        "upstream_schema": UPSTREAM_SCHEMA,
        "count": sum(len(f["hecke_poly"]) - 1 for f in forms),
        "forms": [dict(f, galois_orbit_size=len(f["hecke_poly"]) - 1) for f in forms],
    }
