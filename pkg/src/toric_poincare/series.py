"""Exact sparse multivariate power series truncated to a box.

Series live in Z[[t_1, ..., t_r]] and are only ever materialized on a finite
window ``0 <= e <= box``.  Coefficients are Python ints, so there is no
overflow.  Poincare series are reported in the factored form
``prod (1 - t^v)^(-m)`` (:class:`FactoredRationalSeries`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Mapping

Exponent = tuple[int, ...]


class SeriesError(ValueError):
    pass


class BoxMismatch(SeriesError):
    pass


class OutsideBox(SeriesError):
    """Raised when a coefficient is requested outside the truncation window."""


def as_exponent(e: Iterable[int]) -> Exponent:
    return tuple(int(x) for x in e)


def leq(a: Exponent, b: Exponent) -> bool:
    """Componentwise ``a <= b``."""
    return all(x <= y for x, y in zip(a, b))


def grlex_key(e: Exponent):
    return (sum(e), e)


@dataclass(frozen=True)
class TruncationBox:
    bounds: Exponent

    def __post_init__(self):
        object.__setattr__(self, "bounds", as_exponent(self.bounds))
        if any(b < 0 for b in self.bounds):
            raise SeriesError(f"box bounds must be nonnegative, got {self.bounds}")

    @property
    def rank(self) -> int:
        return len(self.bounds)

    def __contains__(self, e) -> bool:
        e = tuple(e)
        return len(e) == self.rank and all(0 <= x <= b for x, b in zip(e, self.bounds))

    def points(self):
        """All lattice points of the box in graded-lex order."""
        from itertools import product

        pts = product(*(range(b + 1) for b in self.bounds))
        return sorted(pts, key=grlex_key)

    @classmethod
    def parse(cls, text: str) -> "TruncationBox":
        return cls(tuple(int(x) for x in text.replace(",", " ").split()))


@dataclass(frozen=True)
class TruncatedSeries:
    box: TruncationBox
    terms: Mapping[Exponent, int] = field(default_factory=dict)

    def __post_init__(self):
        box = self.box if isinstance(self.box, TruncationBox) else TruncationBox(self.box)
        object.__setattr__(self, "box", box)
        clean = {}
        for e, c in self.terms.items():
            e = as_exponent(e)
            if len(e) != box.rank:
                raise SeriesError(f"exponent {e} has wrong length for box {box.bounds}")
            if any(x < 0 for x in e):
                raise SeriesError(f"negative exponent {e}")
            if c and e in box:
                clean[e] = clean.get(e, 0) + int(c)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c})

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, box) -> "TruncatedSeries":
        return cls(box, {})

    @classmethod
    def one(cls, box) -> "TruncatedSeries":
        box = box if isinstance(box, TruncationBox) else TruncationBox(box)
        return cls(box, {(0,) * box.rank: 1})

    @classmethod
    def monomial(cls, box, e, coef: int = 1) -> "TruncatedSeries":
        return cls(box, {as_exponent(e): coef})

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "TruncatedSeries"):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.box != other.box:
            raise BoxMismatch(f"boxes differ: {self.box.bounds} vs {other.box.bounds}")
        return None

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return TruncatedSeries(self.box, out)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(self.box, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if self._check(other) is NotImplemented:
            return NotImplemented
        bounds = self.box.bounds
        out: dict[Exponent, int] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                if leq(e, bounds):
                    out[e] = out.get(e, 0) + ca * cb
        return TruncatedSeries(self.box, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.box == other.box and dict(self.terms) == dict(other.terms)

    def __hash__(self):
        return hash((self.box, frozenset(self.terms.items())))

    # -- queries ------------------------------------------------------------

    def coefficient(self, e) -> int:
        e = as_exponent(e)
        if e not in self.box:
            raise OutsideBox(f"exponent {e} lies outside box {self.box.bounds}")
        return self.terms.get(e, 0)

    def sorted_terms(self) -> list[tuple[Exponent, int]]:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    def diff(self, other: "TruncatedSeries") -> dict[Exponent, tuple[int, int]]:
        """Exponents where the two series disagree, mapped to both coefficients."""
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return {
            e: (self.terms.get(e, 0), other.terms.get(e, 0))
            for e in sorted(keys, key=grlex_key)
            if self.terms.get(e, 0) != other.terms.get(e, 0)
        }

    # -- serialization ------------------------------------------------------

    def to_text(self) -> str:
        lines = ["# box " + " ".join(map(str, self.box.bounds))]
        for e, c in self.sorted_terms():
            lines.append(f"{c}  " + " ".join(map(str, e)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, box=None) -> "TruncatedSeries":
        terms = {}
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                head = line[1:].split()
                if head and head[0] == "box" and box is None:
                    box = TruncationBox(tuple(int(x) for x in head[1:]))
                continue
            coef, *exp = line.split()
            terms[as_exponent(int(x) for x in exp)] = int(coef)
        if box is None:
            raise SeriesError("no box given and no '# box' header found")
        return cls(box, terms)

    def to_json(self) -> dict:
        return {
            "box": list(self.box.bounds),
            "terms": [{"coef": c, "exponent": list(e)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TruncatedSeries":
        return cls(
            TruncationBox(obj["box"]),
            {as_exponent(t["exponent"]): int(t["coef"]) for t in obj["terms"]},
        )


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def coefficient(s: TruncatedSeries, e) -> int:
    return s.coefficient(e)


def monomial_str(e: Exponent, var: str = "t") -> str:
    parts = []
    for i, x in enumerate(e, start=1):
        if x == 1:
            parts.append(f"{var}{i}")
        elif x:
            parts.append(f"{var}{i}^{x}")
    return "".join(parts) or "1"


@dataclass(frozen=True)
class FactoredRationalSeries:
    """``1 / prod_i (1 - t^{v_i})^{m_i}`` with every ``v_i`` strictly positive."""

    factors: tuple[tuple[Exponent, int], ...]

    def __post_init__(self):
        factors = tuple((as_exponent(v), int(m)) for v, m in self.factors)
        seen = set()
        for v, m in factors:
            if m < 1:
                raise SeriesError(f"multiplicity must be positive, got {m} for {v}")
            if any(x < 1 for x in v):
                raise SeriesError(
                    f"factor exponent {v} has a non-positive entry; expansion would not truncate"
                )
            if v in seen:
                raise SeriesError(f"duplicate factor exponent {v}")
            seen.add(v)
        if len({len(v) for v, _ in factors}) > 1:
            raise SeriesError("factor exponents have different lengths")
        object.__setattr__(self, "factors", factors)

    @property
    def rank(self) -> int:
        return len(self.factors[0][0]) if self.factors else 0

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.factors)

    def expand(self, box) -> TruncatedSeries:
        return expand_factored(self, box)

    def denominator(self, box) -> TruncatedSeries:
        """The polynomial ``prod (1 - t^v)^m`` truncated to ``box``."""
        box = box if isinstance(box, TruncationBox) else TruncationBox(box)
        out = TruncatedSeries.one(box)
        for v, m in self.factors:
            poly = {}
            for n in range(m + 1):
                poly[tuple(n * x for x in v)] = (-1) ** n * comb(m, n)
            out = out * TruncatedSeries(box, poly)
        return out

    def to_json(self) -> list:
        return [{"exponent": list(v), "multiplicity": m} for v, m in self.factors]

    @classmethod
    def from_json(cls, obj: list) -> "FactoredRationalSeries":
        return cls(tuple((as_exponent(f["exponent"]), int(f["multiplicity"])) for f in obj))

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        parts = []
        for v, m in self.factors:
            p = f"(1-{monomial_str(v)})"
            parts.append(p if m == 1 else f"{p}^{m}")
        body = "".join(parts)
        if len(parts) > 1:
            body = f"({body})"
        return f"1/{body}"


def expand_factored(f: FactoredRationalSeries, box) -> TruncatedSeries:
    """Power-series expansion of ``f`` on the window ``box``.

    Each factor contributes ``sum_n C(m+n-1, n) t^{n v}``; the product is taken
    factor by factor, dropping anything that leaves the box.
    """
    box = box if isinstance(box, TruncationBox) else TruncationBox(box)
    if f.factors and f.rank != box.rank:
        raise BoxMismatch(f"factor rank {f.rank} does not match box rank {box.rank}")
    bounds = box.bounds
    cur: dict[Exponent, int] = {(0,) * box.rank: 1}
    for v, m in f.factors:
        nxt: dict[Exponent, int] = {}
        for e, c in cur.items():
            n = 0
            w = e
            while leq(w, bounds):
                nxt[w] = nxt.get(w, 0) + c * comb(m + n - 1, n)
                n += 1
                w = tuple(x + y for x, y in zip(w, v))
        cur = nxt
    return TruncatedSeries(box, cur)


def dumps_series(s: TruncatedSeries) -> str:
    return json.dumps(s.to_json(), sort_keys=True)
