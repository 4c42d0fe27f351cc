"""Affine semigroups S in Z^d with a finite set of monomial valuations.

An element ``s`` of S stands for the monomial chi^s; its value profile is
``(<s, nu_1>, ..., <s, nu_r>)``.  The Poincare series of the filtration is
computed two ways:

* :func:`pushforward_Q` pushes the multigraded series ``sum_{s in S} u^s``
  forward along ``s -> <s, nu>``, so the coefficient of ``t^v`` is N(v);
* :func:`poincare_by_definition` works from ideal codimensions
  ``dim C[S]/I(w)`` through the alternating sum over subsets of valuations,
  never counting exact value profiles.

They must agree coefficientwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .linalg import elementary_divisors
from .series import Exponent, TruncatedSeries, TruncationBox, as_exponent, grlex_key

MAX_DEFINITION_RANK = 16


class SpecError(ValueError):
    """Malformed or invalid semigroup input."""


class ResourceCapError(RuntimeError):
    """A computation would exceed a configured size budget."""


class Element(NamedTuple):
    exponent: Exponent
    values: Exponent


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...] = ()
    elementary_divisors: tuple[int, ...] = ()

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class SemigroupSpec:
    dimension: int
    generators: tuple[Exponent, ...]
    valuations: tuple[Exponent, ...]

    def __post_init__(self):
        d = int(self.dimension)
        object.__setattr__(self, "dimension", d)
        gens = []
        for g in self.generators:
            g = as_exponent(g)
            if g not in gens:
                gens.append(g)
        object.__setattr__(self, "generators", tuple(gens))
        object.__setattr__(self, "valuations", tuple(as_exponent(v) for v in self.valuations))
        for g in self.generators:
            if len(g) != d:
                raise SpecError(f"generator {g} does not have length {d}")
        for v in self.valuations:
            if len(v) != d:
                raise SpecError(f"valuation {v} does not have length {d}")

    @property
    def rank(self) -> int:
        """Number of valuations r."""
        return len(self.valuations)

    def values(self, s: Sequence[int]) -> Exponent:
        return tuple(sum(a * b for a, b in zip(s, nu)) for nu in self.valuations)

    @cached_property
    def generator_values(self) -> tuple[Exponent, ...]:
        return tuple(self.values(g) for g in self.generators)

    @cached_property
    def report(self) -> ValidationReport:
        return validate(self)

    def require_valid(self) -> None:
        if not self.report.ok:
            raise SpecError("invalid semigroup spec: " + "; ".join(self.report.problems))

    @classmethod
    def from_json(cls, obj: dict) -> "SemigroupSpec":
        try:
            return cls(obj["dimension"], obj["generators"], obj["valuations"])
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed semigroup document: {exc!r}") from exc

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "generators": [list(g) for g in self.generators],
            "valuations": [list(v) for v in self.valuations],
        }

    @classmethod
    def load(cls, path) -> "SemigroupSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def validate(spec: SemigroupSpec) -> ValidationReport:
    problems = []
    if spec.dimension < 1:
        problems.append(f"dimension must be >= 1, got {spec.dimension}")
    if spec.rank < 1:
        problems.append("at least one valuation is required")
    if not spec.generators:
        problems.append("at least one generator is required")
    for gi, g in enumerate(spec.generators):
        if not any(g):
            problems.append(f"generator {gi} is zero")
            continue
        for vi, nu in enumerate(spec.valuations):
            val = sum(a * b for a, b in zip(g, nu))
            if val <= 0:
                problems.append(
                    f"<generator {gi} {list(g)}, valuation {vi} {list(nu)}> = {val} is not positive"
                )
    divs = tuple(elementary_divisors(spec.generators)) if spec.generators else ()
    if spec.generators and (len(divs) != spec.dimension or any(x != 1 for x in divs)):
        problems.append(
            f"generators do not generate Z^{spec.dimension}: elementary divisors {list(divs)}"
        )
    return ValidationReport(not problems, tuple(problems), divs)


def _closure(spec: SemigroupSpec, bounds: Sequence[Optional[int]]) -> dict[Exponent, Exponent]:
    """All s in S with ``<s, nu_i> <= bounds[i]`` wherever a bound is given.

    Generators are folded in one at a time; duplicates are merged on the
    exponent.  Each generator raises every value coordinate by at least one,
    so one finite bound suffices for termination.
    """
    idx = [i for i, b in enumerate(bounds) if b is not None]
    if not idx:
        raise ValueError("at least one value coordinate must be bounded")
    lim = [bounds[i] for i in idx]
    if any(b < 0 for b in lim):
        return {}
    d = spec.dimension
    cur: dict[Exponent, Exponent] = {(0,) * d: (0,) * spec.rank}
    for g, gv in zip(spec.generators, spec.generator_values):
        nxt = dict(cur)
        for e, val in cur.items():
            while True:
                e = tuple(a + b for a, b in zip(e, g))
                val = tuple(a + b for a, b in zip(val, gv))
                if any(val[i] > b for i, b in zip(idx, lim)):
                    break
                if e in nxt:
                    # already reached (non-free S); later multiples come from it
                    break
                nxt[e] = val
        cur = nxt
    return cur


def _elements_with_some_value_at_most(spec: SemigroupSpec, caps: Sequence[int]) -> dict[Exponent, Exponent]:
    """Elements with ``<s, nu_i> <= caps[i]`` for at least one i."""
    out: dict[Exponent, Exponent] = {}
    for i, c in enumerate(caps):
        if c < 0:
            continue
        bounds = [None] * spec.rank
        bounds[i] = c
        out.update(_closure(spec, bounds))
    return out


def enumerate_elements(spec: SemigroupSpec, box) -> list[Element]:
    """Elements of S whose whole value profile lies in ``box``, grlex-sorted by exponent."""
    spec.require_valid()
    box = box if isinstance(box, TruncationBox) else TruncationBox(box)
    if box.rank != spec.rank:
        raise SpecError(f"box rank {box.rank} does not match {spec.rank} valuations")
    found = _closure(spec, box.bounds)
    return [Element(e, found[e]) for e in sorted(found, key=grlex_key)]


def count_N(spec: SemigroupSpec, v: Sequence[int]) -> int:
    """Number of s in S with value profile exactly ``v``."""
    spec.require_valid()
    v = as_exponent(v)
    if len(v) != spec.rank:
        raise SpecError(f"value vector {v} has wrong length")
    if any(x < 0 for x in v):
        return 0
    return sum(1 for val in _closure(spec, v).values() if val == v)


def pushforward_Q(spec: SemigroupSpec, box) -> TruncatedSeries:
    """Image of ``sum_{s in S} u^s`` under ``u^s -> t^{<s, nu>}``, truncated to ``box``."""
    terms: dict[Exponent, int] = {}
    for el in enumerate_elements(spec, box):
        terms[el.values] = terms.get(el.values, 0) + 1
    return TruncatedSeries(box if isinstance(box, TruncationBox) else TruncationBox(box), terms)


def dim_quotient(spec: SemigroupSpec, w: Sequence[int]) -> int:
    """``dim I(w) / I(w + 1)``, counted on monomials.

    A monomial lies in I(w) \\ I(w+1) iff all its values are >= w and at least
    one equals the corresponding w_i.  Negative w_i never match, which is the
    stabilization ``I(w) = I(max(w, 0))`` on that coordinate.
    """
    spec.require_valid()
    w = as_exponent(w)
    cand = _elements_with_some_value_at_most(spec, w)
    return sum(
        1
        for val in cand.values()
        if all(a >= b for a, b in zip(val, w)) and any(a == b for a, b in zip(val, w))
    )


def codim_ideal(spec: SemigroupSpec, u: Sequence[int]) -> int:
    """``dim C[S] / I(u)``: monomials with some value strictly below u_i."""
    spec.require_valid()
    u = as_exponent(u)
    cand = _elements_with_some_value_at_most(spec, [x - 1 for x in u])
    return sum(1 for val in cand.values() if any(a < b for a, b in zip(val, u)))


def _check_definition_rank(spec: SemigroupSpec) -> None:
    if spec.rank > MAX_DEFINITION_RANK:
        raise ResourceCapError(
            f"alternating sum over 2^{spec.rank} subsets exceeds the cap r <= {MAX_DEFINITION_RANK}"
        )


def poincare_coefficient_by_telescoping(spec: SemigroupSpec, v: Sequence[int]) -> int:
    """Coefficient of t^v from ``prod(t_i - 1) L / (t_1...t_r - 1)``, term by term.

    Literal version of the definition using only :func:`dim_quotient`; slow,
    kept for cross-checking :func:`poincare_by_definition` on single entries.
    """
    spec.require_valid()
    _check_definition_rank(spec)
    v = as_exponent(v)
    r = spec.rank
    total = 0
    for k in range(r + 1):
        for A in combinations(range(r), k):
            w = [x - (1 if i in A else 0) for i, x in enumerate(v)]
            acc = 0
            while max(w) >= 0:
                acc += dim_quotient(spec, w)
                w = [x - 1 for x in w]
            total += (-1) ** k * acc
    return (-1) ** (r + 1) * total


def poincare_by_definition(spec: SemigroupSpec, box) -> TruncatedSeries:
    """Poincare series on ``box`` from ideal codimensions.

    Coefficient of t^v is ``(-1)^(r+1) sum_A (-1)^|A| dim C[S]/I(v - 1_A + 1)``.
    All codimensions needed for the box are tabulated at once: with
    ``G[u] = #{s : values(s) >= u}`` restricted to monomials having some value
    ``<= box_i``, the codimension is ``|E| - G[u]``.
    """
    spec.require_valid()
    _check_definition_rank(spec)
    box = box if isinstance(box, TruncationBox) else TruncationBox(box)
    if box.rank != spec.rank:
        raise SpecError(f"box rank {box.rank} does not match {spec.rank} valuations")
    r = spec.rank
    bounds = np.array(box.bounds, dtype=np.int64)
    cand = _elements_with_some_value_at_most(spec, box.bounds)
    shape = tuple(int(b) + 2 for b in bounds)
    hist = np.zeros(shape, dtype=np.int64)
    if cand:
        vals = np.minimum(np.array(list(cand.values()), dtype=np.int64), bounds + 1)
        np.add.at(hist, tuple(vals.T), 1)
    ge = hist
    for ax in range(r):
        ge = np.flip(np.cumsum(np.flip(ge, axis=ax), axis=ax), axis=ax)
    codim = len(cand) - ge  # codim[u] = dim C[S]/I(u) for 0 <= u <= box + 1

    coeffs = np.zeros(tuple(int(b) + 1 for b in bounds), dtype=np.int64)
    for k in range(r + 1):
        for A in combinations(range(r), k):
            sl = tuple(
                slice(0, int(b) + 1) if i in A else slice(1, int(b) + 2)
                for i, b in enumerate(bounds)
            )
            coeffs += (-1) ** k * codim[sl]
    coeffs *= (-1) ** (r + 1)
    terms = {tuple(int(x) for x in idx): int(coeffs[idx]) for idx in zip(*np.nonzero(coeffs))}
    return TruncatedSeries(box, terms)
