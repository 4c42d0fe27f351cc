"""Supports, Lambda-sets and Euler characteristics of extended-semigroup fibers.

A function g with valuation vector v is only ever represented by its support
(a set of monomials); coefficients never matter for anything computed here.
Valuation indices j run over 1..r, matching E_1..E_r.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .semigroup import Element, SemigroupSpec, _elements_with_some_value_at_most, count_N
from .series import Exponent, as_exponent, grlex_key

DEFAULT_CAP = 20


@dataclass(frozen=True)
class SupportSet:
    target_v: Exponent
    monomials: tuple[Element, ...]

    def __post_init__(self):
        v = as_exponent(self.target_v)
        object.__setattr__(self, "target_v", v)
        mons = tuple(sorted(set(self.monomials), key=lambda el: grlex_key(el.exponent)))
        object.__setattr__(self, "monomials", mons)
        for el in mons:
            if not all(a >= b for a, b in zip(el.values, v)) or not any(
                a == b for a, b in zip(el.values, v)
            ):
                raise ValueError(f"monomial {el.exponent} with values {el.values} cannot occur at v={v}")

    def __len__(self):
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    @property
    def exponents(self) -> tuple[Exponent, ...]:
        return tuple(el.exponent for el in self.monomials)

    def subset(self, exponents: Iterable[Sequence[int]]) -> "SupportSet":
        want = {as_exponent(e) for e in exponents}
        chosen = tuple(el for el in self.monomials if el.exponent in want)
        missing = want - {el.exponent for el in chosen}
        if missing:
            raise ValueError(f"monomials {sorted(missing)} are not in the support set")
        return SupportSet(self.target_v, chosen)


def monomial_support(spec: SemigroupSpec, v: Sequence[int]) -> SupportSet:
    """All monomials that can occur in a reduced g with valuation vector ``v``."""
    spec.require_valid()
    v = as_exponent(v)
    if len(v) != spec.rank:
        raise ValueError(f"value vector {v} does not have length {spec.rank}")
    if any(x < 0 for x in v):
        raise ValueError(f"value vector {v} has negative entries")
    cand = _elements_with_some_value_at_most(spec, v)
    mons = [
        Element(e, val)
        for e, val in cand.items()
        if all(a >= b for a, b in zip(val, v)) and any(a == b for a, b in zip(val, v))
    ]
    return SupportSet(v, tuple(mons))


def support_from_exponents(spec: SemigroupSpec, v: Sequence[int], exponents) -> SupportSet:
    return SupportSet(v, tuple(Element(as_exponent(e), spec.values(e)) for e in exponents))


def nu_of_support(L: Iterable[Element]) -> Exponent:
    vals = [el.values for el in L]
    if not vals:
        raise ValueError("empty support has no valuation vector")
    return tuple(min(col) for col in zip(*vals))


@dataclass(frozen=True)
class ChiResult:
    chi: int
    N: int
    stratified: bool
    strata: int
    support_size: int

    @property
    def agrees(self) -> bool:
        return self.chi == self.N


def _torus_quotient_chi(k: int) -> int:
    """Euler characteristic of (C*)^k."""
    return 1 if k == 0 else 0


def chi_PF(spec: SemigroupSpec, v: Sequence[int], cap: int = DEFAULT_CAP) -> ChiResult:
    """Euler characteristic of the projectivized fiber over ``v`` by stratifying on supports.

    The stratum of supports L has the shape (C*)^|L| / C*, so it contributes
    chi((C*)^(|L|-1)).  Every L in the support set is tried (as a bitmask);
    L is a stratum when each coordinate j is attained by some member.  With
    more than ``cap`` candidate monomials the strata are not enumerated and
    the result falls back to N(v), flagged ``stratified=False``.
    """
    v = as_exponent(v)
    n_true = count_N(spec, v)
    if any(x < 0 for x in v):
        return ChiResult(0, n_true, True, 0, 0)
    M = monomial_support(spec, v)
    m = len(M)
    if m > cap:
        return ChiResult(n_true, n_true, False, 0, m)
    if m == 0:
        return ChiResult(0, n_true, True, 0, 0)
    masks = np.arange(1, 1 << m, dtype=np.int64)
    ok = np.ones(masks.shape, dtype=bool)
    for j in range(spec.rank):
        attain = sum(1 << i for i, el in enumerate(M) if el.values[j] == v[j])
        ok &= (masks & attain) != 0
    sizes = np.bitwise_count(masks[ok])
    chi_by_size = np.array([_torus_quotient_chi(k - 1) for k in range(m + 1)], dtype=np.int64)
    chi = int(chi_by_size[sizes].sum())
    return ChiResult(chi, n_true, True, int(ok.sum()), m)


@dataclass(frozen=True)
class LambdaFamily:
    target_v: Exponent
    sets: Mapping[int, frozenset[Exponent]]

    @property
    def r(self) -> int:
        return len(self.sets)

    def __getitem__(self, j: int) -> frozenset[Exponent]:
        return self.sets[j]

    def to_json(self) -> dict:
        return {str(j): [list(e) for e in sorted(s, key=grlex_key)] for j, s in self.sets.items()}


def lambda_sets(L: SupportSet) -> LambdaFamily:
    """``Lambda_j = {m in L : nu_j(m) = v_j}`` for j = 1..r; requires nu(L) = v."""
    v = L.target_v
    if nu_of_support(L) != v:
        raise ValueError(f"nu(L) = {nu_of_support(L)} differs from v = {v}; L is not a fiber support")
    sets = {
        j + 1: frozenset(el.exponent for el in L if el.values[j] == v[j]) for j in range(len(v))
    }
    return LambdaFamily(v, sets)


def _components(fam: LambdaFamily) -> list[frozenset[int]]:
    parent = {j: j for j in fam.sets}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    owner: dict[Exponent, int] = {}
    for j, s in fam.sets.items():
        for e in s:
            if e in owner:
                parent[find(j)] = find(owner[e])
            else:
                owner[e] = j
    groups: dict[int, set[int]] = {}
    for j in fam.sets:
        groups.setdefault(find(j), set()).add(j)
    return [frozenset(g) for g in groups.values()]


def splitting_subset_exists(fam: LambdaFamily, a: int, b: int) -> tuple[bool, Optional[frozenset[int]]]:
    """Is there D containing a but not b whose Lambda-union is disjoint from the rest?

    Such D exists iff a and b sit in different components of the graph
    joining j, j' whenever Lambda_j and Lambda_j' meet; the witness is a's
    component.
    """
    if a == b or a not in fam.sets or b not in fam.sets:
        raise ValueError(f"need distinct indices in 1..{fam.r}, got {a}, {b}")
    comp = next(c for c in _components(fam) if a in c)
    if b in comp:
        return False, None
    return True, comp


def splits(fam: LambdaFamily, D: Iterable[int]) -> bool:
    """Direct check that the Lambda-unions over D and its complement are disjoint."""
    D = set(D)
    inside = set().union(*(fam.sets[j] for j in D)) if D else set()
    outside = set().union(*(s for j, s in fam.sets.items() if j not in D))
    return not (inside & outside)


def lemma3_predicate(L: SupportSet, a: int, b: int) -> bool:
    """True iff no monomial of L attains both v_a and v_b (so the strict
    transform would contain E_a and E_b's intersection, were it nonempty)."""
    v = L.target_v
    if a == b:
        raise ValueError("a and b must differ")
    return not any(el.values[a - 1] == v[a - 1] and el.values[b - 1] == v[b - 1] for el in L)


def fiber_report(spec: SemigroupSpec, v: Sequence[int], support: Optional[SupportSet] = None, cap: int = DEFAULT_CAP) -> dict:
    """Everything the fibers CLI mode prints, as a JSON-ready dict."""
    v = as_exponent(v)
    chi = chi_PF(spec, v, cap)
    L = support if support is not None else monomial_support(spec, v)
    out = {
        "v": list(v),
        "support": [list(e) for e in L.exponents],
        "chi_PF": chi.chi,
        "N": chi.N,
        "stratified": chi.stratified,
        "support_size": chi.support_size,
    }
    if not len(L) or nu_of_support(L) != v:
        out["lambda"] = None
        out["pairs"] = []
        return out
    fam = lambda_sets(L)
    out["lambda"] = fam.to_json()
    pairs = []
    for a in range(1, spec.rank + 1):
        for b in range(a + 1, spec.rank + 1):
            found, D = splitting_subset_exists(fam, a, b)
            pairs.append(
                {
                    "a": a,
                    "b": b,
                    "lemma3": lemma3_predicate(L, a, b),
                    "splitting": found,
                    "witness_D": sorted(D) if D else None,
                }
            )
    out["pairs"] = pairs
    return out
