"""Toric constellations on affine d-space as weighted d-ary trees.

Each point carries an *exponent map*: a d x d integer matrix whose row i
expresses the exponent of local coordinate i (in the chart where the point is
the origin) as a linear form in the original exponents.  Blowing up the
origin of a chart and passing to the chart of weight w replaces row w by the
sum of all rows.  The divisorial valuation of the exceptional component
created at a point is the sum of the rows of its exponent map.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Optional, Sequence

from .linalg import determinant, elementary_divisors, independent_rows, matvec, rank, solve_rational
from .semigroup import SemigroupSpec
from .series import Exponent, FactoredRationalSeries, as_exponent


class ConstellationError(ValueError):
    """Invalid constellation input; ``violations`` lists one message per problem."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class StructuralClaimError(AssertionError):
    """A derived matrix contradicts a proven structural property (internal bug)."""


class ChartError(ValueError):
    pass


class RecoveryError(ValueError):
    """Strict-transform data that no monomial can produce."""


@dataclass(frozen=True)
class Point:
    parent: Optional[int]
    weight: Optional[int]


@dataclass(frozen=True)
class Constellation:
    dimension: int
    points: tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        problems = constellation_violations(self.dimension, self.points)
        if problems:
            raise ConstellationError(problems)

    @property
    def size(self) -> int:
        return len(self.points)

    @cached_property
    def levels(self) -> tuple[int, ...]:
        lv = []
        for p in self.points:
            lv.append(0 if p.parent is None else lv[p.parent] + 1)
        return tuple(lv)

    @cached_property
    def children(self) -> tuple[dict[int, int], ...]:
        """Per point, a map outgoing weight -> child index."""
        ch: list[dict[int, int]] = [{} for _ in self.points]
        for j, p in enumerate(self.points):
            if p.parent is not None:
                ch[p.parent][p.weight] = j
        return tuple(ch)

    def root_chain(self, j: int) -> list[int]:
        """Point indices from Q_0 up to Q_j."""
        chain = [j]
        while self.points[chain[-1]].parent is not None:
            chain.append(self.points[chain[-1]].parent)
        return chain[::-1]

    @cached_property
    def weights_used(self) -> frozenset[int]:
        return frozenset(p.weight for p in self.points if p.weight is not None)

    @cached_property
    def exponent_maps(self) -> tuple[tuple[Exponent, ...], ...]:
        d = self.dimension
        maps: list[tuple[Exponent, ...]] = []
        for p in self.points:
            if p.parent is None:
                maps.append(tuple(tuple(int(i == k) for k in range(d)) for i in range(d)))
            else:
                maps.append(blow_up_map(maps[p.parent], p.weight))
        return tuple(maps)

    @classmethod
    def from_json(cls, obj) -> "Constellation":
        return parse_constellation(obj)

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "points": [{"parent": p.parent, "weight": p.weight} for p in self.points],
        }

    @classmethod
    def load(cls, path) -> "Constellation":
        with open(path) as fh:
            return parse_constellation(json.load(fh))


def blow_up_map(rows: Sequence[Exponent], weight: int) -> tuple[Exponent, ...]:
    """Exponent map of the chart ``weight`` after blowing up the origin."""
    total = tuple(sum(col) for col in zip(*rows))
    return tuple(total if i == weight - 1 else tuple(r) for i, r in enumerate(rows))


def constellation_violations(dimension, points: Sequence[Point]) -> list[str]:
    out = []
    if not isinstance(dimension, int) or dimension < 2:
        out.append(f"dimension must be an integer >= 2, got {dimension!r}")
        return out
    if not points:
        out.append("constellation has no points")
        return out
    seen: dict[tuple[int, int], int] = {}
    for j, p in enumerate(points):
        if j == 0:
            if p.parent is not None or p.weight is not None:
                out.append("point 0: the origin must have parent null and weight null")
            continue
        if p.parent is None:
            out.append(f"point {j}: second root (parent null); only point 0 may be the origin")
            continue
        if not isinstance(p.parent, int) or p.parent < 0 or p.parent >= j:
            out.append(f"point {j}: parent {p.parent!r} is not an earlier point index")
            continue
        if not isinstance(p.weight, int) or not 1 <= p.weight <= dimension:
            out.append(f"point {j}: weight {p.weight!r} outside 1..{dimension}")
            continue
        key = (p.parent, p.weight)
        if key in seen:
            out.append(
                f"point {j}: duplicate sibling weight {p.weight} under parent {p.parent} "
                f"(already used by point {seen[key]})"
            )
        else:
            seen[key] = j
    return out


def parse_constellation(obj) -> Constellation:
    """Build a constellation from its JSON document (a dict or a JSON string)."""
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ConstellationError([f"not valid JSON: {exc}"]) from exc
    if not isinstance(obj, dict) or "dimension" not in obj or "points" not in obj:
        raise ConstellationError(["document must have 'dimension' and 'points'"])
    pts = []
    for j, p in enumerate(obj["points"]):
        if not isinstance(p, dict):
            raise ConstellationError([f"point {j}: expected an object"])
        pts.append(Point(p.get("parent"), p.get("weight")))
    return Constellation(obj["dimension"], tuple(pts))


@dataclass(frozen=True)
class ValuationMatrix:
    rows: tuple[Exponent, ...]

    @property
    def r(self) -> int:
        return len(self.rows)

    @property
    def d(self) -> int:
        return len(self.rows[0])

    @cached_property
    def columns(self) -> tuple[Exponent, ...]:
        return tuple(tuple(col) for col in zip(*self.rows))

    @cached_property
    def distinct_columns(self) -> tuple[Exponent, ...]:
        return tuple(dict.fromkeys(self.columns))

    def to_json(self) -> list:
        return [list(r) for r in self.rows]


def valuation_matrix(c: Constellation) -> ValuationMatrix:
    return ValuationMatrix(tuple(tuple(sum(col) for col in zip(*m)) for m in c.exponent_maps))


@dataclass(frozen=True)
class DegeneracyReport:
    distinct_columns: tuple[Exponent, ...]
    repeated_column: Optional[Exponent]
    k: int
    distinct_weights: int
    degenerate: bool

    @property
    def s(self) -> int:
        return len(self.distinct_columns)

    def multiplicity(self, column: Exponent) -> int:
        return self.k if column == self.repeated_column else 1


def degeneracy_report(m: ValuationMatrix, c: Constellation) -> DegeneracyReport:
    d = m.d
    counts = Counter(m.columns)
    distinct = m.distinct_columns
    s = len(distinct)
    nweights = len(c.weights_used)
    degenerate = s < d
    if degenerate != (nweights <= d - 2):
        raise StructuralClaimError(
            f"{s} distinct columns for d={d} but {nweights} distinct weights"
        )
    if rank(list(map(list, distinct))) != s:
        raise StructuralClaimError(f"distinct columns {distinct} are linearly dependent")
    repeated = [col for col in distinct if counts[col] > 1]
    if not degenerate:
        return DegeneracyReport(distinct, None, 1, nweights, False)
    if len(repeated) != 1:
        raise StructuralClaimError(f"expected exactly one repeated column, found {repeated}")
    k = d - s + 1
    if counts[repeated[0]] != k:
        raise StructuralClaimError(f"repeated column appears {counts[repeated[0]]} times, expected {k}")
    return DegeneracyReport(distinct, repeated[0], k, nweights, True)


@dataclass(frozen=True)
class RegularityCertificate:
    regular: bool
    elementary_divisors: tuple[int, ...]

    def __bool__(self):
        return self.regular


def regularity_check(m: ValuationMatrix) -> RegularityCertificate:
    """The cone spanned by the distinct columns is regular iff its Smith form is all ones."""
    cols = m.distinct_columns
    block = [[col[i] for col in cols] for i in range(m.r)]
    divs = tuple(elementary_divisors(block))
    return RegularityCertificate(len(divs) == len(cols) and all(x == 1 for x in divs), divs)


def solve_cone_membership(m: ValuationMatrix, v: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Coordinates of ``v`` on the distinct columns, or None when ``v`` is outside the cone."""
    v = as_exponent(v)
    if len(v) != m.r:
        raise ValueError(f"value vector {v} does not have length {m.r}")
    cols = m.distinct_columns
    a = [[col[i] for col in cols] for i in range(m.r)]
    sel = independent_rows(a)
    try:
        lam = solve_rational([a[i] for i in sel], [v[i] for i in sel])
    except ValueError:
        raise StructuralClaimError("distinct columns are not independent") from None
    if lam is None or any(x.denominator != 1 or x < 0 for x in lam):
        return None
    lam_int = tuple(int(x) for x in lam)
    if matvec(a, lam_int) != v:
        return None
    return lam_int


def closed_form_N(m: ValuationMatrix, report: DegeneracyReport, v: Sequence[int]) -> int:
    """N(v) from the cone coordinates: 1 inside a non-degenerate cone,
    ``C(k + lam - 1, lam)`` in the degenerate case (lam on the repeated column)."""
    lam = solve_cone_membership(m, v)
    if lam is None:
        return 0
    if not report.degenerate:
        return 1
    x = lam[report.distinct_columns.index(report.repeated_column)]
    return comb(report.k + x - 1, x)


def poincare_factored(m: ValuationMatrix, report: DegeneracyReport) -> FactoredRationalSeries:
    return FactoredRationalSeries(tuple((col, report.multiplicity(col)) for col in report.distinct_columns))


def to_semigroup_spec(c: Constellation) -> SemigroupSpec:
    d = c.dimension
    gens = tuple(tuple(int(i == k) for k in range(d)) for i in range(d))
    return SemigroupSpec(d, gens, valuation_matrix(c).rows)


def monomial_values(m: ValuationMatrix, n: Sequence[int]) -> Exponent:
    n = as_exponent(n)
    if len(n) != m.d:
        raise ValueError(f"exponent {n} does not have length {m.d}")
    if any(x < 0 for x in n):
        raise ValueError(f"negative exponent in {n}")
    return matvec(m.rows, n)


@dataclass(frozen=True)
class ChartContext:
    """The chart ``c_1 - ... - c_t`` on top of a root chain of the constellation.

    ``chain`` is the root chain (point indices), ``outgoing`` the weights
    c_1..c_t leaving each chain point (c_t is the extra top edge), and ``K[i]`` the highest point of the chain whose outgoing
    weight is i + 1, or None.
    """

    chain: tuple[int, ...]
    outgoing: tuple[int, ...]
    K: tuple[Optional[int], ...]
    local_map: tuple[Exponent, ...]

    @property
    def final_weight(self) -> int:
        return self.outgoing[-1]

    @property
    def weights(self) -> tuple[int, ...]:
        return self.outgoing[:-1]

    @property
    def label(self) -> str:
        return "-".join(map(str, self.outgoing))

    @property
    def defined(self) -> tuple[int, ...]:
        """Coordinates (0-based) with a defined K point, in increasing order."""
        return tuple(i for i, k in enumerate(self.K) if k is not None)


def chart_context(c: Constellation, path_node: int, final_weight: int) -> ChartContext:
    if not 0 <= path_node < c.size:
        raise ChartError(f"point {path_node} does not exist")
    if not 1 <= final_weight <= c.dimension:
        raise ChartError(f"final weight {final_weight} outside 1..{c.dimension}")
    chain = c.root_chain(path_node)
    out = [c.points[q].weight for q in chain[1:]] + [final_weight]
    K: list[Optional[int]] = [None] * c.dimension
    for q, w in zip(chain, out):
        K[w - 1] = q  # later (higher-level) points overwrite earlier ones
    local = blow_up_map(c.exponent_maps[path_node], final_weight)
    return ChartContext(tuple(chain), tuple(out), tuple(K), local)


def chart_from_label(c: Constellation, label: str | Sequence[int]) -> ChartContext:
    """Resolve a chart like ``"1-2"`` by following weighted edges from the origin."""
    ws = [int(x) for x in label.split("-")] if isinstance(label, str) else list(label)
    if not ws:
        raise ChartError("empty chart label")
    node = 0
    for w in ws[:-1]:
        nxt = c.children[node].get(w)
        if nxt is None:
            raise ChartError(f"chart {ws}: no edge of weight {w} out of point {node}")
        node = nxt
    return chart_context(c, node, ws[-1])


def chart_functionals(ctx: ChartContext, m: ValuationMatrix) -> tuple[Exponent, ...]:
    """Row i is the valuation row of Q_{K_i}, or the unit vector e_i when undefined."""
    d = m.d
    return tuple(
        m.rows[k] if k is not None else tuple(int(i == j) for j in range(d))
        for i, k in enumerate(ctx.K)
    )


def _h_full(ctx: ChartContext, h: Sequence[int]) -> list[int]:
    h = list(h)
    if len(h) != len(ctx.defined):
        raise ValueError(f"expected {len(ctx.defined)} h-values for chart {ctx.label}, got {len(h)}")
    full = [0] * len(ctx.K)
    for i, x in zip(ctx.defined, h):
        full[i] = int(x)
    return full


def strict_transform_exponents(
    ctx: ChartContext, m: ValuationMatrix, n: Sequence[int], h: Optional[Sequence[int]] = None
) -> Exponent:
    """Exponents of the strict transform of x^n in the chart: ``f_i(n) - h_i``.

    By default h_i is the monomial's own value on Q_{K_i}, which gives the
    strict transform of the monomial itself.  Passing ``h`` (one entry per
    defined K_i, e.g. a fiber's target values) gives the term of a function's
    strict transform instead.
    """
    n = as_exponent(n)
    if any(x < 0 for x in n):
        raise ValueError(f"negative exponent in {n}")
    f = matvec(chart_functionals(ctx, m), n)
    if h is None:
        h = [f[i] for i in ctx.defined]
    out = tuple(a - b for a, b in zip(f, _h_full(ctx, h)))
    if any(x < 0 for x in out):
        raise ValueError(f"h-values {list(h)} exceed the values of x^{list(n)}")
    return out


def recover_monomial(
    ctx: ChartContext, m: ValuationMatrix, strict: Sequence[int], h: Sequence[int]
) -> Exponent:
    """Invert :func:`strict_transform_exponents`: the unique n with f(n) - h = strict."""
    strict = as_exponent(strict)
    rhs = [a + b for a, b in zip(strict, _h_full(ctx, h))]
    f = chart_functionals(ctx, m)
    sol = solve_rational([list(r) for r in f], rhs)
    if sol is None:
        raise RecoveryError(f"inconsistent system for strict={list(strict)}, h={list(h)}")
    if any(x.denominator != 1 for x in sol):
        raise RecoveryError(f"non-integral solution {[str(x) for x in sol]}")
    n = tuple(int(x) for x in sol)
    if any(x < 0 for x in n):
        raise RecoveryError(f"solution {n} has negative exponents")
    return n


def exponent_map_determinant(rows: Sequence[Exponent]) -> int:
    return determinant([list(r) for r in rows])


def random_constellation(
    rng: random.Random, dimension: int, size: int, weights: Optional[Sequence[int]] = None
) -> Constellation:
    """A random constellation with ``size`` points; edges use only ``weights`` if given."""
    allowed = list(weights) if weights is not None else list(range(1, dimension + 1))
    pts = [Point(None, None)]
    free = {0: set(allowed)}
    while len(pts) < size:
        open_nodes = [j for j, ws in free.items() if ws]
        if not open_nodes:
            break
        parent = rng.choice(open_nodes)
        w = rng.choice(sorted(free[parent]))
        free[parent].discard(w)
        free[len(pts)] = set(allowed)
        pts.append(Point(parent, w))
    return Constellation(dimension, tuple(pts))
