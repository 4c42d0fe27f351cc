"""Randomized cross-validation of every module against its brute-force oracle.

Everything is driven by one ``random.Random(seed)``; each generated instance
also gets its own sub-seed so a single failure can be replayed in isolation.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .constellation import (
    Constellation,
    StructuralClaimError,
    chart_context,
    closed_form_N,
    degeneracy_report,
    exponent_map_determinant,
    poincare_factored,
    random_constellation,
    recover_monomial,
    regularity_check,
    solve_cone_membership,
    strict_transform_exponents,
    to_semigroup_spec,
    valuation_matrix,
)
from .semigroup import SemigroupSpec, count_N, poincare_by_definition, pushforward_Q
from .series import TruncationBox, expand_factored


@dataclass
class VerifyConfig:
    seed: int = 42
    constellations: int = 50
    semigroups: int = 20
    max_dimension: int = 5
    max_points: int = 8
    constellation_box: int = 25
    wide_dimension_box: int = 25  # used when d >= 4; lower it for quicker runs
    semigroup_box: int = 12
    round_trips: int = 100


@dataclass
class VerifyReport:
    seed: int
    counts: dict[str, list[int]] = field(default_factory=dict)  # check -> [passed, total]
    failures: list[dict] = field(default_factory=list)
    stats: dict[str, int] = field(default_factory=dict)
    elapsed: float = 0.0

    def record(self, check: str, ok: bool, replay: Optional[dict] = None, detail: str = "") -> None:
        c = self.counts.setdefault(check, [0, 0])
        c[1] += 1
        if ok:
            c[0] += 1
        elif replay is not None:
            self.failures.append(dict(replay, check=check, detail=detail))

    def bump(self, key: str, n: int = 1) -> None:
        self.stats[key] = self.stats.get(key, 0) + n

    @property
    def ok(self) -> bool:
        return all(p == t for p, t in self.counts.values())

    def merge(self, other: "VerifyReport") -> None:
        for k, (p, t) in other.counts.items():
            c = self.counts.setdefault(k, [0, 0])
            c[0] += p
            c[1] += t
        self.failures.extend(other.failures)
        for k, n in other.stats.items():
            self.bump(k, n)

    def to_text(self) -> str:
        lines = [f"# verify seed={self.seed}"]
        for k in sorted(self.counts):
            p, t = self.counts[k]
            lines.append(f"{'PASS' if p == t else 'FAIL'}  {k}: {p}/{t}")
        for k in sorted(self.stats):
            lines.append(f"stat  {k}: {self.stats[k]}")
        lines.append(f"result: {'ok' if self.ok else 'FAILED'} ({len(self.failures)} failures)")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "ok": self.ok,
            "checks": {k: {"passed": p, "total": t} for k, (p, t) in sorted(self.counts.items())},
            "stats": dict(sorted(self.stats.items())),
            "failures": self.failures,
        }


def random_semigroup_spec(rng: random.Random, max_d: int = 3, max_gens: int = 5, max_entry: int = 3, max_r: int = 3) -> SemigroupSpec:
    """A random valid spec; generator entries may be negative when the valuations allow it."""
    while True:
        d = rng.randint(1, max_d)
        ngens = rng.randint(d, max(d, max_gens))
        lo = -1 if rng.random() < 0.3 else 0
        gens = [tuple(rng.randint(lo, max_entry) for _ in range(d)) for _ in range(ngens)]
        r = rng.randint(1, max_r)
        vals = [tuple(rng.randint(1, 3) for _ in range(d)) for _ in range(r)]
        try:
            spec = SemigroupSpec(d, gens, vals)
        except ValueError:
            continue
        if spec.report.ok:
            return spec


def random_constellation_instance(rng: random.Random, cfg: VerifyConfig) -> Constellation:
    d = rng.randint(2, cfg.max_dimension)
    size = rng.randint(1, cfg.max_points)
    weights = None
    if d >= 3 and rng.random() < 0.5:
        # force a degenerate cone by using at most d - 2 distinct weights
        weights = rng.sample(range(1, d + 1), rng.randint(1, d - 2))
    return random_constellation(rng, d, size, weights)


def check_semigroup(spec: SemigroupSpec, box, report: VerifyReport) -> None:
    box = box if isinstance(box, TruncationBox) else TruncationBox(box)
    replay = {"kind": "semigroup", "instance": spec.to_json(), "box": list(box.bounds)}
    q = pushforward_Q(spec, box)
    p = poincare_by_definition(spec, box)
    diff = q.diff(p)
    report.record("pushforward_equals_definition", not diff, replay, f"diff={list(diff.items())[:5]}")
    report.record("series_constant_term_one", q.coefficient((0,) * spec.rank) == 1, replay)
    report.record("series_coefficients_nonnegative", all(c > 0 for c in q.terms.values()), replay)


def check_constellation(c: Constellation, box, instance_seed: int, cfg: VerifyConfig, report: VerifyReport) -> None:
    box = box if isinstance(box, TruncationBox) else TruncationBox(box)
    replay = {
        "kind": "constellation",
        "instance": c.to_json(),
        "box": list(box.bounds),
        "instance_seed": instance_seed,
    }
    rng = random.Random(instance_seed)
    d = c.dimension
    m = valuation_matrix(c)

    dets_ok = all(abs(exponent_map_determinant(em)) == 1 for em in c.exponent_maps)
    report.record("exponent_map_unimodular", dets_ok, replay)
    mono_ok = True
    for j, p in enumerate(c.points):
        if p.parent is None:
            continue
        child, par = m.rows[j], m.rows[p.parent]
        # weakly larger everywhere, strictly larger off the chart coordinate
        mono_ok &= all(a >= b for a, b in zip(child, par)) and all(
            a > b for i, (a, b) in enumerate(zip(child, par)) if i != p.weight - 1
        )
    report.record("valuation_rows_monotone", mono_ok, replay)

    try:
        rep = degeneracy_report(m, c)
    except StructuralClaimError as exc:
        report.record("degeneracy_iff_few_weights", False, replay, str(exc))
        return
    report.record(
        "degeneracy_iff_few_weights",
        rep.degenerate == (len(c.weights_used) <= d - 2),
        replay,
    )
    cert = regularity_check(m)
    report.record("regular_cone", cert.regular, replay, f"divisors={cert.elementary_divisors}")
    if not cert.regular:
        return
    if rep.degenerate:
        report.bump("degenerate_instances")

    fact = poincare_factored(m, rep)
    report.record("factored_multiplicities_sum_to_d", fact.total_multiplicity == d, replay)

    # three routes to N(v) on the whole box
    brute = pushforward_Q(to_semigroup_spec(c), box)
    expanded = expand_factored(fact, box)
    diff = brute.diff(expanded)
    report.record("brute_force_equals_factored_expansion", not diff, replay, f"diff={list(diff.items())[:5]}")

    closed = {}
    cols = rep.distinct_columns
    bounds = box.bounds
    limits = [min(b // x for b, x in zip(bounds, col)) for col in cols]
    for lam in product(*(range(n + 1) for n in limits)):
        v = tuple(sum(l * col[i] for l, col in zip(lam, cols)) for i in range(m.r))
        if v in box:
            closed[v] = closed_form_N(m, rep, v)
    closed_ok = closed == dict(brute.terms)
    report.record("closed_form_N_equals_brute_force", closed_ok, replay)
    # and off the cone: closed form must vanish where brute force does
    off_ok = True
    for _ in range(25):
        v = tuple(rng.randint(0, b) for b in bounds)
        off_ok &= closed_form_N(m, rep, v) == brute.terms.get(v, 0) == count_N(to_semigroup_spec(c), v)
    report.record("closed_form_N_random_points", off_ok, replay)
    if rep.degenerate:
        idx = cols.index(rep.repeated_column)
        big = sum(1 for v in closed if (solve_cone_membership(m, v) or (0,) * len(cols))[idx] >= 2)
        if big:
            report.bump("binomial_lambda_ge_2_instances")
            report.bump("binomial_lambda_ge_2_points", big)

    # strict transform <-> recovery on random charts and monomials
    rt_ok = True
    for _ in range(cfg.round_trips):
        node = rng.randrange(c.size)
        ctx = chart_context(c, node, rng.randint(1, d))
        n = tuple(rng.randint(0, 6) for _ in range(d))
        own = strict_transform_exponents(ctx, m, n)
        f_def = [sum(a * b for a, b in zip(m.rows[ctx.K[i]], n)) for i in ctx.defined]
        rt_ok &= recover_monomial(ctx, m, own, f_def) == n
        h = [x - rng.randint(0, x) for x in f_def]
        st = strict_transform_exponents(ctx, m, n, h)
        rt_ok &= recover_monomial(ctx, m, st, h) == n
        rt_ok &= strict_transform_exponents(ctx, m, recover_monomial(ctx, m, st, h), h) == st
    report.record("strict_transform_round_trip", rt_ok, replay)


def constellation_box(c: Constellation, cfg: VerifyConfig) -> TruncationBox:
    b = cfg.constellation_box if c.dimension <= 3 else cfg.wide_dimension_box
    return TruncationBox((b,) * c.size)


def run_verify(cfg: VerifyConfig) -> VerifyReport:
    start = time.perf_counter()
    rng = random.Random(cfg.seed)
    report = VerifyReport(cfg.seed)
    for _ in range(cfg.constellations):
        c = random_constellation_instance(rng, cfg)
        check_constellation(c, constellation_box(c, cfg), rng.getrandbits(32), cfg, report)
    for _ in range(cfg.semigroups):
        spec = random_semigroup_spec(rng)
        box = tuple(rng.randint(0, cfg.semigroup_box) for _ in range(spec.rank))
        check_semigroup(spec, box, report)
    report.elapsed = time.perf_counter() - start
    return report


def replay(failure: dict, cfg: Optional[VerifyConfig] = None) -> VerifyReport:
    """Re-run the checks for one serialized instance from a failure record."""
    cfg = cfg or VerifyConfig()
    report = VerifyReport(failure.get("instance_seed", cfg.seed))
    if failure["kind"] == "semigroup":
        check_semigroup(SemigroupSpec.from_json(failure["instance"]), failure["box"], report)
    else:
        c = Constellation.from_json(failure["instance"])
        check_constellation(c, failure["box"], failure["instance_seed"], cfg, report)
    return report
