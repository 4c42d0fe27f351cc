import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from toric_poincare.constellation import to_semigroup_spec
from toric_poincare.semigroup import (
    ResourceCapError,
    SemigroupSpec,
    SpecError,
    codim_ideal,
    count_N,
    dim_quotient,
    enumerate_elements,
    poincare_by_definition,
    poincare_coefficient_by_telescoping,
    pushforward_Q,
    validate,
)
from toric_poincare.series import TruncationBox
from toric_poincare.verify import random_semigroup_spec

from conftest import brute_N, brute_values, unit_vectors

FREE2 = SemigroupSpec(2, [(1, 0), (0, 1)], [(1, 1)])
NUM23 = SemigroupSpec(1, [(2,), (3,)], [(1,)])


def test_validate_examples():
    assert validate(FREE2).ok
    rep = validate(NUM23)
    assert rep.ok and rep.elementary_divisors == (1,)
    bad = validate(SemigroupSpec(2, [(1, 0), (0, 1)], [(1, 0)]))
    assert not bad.ok
    assert any("= 0 is not positive" in p for p in bad.problems)


def test_validate_rejects_sublattice():
    rep = validate(SemigroupSpec(1, [(2,), (4,)], [(1,)]))
    assert not rep.ok and "elementary divisors [2]" in rep.problems[0]


def test_duplicate_generators_are_merged():
    assert SemigroupSpec(1, [(2,), (3,), (2,)], [(1,)]).generators == ((2,), (3,))


def test_invalid_spec_raises_on_use():
    with pytest.raises(SpecError):
        count_N(SemigroupSpec(2, [(1, 0), (0, 1)], [(1, 0)]), (1,))


def test_enumerate_numerical_semigroup():
    assert [e.exponent for e in enumerate_elements(NUM23, (5,))] == [(0,), (2,), (3,), (4,), (5,)]


def test_enumerate_free_plane():
    got = {e.exponent for e in enumerate_elements(FREE2, (2,))}
    assert got == {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)}


def test_enumerate_respects_each_value_bound():
    spec = SemigroupSpec(2, [(1, 0), (1, 1), (1, 2)], [(1, 0), (1, 1)])
    got = {e.exponent: e.values for e in enumerate_elements(spec, (2, 2))}
    expect = {s: v for s, v in brute_values(spec.generators, spec.valuations, 2).items() if v[0] <= 2 and v[1] <= 2}
    assert got == expect
    assert (1, 2) not in got  # second value 3


def test_count_N_examples(five_point):
    assert count_N(FREE2, (0,)) == 1
    assert count_N(FREE2, (3,)) == 4
    assert count_N(FREE2, (-1,)) == 0
    spec = to_semigroup_spec(five_point)
    assert count_N(spec, (1, 2, 2, 3, 4)) == brute_N(spec.generators, spec.valuations, (1, 2, 2, 3, 4)) == 2


def test_pushforward_examples(five_point):
    assert pushforward_Q(FREE2, (3,)).terms == {(0,): 1, (1,): 2, (2,): 3, (3,): 4}
    assert pushforward_Q(NUM23, (5,)).terms == {(0,): 1, (2,): 1, (3,): 1, (4,): 1, (5,): 1}
    q = pushforward_Q(to_semigroup_spec(five_point), (2, 4, 4, 6, 8))
    assert q.coefficient((1, 2, 2, 3, 4)) == 2


def test_dim_quotient_examples():
    assert dim_quotient(FREE2, (3,)) == 4
    assert dim_quotient(FREE2, (-1,)) == 0
    assert dim_quotient(NUM23, (4,)) == 1
    assert dim_quotient(NUM23, (1,)) == 0


def test_codim_ideal():
    # C[S]/I(4) for <2,3> is spanned by 1, t^2, t^3
    assert codim_ideal(NUM23, (4,)) == 3
    assert codim_ideal(FREE2, (0,)) == 0


def test_by_definition_examples(five_point):
    assert poincare_by_definition(FREE2, (3,)) == pushforward_Q(FREE2, (3,))
    assert poincare_by_definition(NUM23, (5,)).terms == {(0,): 1, (2,): 1, (3,): 1, (4,): 1, (5,): 1}
    spec = to_semigroup_spec(five_point)
    box = TruncationBox((2, 4, 4, 6, 8))
    assert poincare_by_definition(spec, box) == pushforward_Q(spec, box)


def test_telescoping_matches_vectorized(five_point):
    spec = to_semigroup_spec(five_point)
    box = (1, 2, 2, 3, 4)
    p = poincare_by_definition(spec, box)
    for v in TruncationBox(box).points():
        assert poincare_coefficient_by_telescoping(spec, v) == p.coefficient(v)


def test_rank_cap():
    spec = SemigroupSpec(1, [(1,)], [(1,)] * 17)
    with pytest.raises(ResourceCapError):
        poincare_by_definition(spec, (0,) * 17)


def test_rank_one_definition_is_L_series():
    spec = SemigroupSpec(2, [(1, 0), (1, 1), (0, 1)], [(2, 1)])
    p = poincare_by_definition(spec, (9,))
    for n in range(10):
        assert p.coefficient((n,)) == dim_quotient(spec, (n,))


# -- random specs --------------------------------------------------------------


@st.composite
def specs(draw, max_d=3, max_gens=5, max_r=3):
    d = draw(st.integers(1, max_d))
    vals = draw(st.lists(st.tuples(*[st.integers(1, 3)] * d), min_size=1, max_size=max_r))
    extras = draw(st.lists(st.tuples(*[st.integers(-1, 3)] * d), max_size=max_gens - d))
    extras = [g for g in extras if all(sum(a * b for a, b in zip(g, nu)) > 0 for nu in vals)]
    kind = draw(st.sampled_from(["unit", "skew", "general"]))
    if kind == "general":
        # arbitrary generators, including non-saturated ones such as <2, 3>
        return random_semigroup_spec(random.Random(draw(st.integers(0, 2**32))), max_d, max_gens, 3, max_r)
    if kind == "unit":
        base = unit_vectors(d)
    else:
        # a unimodular basis other than the standard one: e_1, e_1 + e_2, ..., e_1 + e_d
        base = [tuple(int(j == 0 or j == i) for j in range(d)) for i in range(d)]
    spec = SemigroupSpec(d, base + extras, vals)
    assume(spec.report.ok)
    return spec


@settings(max_examples=40, deadline=None)
@given(specs(), st.data())
def test_pushforward_matches_definition(spec, data):
    box = tuple(data.draw(st.integers(0, 12)) for _ in range(spec.rank))
    q = pushforward_Q(spec, box)
    assert q.diff(poincare_by_definition(spec, box)) == {}
    assert q.coefficient((0,) * spec.rank) == 1
    assert all(c > 0 for c in q.terms.values())


@settings(max_examples=30, deadline=None)
@given(specs(max_d=2, max_gens=3, max_r=2), st.data())
def test_count_N_matches_brute_force(spec, data):
    v = tuple(data.draw(st.integers(-1, 6)) for _ in range(spec.rank))
    expect = 0 if min(v) < 0 else brute_N(spec.generators, spec.valuations, v)
    assert count_N(spec, v) == expect


@settings(max_examples=30, deadline=None)
@given(specs(), st.data())
def test_enumeration_monotone_in_box(spec, data):
    small = tuple(data.draw(st.integers(0, 5)) for _ in range(spec.rank))
    big = tuple(b + data.draw(st.integers(0, 3)) for b in small)
    assert set(enumerate_elements(spec, small)) <= set(enumerate_elements(spec, big))


def test_free_space_enumeration_against_unit_vectors():
    spec = SemigroupSpec(3, unit_vectors(3), [(1, 2, 3), (3, 1, 1)])
    got = {e.exponent for e in enumerate_elements(spec, (6, 6))}
    expect = {s for s, v in brute_values(spec.generators, spec.valuations, 6).items() if v[0] <= 6 and v[1] <= 6}
    assert got == expect
