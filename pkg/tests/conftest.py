from itertools import product

import pytest

from toric_poincare.constellation import parse_constellation

EXAMPLE_DOC = {
    "dimension": 4,
    "points": [
        {"parent": None, "weight": None},
        {"parent": 0, "weight": 1},
        {"parent": 0, "weight": 2},
        {"parent": 1, "weight": 1},
        {"parent": 1, "weight": 2},
    ],
}
EXAMPLE_ROWS = ((1, 1, 1, 1), (1, 2, 2, 2), (2, 1, 2, 2), (1, 3, 3, 3), (2, 3, 4, 4))

# x, y, z, u exponents of the monomials of g = y^2 z^4 + x^3 y^4 + x^14
Y2Z4 = (0, 2, 4, 0)
X3Y4 = (3, 4, 0, 0)
X14 = (14, 0, 0, 0)
EXAMPLE_V = (6, 11, 10, 14, 18)


@pytest.fixture
def five_point():
    return parse_constellation(EXAMPLE_DOC)


def combos(gens, max_steps):
    """Distinct exponents sum c_k g_k over c >= 0 with sum(c) <= max_steps."""
    d = len(gens[0])
    out = set()
    for c in product(range(max_steps + 1), repeat=len(gens)):
        if sum(c) <= max_steps:
            out.add(tuple(sum(ck * g[i] for ck, g in zip(c, gens)) for i in range(d)))
    return out


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def brute_values(gens, vals, max_steps):
    """Map exponent -> value vector for every element reachable in max_steps."""
    return {s: tuple(dot(s, nu) for nu in vals) for s in combos(gens, max_steps)}


def brute_N(gens, vals, v):
    # every generator raises every value by >= 1, so min(v) steps suffice
    steps = min(v) if v else 0
    return sum(1 for val in brute_values(gens, vals, steps).values() if val == tuple(v))


def unit_vectors(d):
    return [tuple(int(i == j) for j in range(d)) for i in range(d)]
