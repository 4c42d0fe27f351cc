"""Walk through the five-point constellation in dimension 4.

Prints the valuation matrix, the factored series, the values of the three
monomials of g = y^2 z^4 + x^3 y^4 + x^14, the Lambda sets of g, and the
strict transforms in chart 1-2.
"""

from pathlib import Path

from toric_poincare.constellation import (
    Constellation,
    chart_from_label,
    degeneracy_report,
    monomial_values,
    poincare_factored,
    strict_transform_exponents,
    to_semigroup_spec,
    valuation_matrix,
)
from toric_poincare.fibers import lambda_sets, splitting_subset_exists, support_from_exponents

DATA = Path(__file__).resolve().parents[1] / "data" / "five_point_d4.json"
MONOMIALS = {"y^2z^4": (0, 2, 4, 0), "x^3y^4": (3, 4, 0, 0), "x^14": (14, 0, 0, 0)}


def main():
    c = Constellation.load(DATA)
    m = valuation_matrix(c)
    rep = degeneracy_report(m, c)
    print("valuation matrix:")
    for row in m.rows:
        print("  ", row)
    print("P(t) =", poincare_factored(m, rep))

    vals = {name: monomial_values(m, e) for name, e in MONOMIALS.items()}
    for name, v in vals.items():
        print(f"nu({name}) = {v}")
    v = tuple(min(col) for col in zip(*vals.values()))
    print("nu(g) =", v)

    L = support_from_exponents(to_semigroup_spec(c), v, MONOMIALS.values())
    fam = lambda_sets(L)
    names = {e: n for n, e in MONOMIALS.items()}
    for j, s in fam.sets.items():
        print(f"Lambda_{j} = {{{', '.join(sorted(names[e] for e in s))}}}")
    for a, b in [(4, 1), (1, 3), (1, 2)]:
        print(f"splitting subset for ({a},{b}):", splitting_subset_exists(fam, a, b))

    ctx = chart_from_label(c, "1-2")
    for name, e in MONOMIALS.items():
        print(f"chart 1-2 strict transform of {name}: {strict_transform_exponents(ctx, m, e)}")


if __name__ == "__main__":
    main()
