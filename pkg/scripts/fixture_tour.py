#!/usr/bin/env python3
"""Walk through the solvable structure theory on the built-in fixtures.

Prints the derived/lower-central series, the nilradical, the
hypo-nilpotent ideals with their two series, the ideal flag, and the
common eigenvector for the 7-dimensional fixture; then the torus-type
extension with its invertible restricted adjoint.
"""

import sys

sys.path.insert(0, "src")

from fractions import Fraction

from poisson_nlie.finite_algebra import (
    classify,
    common_eigenvector,
    fixture_hypo,
    fixture_torus,
    full_space,
    is_hypo_nilpotent,
    nilradical,
    non_nilpotent_adjoint_search,
    series,
    solvable_flag,
    zero_product_criterion,
)
from poisson_nlie.subspaces import Subspace, unit_vector


def span(dim, *indices):
    return Subspace.from_vectors(dim, [unit_vector(dim, i) for i in indices])


def describe(space):
    names = []
    for row in space.basis:
        support = [f"e{i + 1}" for i, v in enumerate(row) if v]
        names.append("+".join(support) if len(support) > 1 else support[0])
    return "{" + ", ".join(names) + "}" if names else "0"


def main():
    P = fixture_hypo(4, 6)
    print("== hypo fixture: dim 7, arity 4 ==")
    flags = classify(P)
    print(f"solvable index {flags.solvability_index}; nilpotent: {flags.nilpotent}")
    derived = series(full_space(P), P, "derived")
    print("derived series dims:", [t.dim for t in derived.terms])
    lower = series(full_space(P), P, "lower_central")
    print("lower central dims:", [t.dim for t in lower.terms],
          "(stabilizes nonzero)" if not lower.terminates_at_zero else "")
    nil = nilradical(P)
    print("nilradical:", describe(nil))
    for label, missing in (("first", 4), ("second", 3)):
        ideal = span(7, *(j for j in range(7) if j != missing))
        sub = series(ideal, P, "subalg")
        lc = series(ideal, P, "lower_central")
        print(f"{label} proper ideal (drops e{missing + 1}): "
              f"hypo-nilpotent: {is_hypo_nilpotent(ideal, P)}; "
              f"subalgebra series dims {[t.dim for t in sub.terms]}; "
              f"ideal series dims {[t.dim for t in lc.terms]}")
    flag = solvable_flag(P)
    print("ideal flag dims:", [f.dim for f in flag])
    print("flag steps:", " < ".join(describe(f) for f in flag[1:4]), "< ...")
    vec = common_eigenvector(P)
    print("common eigenvector:", describe(Subspace.from_vectors(7, [vec.vector])),
          "with all adjoint eigenvalues zero" if not any(vec.eigenvalues.values())
          else f"eigenvalues {vec.eigenvalues}")

    T = fixture_torus(4, 5)
    print()
    print("== torus fixture: dim 8, arity 4 ==")
    flags = classify(T)
    print(f"solvable index {flags.solvability_index}; nilpotent: {flags.nilpotent}")
    print("nilradical:", describe(nilradical(T)))
    base = span(8, 0, 1, 2, 3, 4)
    print("abelian base hypo-nilpotent:", is_hypo_nilpotent(base, T))
    search = non_nilpotent_adjoint_search(T, base, [unit_vector(8, j) for j in (5, 6, 7)])
    print("non-nilpotent restricted adjoints found for every torus element:",
          search["all_found"])
    y = {5: Fraction(1), 6: Fraction(1), 7: Fraction(1)}
    report = zero_product_criterion(T, y, [{0: Fraction(1)}, {1: Fraction(1)}])
    print("sum-of-torus adjoint invertible on the square:",
          report["restriction_invertible"], "=> product vanishes:",
          report["conclusion_holds"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
