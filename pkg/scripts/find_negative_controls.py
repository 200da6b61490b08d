#!/usr/bin/env python3
"""Search small polynomial columns for brackets that fail the criterion.

Enumerates adjoined columns over a small monomial alphabet for n = 2,
m = 1 on three variables, runs the exhaustive residual check on each, and
for every failure hunts down a concrete nonzero fundamental-identity
defect.  Gradient columns and single-minor scalings always pass; the
interesting failures mix at least two complementary minors.

Usage:
    python scripts/find_negative_controls.py --limit 8
"""

import argparse
import itertools
import random
import sys

sys.path.insert(0, "src")

from poisson_nlie.criterion import check_criterion
from poisson_nlie.jacobian_bracket import AdjoinedMatrix, fundamental_defect, pi_table
from poisson_nlie.ring import LaurentPolynomial, euler_family, format_polynomial


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--limit", type=int, default=8,
                        help="stop after this many failing columns")
    args = parser.parse_args()

    family = euler_family(3)
    zero = LaurentPolynomial.zero(3)
    alphabet = [zero, LaurentPolynomial.one(3)] + [
        LaurentPolynomial.variable(3, i) for i in (1, 2, 3)]
    mons = [LaurentPolynomial.monomial(3, exps)
            for exps in itertools.product([-1, 0, 1], repeat=3)]
    rng = random.Random(0)

    found = 0
    for column in itertools.product(alphabet, repeat=3):
        if all(entry.is_zero() for entry in column):
            continue
        A = AdjoinedMatrix.from_rows(2, 1, [[entry] for entry in column])
        report = check_criterion(A, family)
        if report.passed():
            continue
        found += 1
        pretty = ", ".join(format_polynomial(entry) for entry in column)
        print(f"FAIL column ({pretty})")
        print(f"  first failing group: {report.counterexample}")
        pi = pi_table(A)
        for _ in range(2000):
            xs = [rng.choice(mons)]
            ys = [rng.choice(mons) for _ in range(2)]
            value = fundamental_defect(xs, ys, A, family, pi=pi)
            if not value.is_zero():
                print(f"  defect witness: x = {xs[0]}, ys = ({ys[0]}, {ys[1]})")
                print(f"  defect value:   {value}")
                break
        else:
            print("  (no monomial witness found in 2000 draws)")
        if found >= args.limit:
            break
    print(f"{found} failing columns reported")
    return 0


if __name__ == "__main__":
    sys.exit(main())
