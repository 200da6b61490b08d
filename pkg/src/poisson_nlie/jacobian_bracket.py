"""The n-ary determinant bracket with m adjoined columns.

Given a certified family of n+m commuting derivations and a fixed
(n+m) x m matrix A of ring elements, the bracket of x_1..x_n is the
determinant of the (n+m) x (n+m) matrix whose first n columns are
d_r(x_q) and whose last m columns are A.  The same bracket expands as
sum_{|I|=n} pi^I Jac_I with signed complementary minors pi^I; the two
routes are kept independent so their agreement certifies the sign
conventions.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .ring import (
    CertifiedDerivationFamily,
    LaurentPolynomial,
    ParseError,
    det_ring,
    format_polynomial,
    parse_polynomial,
)

IndexTuple = Tuple[int, ...]


def perm_sign(arrangement: Sequence[int]) -> int:
    """Sign of a tuple of distinct values relative to sorted order;
    0 when a value repeats."""
    n = len(arrangement)
    inversions = 0
    for a in range(n):
        for b in range(a + 1, n):
            if arrangement[a] == arrangement[b]:
                return 0
            if arrangement[a] > arrangement[b]:
                inversions += 1
    return -1 if inversions % 2 else 1


def complement(index_set: Sequence[int], size: int) -> IndexTuple:
    chosen = set(index_set)
    return tuple(i for i in range(1, size + 1) if i not in chosen)


def complement_sign(index_set: Sequence[int], n: int, m: int) -> int:
    """(-1)^{eps(I)}: parity of the block permutation (I, I^c ascending).

    Certified against the full-determinant expansion rather than trusted;
    equals (-1)^{sum(I) + n(n+1)/2}.
    """
    I = tuple(index_set)
    if len(I) != n or any(not 1 <= i <= n + m for i in I) or len(set(I)) != n:
        raise ValueError("invalid index tuple")
    exponent = sum(I) + n * (n + 1) // 2
    return -1 if exponent % 2 else 1


@dataclass(frozen=True)
class AdjoinedMatrix:
    """The fixed (n+m) x m matrix adjoined to the derivative columns."""

    n: int
    m: int
    nvars: int
    entries: tuple = ()  # (n+m) rows of m LaurentPolynomial entries

    def __post_init__(self):
        if self.n < 2 or self.m < 0:
            raise ValueError("need arity n >= 2 and m >= 0 adjoined columns")
        rows = self.entries
        if self.m == 0:
            if rows:
                raise ValueError("m = 0 admits no entries")
            return
        if len(rows) != self.n + self.m or any(len(r) != self.m for r in rows):
            raise ValueError("adjoined matrix must be (n+m) x m")
        for row in rows:
            for entry in row:
                if entry.nvars != self.nvars:
                    raise ValueError("entry variable count mismatch")

    @classmethod
    def from_rows(cls, n: int, m: int, rows: Sequence[Sequence[LaurentPolynomial]],
                  nvars: Optional[int] = None) -> "AdjoinedMatrix":
        rows = tuple(tuple(r) for r in rows)
        if nvars is None:
            if not rows or not rows[0]:
                raise ValueError("cannot infer the variable count from an empty matrix")
            nvars = rows[0][0].nvars
        return cls(n, m, nvars, rows)

    @classmethod
    def from_scalars(cls, n: int, m: int, rows: Sequence[Sequence], nvars: int) -> "AdjoinedMatrix":
        poly_rows = tuple(tuple(LaurentPolynomial.constant(nvars, Fraction(v)) for v in row)
                          for row in rows)
        return cls(n, m, nvars, poly_rows)

    @classmethod
    def empty(cls, n: int, nvars: int) -> "AdjoinedMatrix":
        return cls(n, 0, nvars, ())

    @property
    def is_scalar(self) -> bool:
        return all(entry.is_constant() for row in self.entries for entry in row)

    def submatrix_rows(self, rows: Sequence[int]) -> tuple:
        return tuple(self.entries[r - 1] for r in rows)

    def serialize(self) -> str:
        lines = [f"{self.n} {self.m}"]
        for row in self.entries:
            lines.extend(format_polynomial(entry) for entry in row)
        return "\n".join(lines) + "\n"


def parse_adjoined_matrix(text: str, nvars: int) -> AdjoinedMatrix:
    """Read the matrix block format: a line "n m", then (n+m)*m polynomial
    expressions, one per line, row-major.  Blank lines and '#' comments
    are skipped."""
    lines = [(num + 1, line.split("#", 1)[0].strip())
             for num, line in enumerate(text.splitlines())]
    lines = [(num, line) for num, line in lines if line]
    if not lines:
        raise ParseError("empty matrix block", 1, 1)
    header_num, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
        raise ParseError("matrix header must be 'n m'", header_num, 1)
    n, m = int(parts[0]), int(parts[1])
    body = lines[1:]
    if len(body) != (n + m) * m:
        raise ParseError(f"expected {(n + m) * m} entries, found {len(body)}",
                         body[-1][0] if body else header_num, 1)
    entries = []
    position = 0
    for _ in range(n + m):
        row = []
        for _ in range(m):
            num, line = body[position]
            try:
                row.append(parse_polynomial(line, nvars))
            except ParseError as exc:
                raise ParseError(f"bad matrix entry: {exc}", num, exc.column) from exc
            position += 1
        entries.append(tuple(row))
    return AdjoinedMatrix(n, m, nvars, tuple(entries))


# ---------------------------------------------------------------------------
# Expansion coefficients and minors
# ---------------------------------------------------------------------------

def pi_coefficient(index_set: Sequence[int], A: AdjoinedMatrix) -> LaurentPolynomial:
    """pi^I = (-1)^{eps(I)} det(A_{I^c}); zero for short or repeated tuples."""
    S = tuple(index_set)
    if len(S) != A.n or len(set(S)) != len(S):
        return LaurentPolynomial.zero(A.nvars)
    if any(not 1 <= i <= A.n + A.m for i in S):
        raise ValueError("index out of range")
    I = tuple(sorted(S))
    if A.m == 0:
        return LaurentPolynomial.one(A.nvars)
    minor = det_ring(A.submatrix_rows(complement(I, A.n + A.m)))
    sign = complement_sign(I, A.n, A.m)
    return minor if sign > 0 else -minor


def pi_table(A: AdjoinedMatrix) -> dict:
    """All pi^I keyed by sorted index tuple."""
    return {I: pi_coefficient(I, A)
            for I in itertools.combinations(range(1, A.n + A.m + 1), A.n)}


def jac_minor(index_set: Sequence[int], xs: Sequence[LaurentPolynomial],
              family: CertifiedDerivationFamily, method: str = "det") -> LaurentPolynomial:
    """Jac_I(x_1..x_n) = det(d_{i_p}(x_q)).

    ``method="sum"`` evaluates the equivalent signed sum over permutations
    of the index set, which the tests cross-check against the determinant.
    """
    I = tuple(index_set)
    n = len(xs)
    if len(I) != n:
        raise ValueError("index tuple length must equal the argument count")
    if method == "det":
        rows = [[family[i - 1].apply(x) for x in xs] for i in I]
        return det_ring(rows)
    if method == "sum":
        nv = family.nvars
        total = LaurentPolynomial.zero(nv)
        for images in itertools.permutations(I):
            sign = perm_sign(images)
            term = LaurentPolynomial.one(nv)
            for image, x in zip(images, xs):
                term = term * family[image - 1].apply(x)
                if term.is_zero():
                    break
            if term.is_zero():
                continue
            total = total + (term if sign > 0 else -term)
        return total
    raise ValueError(f"unknown jac_minor method {method!r}")


# ---------------------------------------------------------------------------
# The bracket and its defects
# ---------------------------------------------------------------------------

def _validate(xs, A: AdjoinedMatrix, family: CertifiedDerivationFamily):
    if not isinstance(family, CertifiedDerivationFamily):
        raise TypeError("bracket evaluation requires a certified derivation family")
    if len(family) != A.n + A.m:
        raise ValueError(f"derivation family has {len(family)} members, need {A.n + A.m}")
    if len(xs) != A.n:
        raise ValueError(f"bracket arity is {A.n}, got {len(xs)} arguments")
    for x in xs:
        if x.nvars != family.nvars:
            raise ValueError("argument variable count mismatch")
    if A.nvars != family.nvars:
        raise ValueError("matrix variable count mismatch")


def bracket(xs: Sequence[LaurentPolynomial], A: AdjoinedMatrix,
            family: CertifiedDerivationFamily, method: str = "expanded",
            pi: Optional[dict] = None) -> LaurentPolynomial:
    """[x_1, ..., x_n]: full determinant or the pi-weighted expansion."""
    _validate(xs, A, family)
    if method == "full":
        rows = []
        for r in range(1, A.n + A.m + 1):
            row = [family[r - 1].apply(x) for x in xs]
            if A.m:
                row.extend(A.entries[r - 1])
            rows.append(row)
        return det_ring(rows)
    if method == "expanded":
        if pi is None:
            pi = pi_table(A)
        total = LaurentPolynomial.zero(family.nvars)
        for I, coeff in pi.items():
            if coeff.is_zero():
                continue
            minor = jac_minor(I, xs, family)
            if minor.is_zero():
                continue
            total = total + coeff * minor
        return total
    raise ValueError(f"unknown bracket method {method!r}")


def leibniz_defect(y: LaurentPolynomial, z: LaurentPolynomial,
                   xs: Sequence[LaurentPolynomial], A: AdjoinedMatrix,
                   family: CertifiedDerivationFamily,
                   pi: Optional[dict] = None) -> LaurentPolynomial:
    """[y*z, x_2..x_n] - y*[z, x_2..x_n] - z*[y, x_2..x_n]; identically 0
    because each bracket slot is a first-order differential operator."""
    if len(xs) != A.n - 1:
        raise ValueError("need n-1 companion arguments")
    if pi is None:
        pi = pi_table(A)
    rest = list(xs)
    return (bracket([y * z] + rest, A, family, pi=pi)
            - y * bracket([z] + rest, A, family, pi=pi)
            - z * bracket([y] + rest, A, family, pi=pi))


def fundamental_defect(xs: Sequence[LaurentPolynomial], ys: Sequence[LaurentPolynomial],
                       A: AdjoinedMatrix, family: CertifiedDerivationFamily,
                       pi: Optional[dict] = None) -> LaurentPolynomial:
    """[x_1..x_{n-1}, [y_1..y_n]] - sum_i [y_1.., [x.., y_i], .., y_n].

    Vanishing on all inputs is the n-Lie fundamental identity.
    """
    n = A.n
    if len(xs) != n - 1 or len(ys) != n:
        raise ValueError("fundamental identity needs n-1 outer and n inner arguments")
    if pi is None:
        pi = pi_table(A)
    inner = bracket(list(ys), A, family, pi=pi)
    total = bracket(list(xs) + [inner], A, family, pi=pi)
    for i in range(n):
        nested = bracket(list(xs) + [ys[i]], A, family, pi=pi)
        args = list(ys)
        args[i] = nested
        total = total - bracket(args, A, family, pi=pi)
    return total


# ---------------------------------------------------------------------------
# Deterministic sampling
# ---------------------------------------------------------------------------

@dataclass
class MonomialSampler:
    """Seeded draws from the monomial box [-radius, radius]^nvars plus
    small random binomials; identity checks report results as sampled,
    never proved."""

    nvars: int
    radius: int = 2
    seed: int = 0
    _rng: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        self._rng = random.Random(self.seed)

    def exponents(self) -> tuple:
        return tuple(self._rng.randint(-self.radius, self.radius) for _ in range(self.nvars))

    def monomial(self) -> LaurentPolynomial:
        return LaurentPolynomial.monomial(self.nvars, self.exponents())

    def binomial(self) -> LaurentPolynomial:
        first = self.exponents()
        second = self.exponents()
        while second == first:
            second = self.exponents()
        coeff = self._rng.choice([-3, -2, -1, 1, 2, 3])
        return (LaurentPolynomial.monomial(self.nvars, first)
                + LaurentPolynomial.monomial(self.nvars, second, coeff))

    def monomials(self, count: int) -> List[LaurentPolynomial]:
        return [self.monomial() for _ in range(count)]

    def scalar(self, span: int = 9) -> Fraction:
        return Fraction(self._rng.randint(-span, span), self._rng.randint(1, 4))

    def scalar_matrix(self, n: int, m: int) -> AdjoinedMatrix:
        rows = [[self.scalar() for _ in range(m)] for _ in range(n + m)]
        return AdjoinedMatrix.from_scalars(n, m, rows, self.nvars)

    def monomial_matrix(self, n: int, m: int) -> AdjoinedMatrix:
        rows = [[self.monomial() for _ in range(m)] for _ in range(n + m)]
        return AdjoinedMatrix.from_rows(n, m, rows, nvars=self.nvars)


def expansion_equivalence_check(n: int, m: int, family: CertifiedDerivationFamily,
                                samples: int = 200, seed: int = 0,
                                threads: int = 1) -> dict:
    """Compare bracket(full) with bracket(expanded) on seeded monomial
    inputs under seeded scalar/monomial adjoined matrices."""
    sampler = MonomialSampler(family.nvars, seed=seed)
    jobs = []
    for index in range(samples):
        A = sampler.scalar_matrix(n, m) if index % 2 == 0 else sampler.monomial_matrix(n, m)
        xs = sampler.monomials(n)
        jobs.append((A, xs))

    def run(job):
        A, xs = job
        full = bracket(xs, A, family, method="full")
        expanded = bracket(xs, A, family, method="expanded")
        return full == expanded

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(job) for job in jobs]
    mismatches = [i for i, ok in enumerate(outcomes) if not ok]
    return {
        "n": n,
        "m": m,
        "samples": samples,
        "seed": seed,
        "equal": not mismatches,
        "first_mismatch": mismatches[0] if mismatches else None,
    }
