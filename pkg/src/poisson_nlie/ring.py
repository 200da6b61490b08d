"""Sparse multivariate Laurent polynomials over exact rationals.

The ring substrate: polynomials are finite maps from signed exponent
vectors to nonzero ``Fraction`` coefficients, so equality of term maps is
equality of ring elements and no rounding can ever occur.  On top of the
ring live commuting derivations (with pairwise-commutation certification)
and exact ring-valued determinants (cofactor expansion and fraction-free
elimination, cross-checkable against each other).

Everything is immutable; all operations are pure.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

Exponents = tuple  # v-tuple of signed ints
Scalar = Union[int, Fraction]

EXPONENT_LIMIT = 2**31 - 1
DET_SIZE_CAP = 12


class ExponentOverflowError(ArithmeticError):
    """An exponent left the fixed-width signed range (never wraps)."""


class ExactDivisionError(ArithmeticError):
    """Ring division was requested where the divisor does not divide."""


class DeterminantSizeError(ValueError):
    """Matrix exceeds the configured determinant size cap."""


class ParseError(ValueError):
    """Syntax error in the polynomial expression grammar."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


def _coeff(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact scalar, got {type(value).__name__}")


class LaurentPolynomial:
    """Element of Q[t_1^{+-1}, ..., t_v^{+-1}] with sparse exact terms."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Mapping[Exponents, Scalar]] = None):
        if nvars < 0:
            raise ValueError("variable count must be nonnegative")
        cleaned = {}
        if terms:
            for exps, coeff in terms.items():
                exps = tuple(exps)
                if len(exps) != nvars:
                    raise ValueError("exponent vector length mismatch")
                for e in exps:
                    if abs(e) > EXPONENT_LIMIT:
                        raise ExponentOverflowError(f"exponent {e} out of range")
                c = _coeff(coeff)
                if c:
                    cleaned[exps] = c
        self.nvars = nvars
        self._terms = cleaned
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "LaurentPolynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value: Scalar) -> "LaurentPolynomial":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def one(cls, nvars: int) -> "LaurentPolynomial":
        return cls.constant(nvars, 1)

    @classmethod
    def monomial(cls, nvars: int, exps: Sequence[int], coeff: Scalar = 1) -> "LaurentPolynomial":
        return cls(nvars, {tuple(exps): coeff})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "LaurentPolynomial":
        """The variable t_{index}, 1-based."""
        if not 1 <= index <= nvars:
            raise ValueError(f"variable index {index} out of range 1..{nvars}")
        exps = [0] * nvars
        exps[index - 1] = 1
        return cls(nvars, {tuple(exps): 1})

    # -- inspection --------------------------------------------------------

    def terms(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self._terms)

    def constant_value(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self._terms.values()))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    # -- ring operations ---------------------------------------------------

    def _check(self, other: "LaurentPolynomial"):
        if self.nvars != other.nvars:
            raise ValueError("variable count mismatch")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPolynomial.constant(self.nvars, other)
        self._check(other)
        result = dict(self._terms)
        for exps, coeff in other._terms.items():
            cur = result.get(exps)
            result[exps] = coeff if cur is None else cur + coeff
        return LaurentPolynomial(self.nvars, result)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPolynomial.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _coeff(other)
            if not c:
                return LaurentPolynomial(self.nvars)
            return LaurentPolynomial(self.nvars, {e: c * v for e, v in self._terms.items()})
        self._check(other)
        if not self._terms or not other._terms:
            return LaurentPolynomial(self.nvars)
        result = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                cur = result.get(exps)
                prod = c1 * c2
                result[exps] = prod if cur is None else cur + prod
        return LaurentPolynomial(self.nvars, result)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if not isinstance(power, int):
            raise TypeError("exponent must be an integer")
        if power < 0:
            if len(self._terms) != 1:
                raise ExactDivisionError("only monomials are invertible in the Laurent ring")
            (exps, coeff), = self._terms.items()
            inv = LaurentPolynomial(self.nvars, {tuple(-e for e in exps): 1 / coeff})
            return inv ** (-power)
        result = LaurentPolynomial.one(self.nvars)
        base = self
        while power:
            if power & 1:
                result = result * base
            base_needed = power >> 1
            if base_needed:
                base = base * base
            power = base_needed
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPolynomial.constant(self.nvars, other)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- ordering helpers (graded lexicographic) ----------------------------

    def leading_term(self):
        """(exponents, coefficient) maximal in graded-lex order."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self._terms, key=lambda e: (sum(e), e))
        return exps, self._terms[exps]

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda item: (sum(item[0]), item[0]), reverse=True)

    def __repr__(self):
        return f"LaurentPolynomial({self.nvars}, {format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)


def exact_divide(num: LaurentPolynomial, den: LaurentPolynomial) -> LaurentPolynomial:
    """Quotient num/den when den divides num exactly; raises otherwise.

    Laurent divisibility reduces to ordinary polynomial divisibility after
    clearing the componentwise minimum exponents (minima are additive in a
    domain), where graded-lex division terminates by well-ordering.
    """
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return LaurentPolynomial(num.nvars)
    num._check(den)
    v = num.nvars

    def shift(poly):
        mins = [min(e[j] for e in poly._terms) for j in range(v)]
        shifted = {tuple(a - b for a, b in zip(e, mins)): c for e, c in poly._terms.items()}
        return shifted, mins

    nterms, nmin = shift(num)
    dterms, dmin = shift(den)
    lt_d = max(dterms, key=lambda e: (sum(e), e))
    cd = dterms[lt_d]
    quotient = {}
    rem = dict(nterms)
    while rem:
        lt_r = max(rem, key=lambda e: (sum(e), e))
        diff = tuple(a - b for a, b in zip(lt_r, lt_d))
        if any(d < 0 for d in diff):
            raise ExactDivisionError("polynomial division is not exact")
        factor = rem[lt_r] / cd
        quotient[diff] = quotient.get(diff, Fraction(0)) + factor
        for e, c in dterms.items():
            key = tuple(a + b for a, b in zip(diff, e))
            cur = rem.get(key, Fraction(0)) - factor * c
            if cur:
                rem[key] = cur
            else:
                rem.pop(key, None)
    offset = tuple(a - b for a, b in zip(nmin, dmin))
    return LaurentPolynomial(v, {tuple(a + b for a, b in zip(e, offset)): c
                                 for e, c in quotient.items() if c})


# ---------------------------------------------------------------------------
# Derivations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivationSpec:
    """A derivation sum_j c_j d/dt_j of the Laurent ring.

    ``kind`` is one of ``partial`` (c = unit vector), ``euler``
    (c_i = t_i) or ``general`` (explicit coefficient vector).
    """

    nvars: int
    kind: str
    index: Optional[int] = None
    coeffs: Optional[tuple] = None

    @classmethod
    def partial(cls, index: int, nvars: int) -> "DerivationSpec":
        if not 1 <= index <= nvars:
            raise ValueError("derivation index out of range")
        return cls(nvars, "partial", index)

    @classmethod
    def euler(cls, index: int, nvars: int) -> "DerivationSpec":
        if not 1 <= index <= nvars:
            raise ValueError("derivation index out of range")
        return cls(nvars, "euler", index)

    @classmethod
    def general(cls, coeffs: Sequence[LaurentPolynomial]) -> "DerivationSpec":
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("coefficient vector must be nonempty")
        nvars = coeffs[0].nvars
        if any(c.nvars != nvars for c in coeffs) or len(coeffs) != nvars:
            raise ValueError("coefficient vector length must equal the variable count")
        return cls(nvars, "general", None, coeffs)

    def coefficient_vector(self) -> tuple:
        """The c_j with d = sum_j c_j d/dt_j."""
        if self.kind == "general":
            return self.coeffs
        vec = [LaurentPolynomial.zero(self.nvars) for _ in range(self.nvars)]
        if self.kind == "partial":
            vec[self.index - 1] = LaurentPolynomial.one(self.nvars)
        elif self.kind == "euler":
            vec[self.index - 1] = LaurentPolynomial.variable(self.nvars, self.index)
        else:
            raise ValueError(f"unknown derivation kind {self.kind!r}")
        return tuple(vec)

    def apply(self, p: LaurentPolynomial) -> LaurentPolynomial:
        if p.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        if self.kind == "euler":
            i = self.index - 1
            return LaurentPolynomial(p.nvars, {e: c * e[i] for e, c in p.terms() if e[i]})
        if self.kind == "partial":
            i = self.index - 1
            result = {}
            for e, c in p.terms():
                if e[i]:
                    shifted = list(e)
                    shifted[i] -= 1
                    result[tuple(shifted)] = c * e[i]
            return LaurentPolynomial(p.nvars, result)
        total = LaurentPolynomial.zero(p.nvars)
        for j, cj in enumerate(self.coeffs):
            if cj.is_zero():
                continue
            total = total + cj * DerivationSpec.partial(j + 1, self.nvars).apply(p)
        return total


def apply_derivation(d: DerivationSpec, p: LaurentPolynomial) -> LaurentPolynomial:
    return d.apply(p)


def commutator_defect(d1: DerivationSpec, d2: DerivationSpec) -> tuple:
    """Coefficient vector of [d1, d2]; the zero vector iff d1, d2 commute."""
    if d1.nvars != d2.nvars:
        raise ValueError("variable count mismatch")
    c1 = d1.coefficient_vector()
    c2 = d2.coefficient_vector()
    return tuple(d1.apply(c2[j]) - d2.apply(c1[j]) for j in range(d1.nvars))


class FamilyCertificationError(ValueError):
    """A registered derivation family failed pairwise commutation."""


@dataclass(frozen=True)
class CertifiedDerivationFamily:
    """A pairwise-commuting family d_1..d_k, certified at construction.

    ``assumptions_12`` records whether the ring/derivation preset is one
    for which the separating-input assumptions behind the exhaustive
    criterion are known to hold (true for the Euler preset on the full
    Laurent ring).
    """

    specs: tuple
    assumptions_12: bool = False

    def __len__(self):
        return len(self.specs)

    def __getitem__(self, i):
        return self.specs[i]

    def __iter__(self):
        return iter(self.specs)

    @property
    def nvars(self):
        return self.specs[0].nvars


def certify_family(specs: Iterable[DerivationSpec], assumptions_12: bool = False) -> CertifiedDerivationFamily:
    specs = tuple(specs)
    if not specs:
        raise ValueError("empty derivation family")
    nv = specs[0].nvars
    if any(s.nvars != nv for s in specs):
        raise ValueError("derivation family mixes variable counts")
    for a, b in itertools.combinations(range(len(specs)), 2):
        defect = commutator_defect(specs[a], specs[b])
        if any(not p.is_zero() for p in defect):
            raise FamilyCertificationError(
                f"derivations {a + 1} and {b + 1} do not commute")
    return CertifiedDerivationFamily(specs, assumptions_12)


def euler_family(nvars: int) -> CertifiedDerivationFamily:
    """d_i = t_i d/dt_i for i = 1..nvars; separating assumptions hold."""
    return certify_family(
        (DerivationSpec.euler(i, nvars) for i in range(1, nvars + 1)),
        assumptions_12=True)


def partial_family(nvars: int) -> CertifiedDerivationFamily:
    """d_i = d/dt_i for i = 1..nvars (separating assumptions not claimed)."""
    return certify_family(DerivationSpec.partial(i, nvars) for i in range(1, nvars + 1))


# ---------------------------------------------------------------------------
# Ring matrices and determinants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RingMatrix:
    entries: tuple  # tuple of row tuples of LaurentPolynomial

    def __post_init__(self):
        rows = self.entries
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[LaurentPolynomial]]) -> "RingMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def rows(self):
        return len(self.entries)

    @property
    def cols(self):
        return len(self.entries[0]) if self.entries else 0

    def is_square(self):
        return self.rows == self.cols


def _det_cofactor(rows, cols, entries):
    if len(rows) == 1:
        return entries[rows[0]][cols[0]]
    first = rows[0]
    rest = rows[1:]
    total = None
    for pos, col in enumerate(cols):
        pivot = entries[first][col]
        if pivot.is_zero():
            continue
        minor = _det_cofactor(rest, cols[:pos] + cols[pos + 1:], entries)
        if minor.is_zero():
            continue
        term = pivot * minor
        if pos % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return LaurentPolynomial.zero(entries[rows[0]][cols[0]].nvars)
    return total


def _det_bareiss(entries):
    n = len(entries)
    nv = entries[0][0].nvars
    m = [list(row) for row in entries]
    sign = 1
    prev = LaurentPolynomial.one(nv)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for r in range(k + 1, n):
                if not m[r][k].is_zero():
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return LaurentPolynomial.zero(nv)
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = exact_divide(pivot * m[i][j] - m[i][k] * m[k][j], prev)
            m[i][k] = LaurentPolynomial.zero(nv)
        prev = pivot
    result = m[n - 1][n - 1]
    return -result if sign < 0 else result


def det_ring(matrix, method: str = "auto", size_cap: int = DET_SIZE_CAP) -> LaurentPolynomial:
    """Exact determinant of a square matrix of ring elements.

    ``method`` is ``auto`` (cofactor up to 4x4, fraction-free elimination
    above), ``cofactor`` or ``bareiss``; the two algorithms agree and are
    cross-checked in the test suite.
    """
    entries = matrix.entries if isinstance(matrix, RingMatrix) else tuple(tuple(r) for r in matrix)
    n = len(entries)
    if n == 0:
        raise ValueError("determinant of an empty matrix needs a variable count; use pi conventions")
    if any(len(r) != n for r in entries):
        raise ValueError("determinant of a non-square matrix")
    if n > size_cap:
        raise DeterminantSizeError(f"matrix size {n} exceeds cap {size_cap}")
    if method == "auto":
        method = "cofactor" if n <= 4 else "bareiss"
    if method == "cofactor":
        return _det_cofactor(tuple(range(n)), tuple(range(n)), entries)
    if method == "bareiss":
        return _det_bareiss(entries)
    raise ValueError(f"unknown determinant method {method!r}")


# ---------------------------------------------------------------------------
# Expression grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>t\d+)|(?P<op>[-+*^()/]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos and not match.group(0).strip():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad = pos + (len(text[pos:]) - len(stripped))
            line = text.count("\n", 0, bad) + 1
            col = bad - (text.rfind("\n", 0, bad) + 1) + 1
            raise ParseError(f"unexpected character {text[bad]!r}", line, col)
        if match.group(0).strip():
            kind = match.lastgroup
            tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    return tokens


class _Parser:
    """Recursive descent over: expr := [-] term ((+|-) term)*;
    term := factor (* factor)*; factor := base [^ [-] int];
    base := int [/ int] | t<k> | ( expr )."""

    def __init__(self, text: str, nvars: int):
        self.text = text
        self.nvars = nvars
        self.tokens = _tokenize(text)
        self.pos = 0

    def _error(self, message, offset=None):
        if offset is None:
            offset = self.tokens[self.pos][2] if self.pos < len(self.tokens) else len(self.text)
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        raise ParseError(message, line, col)

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, None)

    def _take(self):
        tok = self._peek()
        self.pos += 1
        return tok

    def parse(self) -> LaurentPolynomial:
        if not self.tokens:
            self._error("empty expression")
        value = self._expr()
        if self.pos != len(self.tokens):
            self._error("trailing input after expression")
        return value

    def _expr(self):
        kind, text, _ = self._peek()
        negate = False
        if kind == "op" and text in "+-":
            self._take()
            negate = text == "-"
        value = self._term()
        if negate:
            value = -value
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text in "+-":
                self._take()
                rhs = self._term()
                value = value - rhs if text == "-" else value + rhs
            else:
                return value

    def _term(self):
        value = self._factor()
        while True:
            kind, text, _ = self._peek()
            if kind == "op" and text == "*":
                self._take()
                value = value * self._factor()
            else:
                return value

    def _factor(self):
        base = self._base()
        kind, text, _ = self._peek()
        if kind == "op" and text == "^":
            self._take()
            power = self._signed_int()
            try:
                return base ** power
            except ExactDivisionError:
                self._error("negative power of a non-monomial")
        return base

    def _signed_int(self):
        kind, text, offset = self._take()
        negative = False
        if kind == "op" and text == "-":
            negative = True
            kind, text, offset = self._take()
        if kind != "num":
            self._error("expected an integer exponent", offset)
        value = int(text)
        return -value if negative else value

    def _base(self):
        kind, text, offset = self._take()
        if kind == "num":
            value = Fraction(int(text))
            nkind, ntext, _ = self._peek()
            if nkind == "op" and ntext == "/":
                self._take()
                dkind, dtext, doffset = self._take()
                if dkind != "num":
                    self._error("expected a denominator", doffset)
                if int(dtext) == 0:
                    self._error("zero denominator", doffset)
                value = value / int(dtext)
            return LaurentPolynomial.constant(self.nvars, value)
        if kind == "var":
            index = int(text[1:])
            if not 1 <= index <= self.nvars:
                self._error(f"variable {text} out of range for {self.nvars} variables", offset)
            return LaurentPolynomial.variable(self.nvars, index)
        if kind == "op" and text == "(":
            value = self._expr()
            ckind, ctext, coffset = self._take()
            if ckind != "op" or ctext != ")":
                self._error("expected ')'", coffset)
            return value
        if kind is None:
            self._error("unexpected end of expression", len(self.text))
        self._error(f"unexpected token {text!r}", offset)


def parse_polynomial(text: str, nvars: int) -> LaurentPolynomial:
    """Parse the expression grammar: integers, rationals p/q, variables
    t1..t{v}, + - * ^ with signed integer exponents, parentheses."""
    return _Parser(text, nvars).parse()


def format_polynomial(p: LaurentPolynomial) -> str:
    """Canonical serialization: terms sorted graded-lex descending."""
    if p.is_zero():
        return "0"
    pieces = []
    for exps, coeff in p.sorted_terms():
        factors = []
        for j, e in enumerate(exps):
            if e == 0:
                continue
            factors.append(f"t{j + 1}" if e == 1 else f"t{j + 1}^{e}")
        magnitude = abs(coeff)
        if not factors:
            body = str(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(magnitude)] + factors)
        pieces.append(("-" if coeff < 0 else "+", body))
    sign, body = pieces[0]
    out = [body if sign == "+" else f"-{body}"]
    for sign, body in pieces[1:]:
        out.append(f" {sign} {body}")
    return "".join(out)
