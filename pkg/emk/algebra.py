"""
Exact multivariate algebra over the rationals.

Scalars are ``fractions.Fraction``. Polynomials are sparse maps from exponent
tuples to non-zero coefficients; they are treated as immutable once built, so
they can be shared freely between threads.

The same ``Polynomial`` type is used for functions of the primal variable x
(test functions h) and of the dual variable ξ (numerators, μ-components,
differential operators). Only the printing prefix differs.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from emk.errors import ValidationError

Monomial = tuple[int, ...]
Vector = tuple[Fraction, ...]
Scalar = Fraction | int


# ── Rationals ────────────────────────────────────────
_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(value: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"``, ``"n"`` or an integer into a Fraction."""
    if isinstance(value, bool):
        raise ValidationError(f"Invalid rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if not isinstance(value, str):
        raise ValidationError(f"Invalid rational: {value!r}")
    match = _RATIONAL_RE.match(value)
    if not match:
        raise ValidationError(f"Invalid rational: {value!r}")
    den = int(match.group(2)) if match.group(2) else 1
    if den == 0:
        raise ValidationError(f"Zero denominator in {value!r}")
    return Fraction(int(match.group(1)), den)


def format_rational(x: Scalar) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def frac_part(x: Scalar) -> Fraction:
    """Fractional part {x} in [0, 1)."""
    x = Fraction(x)
    return x - math.floor(x)


# ── Polynomial ───────────────────────────────────────
class Polynomial:
    """Sparse polynomial in ``dim`` variables with rational coefficients."""

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Monomial, Scalar] | None = None) -> None:
        if dim < 0:
            raise ValidationError(f"Negative dimension {dim}")
        clean: dict[Monomial, Fraction] = {}
        for mono, coef in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != dim or any(e < 0 for e in mono):
                raise ValidationError(f"Bad exponent vector {mono} for dimension {dim}")
            coef = Fraction(coef)
            if coef:
                clean[mono] = clean.get(mono, Fraction(0)) + coef
                if not clean[mono]:
                    del clean[mono]
        self.dim = dim
        self.terms = clean
        self._hash: int | None = None

    @classmethod
    def _raw(cls, dim: int, terms: dict[Monomial, Fraction]) -> Polynomial:
        """Build from an already normalized term map (no zero coefficients)."""
        poly = cls.__new__(cls)
        poly.dim = dim
        poly.terms = terms
        poly._hash = None
        return poly

    # ── constructors ─────────────────────────────────
    @classmethod
    def zero(cls, dim: int) -> Polynomial:
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, value: Scalar) -> Polynomial:
        value = Fraction(value)
        return cls._raw(dim, {(0,) * dim: value} if value else {})

    @classmethod
    def one(cls, dim: int) -> Polynomial:
        return cls.constant(dim, 1)

    @classmethod
    def variable(cls, dim: int, index: int) -> Polynomial:
        if not 0 <= index < dim:
            raise ValidationError(f"Variable index {index} out of range for dimension {dim}")
        mono = tuple(1 if i == index else 0 for i in range(dim))
        return cls._raw(dim, {mono: Fraction(1)})

    @classmethod
    def linear(cls, coeffs: Sequence[Scalar]) -> Polynomial:
        """The linear form ξ ↦ Σ c_i ξ_i."""
        dim = len(coeffs)
        terms: dict[Monomial, Fraction] = {}
        for i, c in enumerate(coeffs):
            c = Fraction(c)
            if c:
                terms[tuple(1 if j == i else 0 for j in range(dim))] = c
        return cls._raw(dim, terms)

    # ── basic queries ────────────────────────────────
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    @property
    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.dim, Fraction(0))

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degrees = {sum(m) for m in self.terms}
        if not degrees:
            return True
        if len(degrees) != 1:
            return False
        return degree is None or degrees == {degree}

    def _check(self, other: Polynomial) -> None:
        if self.dim != other.dim:
            raise ValidationError(f"Dimension mismatch: {self.dim} vs {other.dim}")

    # ── arithmetic ───────────────────────────────────
    def __add__(self, other: Polynomial | Scalar) -> Polynomial:
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.dim, other)
        self._check(other)
        terms = dict(self.terms)
        for mono, coef in other.terms.items():
            value = terms.get(mono, 0) + coef
            if value:
                terms[mono] = value
            else:
                terms.pop(mono, None)
        return Polynomial._raw(self.dim, terms)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw(self.dim, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Polynomial | Scalar) -> Polynomial:
        return self + (-other)

    def __rsub__(self, other: Scalar) -> Polynomial:
        return (-self) + other

    def scale(self, factor: Scalar) -> Polynomial:
        factor = Fraction(factor)
        if not factor:
            return Polynomial.zero(self.dim)
        return Polynomial._raw(self.dim, {m: c * factor for m, c in self.terms.items()})

    def __mul__(self, other: Polynomial | Scalar) -> Polynomial:
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                terms[mono] = terms.get(mono, 0) + c1 * c2
        return Polynomial._raw(self.dim, {m: c for m, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> Polynomial:
        if exponent < 0:
            raise ValidationError(f"Negative power {exponent}")
        result = Polynomial.one(self.dim)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def mul_truncated(self, other: Polynomial, max_degree: int) -> Polynomial:
        """Product keeping only monomials of total degree ≤ max_degree."""
        self._check(other)
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            d1 = sum(m1)
            if d1 > max_degree:
                continue
            for m2, c2 in other.terms.items():
                if d1 + sum(m2) > max_degree:
                    continue
                mono = tuple(a + b for a, b in zip(m1, m2))
                terms[mono] = terms.get(mono, 0) + c1 * c2
        return Polynomial._raw(self.dim, {m: c for m, c in terms.items() if c})

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_constant and self.constant_term() == other
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    # ── graded pieces ────────────────────────────────
    def homogeneous_part(self, degree: int) -> Polynomial:
        return Polynomial._raw(
            self.dim, {m: c for m, c in self.terms.items() if sum(m) == degree}
        )

    def truncate(self, max_degree: int) -> Polynomial:
        return Polynomial._raw(
            self.dim, {m: c for m, c in self.terms.items() if sum(m) <= max_degree}
        )

    def homogeneous_parts(self, max_degree: int) -> tuple[Polynomial, ...]:
        buckets: list[dict[Monomial, Fraction]] = [{} for _ in range(max_degree + 1)]
        for mono, coef in self.terms.items():
            k = sum(mono)
            if k <= max_degree:
                buckets[k][mono] = coef
        return tuple(Polynomial._raw(self.dim, b) for b in buckets)

    # ── evaluation and calculus ──────────────────────
    def evaluate(self, point: Sequence[Scalar | float]) -> Fraction | float:
        if len(point) != self.dim:
            raise ValidationError(f"Point of length {len(point)} for dimension {self.dim}")
        total: Fraction | float = Fraction(0)
        for mono, coef in self.terms.items():
            value: Fraction | float = coef
            for x, e in zip(point, mono):
                if e:
                    value = value * x**e
            total = total + value
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for mono, coef in self.terms.items():
            value = float(coef)
            for x, e in zip(point, mono):
                if e:
                    value *= x**e
            total += value
        return total

    def diff(self, index: int, times: int = 1) -> Polynomial:
        terms: dict[Monomial, Fraction] = {}
        for mono, coef in self.terms.items():
            e = mono[index]
            if e < times:
                continue
            factor = math.perm(e, times)
            new = mono[:index] + (e - times,) + mono[index + 1 :]
            terms[new] = coef * factor
        return Polynomial._raw(self.dim, terms)

    def derivative(self, alpha: Sequence[int]) -> Polynomial:
        result = self
        for index, times in enumerate(alpha):
            if times:
                result = result.diff(index, times)
        return result

    def antiderivative(self, index: int) -> Polynomial:
        terms: dict[Monomial, Fraction] = {}
        for mono, coef in self.terms.items():
            e = mono[index]
            new = mono[:index] + (e + 1,) + mono[index + 1 :]
            terms[new] = coef / (e + 1)
        return Polynomial._raw(self.dim, terms)

    def substitute(self, images: Sequence[Polynomial], target_dim: int | None = None) -> Polynomial:
        """Replace variable i by ``images[i]`` (all images share one dimension)."""
        if len(images) != self.dim:
            raise ValidationError(f"Need {self.dim} images, got {len(images)}")
        target = images[0].dim if images else (target_dim or 0)
        powers: list[list[Polynomial]] = [[Polynomial.one(target)] for _ in images]
        result = Polynomial.zero(target)
        for mono, coef in self.terms.items():
            term = Polynomial.constant(target, coef)
            for i, e in enumerate(mono):
                if not e:
                    continue
                cache = powers[i]
                while len(cache) <= e:
                    cache.append(cache[-1] * images[i])
                term = term * cache[e]
            result = result + term
        return result

    def compose_linear(
        self, matrix: Sequence[Sequence[Scalar]], target_dim: int | None = None
    ) -> Polynomial:
        """Substitute ξ_i ↦ Σ_j matrix[i][j] η_j; the result lives in ``len(matrix[0])`` variables."""
        if len(matrix) != self.dim:
            raise ValidationError(f"Matrix has {len(matrix)} rows, expected {self.dim}")
        return self.substitute([Polynomial.linear(row) for row in matrix], target_dim)

    def compose_affine(
        self, matrix: Sequence[Sequence[Scalar]], shift: Sequence[Scalar]
    ) -> Polynomial:
        """Substitute x_i ↦ Σ_j matrix[i][j] y_j + shift_i."""
        if len(matrix) != self.dim or len(shift) != self.dim:
            raise ValidationError("Affine map does not match polynomial dimension")
        images = [Polynomial.linear(row) + Fraction(s) for row, s in zip(matrix, shift)]
        return self.substitute(images)

    def apply_as_operator(self, h: Polynomial) -> Polynomial:
        """Read ξ_i as ∂/∂x_i and apply the resulting operator to ``h``."""
        self._check(h)
        result = Polynomial.zero(h.dim)
        for mono, coef in self.terms.items():
            result = result + h.derivative(mono).scale(coef)
        return result

    # ── printing ─────────────────────────────────────
    def format(self, var: str = "x") -> str:
        if not self.terms:
            return "0"
        ordered = sorted(self.terms.items(), key=lambda item: (-sum(item[0]), tuple(-e for e in item[0])))
        pieces: list[str] = []
        for mono, coef in ordered:
            factors = [
                f"{var}{i + 1}" if e == 1 else f"{var}{i + 1}^{e}"
                for i, e in enumerate(mono)
                if e
            ]
            magnitude = abs(coef)
            if not factors:
                body = format_rational(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([format_rational(magnitude), *factors])
            if not pieces:
                pieces.append(body if coef > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if coef > 0 else f"- {body}")
        return " ".join(pieces)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"Polynomial({self.dim}, {self.format()!r})"

    def to_json(self, var: str = "x") -> str:
        return self.format(var)


# ── Linear forms ─────────────────────────────────────
@dataclass(frozen=True)
class LinearForm:
    """A vector v of V, read as the linear function ξ ↦ ⟨ξ, v⟩ on V*."""

    coeffs: Vector

    @classmethod
    def of(cls, values: Iterable[Scalar]) -> LinearForm:
        return cls(tuple(Fraction(v) for v in values))

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def as_polynomial(self) -> Polynomial:
        return Polynomial.linear(self.coeffs)

    def pair(self, xi: Sequence[Scalar | float]) -> Fraction | float:
        return sum((c * x for c, x in zip(self.coeffs, xi)), Fraction(0))


def dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def primitive(vector: Sequence[Scalar]) -> tuple[tuple[int, ...], Fraction]:
    """Write ``vector = scale * p`` with p a primitive integer vector of the same direction."""
    values = [Fraction(v) for v in vector]
    if not any(values):
        raise ValidationError("Zero vector has no primitive representative")
    den = math.lcm(*(v.denominator for v in values))
    ints = [int(v * den) for v in values]
    g = math.gcd(*ints)
    prim = tuple(i // g for i in ints)
    return prim, Fraction(g, den)


def canonical_form(vector: Sequence[Scalar]) -> tuple[tuple[int, ...], Fraction]:
    """Primitive integer representative with first non-zero entry positive."""
    prim, scale = primitive(vector)
    lead = next(x for x in prim if x)
    if lead < 0:
        return tuple(-x for x in prim), -scale
    return prim, scale


def restrict_to_subspace(p: Polynomial, basis: Sequence[Sequence[Scalar]]) -> Polynomial:
    """Substitute ξ = Σ t_i β_i; the result is a polynomial in the coordinates t."""
    from emk.linalg import rank

    if basis and rank(basis) < len(basis):
        raise ValidationError("Restriction basis is linearly dependent")
    if any(len(b) != p.dim for b in basis):
        raise ValidationError("Basis vectors do not match polynomial dimension")
    k = len(basis)
    if k == 0:
        return Polynomial.constant(0, p.constant_term())
    matrix = [[Fraction(basis[j][i]) for j in range(k)] for i in range(p.dim)]
    return p.compose_linear(matrix)


def poly_arith(a: Polynomial, b: Polynomial | Scalar, op: str) -> Polynomial:
    """Dispatch helper for ``add``, ``mul`` and ``scale``."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        if isinstance(b, Polynomial):
            raise ValidationError("scale expects a rational factor")
        return a.scale(b)
    raise ValidationError(f"Unknown polynomial operation {op!r}")


# ── Series ───────────────────────────────────────────
def linear_power_sums(coeffs: Sequence[Scalar], depth: int, weights: Sequence[Scalar]) -> Polynomial:
    """Σ_k weights[k] ⟨ξ, coeffs⟩^k for k ≤ depth."""
    form = Polynomial.linear(coeffs)
    result = Polynomial.zero(len(coeffs))
    power = Polynomial.one(len(coeffs))
    for k in range(depth + 1):
        if k:
            power = power * form
        w = Fraction(weights[k])
        if w:
            result = result + power.scale(w)
    return result


def exp_series(s: Sequence[Scalar], depth: int) -> Polynomial:
    """Taylor polynomial of e^{⟨ξ,s⟩} up to total degree ``depth``."""
    if not any(Fraction(x) for x in s):
        return Polynomial.one(len(s))
    weights = [Fraction(1, math.factorial(k)) for k in range(depth + 1)]
    return linear_power_sums(s, depth, weights)


def monomials(dim: int, degree: int) -> list[Monomial]:
    """All exponent vectors of total degree ``degree`` in ``dim`` variables."""
    out: list[Monomial] = []
    for combo in combinations_with_replacement(range(dim), degree):
        mono = [0] * dim
        for i in combo:
            mono[i] += 1
        out.append(tuple(mono))
    return out


# ── Parsing ──────────────────────────────────────────
_TERM_SPLIT = re.compile(r"([+-]?)([^+-]+)")


def parse_polynomial(text: str, dim: int, var: str = "x") -> Polynomial:
    """Parse terms ``c*x1^a*x2^b`` joined by ``+``/``-``; ``one`` means 1."""
    compact = re.sub(r"\s+", "", text or "")
    if not compact:
        raise ValidationError("Empty polynomial")
    if compact == "one":
        return Polynomial.one(dim)
    factor_re = re.compile(rf"^{re.escape(var)}(\d+)(?:\^(\d+))?$")
    terms: dict[Monomial, Fraction] = {}
    consumed = 0
    for match in _TERM_SPLIT.finditer(compact):
        if match.start() != consumed:
            raise ValidationError(f"Cannot parse polynomial {text!r}")
        consumed = match.end()
        sign = -1 if match.group(1) == "-" else 1
        coef = Fraction(sign)
        mono = [0] * dim
        for factor in match.group(2).split("*"):
            if not factor:
                raise ValidationError(f"Empty factor in {text!r}")
            var_match = factor_re.match(factor)
            if var_match:
                index = int(var_match.group(1)) - 1
                if not 0 <= index < dim:
                    raise ValidationError(f"Variable {factor!r} outside dimension {dim}")
                mono[index] += int(var_match.group(2) or 1)
            elif re.fullmatch(r"\d+(?:/\d+)?", factor):
                coef *= parse_rational(factor)
            else:
                raise ValidationError(f"Cannot parse factor {factor!r} in {text!r}")
        key = tuple(mono)
        terms[key] = terms.get(key, Fraction(0)) + coef
    if consumed != len(compact):
        raise ValidationError(f"Cannot parse polynomial {text!r}")
    return Polynomial(dim, terms)
