"""
Asymptotic expansion of Riemann sums over dilated polyhedra.

For a rational polyhedron P of dimension ℓ and a test function h,

    t^{−ℓ} Σ_{x ∈ tP ∩ ℤ^d} h(x/t)  ~  Σ_k t^{−k} Σ_{(f, m)} ∫_f μ(t·𝔱(P,f))_{[m]}(∂) h dm_f,

the inner sum running over faces f and degrees m with m + ℓ − dim f = k.
For lattice P and integer t the symbols do not depend on t ("integer" mode);
in "rational-t" mode they are recomputed from μ(t·𝔱(P,f)) at every t. For
polynomial h the expansion is finite and exact.

A numeric path (``SmoothTestFunction``) handles smooth compactly supported h
given as a sympy expression; it is only used for decay checks.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import product
from threading import Lock

import sympy
from loguru import logger

from emk.algebra import Polynomial, Scalar, Vector, format_rational, frac_part
from emk.bernoulli import bernoulli, bernoulli_value
from emk.errors import ValidationError
from emk.hyperfrac import ScalarProduct
from emk.integration import Box, face_integral, face_integral_numeric
from emk.linalg import coordinates, rank
from emk.mu import MuFunction, mu_at_dilation
from emk.polyhedra import AffineCone, Face, Polyhedron, transverse_cone
from emk.steppoly import Const, StepPolynomialExpr, bernoulli_step, step_poly_eval
from emk.workers import parallel_map


# ── Modes ────────────────────────────────────────────
class ExpansionMode(str, Enum):
    INTEGER = "integer"        # lattice P, integer t: symbols fixed
    RATIONAL_T = "rational-t"  # symbols recomputed from μ(t·𝔱) at each t


INTEGER = ExpansionMode.INTEGER
RATIONAL_T = ExpansionMode.RATIONAL_T


def _positive(t: Scalar) -> Fraction:
    t = Fraction(t)
    if t <= 0:
        logger.error(f"Rejected dilation parameter {t}")
        raise ValidationError(f"Dilation parameter must be positive, got {format_rational(t)}")
    return t


def check_dilation(mode: ExpansionMode | str, t: Scalar) -> Fraction:
    """Positive t, and integral in integer mode where the symbols are those of t = 1."""
    t = _positive(t)
    if ExpansionMode(mode) is INTEGER and t.denominator != 1:
        logger.error(f"Rejected fractional dilation {format_rational(t)} in integer mode")
        raise ValidationError(
            f"Integer-mode expansions need an integer dilation, got {format_rational(t)}; use mode rational-t"
        )
    return t


# ── Terms ────────────────────────────────────────────
@dataclass(eq=False)
class FaceSymbol:
    """μ(t·𝔱(P,f)) for one face, memoized per t."""

    face: Face
    transverse: AffineCone
    scalar_product: ScalarProduct
    depth: int
    dilates: bool
    projection: tuple[Vector, ...]
    _cache: dict[Fraction, MuFunction] = field(default_factory=dict, repr=False)
    _lock: Lock = field(default_factory=Lock, repr=False)

    def mu(self, t: Scalar = 1) -> MuFunction:
        key = Fraction(t) if self.dilates else Fraction(1)
        with self._lock:
            cached = self._cache.get(key)
        if cached is None:
            cached = mu_at_dilation(self.transverse, key, self.scalar_product, self.depth)
            with self._lock:
                self._cache.setdefault(key, cached)
        return cached

    def operator(self, m: int, t: Scalar = 1) -> Polynomial:
        """μ_{[m]} read on the Q-normal directions of the face."""
        return self.mu(t).component(m).compose_linear(self.projection)


@dataclass(frozen=True, eq=False)
class ExpansionTerm:
    order: int
    face: Face
    m: int
    symbol: FaceSymbol

    @property
    def transverse(self) -> AffineCone:
        return self.symbol.transverse

    @property
    def operator(self) -> Polynomial:
        return self.symbol.operator(self.m)

    def operator_at(self, t: Scalar) -> Polynomial:
        return self.symbol.operator(self.m, t)

    def to_json(self, ts: Sequence[Scalar] = ()) -> dict:
        data = {"k": self.order, "face": list(self.face.key), "face_dim": self.face.dim, "m": self.m}
        if not self.symbol.dilates:
            data["operator"] = self.operator.to_json("d")
            return data
        data["operators"] = {format_rational(t): self.operator_at(t).to_json("d") for t in ts}
        if has_step_form(self.transverse):
            step = mu_dim1_step(self.transverse, self.m)
            data["step_coefficient"] = step.coefficient.format()
            data["direction"] = [format_rational(x) for x in step.direction]
        return data


@dataclass(frozen=True, eq=False)
class Expansion:
    polyhedron: Polyhedron
    scalar_product: ScalarProduct
    max_order: int
    mode: ExpansionMode
    terms: tuple[ExpansionTerm, ...]

    def __iter__(self) -> Iterator[ExpansionTerm]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def of_order(self, k: int) -> list[ExpansionTerm]:
        return [term for term in self.terms if term.order == k]

    def coefficient(self, k: int, h: Polynomial, t: Scalar = 1) -> Fraction:
        """⟨F_k, h⟩ (at dilation t in rational-t mode)."""
        t = check_dilation(self.mode, t)
        return sum((_term_integral(self.polyhedron, term, h, t) for term in self.of_order(k)), Fraction(0))

    def to_json(self, ts: Sequence[Scalar] = ()) -> dict:
        return {
            "dim": self.polyhedron.dim_ambient,
            "mode": self.mode.value,
            "order": self.max_order,
            "polyhedron": self.polyhedron.to_json(),
            "scalar_product": [[format_rational(x) for x in row] for row in self.scalar_product.matrix],
            "terms": [term.to_json(ts) for term in self.terms],
        }


def expansion_terms(
    p: Polyhedron, q: ScalarProduct | None = None, max_order: int = 2, mode: ExpansionMode | str = INTEGER
) -> Expansion:
    """All terms of order k ≤ max_order, sorted by (k, face, m)."""
    if max_order < 0:
        raise ValidationError(f"Expansion order must be non-negative, got {max_order}")
    try:
        mode = ExpansionMode(mode)
    except ValueError as exc:
        expected = ", ".join(m.value for m in ExpansionMode)
        raise ValidationError(f"Unknown mode {mode!r}; expected one of {expected}") from exc
    d = p.dim_ambient
    q = q or ScalarProduct.identity(d)
    if q.dim != d:
        raise ValidationError(f"Scalar product of dimension {q.dim} for a polyhedron in dimension {d}")
    if mode == INTEGER and not p.is_lattice:
        logger.error("Integer mode requested for a polyhedron that is not a lattice polyhedron")
        raise ValidationError("Integer mode needs a lattice polyhedron; use --mode rational-t")
    ell = p.dimension

    symbols: list[FaceSymbol] = []
    for f in p.faces:
        depth = max_order - ell + f.dim
        if depth < 0:
            continue
        tc, _ = transverse_cone(p, f, q)
        symbols.append(FaceSymbol(f, tc, q, depth, mode == RATIONAL_T, q.dual_projection(f.span_basis)))
    if mode == INTEGER:
        parallel_map(lambda s: s.mu(), symbols)

    terms: list[ExpansionTerm] = []
    for symbol in symbols:
        for m in range(symbol.depth + 1):
            if mode == INTEGER and symbol.operator(m).is_zero:
                continue
            terms.append(ExpansionTerm(m + ell - symbol.face.dim, symbol.face, m, symbol))
    terms.sort(key=lambda term: (term.order, term.face.key, term.m))
    logger.info(f"Expansion through order {max_order} ({mode}): {len(terms)} terms over {len(symbols)} faces")
    return Expansion(p, q, max_order, mode, tuple(terms))


def _term_integral(p: Polyhedron, term: ExpansionTerm, h: Polynomial, t: Fraction) -> Fraction:
    operator = term.operator_at(t)
    if operator.is_zero:
        return Fraction(0)
    g = operator.apply_as_operator(h)
    if g.is_zero:
        return Fraction(0)
    return face_integral(p, term.face, g)


def evaluate_expansion(expansion: Expansion, h: Polynomial, t: Scalar) -> Fraction:
    """Σ_k t^{−k} Σ_{(f,m)} ∫_f μ_{[m]}(∂)h dm_f, exactly."""
    t = check_dilation(expansion.mode, t)
    if h.dim != expansion.polyhedron.dim_ambient:
        raise ValidationError(f"Test function in {h.dim} variables for a polyhedron in dimension {expansion.polyhedron.dim_ambient}")
    values = parallel_map(lambda term: _term_integral(expansion.polyhedron, term, h, t) / t**term.order, expansion.terms)
    return sum(values, Fraction(0))


# ── Riemann sums ─────────────────────────────────────
@dataclass(frozen=True)
class RiemannSumResult:
    t: Fraction
    value: Fraction | float
    point_count: int

    def to_json(self) -> dict:
        value = format_rational(self.value) if isinstance(self.value, Fraction) else self.value
        return {"t": format_rational(self.t), "value": value, "points": self.point_count}


def _slab_ranges(lo: Sequence[Scalar], hi: Sequence[Scalar], t: Fraction) -> list[range]:
    return [range(math.ceil(l * t), math.floor(u * t) + 1) for l, u in zip(lo, hi)]


def riemann_sum_oracle(p: Polyhedron, h: Polynomial, t: Scalar) -> RiemannSumResult:
    """t^{−ℓ} Σ_{x ∈ tP ∩ ℤ^d} h(x/t) by enumeration."""
    t = _positive(t)
    if not p.is_bounded:
        raise ValidationError("Riemann sums of polynomials need a bounded polyhedron")
    lo, hi = p.bounding_box()
    ranges = _slab_ranges(lo, hi, t)

    def slab(x0: int) -> tuple[Fraction, int]:
        total, count = Fraction(0), 0
        for x in product([x0], *ranges[1:]):
            if p.contains_dilated(x, t):
                total += h.evaluate(tuple(Fraction(c) / t for c in x))
                count += 1
        return total, count

    parts = parallel_map(slab, ranges[0])
    value = sum((v for v, _ in parts), Fraction(0)) / t**p.dimension
    count = sum(c for _, c in parts)
    logger.debug(f"Riemann sum at t={format_rational(t)}: {count} lattice points")
    return RiemannSumResult(t, value, count)


# ── Smooth test functions ────────────────────────────
@dataclass(frozen=True, eq=False)
class SmoothTestFunction:
    """h given by a sympy expression, zero outside ``inside`` and the support box."""

    expression: sympy.Expr
    symbols: tuple[sympy.Symbol, ...]
    box: Box
    inside: Callable[[Sequence[float]], bool] | None = None
    _derivatives: dict[tuple[int, ...], Callable] = field(default_factory=dict, repr=False)

    @classmethod
    def from_sympy(
        cls,
        expression: sympy.Expr,
        symbols: Sequence[sympy.Symbol],
        box: Box,
        inside: Callable[[Sequence[float]], bool] | None = None,
    ) -> SmoothTestFunction:
        lo, hi = box
        if len(lo) != len(symbols) or len(hi) != len(symbols):
            raise ValidationError("Support box does not match the number of variables")
        return cls(expression, tuple(symbols), (tuple(map(Fraction, lo)), tuple(map(Fraction, hi))), inside)

    @property
    def dim(self) -> int:
        return len(self.symbols)

    def _raw(self, alpha: tuple[int, ...]) -> Callable:
        fn = self._derivatives.get(alpha)
        if fn is None:
            orders = [(s, a) for s, a in zip(self.symbols, alpha) if a]
            expr = sympy.diff(self.expression, *orders) if orders else self.expression
            fn = sympy.lambdify(self.symbols, expr, "math")
            self._derivatives[alpha] = fn
        return fn

    def derivative(self, alpha: Sequence[int]) -> Callable[[Sequence[float]], float]:
        raw = self._raw(tuple(alpha))
        lo, hi = (tuple(float(x) for x in b) for b in self.box)

        def call(x: Sequence[float]) -> float:
            if any(not l <= c <= u for c, l, u in zip(x, lo, hi)):
                return 0.0
            if self.inside is not None and not self.inside(x):
                return 0.0
            return float(raw(*x))

        return call

    def __call__(self, x: Sequence[float]) -> float:
        return self.derivative((0,) * self.dim)(x)

    def apply_operator(self, operator: Polynomial) -> Callable[[Sequence[float]], float]:
        parts = [(float(c), self.derivative(mono)) for mono, c in operator.terms.items()]
        return lambda x: sum(c * fn(x) for c, fn in parts)


def polynomial_bump(dim: int, radius: Scalar = 1, power: int = 4, factor: sympy.Expr | int = 1) -> SmoothTestFunction:
    """factor · (1 − ‖x‖²/r²)^power on the open ball of radius r, zero outside."""
    xs = sympy.symbols(f"x1:{dim + 1}")
    r = sympy.Rational(Fraction(radius).numerator, Fraction(radius).denominator)
    expression = sympy.sympify(factor) * (1 - sum(x**2 for x in xs) / r**2) ** power
    r2 = float(r) ** 2
    box = ((-Fraction(radius),) * dim, (Fraction(radius),) * dim)
    return SmoothTestFunction.from_sympy(expression, xs, box, lambda x: sum(c * c for c in x) < r2)


def riemann_sum_numeric(p: Polyhedron, h: SmoothTestFunction, t: Scalar) -> RiemannSumResult:
    """t^{−ℓ} Σ h(x/t) over tP ∩ ℤ^d ∩ t·box, in floating point."""
    t = _positive(t)
    lo, hi = h.box
    ranges = _slab_ranges(lo, hi, t)
    tf = float(t)

    def slab(x0: int) -> tuple[float, int]:
        total, count = 0.0, 0
        for x in product([x0], *ranges[1:]):
            if p.contains_dilated(x, t):
                total += h([c / tf for c in x])
                count += 1
        return total, count

    parts = parallel_map(slab, ranges[0])
    value = sum(v for v, _ in parts) / tf**p.dimension
    return RiemannSumResult(t, value, sum(c for _, c in parts))


def coefficients_numeric(expansion: Expansion, h: SmoothTestFunction, t: Scalar = 1) -> dict[int, float]:
    """⟨F_k, h⟩ for k ≤ max_order through adaptive quadrature."""
    p = expansion.polyhedron
    t = check_dilation(expansion.mode, t)

    def value(term: ExpansionTerm) -> float:
        operator = term.operator_at(t)
        if operator.is_zero:
            return 0.0
        return face_integral_numeric(p, term.face, h.apply_operator(operator), h.box)

    values = parallel_map(value, expansion.terms)
    out = {k: 0.0 for k in range(expansion.max_order + 1)}
    for term, v in zip(expansion.terms, values):
        out[term.order] += v
    return out


def evaluate_expansion_numeric(expansion: Expansion, h: SmoothTestFunction, t: Scalar) -> float:
    tf = float(_positive(t))
    return sum(c * tf**-k for k, c in coefficients_numeric(expansion, h, t).items())


# ── Closed forms ─────────────────────────────────────
def _require_lattice_polytope(p: Polyhedron) -> None:
    if not p.is_bounded:
        raise ValidationError("A bounded polyhedron is required")
    if not p.is_lattice:
        logger.error("Closed-form law requested for a non-lattice polytope")
        raise ValidationError("The closed form holds for lattice polytopes only")


def _facets(p: Polyhedron) -> list[Face]:
    return [f for f in p.faces if f.dim == p.dimension - 1]


def first_order_law(p: Polyhedron, h: Polynomial) -> Fraction:
    """(1/2) ∫_{∂P} h."""
    _require_lattice_polytope(p)
    return sum((face_integral(p, f, h) for f in _facets(p)), Fraction(0)) / 2


def is_delzant(p: Polyhedron) -> bool:
    if not p.is_bounded or not p.is_lattice:
        return False
    for f in p.faces:
        if f.dim != 0:
            continue
        tc, _ = transverse_cone(p, f)
        if not tc.cone.is_unimodular(tc.lattice):
            return False
    return True


def delzant_second_order(p: Polyhedron, q: ScalarProduct | None = None, h: Polynomial | None = None) -> Fraction:
    """−(1/12) Σ_facets ∫ ∂_u h + Σ_{codim 2} C_f ∫_f h, C_f = 1/4 + (1/12) Q(u¹,u²)(1/‖u¹‖² + 1/‖u²‖²)."""
    d = p.dim_ambient
    q = q or ScalarProduct.identity(d)
    h = h if h is not None else Polynomial.one(d)
    if not is_delzant(p):
        logger.error("Delzant closed form requested for a non-Delzant polytope")
        raise ValidationError("Polytope is not Delzant (simple with unimodular vertex cones)")
    ell = p.dimension
    total = Fraction(0)
    for f in p.faces:
        if f.dim == ell - 1:
            tc, _ = transverse_cone(p, f, q)
            (u,) = tc.cone.generators
            total -= face_integral(p, f, Polynomial.linear(u).apply_as_operator(h)) / 12
        elif f.dim == ell - 2:
            tc, _ = transverse_cone(p, f, q)
            u1, u2 = tc.cone.generators
            c = Fraction(1, 4) + q(u1, u2) * (1 / q.norm2(u1) + 1 / q.norm2(u2)) / 12
            total += c * face_integral(p, f, h)
    return total


def ehrhart_polynomial(p: Polyhedron, q: ScalarProduct | None = None) -> tuple[Fraction, ...]:
    """Coefficients of |tP ∩ ℤ^d| from t^ℓ down to t^0, integer t."""
    if not p.is_bounded:
        raise ValidationError("Ehrhart polynomials need a bounded polyhedron")
    ell = p.dimension
    expansion = expansion_terms(p, q, ell, INTEGER)
    one = Polynomial.one(p.dim_ambient)
    return tuple(expansion.coefficient(k, one) for k in range(ell + 1))


def ehrhart_quasi_values(p: Polyhedron, ts: Sequence[Scalar], q: ScalarProduct | None = None) -> list[Fraction]:
    """|tP ∩ ℤ^d| at rational t from the rational-t expansion with h = 1."""
    if not p.is_bounded:
        raise ValidationError("Ehrhart counts need a bounded polyhedron")
    ell = p.dimension
    expansion = expansion_terms(p, q, ell, RATIONAL_T)
    one = Polynomial.one(p.dim_ambient)
    return [Fraction(t) ** ell * evaluate_expansion(expansion, one, t) for t in map(_positive, ts)]


# ── Dimension one ────────────────────────────────────
@dataclass(frozen=True)
class StepMu:
    """μ(t·tc)_{[m]} = coefficient(t) · ⟨ξ,u⟩^m for a one-dimensional transverse cone."""

    coefficient: StepPolynomialExpr
    direction: Vector
    m: int

    @property
    def operator(self) -> Polynomial:
        return Polynomial.linear(self.direction) ** self.m

    def evaluate(self, t: Scalar) -> Polynomial:
        return self.operator.scale(step_poly_eval(self.coefficient, t))

    def to_json(self) -> dict:
        return {"m": self.m, "coefficient": self.coefficient.format(), "direction": [format_rational(x) for x in self.direction]}


def has_step_form(tc: AffineCone) -> bool:
    lattice_rank = tc.dim if tc.lattice is None else rank(tc.lattice)
    return len(tc.cone.generators) == 1 and lattice_rank == 1


def mu_dim1_step(tc: AffineCone, m: int) -> StepMu:
    """Step-polynomial form of −B_{m+1}({−ct})/(m+1)! for tc = c·u + ℝ≥0 u."""
    if m < 0:
        raise ValidationError(f"Degree must be non-negative, got {m}")
    if not has_step_form(tc):
        raise ValidationError("Step-polynomial μ is available for one-dimensional transverse cones only")
    (u,) = tc.cone.generators
    coords = coordinates([u], tc.vertex)
    if coords is None:
        raise ValidationError("Cone vertex does not lie on the line of its generator")
    (c,) = coords
    coefficient = Const(Fraction(-1, math.factorial(m + 1))) * bernoulli_step(m + 1, -c)
    return StepMu(coefficient, u, m)


@dataclass(frozen=True)
class DimOneEML:
    expansion: Fraction
    remainder: Fraction
    riemann_sum: Fraction

    def to_json(self) -> dict:
        return {key: format_rational(getattr(self, key)) for key in ("expansion", "remainder", "riemann_sum")}


def _endpoint_terms(h: Polynomial, s: Fraction, upper: Fraction, t: Fraction, k: int) -> Fraction:
    """(B_k({−ts}) h^{(k−1)}(s) − (−1)^k B_k({tM}) h^{(k−1)}(M)) / k!"""
    dh = h.diff(0, k - 1)
    left = bernoulli_value(k, frac_part(-t * s)) * dh.evaluate((s,))
    right = (-1) ** k * bernoulli_value(k, frac_part(t * upper)) * dh.evaluate((upper,))
    return (left - right) / math.factorial(k)


def _periodic_integral(h: Polynomial, s: Fraction, upper: Fraction, t: Fraction, n: int) -> Fraction:
    """∫_s^M B_n({−tx}) h^{(n)}(x) dx, piece by piece between the points of ℤ/t."""
    dh = h.diff(0, n)
    if dh.is_zero:
        return Fraction(0)
    _, bn = bernoulli(n)
    cuts = [Fraction(j) / t for j in range(math.floor(t * s) + 1, math.ceil(t * upper))]
    points = [s, *cuts, upper]
    total = Fraction(0)
    for a, b in zip(points, points[1:]):
        if a == b:
            continue
        j = math.ceil(t * (a + b) / 2)
        integrand = (bn.compose_affine([[-t]], [j]) * dh).antiderivative(0)
        total += integrand.evaluate((b,)) - integrand.evaluate((a,))
    return total


def dim1_euler_maclaurin(s: Scalar, h: Polynomial, t: Scalar, n: int, upper: Scalar) -> DimOneEML:
    """Both sides of the order-n formula for (1/t) Σ_{ts ≤ x ≤ tM} h(x/t), M = ``upper``.

    expansion = ∫_s^M h − Σ_{k<n} t^{−k} E_k and
    remainder = −t^{−n} (E_n + (1/n!) ∫_s^M B_n({−tx}) h^{(n)}(x) dx),
    E_k the endpoint terms at s and M.
    """
    if n < 1:
        raise ValidationError(f"Order must be at least 1, got {n}")
    if h.dim != 1:
        raise ValidationError(f"Expected a polynomial in one variable, got {h.dim}")
    s, upper, t = Fraction(s), Fraction(upper), _positive(t)
    if upper < s:
        raise ValidationError(f"Empty window [{format_rational(s)}, {format_rational(upper)}]")
    primitive_h = h.antiderivative(0)
    integral = primitive_h.evaluate((upper,)) - primitive_h.evaluate((s,))
    expansion = integral - sum(
        (_endpoint_terms(h, s, upper, t, k) / t**k for k in range(1, n)), Fraction(0)
    )
    remainder = -(
        _endpoint_terms(h, s, upper, t, n) + _periodic_integral(h, s, upper, t, n) / math.factorial(n)
    ) / t**n
    points = range(math.ceil(t * s), math.floor(t * upper) + 1)
    riemann = sum((h.evaluate((Fraction(x) / t,)) for x in points), Fraction(0)) / t
    return DimOneEML(expansion, remainder, riemann)
