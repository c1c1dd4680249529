"""
Rational functions with poles on a hyperplane arrangement.

A ``HyperFraction`` is P(ξ) / ∏⟨ξ, v_j⟩^{n_j} with the v_j stored as canonical
primitive integer vectors (first non-zero entry positive). Such a function
splits uniquely as a sum over subspaces L spanned by pole forms of pieces
(polynomial in the Q-orthogonal complement of L) × (pure fraction with poles
spanning L). ``decompose_general`` computes that splitting, and
``renormalize`` keeps the L = {0} piece.

Two independent algorithms are provided:
  * the general path rewrites dependent denominators into independent ones
    and then peels off, for each denominator, the part of the numerator that
    factors through the Q-orthogonal projection;
  * the simple-pole path (independent forms, multiplicity one) uses the
    recursion P_J = R_Q(P/∏_{k∉J} v_k restricted to L_J^⊥).
Both must agree wherever the second applies.

``MeromorphicGerm`` carries a truncated Taylor numerator over such a
denominator; its homogeneous components are HyperFractions.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from loguru import logger
from sympy import Matrix

from emk.algebra import (
    Polynomial,
    Scalar,
    Vector,
    canonical_form,
    dot,
    restrict_to_subspace,
)
from emk.errors import ValidationError
from emk.linalg import (
    det,
    from_matrix,
    integer_basis,
    is_independent,
    mat_vec,
    nullspace,
    to_matrix,
    transpose,
)

IntVector = tuple[int, ...]
PoleKey = tuple[tuple[IntVector, int], ...]


# ── Scalar product ───────────────────────────────────
@lru_cache(maxsize=4096)
def _complement_projection(q: tuple[Vector, ...], basis: tuple[Vector, ...]) -> tuple[Vector, ...]:
    d = len(q)
    if not basis:
        return tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))
    qm = to_matrix(q)
    m = to_matrix(basis)
    gram = m * qm * m.T
    p = Matrix.eye(d) - m.T * gram.inv() * m * qm
    return tuple(from_matrix(p))


@dataclass(frozen=True)
class ScalarProduct:
    """Euclidean scalar product Q on V, given by a symmetric positive definite matrix."""

    matrix: tuple[Vector, ...]

    def __post_init__(self) -> None:
        d = len(self.matrix)
        if any(len(row) != d for row in self.matrix):
            raise ValidationError("Scalar product matrix must be square")
        for i in range(d):
            for j in range(i):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValidationError("Scalar product matrix must be symmetric")
        for k in range(1, d + 1):
            minor = [row[:k] for row in self.matrix[:k]]
            if det(minor) <= 0:
                raise ValidationError(
                    f"Scalar product is not positive definite (leading minor {k} is {det(minor)})"
                )

    @classmethod
    def of(cls, rows: Iterable[Iterable[Scalar]]) -> ScalarProduct:
        return cls(tuple(tuple(Fraction(x) for x in row) for row in rows))

    @classmethod
    def identity(cls, dim: int) -> ScalarProduct:
        return cls.of([[int(i == j) for j in range(dim)] for i in range(dim)])

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def __call__(self, u: Sequence[Scalar], v: Sequence[Scalar]) -> Fraction:
        return dot(u, mat_vec(self.matrix, v))

    def norm2(self, u: Sequence[Scalar]) -> Fraction:
        return self(u, u)

    def apply(self, v: Sequence[Scalar]) -> Vector:
        """Q·v, the element of V* Q-dual to v."""
        return mat_vec(self.matrix, v)

    def complement_projection(self, basis: Sequence[Sequence[Scalar]]) -> tuple[Vector, ...]:
        """Matrix of the Q-orthogonal projection of V onto C_Q(L) along L = span(basis)."""
        key = tuple(tuple(Fraction(x) for x in b) for b in basis)
        return _complement_projection(self.matrix, key)

    def dual_projection(self, basis: Sequence[Sequence[Scalar]]) -> tuple[Vector, ...]:
        """Substitution matrix for P ↦ P∘π, π the dual projection of V* onto L^⊥."""
        return tuple(transpose(self.complement_projection(basis), self.dim))

    def project(self, basis: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> Vector:
        return mat_vec(self.complement_projection(basis), v)


# ── HyperFraction ────────────────────────────────────
def _canonical_poles(
    poles: Iterable[tuple[Sequence[Scalar], int]],
) -> tuple[PoleKey, Fraction]:
    """Merge collinear forms; return the key and the scalar to absorb in the numerator."""
    factor = Fraction(1)
    merged: dict[IntVector, int] = {}
    for v, n in poles:
        if n < 0:
            raise ValidationError(f"Negative pole multiplicity {n}")
        if n == 0:
            continue
        if not any(Fraction(x) for x in v):
            raise ValidationError("Zero linear form cannot be a pole")
        form, scale = canonical_form(v)
        factor /= scale**n
        merged[form] = merged.get(form, 0) + n
    return tuple(sorted(merged.items())), factor


def _form_power_product(dim: int, poles: Iterable[tuple[Sequence[Scalar], int]]) -> Polynomial:
    result = Polynomial.one(dim)
    for v, n in poles:
        if n:
            result = result * Polynomial.linear(v) ** n
    return result


class HyperFraction:
    """P(ξ) / ∏⟨ξ, v_j⟩^{n_j} with canonical, pairwise non-collinear pole forms."""

    __slots__ = ("numerator", "poles")

    def __init__(self, numerator: Polynomial, poles: PoleKey = ()) -> None:
        self.numerator = numerator
        self.poles = poles

    @classmethod
    def build(
        cls, numerator: Polynomial, poles: Iterable[tuple[Sequence[Scalar], int]] = ()
    ) -> HyperFraction:
        key, factor = _canonical_poles(poles)
        for form, _ in key:
            if len(form) != numerator.dim:
                raise ValidationError(f"Pole form {form} does not match dimension {numerator.dim}")
        return cls(numerator.scale(factor), key)

    @classmethod
    def polynomial(cls, p: Polynomial) -> HyperFraction:
        return cls(p, ())

    # ── queries ──────────────────────────────────────
    @property
    def dim(self) -> int:
        return self.numerator.dim

    @property
    def pole_forms(self) -> list[IntVector]:
        return [form for form, _ in self.poles]

    @property
    def total_multiplicity(self) -> int:
        return sum(n for _, n in self.poles)

    @property
    def is_polynomial(self) -> bool:
        return not self.poles

    @property
    def is_zero(self) -> bool:
        return self.numerator.is_zero

    def multiplicity(self, v: Sequence[Scalar]) -> int:
        form, _ = canonical_form(v)
        return dict(self.poles).get(form, 0)

    def degree(self) -> int | None:
        """Homogeneous degree, or None if the numerator is zero or inhomogeneous."""
        if self.numerator.is_zero or not self.numerator.is_homogeneous():
            return None
        return self.numerator.degree - self.total_multiplicity

    def denominator(self) -> Polynomial:
        return _form_power_product(self.dim, self.poles)

    def numerator_over(self, poles: dict[IntVector, int]) -> Polynomial:
        """Numerator after bringing self over the larger denominator ``poles``."""
        own = dict(self.poles)
        extra = []
        for form, n in poles.items():
            k = n - own.get(form, 0)
            if k < 0:
                raise ValidationError("Target denominator does not contain the pole set")
            extra.append((form, k))
        for form in own:
            if form not in poles:
                raise ValidationError("Target denominator does not contain the pole set")
        return self.numerator * _form_power_product(self.dim, extra)

    # ── arithmetic ───────────────────────────────────
    def __add__(self, other: HyperFraction | Polynomial) -> HyperFraction:
        if isinstance(other, Polynomial):
            other = HyperFraction.polynomial(other)
        if self.dim != other.dim:
            raise ValidationError(f"Dimension mismatch: {self.dim} vs {other.dim}")
        common = dict(self.poles)
        for form, n in other.poles:
            common[form] = max(common.get(form, 0), n)
        numerator = self.numerator_over(common) + other.numerator_over(common)
        return HyperFraction(numerator, tuple(sorted(common.items())))

    def __neg__(self) -> HyperFraction:
        return HyperFraction(-self.numerator, self.poles)

    def __sub__(self, other: HyperFraction | Polynomial) -> HyperFraction:
        return self + (-other)

    def scale(self, factor: Scalar) -> HyperFraction:
        return HyperFraction(self.numerator.scale(factor), self.poles)

    def __mul__(self, other: HyperFraction | Polynomial | Scalar) -> HyperFraction:
        if isinstance(other, HyperFraction):
            poles = dict(self.poles)
            for form, n in other.poles:
                poles[form] = poles.get(form, 0) + n
            return HyperFraction(self.numerator * other.numerator, tuple(sorted(poles.items())))
        if isinstance(other, Polynomial):
            return HyperFraction(self.numerator * other, self.poles)
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            other = HyperFraction.polynomial(other)
        if not isinstance(other, HyperFraction):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return (self - other).is_zero

    __hash__ = None  # type: ignore[assignment]

    # ── restriction, evaluation, derivatives ─────────
    def restrict(self, basis: Sequence[Sequence[Scalar]]) -> HyperFraction:
        """Pull back along ξ = Σ t_i β_i; pole forms must stay non-zero."""
        numerator = restrict_to_subspace(self.numerator, basis)
        poles = []
        for form, n in self.poles:
            image = tuple(dot(b, form) for b in basis)
            if not any(image):
                raise ValidationError(f"Pole {form} vanishes identically on the subspace")
            poles.append((image, n))
        return HyperFraction.build(numerator, poles)

    def evaluate(self, point: Sequence[Scalar | float]) -> Fraction | float:
        den = self.denominator().evaluate(point)
        if den == 0:
            raise ValidationError(f"Point {tuple(point)} lies on a pole")
        return self.numerator.evaluate(point) / den

    def directional_derivative(self, gamma: Sequence[Scalar]) -> HyperFraction:
        """∂_γ along γ ∈ V*, available when ⟨γ, v⟩ = 0 for every pole v."""
        for form, _ in self.poles:
            if dot(gamma, form):
                raise ValidationError(f"Direction {tuple(gamma)} is not tangent to pole {form}")
        result = Polynomial.zero(self.dim)
        for i, g in enumerate(gamma):
            if g:
                result = result + self.numerator.diff(i).scale(g)
        return HyperFraction(result, self.poles)

    def format(self, var: str = "xi") -> str:
        if not self.poles:
            return self.numerator.format(var)
        den = " * ".join(
            f"({Polynomial.linear(form).format(var)})" + (f"^{n}" if n > 1 else "")
            for form, n in self.poles
        )
        return f"({self.numerator.format(var)}) / ({den})"

    def __repr__(self) -> str:
        return f"HyperFraction({self.format()})"

    def to_json(self) -> dict:
        return {
            "numerator": self.numerator.to_json("xi"),
            "poles": [{"form": list(form), "multiplicity": n} for form, n in self.poles],
        }


@dataclass(frozen=True, eq=False)
class SubspaceComponent:
    subspace_basis: tuple[IntVector, ...]
    term: HyperFraction

    @property
    def dimension(self) -> int:
        return len(self.subspace_basis)

    def to_json(self) -> dict:
        return {"subspace_basis": [list(b) for b in self.subspace_basis], **self.term.to_json()}


def perp_basis(v: Sequence[Scalar]) -> list[IntVector]:
    """Integer basis of the hyperplane {ξ ∈ V* : ⟨ξ, v⟩ = 0}."""
    return integer_basis(nullspace([v]), len(v))


def subspace_key(forms: Sequence[Sequence[Scalar]], dim: int) -> tuple[IntVector, ...]:
    return tuple(integer_basis(forms, dim))


# ── Residues ─────────────────────────────────────────
def residue(
    f: HyperFraction, v: Sequence[Scalar], basis: Sequence[Sequence[Scalar]] | None = None
) -> HyperFraction:
    """(v·f) restricted to v^⊥, in the coordinates of ``basis`` (default: ``perp_basis(v)``)."""
    form, scale = canonical_form(v)
    mult = dict(f.poles).get(form)
    if mult is None:
        raise ValidationError(f"{tuple(v)} is not a pole of {f!r}")
    if mult > 1:
        raise ValidationError(f"{tuple(v)} is a pole of multiplicity {mult}, residue needs a simple pole")
    rest = tuple((w, n) for w, n in f.poles if w != form)
    g = HyperFraction(f.numerator.scale(scale), rest)
    return g.restrict(basis if basis is not None else perp_basis(v))


# ── Division by linear forms ─────────────────────────
def _divide_by_linear(p: Polynomial, u: Sequence[Fraction], index: int) -> tuple[Polynomial, Polynomial]:
    """(q, r) with p = q·⟨ξ,u⟩ + r and r free of ξ_index; needs u[index] ≠ 0."""
    dim = p.dim
    lead = u[index]
    rest = dict(p.terms)
    quotient: dict[tuple[int, ...], Fraction] = {}
    while True:
        candidates = [m for m in rest if m[index] > 0]
        if not candidates:
            break
        mono = max(candidates, key=lambda m: (m[index], m))
        coef = rest[mono] / lead
        base = mono[:index] + (mono[index] - 1,) + mono[index + 1 :]
        quotient[base] = quotient.get(base, Fraction(0)) + coef
        for j, uj in enumerate(u):
            if not uj:
                continue
            target = base[:j] + (base[j] + 1,) + base[j + 1 :]
            value = rest.get(target, Fraction(0)) - coef * uj
            if value:
                rest[target] = value
            else:
                rest.pop(target, None)
    return Polynomial(dim, quotient), Polynomial(dim, rest)


def divide_by_forms(p: Polynomial, forms: Sequence[Sequence[Scalar]]) -> list[Polynomial]:
    """Write p = Σ ⟨ξ, v_k⟩ A_k for independent forms v_k.

    Requires p to vanish on the common zero set of the forms.
    """
    vs = [tuple(Fraction(x) for x in v) for v in forms]
    r = len(vs)
    # echelon forms u_k = Σ_l t[k][l] v_l with distinct pivots
    us: list[list[Fraction]] = []
    ts: list[list[Fraction]] = []
    pivots: list[int] = []
    for k, v in enumerate(vs):
        u = list(v)
        t = [Fraction(int(l == k)) for l in range(r)]
        for j, pj in enumerate(pivots):
            if u[pj]:
                c = u[pj] / us[j][pj]
                u = [a - c * b for a, b in zip(u, us[j])]
                t = [a - c * b for a, b in zip(t, ts[j])]
        pivot = next((i for i, x in enumerate(u) if x), None)
        if pivot is None:
            raise ValidationError("Forms are linearly dependent")
        us.append(u)
        ts.append(t)
        pivots.append(pivot)
    remainder = p
    quotients = []
    for u, pivot in zip(us, pivots):
        q, remainder = _divide_by_linear(remainder, u, pivot)
        quotients.append(q)
    if not remainder.is_zero:
        raise ValidationError("Polynomial does not vanish on the common zero set of the forms")
    result = [Polynomial.zero(p.dim) for _ in range(r)]
    for k, q in enumerate(quotients):
        for l in range(r):
            if ts[k][l]:
                result[l] = result[l] + q.scale(ts[k][l])
    return result


def _divide_exact(p: Polynomial, forms: Sequence[Sequence[Fraction]]) -> Polynomial:
    for v in forms:
        index = next(i for i, x in enumerate(v) if x)
        p, rest = _divide_by_linear(p, v, index)
        if not rest.is_zero:
            raise ValidationError("Inexact division by a linear form")
    return p


# ── General decomposition ────────────────────────────
def _relation(forms: Sequence[IntVector]) -> Vector | None:
    """A linear relation Σ c_j v_j = 0, or None when the forms are independent."""
    if not forms:
        return None
    kernel = nullspace(transpose(forms))
    return kernel[0] if kernel else None


def simple_fractions(f: HyperFraction) -> dict[PoleKey, Polynomial]:
    """Rewrite f as a sum of fractions whose pole forms are linearly independent.

    A relation Σ c_j v_j = 0 with c_{j0} ≠ 0 (j0 the smallest such index) gives
    1 = Σ_{j≠j0} (−c_j/c_{j0}) v_j / v_{j0}; multiplying by it cancels one power
    of some v_j while raising v_{j0}.
    """
    work: dict[PoleKey, Polynomial] = {f.poles: f.numerator}
    done: dict[PoleKey, Polynomial] = {}
    while work:
        key = min(work)
        numerator = work.pop(key)
        if numerator.is_zero:
            continue
        forms = [form for form, _ in key]
        rel = _relation(forms)
        if rel is None:
            done[key] = done[key] + numerator if key in done else numerator
            continue
        j0 = next(j for j, c in enumerate(rel) if c)
        mults = [n for _, n in key]
        for j, cj in enumerate(rel):
            if j == j0 or not cj:
                continue
            new_mults = list(mults)
            new_mults[j0] += 1
            new_mults[j] -= 1
            new_key = tuple((form, n) for form, n in zip(forms, new_mults) if n)
            term = numerator.scale(-cj / rel[j0])
            work[new_key] = work[new_key] + term if new_key in work else term
    return {k: v for k, v in done.items() if not v.is_zero}


def _peel(pieces: dict[PoleKey, Polynomial], q: ScalarProduct, dim: int) -> dict[tuple[IntVector, ...], HyperFraction]:
    """Split independent-pole fractions into subspace components."""
    components: dict[tuple[IntVector, ...], HyperFraction] = {}
    pending = dict(pieces)
    while pending:
        key = max(pending, key=lambda k: (sum(n for _, n in k), k))
        numerator = pending.pop(key)
        if numerator.is_zero:
            continue
        forms = [form for form, _ in key]
        if not forms:
            sub: tuple[IntVector, ...] = ()
            invariant = numerator
        else:
            invariant = numerator.compose_linear(q.dual_projection(forms), dim)
            sub = subspace_key(forms, dim)
        if not invariant.is_zero:
            term = HyperFraction(invariant, key)
            components[sub] = components[sub] + term if sub in components else term
        if not forms:
            continue
        remainder = numerator - invariant
        if remainder.is_zero:
            continue
        for k, a_k in enumerate(divide_by_forms(remainder, forms)):
            if a_k.is_zero:
                continue
            lowered = tuple(
                (form, n - 1 if i == k else n) for i, (form, n) in enumerate(key) if not (i == k and n == 1)
            )
            pending[lowered] = pending[lowered] + a_k if lowered in pending else a_k
    return components


def _sorted_components(components: dict[tuple[IntVector, ...], HyperFraction]) -> list[SubspaceComponent]:
    out = [
        SubspaceComponent(sub, term)
        for sub, term in components.items()
        if not term.is_zero
    ]
    out.sort(key=lambda c: (c.dimension, c.subspace_basis))
    return out


def decompose_general(f: HyperFraction, q: ScalarProduct) -> list[SubspaceComponent]:
    """Unique splitting of f over the subspaces spanned by its pole forms."""
    if q.dim != f.dim:
        raise ValidationError(f"Scalar product of dimension {q.dim} for fraction of dimension {f.dim}")
    if f.is_zero:
        return []
    if f.is_polynomial:
        return [SubspaceComponent((), f)]
    pieces = simple_fractions(f)
    logger.debug(f"Simple-fraction rewriting produced {len(pieces)} independent denominators")
    return _sorted_components(_peel(pieces, q, f.dim))


def renormalize(f: HyperFraction | Polynomial, q: ScalarProduct) -> Polynomial:
    """R_Q(f): the polynomial (L = {0}) component of f."""
    if isinstance(f, Polynomial):
        return f
    if f.is_polynomial:
        return f.numerator
    for component in decompose_general(f, q):
        if component.dimension == 0:
            return component.term.numerator
    return Polynomial.zero(f.dim)


# ── Simple poles ─────────────────────────────────────
def _simple_pole_parts(
    p: Polynomial, forms: Sequence[Vector], q: ScalarProduct
) -> dict[frozenset[int], Polynomial]:
    r = len(forms)
    parts: dict[frozenset[int], Polynomial] = {}
    for size in range(1, r + 1):
        for subset in combinations(range(r), size):
            basis = [forms[j] for j in subset]
            restricted = p.compose_linear(q.dual_projection(basis), p.dim)
            others = [k for k in range(r) if k not in subset]
            if others:
                projected = [q.project(basis, forms[k]) for k in others]
                restricted = _simple_pole_parts(restricted, projected, q)[frozenset()]
            parts[frozenset(subset)] = restricted
    rest = p
    for subset, part in parts.items():
        factor = _form_power_product(p.dim, [(forms[k], 1) for k in range(r) if k not in subset])
        rest = rest - part * factor
    parts[frozenset()] = _divide_exact(rest, forms)
    return parts


def decompose_simple_poles(f: HyperFraction, q: ScalarProduct) -> list[SubspaceComponent]:
    """Decomposition for independent simple poles via the subset recursion."""
    if any(n != 1 for _, n in f.poles):
        raise ValidationError("decompose_simple_poles needs simple poles; use decompose_general")
    forms = [tuple(Fraction(x) for x in form) for form in f.pole_forms]
    if forms and not is_independent(forms):
        raise ValidationError("decompose_simple_poles needs independent poles; use decompose_general")
    parts = _simple_pole_parts(f.numerator, forms, q)
    components: dict[tuple[IntVector, ...], HyperFraction] = {}
    for subset, part in parts.items():
        if part.is_zero:
            continue
        chosen = sorted(subset)
        key = tuple((f.pole_forms[j], 1) for j in chosen)
        components[subspace_key([forms[j] for j in chosen], f.dim)] = HyperFraction(part, key)
    return _sorted_components(components)


def torsion_direction(component: SubspaceComponent, dim: int) -> Vector | None:
    """A γ ∈ V* orthogonal to every pole of the component, or None when L = V."""
    if component.dimension == dim:
        return None
    if component.dimension == 0:
        return tuple(Fraction(int(i == 0)) for i in range(dim))
    return nullspace(component.subspace_basis)[0]


# ── Meromorphic germs ────────────────────────────────
class MeromorphicGerm:
    """g(ξ)/∏⟨ξ,v_j⟩^{n_j} with g known through homogeneous degree ``order + n``.

    ``numerator[k]`` is the degree-k part of g; the component of degree m is
    numerator[m + n] / ∏ poles for −n ≤ m ≤ order.
    """

    __slots__ = ("dim", "poles", "numerator")

    def __init__(self, dim: int, poles: PoleKey, numerator: tuple[Polynomial, ...]) -> None:
        self.dim = dim
        self.poles = poles
        self.numerator = numerator

    @classmethod
    def build(
        cls,
        numerator: Polynomial,
        poles: Iterable[tuple[Sequence[Scalar], int]],
        order: int,
    ) -> MeromorphicGerm:
        key, factor = _canonical_poles(poles)
        n = sum(m for _, m in key)
        if order < -n:
            raise ValidationError(f"Germ order {order} below the pole order {-n}")
        parts = numerator.scale(factor).homogeneous_parts(order + n)
        return cls(numerator.dim, key, parts)

    @property
    def total_multiplicity(self) -> int:
        return sum(n for _, n in self.poles)

    @property
    def order(self) -> int:
        return len(self.numerator) - 1 - self.total_multiplicity

    @property
    def pole_forms(self) -> list[IntVector]:
        return [form for form, _ in self.poles]

    def numerator_polynomial(self) -> Polynomial:
        return sum(self.numerator, Polynomial.zero(self.dim))

    def component(self, m: int) -> HyperFraction:
        n = self.total_multiplicity
        if not -n <= m <= self.order:
            raise ValidationError(f"Degree {m} outside the germ range [{-n}, {self.order}]")
        return HyperFraction(self.numerator[m + n], self.poles)

    homogeneous_component = component

    def __add__(self, other: MeromorphicGerm) -> MeromorphicGerm:
        if self.dim != other.dim:
            raise ValidationError(f"Dimension mismatch: {self.dim} vs {other.dim}")
        common = dict(self.poles)
        for form, n in other.poles:
            common[form] = max(common.get(form, 0), n)
        key = tuple(sorted(common.items()))
        n = sum(common.values())
        order = min(self.order, other.order)
        total = Polynomial.zero(self.dim)
        for germ in (self, other):
            own = dict(germ.poles)
            extra = _form_power_product(self.dim, [(f, common[f] - own.get(f, 0)) for f in common])
            total = total + germ.numerator_polynomial().mul_truncated(extra, order + n)
        return MeromorphicGerm(self.dim, key, total.homogeneous_parts(order + n))

    def scale(self, factor: Scalar) -> MeromorphicGerm:
        return MeromorphicGerm(self.dim, self.poles, tuple(p.scale(factor) for p in self.numerator))

    def __neg__(self) -> MeromorphicGerm:
        return self.scale(-1)

    def multiply_series(self, series: Polynomial, series_depth: int | None = None) -> MeromorphicGerm:
        """Product with a holomorphic series known through degree ``series_depth``."""
        n = self.total_multiplicity
        order = self.order
        if series_depth is not None:
            order = min(order, series_depth - n)
        product = self.numerator_polynomial().mul_truncated(series, order + n)
        return MeromorphicGerm(self.dim, self.poles, product.homogeneous_parts(order + n))

    def compose_linear(self, matrix: Sequence[Sequence[Scalar]], target_dim: int) -> MeromorphicGerm:
        """Pull back along ξ = M η (ξ_i = Σ_j M[i][j] η_j)."""
        numerator = tuple(p.compose_linear(matrix, target_dim) for p in self.numerator)
        poles = []
        for form, n in self.poles:
            image = tuple(sum((Fraction(matrix[i][j]) * form[i] for i in range(self.dim)), Fraction(0)) for j in range(target_dim))
            if not any(image):
                raise ValidationError(f"Pole {form} vanishes after the linear change of variables")
            poles.append((image, n))
        key, factor = _canonical_poles(poles)
        return MeromorphicGerm(target_dim, key, tuple(p.scale(factor) for p in numerator))

    def residue(self, v: Sequence[Scalar], basis: Sequence[Sequence[Scalar]] | None = None) -> MeromorphicGerm:
        """Res_v of the germ, in the coordinates of ``basis`` of v^⊥."""
        form, scale = canonical_form(v)
        mult = dict(self.poles).get(form)
        if mult is None:
            raise ValidationError(f"{tuple(v)} is not a pole of the germ")
        if mult > 1:
            raise ValidationError(f"{tuple(v)} is a pole of multiplicity {mult}")
        basis = basis if basis is not None else perp_basis(v)
        rest = [(w, n) for w, n in self.poles if w != form]
        numerator = tuple(restrict_to_subspace(p.scale(scale), basis) for p in self.numerator)
        poles = []
        for w, n in rest:
            image = tuple(dot(b, w) for b in basis)
            poles.append((image, n))
        key, factor = _canonical_poles(poles)
        return MeromorphicGerm(len(basis), key, tuple(p.scale(factor) for p in numerator))

    def evaluate(self, point: Sequence[float]) -> float:
        """Value of the truncated Laurent data at a point off the poles."""
        den = 1.0
        for form, n in self.poles:
            value = sum(float(c) * x for c, x in zip(form, point))
            if value == 0:
                raise ValidationError(f"Point {tuple(point)} lies on pole {form}")
            den *= value**n
        return sum(p.evaluate_float(point) for p in self.numerator) / den

    def to_json(self) -> dict:
        return {
            "poles": [{"form": list(form), "multiplicity": n} for form, n in self.poles],
            "order": self.order,
            "numerator": [p.to_json("xi") for p in self.numerator],
        }


def renormalize_germ(g: MeromorphicGerm, q: ScalarProduct, order: int) -> tuple[Polynomial, ...]:
    """R_Q applied degree by degree: components of degree 0..order."""
    if order > g.order:
        raise ValidationError(f"Germ known through degree {g.order}, {order} requested")
    return tuple(renormalize(g.component(m), q) for m in range(order + 1))
