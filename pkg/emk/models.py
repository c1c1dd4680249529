from __future__ import annotations

from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from emk.algebra import Polynomial, format_rational, parse_polynomial, parse_rational
from emk.errors import ValidationError
from emk.hyperfrac import ScalarProduct
from emk.polyhedra import AffineCone, Cone, Polyhedron


def _rational(v: object) -> str:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise ValueError(f"Expected a rational as 'p/q' string or integer, got {v!r}")
    try:
        return format_rational(parse_rational(v))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"Invalid rational {v!r}") from exc


def _rational_rows(rows: list[list[object]]) -> list[list[str]]:
    return [[_rational(x) for x in row] for row in rows]


def _fractions(row: list[str]) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in row)


# ── Polyhedron ───────────────────────────────────────
class InequalitySpec(BaseModel):
    a: list[int]
    b: str

    @field_validator("b", mode="before")
    @classmethod
    def validate_b(cls, v: object) -> str:
        return _rational(v)


class PolyhedronSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dim: int
    inequalities: Optional[list[InequalitySpec]] = None
    vertices: Optional[list[list[str]]] = None
    rays: list[list[str]] = []
    lines: list[list[str]] = []

    @field_validator("dim")
    @classmethod
    def validate_dim(cls, v: int) -> int:
        if v < 1:
            raise ValueError("Dimension must be at least 1")
        return v

    @field_validator("vertices", "rays", "lines", mode="before")
    @classmethod
    def validate_rows(cls, v: object) -> object:
        if v is None:
            return v
        if not isinstance(v, list) or not all(isinstance(row, list) for row in v):
            raise ValueError("Expected a list of coordinate lists")
        return _rational_rows(v)

    @model_validator(mode="after")
    def validate_shape(self) -> PolyhedronSpec:
        if (self.inequalities is None) == (self.vertices is None):
            raise ValueError("Give either 'inequalities' or 'vertices' (with optional 'rays' and 'lines')")
        rows = [i.a for i in self.inequalities or []] + (self.vertices or []) + self.rays + self.lines
        if any(len(row) != self.dim for row in rows):
            raise ValueError(f"Every vector must have {self.dim} coordinates")
        return self

    def build(self) -> Polyhedron:
        if self.inequalities is not None:
            return Polyhedron(self.dim, [(i.a, Fraction(i.b)) for i in self.inequalities])
        return Polyhedron.from_generators(
            self.dim,
            [_fractions(v) for v in self.vertices or []],
            [_fractions(r) for r in self.rays],
            [_fractions(l) for l in self.lines],
        )


# ── Cone ─────────────────────────────────────────────
class ConeSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dim: int
    vertex: Optional[list[str]] = None
    rays: list[list[str]]

    @field_validator("vertex", mode="before")
    @classmethod
    def validate_vertex(cls, v: object) -> object:
        if v is None:
            return v
        if not isinstance(v, list):
            raise ValueError("Vertex must be a coordinate list")
        return [_rational(x) for x in v]

    @field_validator("rays", mode="before")
    @classmethod
    def validate_rays(cls, v: object) -> object:
        if not isinstance(v, list) or not all(isinstance(row, list) for row in v):
            raise ValueError("Rays must be a list of coordinate lists")
        return _rational_rows(v)

    @model_validator(mode="after")
    def validate_shape(self) -> ConeSpec:
        rows = self.rays + ([self.vertex] if self.vertex is not None else [])
        if any(len(row) != self.dim for row in rows):
            raise ValueError(f"Every vector must have {self.dim} coordinates")
        return self

    def build(self) -> AffineCone:
        vertex = _fractions(self.vertex) if self.vertex is not None else (Fraction(0),) * self.dim
        rays = [_fractions(r) for r in self.rays]
        cone = Cone.from_generators(rays, self.dim) if rays else Cone(self.dim, ())
        return AffineCone(vertex, cone)


# ── Scalar product ───────────────────────────────────
class ScalarProductSpec(BaseModel):
    matrix: list[list[str]]

    @field_validator("matrix", mode="before")
    @classmethod
    def validate_matrix(cls, v: object) -> object:
        if not isinstance(v, list) or not all(isinstance(row, list) for row in v):
            raise ValueError("Matrix must be a list of rows")
        return _rational_rows(v)

    def build(self, dim: int) -> ScalarProduct:
        q = ScalarProduct.of([_fractions(row) for row in self.matrix])
        if q.dim != dim:
            raise ValidationError(f"Scalar product of dimension {q.dim} for data in dimension {dim}")
        return q


# ── Expansion documents ──────────────────────────────
class TermSpec(BaseModel):
    k: int
    face: list[int]
    face_dim: int
    m: int
    operator: Optional[str] = None
    operators: dict[str, str] = {}
    step_coefficient: Optional[str] = None

    @field_validator("operators", mode="before")
    @classmethod
    def validate_operators(cls, v: object) -> object:
        if not isinstance(v, dict):
            raise ValueError("Operators must map t values to polynomials")
        return {_rational(t): op for t, op in v.items()}

    def operator_at(self, dim: int, t: Fraction | None) -> Polynomial:
        """Operator symbol as a polynomial in d1..dn, for dilation ``t`` when the document is t-dependent."""
        if self.operator is not None:
            return parse_polynomial(self.operator, dim, "d")
        key = format_rational(t) if t is not None else None
        if key not in self.operators:
            raise ValidationError(f"Terms document has no operator for t={key} on face {self.face}")
        return parse_polynomial(self.operators[key], dim, "d")


class ExpansionDocument(BaseModel):
    dim: int
    mode: str
    order: int
    polyhedron: PolyhedronSpec
    scalar_product: list[list[str]]
    terms: list[TermSpec]

    @field_validator("order")
    @classmethod
    def validate_order(cls, v: int) -> int:
        if v < 0:
            raise ValueError("Order must be non-negative")
        return v

    @field_validator("scalar_product", mode="before")
    @classmethod
    def validate_scalar_product(cls, v: object) -> object:
        if not isinstance(v, list):
            raise ValueError("Scalar product must be a matrix")
        return _rational_rows(v)
