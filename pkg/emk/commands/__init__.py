"""
Command-line jobs. Every command module exposes ``run(job) -> dict`` and
``render(doc) -> str`` (the table format).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from loguru import logger

from emk.asymptotics import check_dilation
from emk.errors import ValidationError
from emk.hyperfrac import ScalarProduct
from emk.models import ConeSpec, ExpansionDocument, PolyhedronSpec, ScalarProductSpec
from emk.polyhedra import AffineCone, Polyhedron


@dataclass
class JobSpec:
    command: str
    polyhedron: Optional[Path] = None
    cone: Optional[Path] = None
    terms: Optional[Path] = None
    scalar_product: Optional[Path] = None
    order: int = 2
    ts: list[Fraction] = field(default_factory=list)
    h: str = "one"
    mode: str = "integer"
    output: Optional[Path] = None
    format: str = "json"

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ValidationError(f"--order must be non-negative, got {self.order}")
        bad = [t for t in self.ts if t <= 0]
        if bad:
            raise ValidationError(f"--t values must be positive, got {bad[0]}")


def _read_json(path: Path) -> object:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"Cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"Malformed JSON in {path}: {exc.msg} (line {exc.lineno})") from exc


def load_polyhedron(job: JobSpec) -> Polyhedron:
    if job.polyhedron is None:
        raise ValidationError(f"{job.command} needs --polyhedron")
    p = PolyhedronSpec.model_validate(_read_json(job.polyhedron)).build()
    logger.info(f"Loaded polyhedron: dim {p.dimension} in ℝ^{p.dim_ambient}, {len(p.inequalities)} facets")
    return p


def load_cone(job: JobSpec) -> AffineCone:
    if job.cone is None:
        raise ValidationError(f"{job.command} needs --cone")
    a = ConeSpec.model_validate(_read_json(job.cone)).build()
    logger.info(f"Loaded cone with {len(a.cone.generators)} rays in dimension {a.dim}")
    return a


def load_terms(job: JobSpec) -> ExpansionDocument:
    if job.terms is None:
        raise ValidationError(f"{job.command} needs --terms")
    return ExpansionDocument.model_validate(_read_json(job.terms))


def load_scalar_product(job: JobSpec, dim: int) -> ScalarProduct:
    if job.scalar_product is None:
        return ScalarProduct.identity(dim)
    return ScalarProductSpec.model_validate(_read_json(job.scalar_product)).build(dim)


def check_integer_dilations(mode: str, ts: list[Fraction]) -> None:
    for t in ts:
        check_dilation(mode, t)
