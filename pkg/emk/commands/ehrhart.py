from __future__ import annotations

from fractions import Fraction

from loguru import logger

from emk.algebra import format_rational
from emk.asymptotics import ehrhart_polynomial, ehrhart_quasi_values
from emk.commands import JobSpec, check_integer_dilations, load_polyhedron, load_scalar_product
from emk.errors import ValidationError, VerificationMismatch
from emk.report import table


def run(job: JobSpec) -> dict:
    p = load_polyhedron(job)
    q = load_scalar_product(job, p.dim_ambient)
    if not p.is_bounded:
        raise ValidationError("Ehrhart counts need a bounded polyhedron")
    check_integer_dilations(job.mode, job.ts)
    ell = p.dimension
    doc: dict = {"command": "ehrhart", "mode": job.mode, "dimension": ell}

    if job.mode == "integer":
        coefficients = ehrhart_polynomial(p, q)
        doc["coefficients"] = [format_rational(c) for c in coefficients]
        ts = job.ts or [Fraction(t) for t in range(1, ell + 2)]
        values = [sum(c * t ** (ell - i) for i, c in enumerate(coefficients)) for t in ts]
    else:
        ts = job.ts or [Fraction(1)]
        values = ehrhart_quasi_values(p, ts, q)

    checks = []
    for t, value in zip(ts, values):
        count = len(p.lattice_points(t))
        checks.append({
            "t": format_rational(t),
            "expansion": format_rational(value),
            "count": count,
            "status": "exact match" if value == count else "mismatch",
        })
    doc["checks"] = checks
    failed = [c for c in checks if c["status"] != "exact match"]
    if failed:
        raise VerificationMismatch(f"Ehrhart counts differ from enumeration at {len(failed)} value(s) of t", failed, doc)
    logger.info(f"Ehrhart data checked at {len(checks)} dilation(s)")
    return doc


def render(doc: dict) -> str:
    out = ""
    if "coefficients" in doc:
        ell = doc["dimension"]
        rows = [(f"t^{ell - i}", c) for i, c in enumerate(doc["coefficients"])]
        out = table(["power", "coefficient"], rows) + "\n"
    rows = [(c["t"], c["expansion"], c["count"], c["status"]) for c in doc["checks"]]
    return out + table(["t", "expansion", "count", "status"], rows)
