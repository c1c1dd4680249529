from __future__ import annotations

from collections.abc import Callable
from fractions import Fraction

from loguru import logger

from emk.algebra import Polynomial, format_rational, parse_polynomial
from emk.asymptotics import evaluate_expansion, expansion_terms, riemann_sum_oracle
from emk.commands import (
    JobSpec,
    check_integer_dilations,
    load_polyhedron,
    load_scalar_product,
    load_terms,
)
from emk.errors import VerificationMismatch
from emk.integration import face_integral
from emk.models import ExpansionDocument
from emk.polyhedra import Polyhedron
from emk.report import table

DEFAULT_TS = [Fraction(1), Fraction(2), Fraction(3)]


def _from_document(doc: ExpansionDocument, p: Polyhedron, h: Polynomial) -> Callable[[Fraction], Fraction]:
    def evaluate(t: Fraction) -> Fraction:
        total = Fraction(0)
        for term in doc.terms:
            g = term.operator_at(p.dim_ambient, t).apply_as_operator(h)
            if not g.is_zero:
                total += face_integral(p, p.face(term.face), g) / t**term.k
        return total

    return evaluate


def run(job: JobSpec) -> dict:
    ts = job.ts or DEFAULT_TS
    if job.terms is not None:
        doc = load_terms(job)
        p = doc.polyhedron.build()
        h = parse_polynomial(job.h, p.dim_ambient)
        mode, order = doc.mode, doc.order
        check_integer_dilations(mode, ts)
        if order < h.degree + p.dimension:
            logger.warning(f"Terms document stops at order {order}; exactness needs {h.degree + p.dimension}")
        evaluate = _from_document(doc, p, h)
    else:
        p = load_polyhedron(job)
        q = load_scalar_product(job, p.dim_ambient)
        h = parse_polynomial(job.h, p.dim_ambient)
        mode, order = job.mode, max(job.order, h.degree + p.dimension)
        check_integer_dilations(mode, ts)
        expansion = expansion_terms(p, q, order, mode)

        def evaluate(t: Fraction) -> Fraction:
            return evaluate_expansion(expansion, h, t)

    results = []
    for t in ts:
        oracle = riemann_sum_oracle(p, h, t)
        value = evaluate(t)
        status = "exact match" if value == oracle.value else "mismatch"
        logger.info(f"t={format_rational(t)}: {status} ({oracle.point_count} lattice points)")
        results.append({
            "t": format_rational(t),
            "riemann_sum": format_rational(oracle.value),
            "expansion": format_rational(value),
            "points": oracle.point_count,
            "status": status,
        })
    doc = {"command": "verify", "h": h.to_json(), "mode": mode, "order": order, "results": results}
    failed = [r for r in results if r["status"] != "exact match"]
    if failed:
        raise VerificationMismatch(f"Expansion differs from the Riemann sum at {len(failed)} value(s) of t", failed, doc)
    return doc


def render(doc: dict) -> str:
    rows = [(r["t"], r["points"], r["riemann_sum"], r["expansion"], r["status"]) for r in doc["results"]]
    return table(["t", "points", "riemann_sum", "expansion", "status"], rows)
