from __future__ import annotations

from loguru import logger

from emk.algebra import format_rational, parse_polynomial
from emk.asymptotics import evaluate_expansion, expansion_terms
from emk.commands import JobSpec, check_integer_dilations, load_polyhedron, load_scalar_product
from emk.report import table


def run(job: JobSpec) -> dict:
    p = load_polyhedron(job)
    q = load_scalar_product(job, p.dim_ambient)
    check_integer_dilations(job.mode, job.ts)
    expansion = expansion_terms(p, q, job.order, job.mode)
    doc = {"command": "expand", **expansion.to_json(job.ts)}
    if job.ts and p.is_bounded:
        h = parse_polynomial(job.h, p.dim_ambient)
        doc["h"] = h.to_json()
        doc["values"] = [
            {"t": format_rational(t), "value": format_rational(evaluate_expansion(expansion, h, t))}
            for t in job.ts
        ]
    elif job.ts:
        logger.warning("Unbounded polyhedron: skipping exact evaluation of the expansion")
    return doc


def _operator_cell(term: dict) -> str:
    if "operator" in term:
        return term["operator"]
    cells = [f"t={t}: {op}" for t, op in term.get("operators", {}).items()]
    if "step_coefficient" in term:
        direction = ",".join(term["direction"])
        cells.insert(0, f"({term['step_coefficient']}) <d,({direction})>^{term['m']}")
    return "; ".join(cells)


def render(doc: dict) -> str:
    rows = [(t["k"], t["face"], t["face_dim"], t["m"], _operator_cell(t)) for t in doc["terms"]]
    out = table(["k", "face", "dim", "m", "operator"], rows)
    if "values" in doc:
        out += "\n" + table(["t", "expansion"], [(v["t"], v["value"]) for v in doc["values"]])
    return out
