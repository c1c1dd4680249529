from __future__ import annotations

from fractions import Fraction

from loguru import logger

from emk.algebra import format_rational
from emk.commands import JobSpec, load_cone, load_polyhedron, load_scalar_product
from emk.mu import mu_at_dilation, mu_embedded
from emk.polyhedra import transverse_cone
from emk.report import table
from emk.workers import parallel_map


def run(job: JobSpec) -> dict:
    if job.cone is not None:
        a = load_cone(job)
        q = load_scalar_product(job, a.dim)
        fn = mu_embedded(a, q, job.order)
        return {
            "command": "mu",
            "order": job.order,
            "cone": a.to_json(),
            "components": [p.to_json("xi") for p in fn.components],
        }

    p = load_polyhedron(job)
    q = load_scalar_product(job, p.dim_ambient)
    ts = job.ts or [Fraction(1)]
    faces = []
    for f in p.faces:
        tc, _ = transverse_cone(p, f, q)
        functions = parallel_map(lambda t: mu_at_dilation(tc, t, q, job.order), ts)
        faces.append({
            "face": list(f.key),
            "face_dim": f.dim,
            "transverse_vertex": [format_rational(x) for x in tc.vertex],
            "mu": {format_rational(t): [c.to_json("xi") for c in fn.components] for t, fn in zip(ts, functions)},
        })
    logger.info(f"μ of {len(faces)} transverse cones at {len(ts)} dilation(s)")
    return {"command": "mu", "order": job.order, "polyhedron": p.to_json(), "faces": faces}


def render(doc: dict) -> str:
    if "cone" in doc:
        return table(["m", "mu_[m]"], [(m, c) for m, c in enumerate(doc["components"])])
    rows = []
    for face in doc["faces"]:
        for t, components in face["mu"].items():
            for m, c in enumerate(components):
                rows.append((face["face"], face["face_dim"], t, m, c))
    return table(["face", "dim", "t", "m", "mu_[m]"], rows)
