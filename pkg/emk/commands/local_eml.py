from __future__ import annotations

from emk.commands import JobSpec, load_cone, load_scalar_product
from emk.errors import VerificationMismatch
from emk.mu import local_eml
from emk.report import table


def run(job: JobSpec) -> dict:
    a = load_cone(job)
    q = load_scalar_product(job, a.dim)
    decomposition = local_eml(a, q, job.order)
    bad = decomposition.mismatches()
    doc = {
        "command": "local-eml",
        **decomposition.to_json(),
        "reconstruction": "exact" if not bad else "mismatch",
    }
    if bad:
        details = [{"degree": m} for m in bad]
        raise VerificationMismatch(f"Σ μ·I differs from S in degree(s) {bad}", details, doc)
    return doc


def render(doc: dict) -> str:
    rows = []
    for part in doc["faces"]:
        integral = part["integral"]
        for m, c in enumerate(part["mu"]):
            rows.append((part["face"]["active"], part["face"]["dim"], m, c, integral["numerator"] if m == 0 else ""))
    return table(["face", "dim", "m", "mu_[m]", "I numerator"], rows) + f"\nreconstruction: {doc['reconstruction']}\n"
