"""JSON report assembly.  Every scalar is written as an exact ``p/q`` string."""

from __future__ import annotations

from .duality import DualityReport, verify_geometric, verify_parametric, verify_phi
from .molp import (
    ImageSet,
    MolpInstance,
    dual_feasible_set,
    dual_infeasibility_ray,
    lower_image_geometric,
    lower_image_parametric,
    primal_feasible,
    upper_image,
)

_PREFIX = {"primal": "P", "geometric": "D", "parametric": "Dbar"}


def _fmt(v):
    return [str(x) for x in v]


def instance_json(inst: MolpInstance) -> dict:
    return {
        "n": inst.n,
        "m": inst.m,
        "q": inst.q,
        "P": [_fmt(r) for r in inst.P],
        "A": [_fmt(r) for r in inst.A],
        "b": _fmt(inst.b),
    }


def image_json(img: ImageSet) -> dict:
    out = {"kind": img.kind.value}
    out.update(img.poly.to_json())
    return out


def lattice_json(img: ImageSet) -> list | None:
    if img.lattice is None:
        return None
    prefix = _PREFIX[img.kind.value]
    rows = []
    for i, f in enumerate(img.lattice):
        fl = f.flags
        rows.append({
            "id": f"{prefix}:{i}",
            "dim": f.dim,
            "proper": i != img.lattice.full,
            "active": sorted(f.active),
            "vertices": sorted(f.vertices),
            "rays": sorted(f.rays),
            "flags": {
                "weakly_minimal": fl.weakly_minimal,
                "minimal": fl.minimal,
                "k_maximal": fl.k_maximal,
                "orthant_maximal": fl.orthant_maximal,
            },
        })
    return rows


class Pipeline:
    """All images and reports for one instance."""

    def __init__(self, inst: MolpInstance):
        self.inst = inst
        self.primal_feasible = primal_feasible(inst)
        T = dual_feasible_set(inst)
        self.pimg = upper_image(inst)
        self.dimg = lower_image_geometric(inst, T)
        self.dbar = lower_image_parametric(inst, T)
        self.reports: list[DualityReport] = []

    @property
    def applicable(self) -> bool:
        return not (self.pimg.empty or self.dimg.empty or self.dbar.empty)

    def status(self) -> str:
        if not self.primal_feasible:
            if dual_infeasibility_ray(self.dimg) is not None:
                return "primal infeasible certified by dual ray"
            return "primal infeasible"
        if self.dimg.empty:
            return "dual infeasible"
        return "ok"

    def verify(self, dimg: ImageSet | None = None) -> list[DualityReport]:
        dimg = dimg or self.dimg
        if not self.applicable:
            self.reports = []
            return self.reports
        self.reports = [
            verify_geometric(self.pimg, dimg),
            verify_parametric(self.pimg, self.dbar, dimg),
            verify_phi(dimg, self.dbar),
        ]
        return self.reports

    def verdicts(self) -> dict:
        if not self.reports:
            return {"applicable": False, "all_ok": False}
        combined = {}
        for rep in self.reports:
            for k, v in rep.verdicts.items():
                combined[k] = combined.get(k, True) and v
        out = {"applicable": True, **combined, "all_ok": all(r.ok for r in self.reports)}
        out["by_report"] = {r.name: r.verdicts for r in self.reports}
        return out

    def to_json(self) -> dict:
        corr = {r.name: [e.to_json() for e in r.entries] for r in self.reports}
        return {
            "instance": instance_json(self.inst),
            "status": self.status(),
            "upper_image": image_json(self.pimg),
            "lower_image_geometric": image_json(self.dimg),
            "lower_image_parametric": image_json(self.dbar),
            "face_lattices": {
                "upper_image": lattice_json(self.pimg),
                "lower_image_geometric": lattice_json(self.dimg),
                "lower_image_parametric": lattice_json(self.dbar),
            },
            "correspondence": corr,
            "verdicts": self.verdicts(),
            "diagnostics": [
                {"report": r.name, **d.to_json()} for r in self.reports for d in r.failures
            ],
        }
