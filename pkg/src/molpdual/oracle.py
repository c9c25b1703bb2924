"""Random MOLP instances and brute-force oracles.

The oracles deliberately take different routes from the code they
check: faces come from enumerating every subset of inequalities, face
dimensions from the rank of the active equality system, and point
classification from LPs over the generator description instead of the
inequality description.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .duality import verify_geometric, verify_parametric, verify_phi
from .linalg import zeros
from .lp import LpProblem, Optimal, feasible, solve_lp
from .molp import (
    ImageKind,
    ImageSet,
    MolpInstance,
    classify_face,
    dual_feasible_set,
    lower_image_geometric,
    lower_image_parametric,
    upper_image,
)
from .polyhedra import (
    Face,
    FaceFlags,
    FaceLattice,
    Polyhedron,
    enumerate_subsets,
    face_dim_from_active,
    face_points,
    sort_faces,
)

MAX_BRUTE_INEQS = 10
REJECTION_BUDGET = 1000


class RejectionBudgetExceeded(RuntimeError):
    def __init__(self, tries: int):
        super().__init__(f"no admissible instance after {tries} draws")
        self.tries = tries


@dataclass(frozen=True)
class GenConfig:
    seed: int
    n_range: tuple = (1, 5)
    m_range: tuple = (1, 5)
    q: int = 2
    entry_bound: int = 5

    def __post_init__(self):
        for lo, hi in (self.n_range, self.m_range):
            if lo > hi or lo < 0:
                raise ValueError("empty range")
        if self.q not in (2, 3):
            raise ValueError("q must be 2 or 3")
        if self.entry_bound < 1:
            raise ValueError("entry_bound must be at least 1")


def dual_feasible(inst: MolpInstance) -> bool:
    m, q, n = inst.m, inst.q, inst.n
    eqs = [
        (tuple(inst.A[i][j] for i in range(m)) + tuple(-inst.P[k][j] for k in range(q)), Fraction(0))
        for j in range(n)
    ]
    eqs.append((zeros(m) + (Fraction(1),) * q, Fraction(1)))
    ineqs = [(tuple(Fraction(int(i == k)) for k in range(m + q)), Fraction(0)) for i in range(m + q)]
    return feasible(LpProblem(zeros(m + q), tuple(ineqs), tuple(eqs), m + q))


def random_instance(cfg: GenConfig, zero_b: bool = False) -> tuple[MolpInstance, int]:
    """Draw until both the primal and the dual feasible sets are nonempty.

    Returns the instance and the number of rejected draws.
    """
    rng = random.Random(cfg.seed)
    e = cfg.entry_bound
    for tries in range(REJECTION_BUDGET):
        n = rng.randint(*cfg.n_range)
        m = rng.randint(*cfg.m_range)
        P = [[rng.randint(-e, e) for _ in range(n)] for _ in range(cfg.q)]
        A = [[rng.randint(-e, e) for _ in range(n)] for _ in range(m)]
        b = [0 if zero_b else rng.randint(-e, e) for _ in range(m)]
        inst = MolpInstance.from_lists(P, A, b, n)
        if feasible(inst.primal_lp(zeros(n))) and dual_feasible(inst):
            return inst, tries
    raise RejectionBudgetExceeded(REJECTION_BUDGET)


# ---------------------------------------------------------------------------
# faces by subset enumeration


def brute_force_faces(p: Polyhedron) -> FaceLattice:
    k = len(p.h.ineqs)
    if k > MAX_BRUTE_INEQS:
        raise ValueError(f"{k} inequalities exceed the brute-force guard of {MAX_BRUTE_INEQS}")
    nv, nr = len(p.v.vertices), len(p.v.rays)
    found = {}
    for subset in enumerate_subsets(k):
        verts = {i for i in range(nv) if all(p.vertex_sat[j].__contains__(i) for j in subset)}
        if not verts:
            continue
        rays = {i for i in range(nr) if all(i in p.ray_sat[j] for j in subset)}
        active = frozenset(
            j for j in range(k) if verts <= p.vertex_sat[j] and rays <= p.ray_sat[j]
        )
        if active in found:
            continue
        f = Face(active, frozenset(verts), frozenset(rays), 0)
        found[active] = Face(active, f.vertices, f.rays, face_dim_from_active(p, f))
    faces, full = sort_faces(found.values())
    return FaceLattice(faces, full)


def lattice_mismatches(a: FaceLattice, b: FaceLattice) -> list[str]:
    sig = lambda L: {(f.active, f.vertices, f.rays, f.dim) for f in L}
    sa, sb = sig(a), sig(b)
    out = [f"only in first: active={sorted(x[0])} dim={x[3]}" for x in sorted(sa - sb, key=str)]
    out += [f"only in second: active={sorted(x[0])} dim={x[3]}" for x in sorted(sb - sa, key=str)]
    return out


# ---------------------------------------------------------------------------
# classification over the generator description


def _generator_lp(poly: Polyhedron, extra: int):
    """Variables ``lam (vertices) | mu (rays) | nu (lines) | extra``.

    Returns the variable count, the expression of ``y'`` coordinate ``i``
    as a coefficient row, and the convexity constraints.
    """
    V, R, L = poly.v.vertices, poly.v.rays, poly.v.lines
    nv, nr, nl = len(V), len(R), len(L)
    nvars = nv + nr + nl + extra

    def coord(i):
        return tuple(v[i] for v in V) + tuple(r[i] for r in R) + tuple(l[i] for l in L) + zeros(extra)

    ineqs = [(tuple(Fraction(int(j == k)) for k in range(nvars)), Fraction(0)) for j in range(nv + nr)]
    eqs = [((Fraction(1),) * nv + zeros(nr + nl + extra), Fraction(1))]
    return nvars, coord, ineqs, eqs


def _neg(row):
    return tuple(-x for x in row)


def _v_weakly_minimal(poly: Polyhedron, y) -> bool:
    d = poly.dim
    nvars, coord, ineqs, eqs = _generator_lp(poly, 1)
    eps = zeros(nvars - 1) + (Fraction(1),)
    for i in range(d):
        # y_i - eps - y'_i >= 0
        ineqs.append((tuple(-a - b for a, b in zip(coord(i), eps)), -y[i]))
    res = solve_lp(LpProblem(_neg(eps), tuple(ineqs), tuple(eqs), nvars))
    return isinstance(res, Optimal) and res.value >= 0


def _v_minimal(poly: Polyhedron, y) -> bool:
    d = poly.dim
    nvars, coord, ineqs, eqs = _generator_lp(poly, 0)
    obj = zeros(nvars)
    for i in range(d):
        ineqs.append((_neg(coord(i)), -y[i]))
        obj = tuple(a + b for a, b in zip(obj, coord(i)))
    res = solve_lp(LpProblem(obj, tuple(ineqs), tuple(eqs), nvars))
    return isinstance(res, Optimal) and res.value == sum(y)


def _v_k_maximal(poly: Polyhedron, y) -> bool:
    d = poly.dim
    nvars, coord, ineqs, eqs = _generator_lp(poly, 0)
    for i in range(d - 1):
        eqs.append((coord(i), y[i]))
    res = solve_lp(LpProblem(_neg(coord(d - 1)), tuple(ineqs), tuple(eqs), nvars))
    return isinstance(res, Optimal) and -res.value == y[-1]


def _v_orthant_maximal(poly: Polyhedron, y) -> bool:
    d = poly.dim
    nvars, coord, ineqs, eqs = _generator_lp(poly, 0)
    obj = zeros(nvars)
    for i in range(d):
        ineqs.append((coord(i), y[i]))
        obj = tuple(a - b for a, b in zip(obj, coord(i)))
    res = solve_lp(LpProblem(obj, tuple(ineqs), tuple(eqs), nvars))
    return isinstance(res, Optimal) and -res.value == sum(y)


def _v_point_flags(y, img: ImageSet) -> FaceFlags:
    poly = img.poly
    if img.kind is ImageKind.PRIMAL:
        return FaceFlags(weakly_minimal=_v_weakly_minimal(poly, y), minimal=_v_minimal(poly, y))
    if img.kind is ImageKind.GEOMETRIC:
        return FaceFlags(k_maximal=_v_k_maximal(poly, y))
    return FaceFlags(orthant_maximal=_v_orthant_maximal(poly, y))


_FLAG_NAMES = ("weakly_minimal", "minimal", "k_maximal", "orthant_maximal")


def _sample_points(poly: Polyhedron, f: Face, rng: random.Random, count: int = 3) -> list:
    verts, rays = face_points(poly, f)
    out = []
    for _ in range(count):
        wts = [rng.randint(1, 9) for _ in verts]
        tot = sum(wts)
        y = [sum(Fraction(w, tot) * v[k] for w, v in zip(wts, verts)) for k in range(poly.dim)]
        for r in rays:
            c = Fraction(rng.randint(1, 9), rng.randint(1, 4))
            y = [a + c * b for a, b in zip(y, r)]
        out.append(tuple(y))
    return out


def brute_force_classify(f: Face, img: ImageSet, rng: random.Random | None = None):
    """Face flags from the vertices of ``f`` and random relative-interior
    samples.  Returns ``(flags, diagnostics)``; diagnostics are non-empty
    when the relative interior samples disagree or a positive face has a
    negative vertex."""
    rng = rng or random.Random(0)
    verts, _ = face_points(img.poly, f)
    vflags = [_v_point_flags(v, img) for v in verts]
    sflags = [_v_point_flags(y, img) for y in _sample_points(img.poly, f, rng)]
    diags = []
    result = {}
    for name in _FLAG_NAMES:
        svals = {getattr(fl, name) for fl in sflags}
        if len(svals) > 1:
            diags.append(f"{name}: relative-interior samples disagree")
        inside = all(getattr(fl, name) for fl in sflags)
        if inside and not all(getattr(fl, name) for fl in vflags):
            diags.append(f"{name}: positive face with a negative vertex")
        result[name] = inside and all(getattr(fl, name) for fl in vflags)
    return FaceFlags(**result), diags


# ---------------------------------------------------------------------------
# campaigns


@dataclass
class InstanceResult:
    index: int
    seed: str
    instance: MolpInstance | None
    rejections: int
    violations: list
    error: str | None = None
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .report import instance_json

        return {
            "index": self.index,
            "seed": self.seed,
            "instance": None if self.instance is None else instance_json(self.instance),
            "rejections": self.rejections,
            "violations": self.violations,
            "error": self.error,
            "oracle_checks": self.checks,
        }


def check_instance(inst: MolpInstance, rng: random.Random, checks: dict | None = None) -> list[str]:
    """Every verifier and oracle on one instance; returns violation messages.

    ``checks``, when given, is filled with counts of the oracle comparisons made.
    """
    violations = []
    checks = {} if checks is None else checks
    checks.update(lattices_compared=0, lattices_skipped=0, faces_classified=0)
    T = dual_feasible_set(inst)
    images = {
        "P": upper_image(inst),
        "D": lower_image_geometric(inst, T),
        "Dbar": lower_image_parametric(inst, T),
    }
    reports = [
        verify_geometric(images["P"], images["D"]),
        verify_parametric(images["P"], images["Dbar"], images["D"]),
        verify_phi(images["D"], images["Dbar"]),
    ]
    for rep in reports:
        violations += [f"{rep.name}/{d.category}: {d.message}" for d in rep.failures]
    for name, img in images.items():
        if img.empty:
            violations.append(f"{name}: image is empty")
            continue
        if len(img.poly.h.ineqs) <= MAX_BRUTE_INEQS:
            violations += [f"{name}/faces: {m}" for m in lattice_mismatches(img.lattice, brute_force_faces(img.poly))]
            checks["lattices_compared"] += 1
        else:
            checks["lattices_skipped"] += 1
        checks["faces_classified"] += len(img.lattice)
        for i, f in enumerate(img.lattice):
            flags, diags = brute_force_classify(f, img, rng)
            violations += [f"{name}:{i}/classify: {d}" for d in diags]
            if flags != classify_face(f, img):
                violations.append(f"{name}:{i}/classify: LP flags {classify_face(f, img)} vs oracle {flags}")
    return violations


def run_campaign(seed: int, count: int, q: int = 2, max_n: int = 5, max_m: int = 5,
                 entry_bound: int = 5, start_index: int = 0) -> dict:
    """Seeded fuzz campaign.  The first instance always has ``b = 0``."""
    results = []
    for k in range(count):
        idx = start_index + k
        sub_seed = f"{seed}:{q}:{idx}"
        cfg = GenConfig(seed=_seed_int(sub_seed), n_range=(1, max_n), m_range=(1, max_m), q=q,
                        entry_bound=entry_bound)
        try:
            inst, rej = random_instance(cfg, zero_b=(k == 0))
        except RejectionBudgetExceeded as exc:
            results.append(InstanceResult(idx, sub_seed, None, exc.tries, [], str(exc)))
            continue
        rng = random.Random(cfg.seed)
        checks = {}
        violations = check_instance(inst, rng, checks)
        results.append(InstanceResult(idx, sub_seed, inst, rej, violations, checks=checks))
    return {
        "seed": seed,
        "q": q,
        "count": count,
        "max_n": max_n,
        "max_m": max_m,
        "instances_run": sum(r.instance is not None for r in results),
        "rejections": sum(r.rejections for r in results),
        "budget_exhausted": sum(r.error is not None for r in results),
        "violations": sum(len(r.violations) for r in results),
        "results": [r.to_json() for r in results],
    }


def _seed_int(text: str) -> int:
    # stable across processes, unlike hash()
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")
