"""Coupling function, duality maps between the face lattices, and verifiers.

Face arguments and results are indices into the classified lattices of
the :class:`~molpdual.molp.ImageSet` objects involved; a map result of
``None`` means the map did not land on a face (recorded as a failure by
the verifiers, never silently dropped).

The coupling function is scalar-valued even though it is sometimes
written with codomain R^q.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .errors import ContractViolation
from .linalg import QVector, dot, scale, unit
from .molp import ImageKind, ImageSet, classified_lattice
from .polyhedra import (
    Polyhedron,
    face_contains_direction,
    face_contains_point,
    face_points,
    linear_image,
    relative_interior_point,
    smallest_face,
)


class InternalError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# coupling function and hyperplanes


def coupling_phi(y: Sequence, ystar: Sequence) -> Fraction:
    if len(y) != len(ystar):
        raise ValueError(f"length mismatch: {len(y)} vs {len(ystar)}")
    q = len(y)
    head = sum((y[i] * ystar[i] for i in range(q - 1)), Fraction(0))
    return head + y[-1] * (1 - sum(ystar[:-1], Fraction(0))) - ystar[-1]


class Space(str, Enum):
    PRIMAL = "primal"
    DUAL = "dual"


@dataclass(frozen=True)
class CouplingHyperplane:
    """``{x : normal . x == offset}`` in primal or dual objective space."""

    space: Space
    normal: QVector
    offset: Fraction

    def __post_init__(self):
        if all(a == 0 for a in self.normal):
            raise ValueError("hyperplane with zero normal")

    def value(self, x: Sequence) -> Fraction:
        return dot(self.normal, x) - self.offset

    def through_point(self, x: Sequence) -> bool:
        return self.value(x) == 0

    def along(self, d: Sequence) -> bool:
        return dot(self.normal, d) == 0


def hyperplane_H(ystar: Sequence) -> CouplingHyperplane:
    """Primal hyperplane of points coupled to ``ystar``.  The normal is
    the weight vector ``(y*_1, ..., y*_{q-1}, 1 - sum)``."""
    normal = weight_of(ystar)
    return CouplingHyperplane(Space.PRIMAL, normal, Fraction(ystar[-1]))


def hyperplane_Hstar(y: Sequence) -> CouplingHyperplane:
    yq = Fraction(y[-1])
    normal = tuple(Fraction(yi) - yq for yi in y[:-1]) + (Fraction(-1),)
    return CouplingHyperplane(Space.DUAL, normal, -yq)


def hyperplane_Hstar_direction(r: Sequence) -> CouplingHyperplane:
    """Dual hyperplane of ``y*`` whose coupling is constant along the primal
    direction ``r``: ``sum_{i<q} r_i y*_i + r_q (1 - sum_{i<q} y*_i) = 0``."""
    rq = Fraction(r[-1])
    normal = tuple(Fraction(ri) - rq for ri in r[:-1]) + (Fraction(0),)
    return CouplingHyperplane(Space.DUAL, normal, -rq)


def weight_of(ystar: Sequence) -> QVector:
    head = tuple(Fraction(x) for x in ystar[:-1])
    return head + (1 - sum(head, Fraction(0)),)


# ---------------------------------------------------------------------------
# chart between R^q and the slice E = {(w, t) : sum(w) = 1}


def gamma(w: Sequence) -> QVector:
    head = tuple(Fraction(x) for x in w[:-1])
    return head + (1 - sum(head, Fraction(0)), Fraction(w[-1]))


def gamma_direction(r: Sequence) -> QVector:
    head = tuple(Fraction(x) for x in r[:-1])
    return head + (-sum(head, Fraction(0)), Fraction(r[-1]))


def pi(v: Sequence) -> QVector:
    return tuple(v[:-2]) + (v[-1],)


def in_slice(v: Sequence) -> bool:
    return sum(v[:-1], Fraction(0)) == 1


def along_slice(d: Sequence) -> bool:
    return sum(d[:-1], Fraction(0)) == 0


def slice_equation(q: int) -> tuple:
    """The equation of E in R^{q+1}."""
    return (tuple(Fraction(1) for _ in range(q)) + (Fraction(0),), Fraction(1))


def gamma_matrix(q: int):
    """Linear part and offset of the affine map gamma."""
    rows = [unit(q, i) for i in range(q - 1)]
    rows.append(tuple(Fraction(-1) for _ in range(q - 1)) + (Fraction(0),))
    rows.append(unit(q, q - 1))
    offset = (Fraction(0),) * (q - 1) + (Fraction(1), Fraction(0))
    return tuple(rows), offset


def gamma_image(poly: Polyhedron) -> Polyhedron:
    m, c = gamma_matrix(poly.dim)
    return linear_image(poly, m, c)


# ---------------------------------------------------------------------------
# duality maps


def _cut(img: ImageSet, hyperplanes: Sequence[CouplingHyperplane]) -> int | None:
    """Face of ``img`` cut out by supporting hyperplanes, or ``None`` if some
    hyperplane does not support ``img`` or the intersection is empty."""
    poly = img.poly
    verts, rays = poly.v.vertices, poly.v.rays
    for h in hyperplanes:
        vals = [h.value(v) for v in verts] + [dot(h.normal, r) for r in rays]
        if any(dot(h.normal, l) != 0 for l in poly.v.lines):
            return None
        if any(x < 0 for x in vals) and any(x > 0 for x in vals):
            return None
    vi = frozenset(i for i, v in enumerate(verts) if all(h.through_point(v) for h in hyperplanes))
    if not vi:
        return None
    ri = frozenset(i for i, r in enumerate(rays) if all(h.along(r) for h in hyperplanes))
    idx = smallest_face(poly, img.lattice, [verts[i] for i in sorted(vi)], [rays[i] for i in sorted(ri)])
    if idx is None:
        return None
    f = img.lattice[idx]
    if f.vertices != vi or f.rays != ri:
        raise InternalError("supporting hyperplane cut disagrees with the face lattice")
    return idx


def _bounded_vertices(img: ImageSet, idx: int) -> list:
    f = img.lattice[idx]
    if f.rays or img.poly.v.lines:
        raise InternalError(f"maximal face {idx} of the {img.kind.value} image is unbounded")
    return face_points(img.poly, f)[0]


def psi(fstar: int, dimg: ImageSet, pimg: ImageSet) -> int | None:
    """Face of the upper image coupled to a K-maximal face of the
    geometric lower image."""
    flags = dimg.lattice[fstar].flags
    if flags is None or not flags.k_maximal:
        raise ContractViolation(f"D:{fstar} is not a K-maximal face")
    if fstar == dimg.lattice.full:
        raise ContractViolation("psi is defined on proper faces only")
    verts = _bounded_vertices(dimg, fstar)
    return _cut(pimg, [hyperplane_H(v) for v in verts])


def psi_inverse(f: int, pimg: ImageSet, dimg: ImageSet) -> int | None:
    flags = pimg.lattice[f].flags
    if flags is None or not flags.weakly_minimal:
        raise ContractViolation(f"P:{f} is not a weakly minimal face")
    verts, rays = face_points(pimg.poly, pimg.lattice[f])
    planes = [hyperplane_Hstar(v) for v in verts]
    for r in rays + list(pimg.poly.v.lines):
        if all(x == r[-1] for x in r[:-1]):
            # r is a nonzero multiple of e: the coupling grows along r for every dual point
            return None
        planes.append(hyperplane_Hstar_direction(r))
    return _cut(dimg, planes)


def _image_equals_face(target: ImageSet, idx: int, source: ImageSet, sidx: int, back, back_dir,
                       valid_point, valid_dir) -> bool:
    """Whether every generator of target face ``idx`` maps back into source
    face ``sidx`` under ``back``."""
    tf = target.lattice[idx]
    sf = source.lattice[sidx]
    verts, rays = face_points(target.poly, tf)
    dirs = rays + list(target.poly.v.lines) + [scale(-1, l) for l in target.poly.v.lines]
    return all(valid_point(g) and face_contains_point(source.poly, sf, back(g)) for g in verts) and all(
        valid_dir(d) and face_contains_direction(source.poly, sf, back_dir(d)) for d in dirs
    )


def phi_map(f: int, dimg: ImageSet, dbar: ImageSet) -> int | None:
    """Face of the parametric lower image equal to gamma[F]."""
    flags = dimg.lattice[f].flags
    if flags is None or not flags.k_maximal:
        raise ContractViolation(f"D:{f} is not a K-maximal face")
    verts, rays = face_points(dimg.poly, dimg.lattice[f])
    dirs = rays + list(dimg.poly.v.lines)
    idx = smallest_face(dbar.poly, dbar.lattice, [gamma(v) for v in verts], [gamma_direction(r) for r in dirs])
    if idx is None:
        return None
    ok = _image_equals_face(dbar, idx, dimg, f, pi, pi, in_slice, along_slice)
    return idx if ok else None


def phi_inverse(fbar: int, dbar: ImageSet, dimg: ImageSet) -> int | None:
    """Face of the geometric lower image equal to pi[Fbar]."""
    verts, rays = face_points(dbar.poly, dbar.lattice[fbar])
    dirs = rays + list(dbar.poly.v.lines)
    if not all(in_slice(v) for v in verts) or not all(along_slice(d) for d in dirs):
        raise ContractViolation(f"Dbar:{fbar} is not contained in the slice sum(w) = 1")
    idx = smallest_face(dimg.poly, dimg.lattice, [pi(v) for v in verts], [pi(d) for d in dirs])
    if idx is None:
        return None
    always = lambda _: True
    ok = _image_equals_face(dimg, idx, dbar, fbar, gamma, gamma_direction, always, always)
    return idx if ok else None


# ---------------------------------------------------------------------------
# reports


class Direction(str, Enum):
    PSI_FORWARD = "psi"
    PSI_INVERSE = "psi_inverse"
    PHI_FORWARD = "phi"
    PHI_INVERSE = "phi_inverse"
    COMPOSED = "composed"


@dataclass(frozen=True)
class FaceMapEntry:
    source: str
    target: str | None
    direction: Direction
    source_dim: int
    target_dim: int | None
    weight: QVector | None = None
    offset: Fraction | None = None

    def to_json(self) -> dict:
        return {
            "direction": self.direction.value,
            "source": self.source,
            "source_dim": self.source_dim,
            "target": self.target,
            "target_dim": self.target_dim,
            "weight": None if self.weight is None else [str(x) for x in self.weight],
            "offset": None if self.offset is None else str(self.offset),
        }


@dataclass(frozen=True)
class Diagnostic:
    category: str
    message: str
    face: str | None = None

    def to_json(self) -> dict:
        return {"category": self.category, "face": self.face, "message": self.message}


_VERDICTS = {
    "bijection_ok": ("bijection", "composition", "incidence"),
    "inclusion_reversing_ok": ("inclusion",),
    "dimension_formula_ok": ("dimension",),
    "slice_identity_ok": ("slice",),
    "strict_positivity_ok": ("positivity",),
}


@dataclass
class DualityReport:
    name: str
    entries: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def fail(self, category: str, message: str, face: str | None = None) -> None:
        self.failures.append(Diagnostic(category, message, face))

    def _ok(self, verdict: str) -> bool:
        cats = _VERDICTS[verdict]
        return not any(d.category in cats for d in self.failures)

    @property
    def bijection_ok(self) -> bool:
        return self._ok("bijection_ok")

    @property
    def inclusion_reversing_ok(self) -> bool:
        return self._ok("inclusion_reversing_ok")

    @property
    def dimension_formula_ok(self) -> bool:
        return self._ok("dimension_formula_ok")

    @property
    def slice_identity_ok(self) -> bool:
        return self._ok("slice_identity_ok")

    @property
    def strict_positivity_ok(self) -> bool:
        return self._ok("strict_positivity_ok")

    @property
    def verdicts(self) -> dict:
        return {v: self._ok(v) for v in _VERDICTS}

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "verdicts": self.verdicts,
            "entries": [e.to_json() for e in self.entries],
            "failures": [d.to_json() for d in self.failures],
        }


def _fid(prefix: str, i: int | None) -> str | None:
    return None if i is None else f"{prefix}:{i}"


def _safe(fn, *args):
    try:
        return fn(*args), None
    except (ContractViolation, InternalError) as exc:
        return None, str(exc)


def _flagged(img: ImageSet, attr: str) -> list[int]:
    return [i for i in img.lattice.proper() if getattr(img.lattice[i].flags, attr)]


def _check_bijection(rep: DualityReport, forward: dict, domain_prefix: str, codomain: list[int],
                     codomain_prefix: str, map_name: str) -> None:
    seen: dict[int, int] = {}
    cod = set(codomain)
    for i, j in forward.items():
        if j is None:
            rep.fail("bijection", f"{map_name}({domain_prefix}:{i}) is not a face", _fid(domain_prefix, i))
            continue
        if j not in cod:
            rep.fail("bijection", f"{map_name}({domain_prefix}:{i}) = {codomain_prefix}:{j} lies outside the target class",
                     _fid(codomain_prefix, j))
        if j in seen:
            rep.fail("bijection", f"{map_name} sends {domain_prefix}:{seen[j]} and {domain_prefix}:{i} to {codomain_prefix}:{j}",
                     _fid(domain_prefix, i))
        seen[j] = i
    for j in codomain:
        if j not in seen:
            rep.fail("bijection", f"{codomain_prefix}:{j} is not the image of any face under {map_name}",
                     _fid(codomain_prefix, j))


def _check_inverse(rep: DualityReport, forward: dict, backward: dict, pa: str, pb: str, name: str) -> None:
    for i, j in forward.items():
        if j is not None and backward.get(j, "missing") != i:
            rep.fail("composition", f"{name}: {pa}:{i} -> {pb}:{j} -> {_fid(pa, backward.get(j))}", _fid(pa, i))
    for j, i in backward.items():
        if i is not None and forward.get(i, "missing") != j:
            rep.fail("composition", f"{name}: {pb}:{j} -> {pa}:{i} -> {_fid(pb, forward.get(i))}", _fid(pb, j))


def _check_order(rep: DualityReport, domain: ImageSet, forward: dict, target: ImageSet, pa: str,
                 reversing: bool) -> None:
    items = [(i, j) for i, j in forward.items() if j is not None]
    for i1, j1 in items:
        for i2, j2 in items:
            if i1 == i2 or not domain.lattice[i2].contains_face(domain.lattice[i1]):
                continue
            # i1 inside i2
            ok = (target.lattice[j1].contains_face(target.lattice[j2]) if reversing
                  else target.lattice[j2].contains_face(target.lattice[j1]))
            if not ok:
                rep.fail("inclusion", f"order not {'reversed' if reversing else 'preserved'} on {pa}:{i1} <= {pa}:{i2}",
                         _fid(pa, i1))


def _weight_entry(direction, src, sdim, tgt, tdim, ystar) -> FaceMapEntry:
    return FaceMapEntry(src, tgt, direction, sdim, tdim, weight_of(ystar), Fraction(ystar[-1]))


def verify_geometric(pimg: ImageSet, dimg: ImageSet) -> DualityReport:
    """Audit the inclusion-reversing bijection between K-maximal proper faces
    of the geometric lower image and weakly minimal proper faces of the
    upper image, its inverse, and the dimension formula."""
    rep = DualityReport("geometric")
    if pimg.empty or dimg.empty:
        rep.fail("bijection", "an image is empty; the duality maps are undefined")
        return rep
    q = pimg.poly.dim
    kmax = _flagged(dimg, "k_maximal")
    wmin = _flagged(pimg, "weakly_minimal")

    forward = {}
    for i in kmax:
        j, err = _safe(psi, i, dimg, pimg)
        if err:
            rep.fail("bijection", err, f"D:{i}")
        forward[i] = j
        ystar = relative_interior_point(dimg.lattice[i], dimg.poly)
        tdim = None if j is None else pimg.lattice[j].dim
        rep.entries.append(_weight_entry(Direction.PSI_FORWARD, f"D:{i}", dimg.lattice[i].dim,
                                         _fid("P", j), tdim, ystar))
        if j is not None and dimg.lattice[i].dim + tdim != q - 1:
            rep.fail("dimension", f"dim D:{i} + dim P:{j} = {dimg.lattice[i].dim + tdim} != {q - 1}", f"D:{i}")
    _check_bijection(rep, forward, "D", wmin, "P", "psi")

    backward = {}
    for j in wmin:
        i, err = _safe(psi_inverse, j, pimg, dimg)
        if err:
            rep.fail("bijection", err, f"P:{j}")
        backward[j] = i
        sdim = pimg.lattice[j].dim
        tdim = None if i is None else dimg.lattice[i].dim
        ystar = relative_interior_point(dimg.lattice[i], dimg.poly) if i is not None else None
        rep.entries.append(FaceMapEntry(f"P:{j}", _fid("D", i), Direction.PSI_INVERSE, sdim, tdim,
                                        None if ystar is None else weight_of(ystar),
                                        None if ystar is None else ystar[-1]))
        if i is not None and sdim + tdim != q - 1:
            rep.fail("dimension", f"dim P:{j} + dim D:{i} = {sdim + tdim} != {q - 1}", f"P:{j}")
    _check_bijection(rep, backward, "P", kmax, "D", "psi_inverse")
    _check_inverse(rep, forward, backward, "D", "P", "psi")
    _check_order(rep, dimg, forward, pimg, "D", reversing=True)
    _check_order(rep, pimg, backward, dimg, "P", reversing=True)
    return rep


def slice_of_parametric(dbar: ImageSet) -> ImageSet:
    """The geometric lower image recovered as pi[Dbar cut with E]."""
    q = dbar.poly.dim - 1
    cut = dbar.poly.intersect(eqs=[slice_equation(q)])
    drop = tuple(unit(q + 1, i) for i in range(q - 1)) + (unit(q + 1, q),)
    poly = linear_image(cut, drop)
    img = ImageSet(poly, ImageKind.GEOMETRIC)
    return replace(img, lattice=classified_lattice(img)) if not poly.empty else img


def _check_slice(rep: DualityReport, dimg: ImageSet, dbar: ImageSet) -> None:
    q = dimg.poly.dim
    cut = dbar.poly.intersect(eqs=[slice_equation(q)])
    embedded = gamma_image(dimg.poly)
    if not cut.includes(embedded):
        rep.fail("slice", "gamma[D] is not contained in Dbar cut with E")
    if not embedded.includes(cut):
        rep.fail("slice", "Dbar cut with E is not contained in gamma[D]")
    down = [unit(q + 1, k, -1) for k in range(q)]
    rebuilt = Polyhedron.from_v(replace(embedded.v, rays=embedded.v.rays + tuple(down)))
    if not rebuilt.same_set(dbar.poly):
        rep.fail("slice", "Dbar differs from gamma[D] - (R^q_+ x {0})")


def verify_parametric(pimg: ImageSet, dbar: ImageSet, dimg: ImageSet | None = None) -> DualityReport:
    """Audit the composed map psi o phi^-1 from orthant-maximal faces of the
    parametric lower image to weakly minimal faces of the upper image, the
    incidence description of its inverse, and the strict-positivity
    criterion for minimality.

    Without ``dimg`` the geometric lower image is recovered from the
    slice of ``dbar``; with it, the slice identity is checked as well.
    """
    rep = DualityReport("parametric")
    if pimg.empty or dbar.empty:
        rep.fail("bijection", "an image is empty; the duality maps are undefined")
        return rep
    q = pimg.poly.dim
    if dimg is None:
        dimg = slice_of_parametric(dbar)
    else:
        _check_slice(rep, dimg, dbar)
    if dimg.empty:
        rep.fail("slice", "the slice of Dbar is empty")
        return rep

    omax = _flagged(dbar, "orthant_maximal")
    wmin = _flagged(pimg, "weakly_minimal")
    for i in omax:
        verts, rays = face_points(dbar.poly, dbar.lattice[i])
        if not all(in_slice(v) for v in verts) or rays or dbar.poly.v.lines:
            rep.fail("slice", f"maximal face Dbar:{i} leaves the slice sum(w) = 1", f"Dbar:{i}")

    forward = {}
    for i in omax:
        g, err = _safe(phi_inverse, i, dbar, dimg)
        j = None
        if err:
            rep.fail("bijection", err, f"Dbar:{i}")
        elif g is None:
            rep.fail("bijection", f"phi_inverse(Dbar:{i}) is not a face", f"Dbar:{i}")
        elif not dimg.lattice[g].flags.k_maximal:
            rep.fail("bijection", f"phi_inverse(Dbar:{i}) = D:{g} is not K-maximal", f"Dbar:{i}")
        else:
            j, err = _safe(psi, g, dimg, pimg)
            if err:
                rep.fail("bijection", err, f"D:{g}")
        forward[i] = j
        sdim = dbar.lattice[i].dim
        tdim = None if j is None else pimg.lattice[j].dim
        wt = relative_interior_point(dbar.lattice[i], dbar.poly)
        rep.entries.append(FaceMapEntry(f"Dbar:{i}", _fid("P", j), Direction.COMPOSED, sdim, tdim,
                                        tuple(wt[:-1]), wt[-1]))
        if j is not None and sdim + tdim != q - 1:
            rep.fail("dimension", f"dim Dbar:{i} + dim P:{j} = {sdim + tdim} != {q - 1}", f"Dbar:{i}")
    _check_bijection(rep, forward, "Dbar", wmin, "P", "psi o phi_inverse")

    backward = {}
    for j in wmin:
        g, err = _safe(psi_inverse, j, pimg, dimg)
        i = None
        if err:
            rep.fail("bijection", err, f"P:{j}")
        elif g is not None and dimg.lattice[g].flags.k_maximal:
            i, err = _safe(phi_map, g, dimg, dbar)
            if err:
                rep.fail("bijection", err, f"D:{g}")
        backward[j] = i
        rep.entries.append(FaceMapEntry(f"P:{j}", _fid("Dbar", i), Direction.COMPOSED,
                                        pimg.lattice[j].dim, None if i is None else dbar.lattice[i].dim))
        if i is None:
            rep.fail("bijection", f"phi o psi_inverse(P:{j}) is not a face", f"P:{j}")
            continue
        _check_incidence(rep, pimg, j, dbar, i)
        _check_positivity(rep, pimg, j, dbar, i)
    _check_inverse(rep, forward, backward, "Dbar", "P", "psi o phi_inverse")
    _check_order(rep, dbar, forward, pimg, "Dbar", reversing=True)
    for j in pimg.lattice.proper():
        fl = pimg.lattice[j].flags
        if fl.minimal and not fl.weakly_minimal:
            rep.fail("positivity", f"P:{j} is minimal but not weakly minimal", f"P:{j}")
    return rep


def incidence_set(pimg: ImageSet, j: int, dbar: ImageSet) -> Polyhedron:
    """``{(w, t) in Dbar cut with E : y.w = t for all y in F}`` as a polyhedron."""
    q = pimg.poly.dim
    verts, rays = face_points(pimg.poly, pimg.lattice[j])
    eqs = [slice_equation(q)]
    for y in verts:
        eqs.append((tuple(y) + (Fraction(-1),), Fraction(0)))
    for r in rays + list(pimg.poly.v.lines):
        eqs.append((tuple(r) + (Fraction(0),), Fraction(0)))
    return dbar.poly.intersect(eqs=eqs)


def _face_polyhedron(img: ImageSet, i: int) -> Polyhedron:
    verts, rays = face_points(img.poly, img.lattice[i])
    return Polyhedron.from_generators(verts, rays, img.poly.v.lines, dim=img.poly.dim)


def _check_incidence(rep: DualityReport, pimg: ImageSet, j: int, dbar: ImageSet, i: int) -> None:
    if not incidence_set(pimg, j, dbar).same_set(_face_polyhedron(dbar, i)):
        rep.fail("incidence", f"incidence set of P:{j} differs from phi o psi_inverse(P:{j}) = Dbar:{i}", f"P:{j}")


def _check_positivity(rep: DualityReport, pimg: ImageSet, j: int, dbar: ImageSet, i: int) -> None:
    verts, rays = face_points(dbar.poly, dbar.lattice[i])
    if rays:
        rep.fail("positivity", f"Dbar:{i} is unbounded", f"Dbar:{i}")
        return
    # some point with w > 0 exists iff the vertex barycenter has w > 0, since w >= 0 on the face
    q = pimg.poly.dim
    positive = all(sum(v[k] for v in verts) > 0 for k in range(q))
    minimal = pimg.lattice[j].flags.minimal
    if positive != minimal:
        rep.fail("positivity",
                 f"P:{j} classified {'minimal' if minimal else 'not minimal'} but Dbar:{i} "
                 f"{'has' if positive else 'has no'} point with w > 0", f"P:{j}")


def _le_K(a: Sequence, b: Sequence) -> bool:
    return all(x == y for x, y in zip(a[:-1], b[:-1])) and a[-1] <= b[-1]


def _le_orthant(a: Sequence, b: Sequence) -> bool:
    return all(x <= y for x, y in zip(a, b))


def verify_phi(dimg: ImageSet, dbar: ImageSet) -> DualityReport:
    """Audit that phi carries the K-maximal faces of the geometric lower
    image onto the orthant-maximal faces of the parametric one."""
    rep = DualityReport("phi")
    if dimg.empty or dbar.empty:
        if dimg.empty != dbar.empty:
            rep.fail("slice", "exactly one of the lower images is empty")
        return rep
    _check_slice(rep, dimg, dbar)
    kmax = _flagged(dimg, "k_maximal")
    omax = _flagged(dbar, "orthant_maximal")

    forward, backward = {}, {}
    for i in kmax:
        j, err = _safe(phi_map, i, dimg, dbar)
        if err:
            rep.fail("bijection", err, f"D:{i}")
        forward[i] = j
        tdim = None if j is None else dbar.lattice[j].dim
        rep.entries.append(FaceMapEntry(f"D:{i}", _fid("Dbar", j), Direction.PHI_FORWARD,
                                        dimg.lattice[i].dim, tdim))
        if j is not None and tdim != dimg.lattice[i].dim:
            rep.fail("dimension", f"phi changes the dimension of D:{i}", f"D:{i}")
    _check_bijection(rep, forward, "D", omax, "Dbar", "phi")
    for j in omax:
        i, err = _safe(phi_inverse, j, dbar, dimg)
        if err:
            rep.fail("bijection", err, f"Dbar:{j}")
        backward[j] = i
        rep.entries.append(FaceMapEntry(f"Dbar:{j}", _fid("D", i), Direction.PHI_INVERSE,
                                        dbar.lattice[j].dim, None if i is None else dimg.lattice[i].dim))
    _check_bijection(rep, backward, "Dbar", kmax, "D", "phi_inverse")
    _check_inverse(rep, forward, backward, "D", "Dbar", "phi")
    _check_order(rep, dimg, forward, dbar, "D", reversing=False)
    _check_order(rep, dbar, backward, dimg, "Dbar", reversing=False)

    # order equivalence on vertices and face barycenters
    samples = list(dimg.poly.v.vertices) + [relative_interior_point(f, dimg.poly) for f in dimg.lattice]
    for a in samples:
        for b in samples:
            if _le_K(a, b) != _le_orthant(gamma(a), gamma(b)):
                rep.fail("slice", f"order mismatch between {_fmt(a)} and {_fmt(b)}")
    for a in samples:
        if not dbar.poly.contains(gamma(a)):
            rep.fail("slice", f"gamma({_fmt(a)}) lies outside Dbar")
    return rep


def _fmt(v: Sequence) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


# ---------------------------------------------------------------------------
# fault injection


def flip_flag(img: ImageSet, i: int, attr: str) -> ImageSet:
    """Copy of ``img`` with one classification flag of face ``i`` inverted."""
    f = img.lattice[i]
    flags = replace(f.flags, **{attr: not getattr(f.flags, attr)})
    faces = list(img.lattice.faces)
    faces[i] = replace(f, flags=flags)
    return replace(img, lattice=replace(img.lattice, faces=tuple(faces)))


def perturb_vertex(img: ImageSet, k: int, delta: Sequence) -> ImageSet:
    """Rebuild ``img`` with vertex ``k`` shifted by ``delta`` and reclassify."""
    v = img.poly.v
    verts = list(v.vertices)
    verts[k] = tuple(a + Fraction(b) for a, b in zip(verts[k], delta))
    poly = Polyhedron.from_v(replace(v, vertices=tuple(verts)))
    out = ImageSet(poly, img.kind)
    return replace(out, lattice=classified_lattice(out))
