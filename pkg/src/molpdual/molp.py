"""Upper image of a MOLP, the two dual lower images, and face classification.

For ``min Px s.t. Ax >= b`` with ``q`` objectives the three sets are

* the upper image ``P[S] + R^q_+``,
* the geometric lower image ``D[T] - K`` with ``K = {0}^{q-1} x R_+``,
* the parametric lower image ``Dbar[T] - R^{q+1}_+``,

where ``T = {(u, w) >= 0 : A^T u = P^T w, sum(w) = 1}``,
``D(u, w) = (w_1, ..., w_{q-1}, b.u)`` and ``Dbar(u, w) = (w, b.u)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .errors import ContractViolation, InstanceError
from .linalg import QMatrix, QVector, parse_rational, unit, zeros
from .lp import LpProblem, Optimal, feasible, solve_lp
from .polyhedra import (
    Face,
    FaceFlags,
    FaceLattice,
    HRep,
    Polyhedron,
    face_lattice,
    linear_image,
    minkowski_add_cone,
    relative_interior_point,
)


@dataclass(frozen=True)
class MolpInstance:
    P: QMatrix
    A: QMatrix
    b: QVector
    n: int

    def __post_init__(self):
        if self.q < 2:
            raise InstanceError("at least two objectives are required (q >= 2)", "q")
        for i, row in enumerate(self.P):
            if len(row) != self.n:
                raise InstanceError(f"expected {self.n} columns, got {len(row)}", f"P[{i}]")
        for i, row in enumerate(self.A):
            if len(row) != self.n:
                raise InstanceError(f"expected {self.n} columns, got {len(row)}", f"A[{i}]")
        if len(self.b) != len(self.A):
            raise InstanceError(f"expected {len(self.A)} entries, got {len(self.b)}", "b")

    @property
    def q(self) -> int:
        return len(self.P)

    @property
    def m(self) -> int:
        return len(self.A)

    @classmethod
    def from_lists(cls, P, A, b, n: int | None = None) -> "MolpInstance":
        def conv(rows, name):
            out = []
            for i, row in enumerate(rows):
                try:
                    out.append(tuple(parse_rational(x) for x in row))
                except ValueError as exc:
                    raise InstanceError(str(exc), f"{name}[{i}]") from None
            return tuple(out)

        P, A = conv(P, "P"), conv(A, "A")
        try:
            b = tuple(parse_rational(x) for x in b)
        except ValueError as exc:
            raise InstanceError(str(exc), "b") from None
        if n is None:
            n = len(P[0]) if P else 0
        return cls(P, A, b, n)

    def primal_lp(self, objective: Sequence) -> LpProblem:
        return LpProblem(tuple(objective), tuple(zip(self.A, self.b)), (), self.n)


class ImageKind(str, Enum):
    PRIMAL = "primal"
    GEOMETRIC = "geometric"
    PARAMETRIC = "parametric"


@dataclass(frozen=True)
class ImageSet:
    poly: Polyhedron
    kind: ImageKind
    lattice: FaceLattice | None = None

    @property
    def empty(self) -> bool:
        return self.poly.empty

    def face(self, i: int) -> Face:
        return self.lattice[i]

    def flags(self, i: int) -> FaceFlags:
        return self.lattice[i].flags


def example_instance() -> MolpInstance:
    return MolpInstance.from_lists(
        [[1, 0], [0, 1]],
        [[1, -1], [8, 2], [4, 2], [2, 4]],
        [-3, 11, 7, 5],
    )


# ---------------------------------------------------------------------------
# image construction


def _finish(poly: Polyhedron, kind: ImageKind, classify: bool) -> ImageSet:
    img = ImageSet(poly, kind)
    if classify and not poly.empty:
        img = replace(img, lattice=classified_lattice(img))
    return img


def upper_image(inst: MolpInstance, classify: bool = True) -> ImageSet:
    n, q = inst.n, inst.q
    ineqs = [(tuple(a) + zeros(q), beta) for a, beta in zip(inst.A, inst.b)]
    for k in range(q):
        # y_k - P_k x >= 0
        ineqs.append((tuple(-x for x in inst.P[k]) + unit(q, k), Fraction(0)))
    lifted = Polyhedron.from_h(HRep(tuple(ineqs), (), n + q))
    proj = tuple(zeros(n) + unit(q, k) for k in range(q))
    image = linear_image(lifted, proj) if not lifted.empty else Polyhedron.from_generators((), dim=q)
    image = minkowski_add_cone(image, [unit(q, k) for k in range(q)])
    return _finish(image, ImageKind.PRIMAL, classify)


def dual_feasible_set(inst: MolpInstance) -> Polyhedron:
    """T in coordinates ``(u_1..u_m, w_1..w_q)``."""
    m, q, n = inst.m, inst.q, inst.n
    eqs = []
    for j in range(n):
        row = tuple(inst.A[i][j] for i in range(m)) + tuple(-inst.P[k][j] for k in range(q))
        eqs.append((row, Fraction(0)))
    eqs.append((zeros(m) + (Fraction(1),) * q, Fraction(1)))
    ineqs = [(unit(m + q, i), Fraction(0)) for i in range(m + q)]
    return Polyhedron.from_h(HRep(tuple(ineqs), tuple(eqs), m + q))


def geometric_objective(inst: MolpInstance) -> QMatrix:
    m, q = inst.m, inst.q
    rows = [unit(m + q, m + i) for i in range(q - 1)]
    rows.append(tuple(inst.b) + zeros(q))
    return tuple(rows)


def parametric_objective(inst: MolpInstance) -> QMatrix:
    m, q = inst.m, inst.q
    rows = [unit(m + q, m + i) for i in range(q)]
    rows.append(tuple(inst.b) + zeros(q))
    return tuple(rows)


def lower_image_geometric(inst: MolpInstance, T: Polyhedron | None = None,
                          classify: bool = True) -> ImageSet:
    q = inst.q
    T = dual_feasible_set(inst) if T is None else T
    image = linear_image(T, geometric_objective(inst))
    image = minkowski_add_cone(image, [unit(q, q - 1, -1)])
    return _finish(image, ImageKind.GEOMETRIC, classify)


def lower_image_parametric(inst: MolpInstance, T: Polyhedron | None = None,
                           classify: bool = True) -> ImageSet:
    q = inst.q
    T = dual_feasible_set(inst) if T is None else T
    image = linear_image(T, parametric_objective(inst))
    image = minkowski_add_cone(image, [unit(q + 1, k, -1) for k in range(q + 1)])
    return _finish(image, ImageKind.PARAMETRIC, classify)


def primal_feasible(inst: MolpInstance) -> bool:
    return feasible(inst.primal_lp(zeros(inst.n)))


def dual_infeasibility_ray(dimg: ImageSet) -> QVector | None:
    """A ray of the geometric lower image pointing upward, if any.

    Such a ray certifies that the primal feasible set is empty.
    """
    if dimg.empty:
        return None
    for r in dimg.poly.v.rays + dimg.poly.v.lines:
        if r[-1] > 0:
            return r
    for l in dimg.poly.v.lines:
        if l[-1] < 0:
            return tuple(-x for x in l)
    return None


# ---------------------------------------------------------------------------
# classification


def _member(poly: Polyhedron, nvars: int, offset: int = 0):
    """Constraints placing variables ``offset..offset+dim`` inside ``poly``."""
    d = poly.dim
    pad = lambda a: zeros(offset) + tuple(a) + zeros(nvars - offset - d)
    return [(pad(a), b) for a, b in poly.h.ineqs], [(pad(a), b) for a, b in poly.h.eqs]


def _weakly_minimal_at(poly: Polyhedron, y: Sequence) -> bool:
    # max eps s.t. y' in poly, y' <= y - eps e
    q = poly.dim
    ineqs, eqs = _member(poly, q + 1)
    for i in range(q):
        ineqs.append((unit(q + 1, i, -1)[:q] + (Fraction(-1),), -y[i]))
    res = solve_lp(LpProblem(zeros(q) + (Fraction(-1),), tuple(ineqs), tuple(eqs), q + 1))
    return isinstance(res, Optimal) and -res.value <= 0


def _minimal_at(poly: Polyhedron, y: Sequence) -> bool:
    # max e.(y - y') s.t. y' in poly, y' <= y
    q = poly.dim
    ineqs, eqs = _member(poly, q)
    for i in range(q):
        ineqs.append((unit(q, i, -1), -y[i]))
    res = solve_lp(LpProblem((Fraction(1),) * q, tuple(ineqs), tuple(eqs), q))
    return isinstance(res, Optimal) and res.value == sum(y)


def _k_maximal_at(poly: Polyhedron, y: Sequence) -> bool:
    # max t s.t. (y_1, ..., y_{q-1}, t) in poly
    q = poly.dim
    ineqs, eqs = [], []
    for a, b in poly.h.ineqs:
        ineqs.append(((a[-1],), b - sum(a[i] * y[i] for i in range(q - 1))))
    for a, b in poly.h.eqs:
        eqs.append(((a[-1],), b - sum(a[i] * y[i] for i in range(q - 1))))
    res = solve_lp(LpProblem((Fraction(-1),), tuple(ineqs), tuple(eqs), 1))
    return isinstance(res, Optimal) and -res.value == y[-1]


def _orthant_maximal_at(poly: Polyhedron, y: Sequence) -> bool:
    # max e.(y' - y) s.t. y' in poly, y' >= y
    d = poly.dim
    ineqs, eqs = _member(poly, d)
    for i in range(d):
        ineqs.append((unit(d, i), y[i]))
    res = solve_lp(LpProblem((Fraction(-1),) * d, tuple(ineqs), tuple(eqs), d))
    return isinstance(res, Optimal) and -res.value == sum(y)


def point_flags(y: Sequence, img: ImageSet) -> FaceFlags:
    """Minimality / maximality of a single point of the image."""
    poly = img.poly
    if img.kind is ImageKind.PRIMAL:
        weak = _weakly_minimal_at(poly, y)
        return FaceFlags(weakly_minimal=weak, minimal=weak and _minimal_at(poly, y))
    if img.kind is ImageKind.GEOMETRIC:
        return FaceFlags(k_maximal=_k_maximal_at(poly, y))
    return FaceFlags(orthant_maximal=_orthant_maximal_at(poly, y))


def classify_face(f: Face, img: ImageSet) -> FaceFlags:
    """Flags of a whole face, read off at one relative-interior point."""
    if img.empty:
        raise ContractViolation("cannot classify a face of an empty image")
    if img.lattice is not None and img.lattice.index(f.active) is None:
        raise ContractViolation(f"face {sorted(f.active)} is not a face of the {img.kind.value} image")
    if any(i >= len(img.poly.v.vertices) for i in f.vertices) or any(
        i >= len(img.poly.v.rays) for i in f.rays
    ):
        raise ContractViolation(f"face does not belong to the {img.kind.value} image")
    return point_flags(relative_interior_point(f, img.poly), img)


def classified_lattice(img: ImageSet) -> FaceLattice:
    if img.empty:
        raise ContractViolation("empty image has no face lattice")
    lattice = face_lattice(img.poly)
    return lattice.with_flags([classify_face(f, img) for f in lattice])


def recession_cone_ok(img: ImageSet) -> bool:
    """The ordering-cone generators are recession directions of the image."""
    if img.empty:
        return True
    d = img.poly.dim
    if img.kind is ImageKind.PRIMAL:
        dirs = [unit(d, k) for k in range(d)]
    elif img.kind is ImageKind.GEOMETRIC:
        dirs = [unit(d, d - 1, -1)]
    else:
        dirs = [unit(d, k, -1) for k in range(d)]
    return all(img.poly.contains_direction(r) for r in dirs)
