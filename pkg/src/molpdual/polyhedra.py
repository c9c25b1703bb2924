"""Double-description polyhedral kernel.

A :class:`Polyhedron` always carries an irredundant inequality
description and a minimal generator description of the same set, plus
the incidence between them.  Conversion in both directions goes through
one homogenized cone routine, :func:`_dd_cone`, which works on integer
vectors with combinatorial adjacency.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .linalg import (
    QVector,
    add,
    affine_rank,
    dot,
    gauss_solve,
    integer_row,
    is_zero,
    matvec,
    primitive,
    rank,
    rref,
    scale,
    sub,
    unit,
)


# ---------------------------------------------------------------------------
# integer cone core


def _normalize(v: list[int]) -> list[int]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return [x // g for x in v] if g > 1 else v


def _idot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _dd_cone(constraints: Sequence[Sequence[int]], dim: int):
    """Generators of ``{x in Z^dim : c . x >= 0 for c in constraints}``.

    Returns ``(rays, lines)``; rays are the extreme rays modulo the
    lineality space spanned by ``lines``.  Constraints are inserted in
    the given order.
    """
    lines = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
    rays: list[tuple[list[int], int]] = []  # (vector, zero-set bitmask)
    for k, h in enumerate(constraints):
        bit = 1 << k
        lvals = [_idot(h, l) for l in lines]
        pick = next((i for i, v in enumerate(lvals) if v != 0), None)
        if pick is not None:
            l = lines.pop(pick)
            hl = lvals.pop(pick)
            if hl < 0:
                l = [-x for x in l]
                hl = -hl
            lines = [
                _normalize([hl * x - v * y for x, y in zip(l2, l)]) if v else l2
                for l2, v in zip(lines, lvals)
            ]
            new_rays = []
            for r, z in rays:
                v = _idot(h, r)
                if v:
                    r = _normalize([hl * x - v * y for x, y in zip(r, l)])
                new_rays.append((r, z | bit))
            new_rays.append((l, bit - 1))
            rays = new_rays
            continue

        pos, zero, neg = [], [], []
        for r, z in rays:
            v = _idot(h, r)
            if v > 0:
                pos.append((r, z, v))
            elif v < 0:
                neg.append((r, z, v))
            else:
                zero.append((r, z | bit))
        new_rays = [(r, z) for r, z, _ in pos] + zero
        if pos and neg:
            masks = [z for _, z in rays]
            need = dim - len(lines) - 2
            for rp, zp, vp in pos:
                for rn, zn, vn in neg:
                    common = zp & zn
                    if bin(common).count("1") < need:
                        continue
                    # adjacent iff no third ray is tight on every common constraint
                    hits = 0
                    for zr in masks:
                        if zr & common == common:
                            hits += 1
                            if hits > 2:
                                break
                    if hits > 2:
                        continue
                    r = _normalize([vp * x - vn * y for x, y in zip(rn, rp)])
                    new_rays.append((r, common | bit))
        rays = new_rays
    return [r for r, _ in rays], lines


# ---------------------------------------------------------------------------
# representations


Constraint = tuple  # (QVector a, Fraction beta)


@dataclass(frozen=True)
class HRep:
    """``{y : a . y >= beta for ineqs, a . y == beta for eqs}`` in R^dim."""

    ineqs: tuple
    eqs: tuple
    dim: int

    def __post_init__(self):
        for a, _ in (*self.ineqs, *self.eqs):
            if len(a) != self.dim:
                raise ValueError("constraint of wrong length")


@dataclass(frozen=True)
class VRep:
    vertices: tuple
    rays: tuple = ()
    lines: tuple = ()
    dim: int = -1

    def __post_init__(self):
        if self.dim < 0:
            for g in (*self.vertices, *self.rays, *self.lines):
                object.__setattr__(self, "dim", len(g))
                break
            else:
                raise ValueError("dimension required for an empty VRep")

    @property
    def empty(self) -> bool:
        return not self.vertices


def _lineality_basis(lines: Iterable[Sequence]) -> tuple:
    lines = [tuple(l) for l in lines if not is_zero(l)]
    if not lines:
        return ()
    rows, _ = rref(lines)
    return tuple(primitive(r) for r in rows)


def _orth_projector(lines: Sequence[Sequence]):
    """Orthogonal projection onto the complement of span(lines)."""
    basis: list[QVector] = []
    for l in lines:
        v = tuple(Fraction(x) for x in l)
        for b in basis:
            v = sub(v, scale(dot(v, b) / dot(b, b), b))
        if not is_zero(v):
            basis.append(v)

    def project(x):
        x = tuple(Fraction(t) for t in x)
        for b in basis:
            c = dot(x, b)
            if c:
                x = sub(x, scale(c / dot(b, b), b))
        return x

    return project


def _canonical_vrep(vertices, rays, lines, dim) -> VRep:
    lines = _lineality_basis(lines)
    project = _orth_projector(lines)
    verts = sorted({project(v) for v in vertices})
    rs = set()
    for r in rays:
        r = project(r)
        if not is_zero(r):
            rs.add(primitive(r))
    return VRep(tuple(verts), tuple(sorted(rs)), lines, dim)


def dd_h_to_v(h: HRep) -> VRep:
    """Generators of an H-described polyhedron.  An empty polyhedron
    comes back as a VRep with no vertices (``.empty`` is true)."""
    d = h.dim
    if h.eqs:
        sol = gauss_solve([a for a, _ in h.eqs], [b for _, b in h.eqs], d)
        if sol is None:
            return VRep((), (), (), d)
        y0, basis = sol.point, list(sol.basis)
    else:
        y0, basis = tuple(Fraction(0) for _ in range(d)), [unit(d, j) for j in range(d)]
    k = len(basis)
    # affine chart y = y0 + N z, homogenized with lambda as last coordinate
    rows = [[0] * k + [1]]
    for a, beta in h.ineqs:
        coeff = [dot(a, bv) for bv in basis]
        rhs = Fraction(beta) - dot(a, y0)
        row = coeff + [-rhs]
        if is_zero(row):
            continue
        rows.append(integer_row(row))
    rays, lines = _dd_cone(rows, k + 1)

    def lift(z):
        out = list(y0)
        for zi, bv in zip(z, basis):
            if zi:
                out = [o + zi * b for o, b in zip(out, bv)]
        return tuple(out)

    def lift_dir(z):
        out = [Fraction(0)] * d
        for zi, bv in zip(z, basis):
            if zi:
                out = [o + zi * b for o, b in zip(out, bv)]
        return tuple(out)

    vertices, drays = [], []
    for r in rays:
        lam = r[-1]
        if lam > 0:
            vertices.append(lift([Fraction(x, lam) for x in r[:-1]]))
        else:
            drays.append(lift_dir(r[:-1]))
    if not vertices:
        return VRep((), (), (), d)
    dlines = [lift_dir(l[:-1]) for l in lines]
    return _canonical_vrep(vertices, drays, dlines, d)


def _reduce_against(row: QVector, eq_rows, pivots) -> QVector:
    for er, p in zip(eq_rows, pivots):
        if row[p]:
            row = sub(row, scale(row[p] / er[p], er))
    return row


def dd_v_to_h(v: VRep) -> HRep:
    """Irredundant inequality description of ``conv(V) + cone(R) + lin(L)``."""
    d = v.dim
    if v.empty:
        return HRep(((tuple(Fraction(0) for _ in range(d)), Fraction(1)),), (), d)
    # polar cone in (a, c): a . y + c >= 0 valid on the polyhedron
    rows = []
    for p in v.vertices:
        rows.append(integer_row(tuple(p) + (Fraction(1),)))
    for r in v.rays:
        rows.append(integer_row(tuple(r) + (Fraction(0),)))
    for l in v.lines:
        rl = integer_row(tuple(l) + (Fraction(0),))
        rows.append(rl)
        rows.append([-x for x in rl])
    rays, lines = _dd_cone(rows, d + 1)

    eq_rows, pivots = rref([tuple(Fraction(x) for x in l) for l in lines]) if lines else ([], [])
    eqs = []
    for er in eq_rows:
        er = primitive(er)
        eqs.append((tuple(er[:d]), -er[d]))
    ineqs = set()
    for r in rays:
        row = _reduce_against(tuple(Fraction(x) for x in r), eq_rows, pivots)
        if is_zero(row[:d]):
            continue
        row = primitive(row)
        ineqs.add((tuple(row[:d]), -row[d]))
    return HRep(tuple(sorted(ineqs)), tuple(eqs), d)


# ---------------------------------------------------------------------------
# polyhedron


@dataclass(frozen=True)
class Polyhedron:
    """Both descriptions of one polyhedron together with their incidence:
    ``vertex_sat[j]`` / ``ray_sat[j]`` are the generator indices that
    satisfy inequality ``j`` with equality."""

    h: HRep
    v: VRep
    vertex_sat: tuple = field(init=False, repr=False)
    ray_sat: tuple = field(init=False, repr=False)

    def __post_init__(self):
        vs, rs = [], []
        for a, beta in self.h.ineqs:
            vs.append(frozenset(i for i, p in enumerate(self.v.vertices) if dot(a, p) == beta))
            rs.append(frozenset(i for i, r in enumerate(self.v.rays) if dot(a, r) == 0))
        object.__setattr__(self, "vertex_sat", tuple(vs))
        object.__setattr__(self, "ray_sat", tuple(rs))

    @classmethod
    def from_h(cls, h: HRep) -> "Polyhedron":
        v = dd_h_to_v(h)
        return cls(dd_v_to_h(v), v)

    @classmethod
    def from_v(cls, v: VRep) -> "Polyhedron":
        h = dd_v_to_h(v)
        return cls(h, dd_h_to_v(h))

    @classmethod
    def from_inequalities(cls, ineqs, eqs=(), dim=None) -> "Polyhedron":
        ineqs = tuple((tuple(Fraction(x) for x in a), Fraction(b)) for a, b in ineqs)
        eqs = tuple((tuple(Fraction(x) for x in a), Fraction(b)) for a, b in eqs)
        if dim is None:
            dim = len((ineqs or eqs)[0][0])
        return cls.from_h(HRep(ineqs, eqs, dim))

    @classmethod
    def from_generators(cls, vertices, rays=(), lines=(), dim=None) -> "Polyhedron":
        conv = lambda gs: tuple(tuple(Fraction(x) for x in g) for g in gs)
        return cls.from_v(VRep(conv(vertices), conv(rays), conv(lines), -1 if dim is None else dim))

    @property
    def dim(self) -> int:
        """Ambient dimension."""
        return self.h.dim

    @property
    def empty(self) -> bool:
        return self.v.empty

    @property
    def affine_dim(self) -> int:
        return affine_rank(self.v.vertices, self.v.rays + self.v.lines)

    @property
    def incidence(self) -> list[list[bool]]:
        """Rows: vertices, then rays, then lines; columns: inequalities."""
        rows = [[i in s for s in self.vertex_sat] for i in range(len(self.v.vertices))]
        rows += [[i in s for s in self.ray_sat] for i in range(len(self.v.rays))]
        rows += [[True] * len(self.h.ineqs) for _ in self.v.lines]
        return rows

    def contains(self, y: Sequence) -> bool:
        if len(y) != self.dim:
            raise ValueError("dimension mismatch")
        if self.empty:
            return False
        return all(dot(a, y) >= b for a, b in self.h.ineqs) and all(
            dot(a, y) == b for a, b in self.h.eqs
        )

    def contains_direction(self, d: Sequence) -> bool:
        """Whether ``d`` lies in the recession cone."""
        return all(dot(a, d) >= 0 for a, _ in self.h.ineqs) and all(
            dot(a, d) == 0 for a, _ in self.h.eqs
        )

    def includes(self, other: "Polyhedron") -> bool:
        """Exact set inclusion ``other <= self``, checked on generators."""
        if other.empty:
            return True
        if self.empty:
            return False
        return (
            all(self.contains(p) for p in other.v.vertices)
            and all(self.contains_direction(r) for r in other.v.rays)
            and all(self.contains_direction(l) and self.contains_direction(scale(-1, l))
                    for l in other.v.lines)
        )

    def same_set(self, other: "Polyhedron") -> bool:
        return self.includes(other) and other.includes(self)

    def intersect(self, ineqs=(), eqs=()) -> "Polyhedron":
        ineqs = tuple((tuple(Fraction(x) for x in a), Fraction(b)) for a, b in ineqs)
        eqs = tuple((tuple(Fraction(x) for x in a), Fraction(b)) for a, b in eqs)
        return Polyhedron.from_h(HRep(self.h.ineqs + ineqs, self.h.eqs + eqs, self.dim))

    def to_json(self) -> dict:
        fmt = lambda xs: [str(x) for x in xs]
        gens = [{"type": "vertex", "coords": fmt(p)} for p in self.v.vertices]
        gens += [{"type": "ray", "coords": fmt(r)} for r in self.v.rays]
        gens += [{"type": "line", "coords": fmt(l)} for l in self.v.lines]
        return {
            "dim": self.dim,
            "empty": self.empty,
            "inequalities": [fmt(a) + [str(b)] for a, b in self.h.ineqs],
            "equations": [fmt(a) + [str(b)] for a, b in self.h.eqs],
            "generators": gens,
        }


def linear_image(p: Polyhedron, m: Sequence[Sequence], offset: Sequence | None = None) -> Polyhedron:
    """Image of ``p`` under ``y -> m y (+ offset)``."""
    if m and len(m[0]) != p.dim:
        raise ValueError("matrix columns differ from ambient dimension")
    out_dim = len(m)
    if p.empty:
        return Polyhedron.from_v(VRep((), (), (), out_dim))
    shift = tuple(Fraction(x) for x in offset) if offset is not None else None
    verts = [matvec(m, v) for v in p.v.vertices]
    if shift is not None:
        verts = [add(v, shift) for v in verts]
    rays = [r for r in (matvec(m, r) for r in p.v.rays) if not is_zero(r)]
    lines = [l for l in (matvec(m, l) for l in p.v.lines) if not is_zero(l)]
    return Polyhedron.from_v(VRep(tuple(verts), tuple(rays), tuple(lines), out_dim))


def minkowski_add_cone(p: Polyhedron, cone_rays: Sequence[Sequence]) -> Polyhedron:
    cone_rays = [tuple(Fraction(x) for x in r) for r in cone_rays]
    if any(len(r) != p.dim for r in cone_rays):
        raise ValueError("ray dimension mismatch")
    if p.empty or not cone_rays:
        return p
    return Polyhedron.from_v(replace(p.v, rays=p.v.rays + tuple(cone_rays)))


# ---------------------------------------------------------------------------
# faces


@dataclass(frozen=True)
class FaceFlags:
    weakly_minimal: bool = False
    minimal: bool = False
    k_maximal: bool = False
    orthant_maximal: bool = False


@dataclass(frozen=True)
class Face:
    """A nonempty face, identified by its maximal active inequality set.

    ``vertices`` and ``rays`` index into the owning polyhedron's VRep; the
    lineality space belongs to every face and is not listed.
    """

    active: frozenset
    vertices: frozenset
    rays: frozenset
    dim: int
    flags: FaceFlags | None = None

    @property
    def key(self) -> tuple:
        return tuple(sorted(self.active))

    @property
    def bounded(self) -> bool:
        return not self.rays

    def contains_face(self, other: "Face") -> bool:
        return self.active <= other.active


@dataclass(frozen=True)
class FaceLattice:
    """All nonempty faces (the improper one included), ordered by
    ``(dim, sorted active set)``."""

    faces: tuple
    full: int  # index of the improper face

    def __post_init__(self):
        object.__setattr__(self, "_by_key", {f.active: i for i, f in enumerate(self.faces)})

    def __len__(self):
        return len(self.faces)

    def __iter__(self):
        return iter(self.faces)

    def __getitem__(self, i) -> Face:
        return self.faces[i]

    def index(self, active: Iterable[int]) -> int | None:
        return self._by_key.get(frozenset(active))

    def proper(self) -> list[int]:
        return [i for i in range(len(self.faces)) if i != self.full]

    def order(self) -> list[tuple[int, int]]:
        """Pairs ``(i, j)`` with face ``i`` strictly contained in face ``j``."""
        return [
            (i, j)
            for i, fi in enumerate(self.faces)
            for j, fj in enumerate(self.faces)
            if i != j and fj.contains_face(fi)
        ]

    def with_flags(self, flags: Sequence[FaceFlags]) -> "FaceLattice":
        faces = tuple(replace(f, flags=fl) for f, fl in zip(self.faces, flags))
        return FaceLattice(faces, self.full)


def _generators_of(p: Polyhedron, active) -> tuple[frozenset, frozenset]:
    verts = frozenset(range(len(p.v.vertices)))
    rays = frozenset(range(len(p.v.rays)))
    for j in active:
        verts &= p.vertex_sat[j]
        rays &= p.ray_sat[j]
    return verts, rays


def _closure(p: Polyhedron, verts: frozenset, rays: frozenset) -> frozenset:
    return frozenset(
        j for j in range(len(p.h.ineqs)) if verts <= p.vertex_sat[j] and rays <= p.ray_sat[j]
    )


def make_face(p: Polyhedron, active) -> Face | None:
    """The face cut out by ``active`` (closed up to the maximal active set),
    or ``None`` when it is empty."""
    verts, rays = _generators_of(p, active)
    if not verts:
        return None
    act = _closure(p, verts, rays)
    pts = [p.v.vertices[i] for i in sorted(verts)]
    dirs = [p.v.rays[i] for i in sorted(rays)] + list(p.v.lines)
    return Face(act, verts, rays, affine_rank(pts, dirs))


def sort_faces(faces: Iterable[Face]) -> tuple[tuple, int]:
    faces = sorted(faces, key=lambda f: (f.dim, f.key))
    full = min(range(len(faces)), key=lambda i: len(faces[i].active))
    return tuple(faces), full


def face_lattice(p: Polyhedron) -> FaceLattice:
    """Enumerate every nonempty face by descending from the improper face
    one inequality at a time."""
    if p.empty:
        raise ValueError("face lattice of an empty polyhedron")
    top = make_face(p, ())
    seen = {top.active: top}
    stack = [top]
    while stack:
        f = stack.pop()
        for j in range(len(p.h.ineqs)):
            if j in f.active:
                continue
            verts = f.vertices & p.vertex_sat[j]
            if not verts:
                continue
            rays = f.rays & p.ray_sat[j]
            act = _closure(p, verts, rays)
            if act in seen:
                continue
            g = make_face(p, act)
            seen[act] = g
            stack.append(g)
    faces, full = sort_faces(seen.values())
    return FaceLattice(faces, full)


def face_points(p: Polyhedron, f: Face) -> tuple[list, list]:
    """Vertices and recession directions (rays, then lines both ways) of ``f``."""
    verts = [p.v.vertices[i] for i in sorted(f.vertices)]
    dirs = [p.v.rays[i] for i in sorted(f.rays)]
    return verts, dirs


def relative_interior_point(f: Face, p: Polyhedron) -> QVector:
    verts, rays = face_points(p, f)
    if not verts:
        raise ValueError("empty face")
    n = len(verts)
    y = tuple(sum((v[k] for v in verts), Fraction(0)) / n for k in range(p.dim))
    for r in rays:
        y = add(y, r)
    return y


def face_contains_point(p: Polyhedron, f: Face, y: Sequence) -> bool:
    return p.contains(y) and all(dot(p.h.ineqs[j][0], y) == p.h.ineqs[j][1] for j in f.active)


def face_contains_direction(p: Polyhedron, f: Face, d: Sequence) -> bool:
    return p.contains_direction(d) and all(dot(p.h.ineqs[j][0], d) == 0 for j in f.active)


def smallest_face(p: Polyhedron, lattice: FaceLattice, points: Sequence, directions: Sequence = ()):
    """Index of the smallest face of ``p`` containing the given points and
    recession directions, or ``None`` if they do not all lie in ``p``."""
    if not points:
        return None
    if not all(p.contains(y) for y in points) or not all(p.contains_direction(d) for d in directions):
        return None
    act = [
        j
        for j, (a, b) in enumerate(p.h.ineqs)
        if all(dot(a, y) == b for y in points) and all(dot(a, d) == 0 for d in directions)
    ]
    return lattice.index(act)


def face_dim_from_active(p: Polyhedron, f: Face) -> int:
    """Dimension via the rank of the face's equality system."""
    rows = [a for a, _ in p.h.eqs] + [p.h.ineqs[j][0] for j in f.active]
    return p.dim - (rank(rows) if rows else 0)


def enumerate_subsets(n: int, max_size: int | None = None):
    for k in range(0, (n if max_size is None else max_size) + 1):
        yield from combinations(range(n), k)
