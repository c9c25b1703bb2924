from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from molpdual.linalg import dot, unit
from molpdual.molp import dual_feasible_set, geometric_objective
from molpdual.oracle import brute_force_faces, lattice_mismatches
from molpdual.polyhedra import (
    HRep,
    Polyhedron,
    VRep,
    dd_h_to_v,
    dd_v_to_h,
    face_lattice,
    linear_image,
    minkowski_add_cone,
    relative_interior_point,
)

from conftest import DUAL_VERTICES, find_face, pt

SQUARE = Polyhedron.from_inequalities([((1, 0), 0), ((0, 1), 0), ((-1, 0), -1), ((0, -1), -1)])
DUAL_HULL = Polyhedron.from_generators(sorted(DUAL_VERTICES), [(0, -1)])


def test_square_vertices():
    assert set(SQUARE.v.vertices) == {pt(0, 0), pt(0, 1), pt(1, 0), pt(1, 1)}
    assert not SQUARE.v.rays and not SQUARE.v.lines


def test_halfplane_lineality():
    v = dd_h_to_v(HRep(((pt(1, 0), F(0)),), (), 2))
    assert v.vertices == (pt(0, 0),)
    assert v.lines == (pt(0, 1),)
    assert v.rays == (pt(1, 0),)


def test_dual_feasible_set_images(example):
    T = dual_feasible_set(example)
    D = geometric_objective(example)
    images = {tuple(dot(row, v) for row in D) for v in T.v.vertices}
    assert DUAL_VERTICES <= images


def test_v_to_h_square_and_dual():
    assert len(dd_v_to_h(SQUARE.v).ineqs) == 4
    h = DUAL_HULL.h
    assert len(h.ineqs) == 5
    # rows are a.y >= beta, so upper facets carry a negative last coefficient
    assert sum(a[-1] < 0 for a, _ in h.ineqs) == 3
    assert sum(a[-1] == 0 for a, _ in h.ineqs) == 2


def test_single_point():
    h = dd_v_to_h(VRep((pt(1, 2, 3),), (), (), 3))
    assert len(h.ineqs) == 0 and len(h.eqs) == 3


def test_empty_polyhedron():
    p = Polyhedron.from_inequalities([((1,), 1), ((-1,), 0)])
    assert p.empty
    assert linear_image(p, ((F(1),),)).empty


def test_linear_image():
    same = linear_image(SQUARE, ((F(1), F(0)), (F(0), F(1))))
    assert same.same_set(SQUARE)
    interval = linear_image(SQUARE, ((F(1), F(0)),))
    assert set(interval.v.vertices) == {pt(0), pt(1)}


def test_linear_image_of_T_is_dual(example, dimg):
    img = minkowski_add_cone(linear_image(dual_feasible_set(example), geometric_objective(example)), [(0, -1)])
    assert img.same_set(DUAL_HULL)
    assert img.same_set(dimg.poly)


def test_minkowski_add_cone():
    origin = Polyhedron.from_generators([(0, 0)])
    orthant = minkowski_add_cone(origin, [(1, 0), (0, 1)])
    assert orthant.same_set(Polyhedron.from_inequalities([((1, 0), 0), ((0, 1), 0)]))
    assert minkowski_add_cone(SQUARE, []) is SQUARE


def test_square_lattice():
    lat = face_lattice(SQUARE)
    dims = sorted(f.dim for f in lat)
    assert dims == [0] * 4 + [1] * 4 + [2]
    assert lat[lat.full].dim == 2 and not lat[lat.full].active


def test_dual_lattice(dimg):
    vertices = [f for f in dimg.lattice if f.dim == 0]
    edges = [f for f in dimg.lattice if f.dim == 1]
    assert len(vertices) == 4 and len(edges) == 5
    assert sum(f.bounded for f in edges) == 3


def test_parametric_lattice(dbar):
    assert sum(f.dim == 0 for f in dbar.lattice) == 4
    assert sum(f.dim == 1 and f.bounded for f in dbar.lattice) == 3


def test_relative_interior_point(dimg, pimg):
    v = dimg.lattice[find_face(dimg, [pt("1/3", "5/6")])]
    assert relative_interior_point(v, dimg.poly) == pt("1/3", "5/6")
    e = dimg.lattice[find_face(dimg, [pt("2/3", "7/6"), pt("4/5", "11/10")])]
    assert relative_interior_point(e, dimg.poly) == pt("11/15", "17/15")
    f = pimg.lattice[find_face(pimg, [pt("1/2", "7/2")], [pt(0, 1)])]
    assert relative_interior_point(f, pimg.poly) == pt("1/2", "9/2")


def test_contains(pimg):
    assert pimg.poly.contains(pt(1, "3/2"))
    assert not pimg.poly.contains(pt(0, 0))
    assert all(pimg.poly.contains(v) for v in pimg.poly.v.vertices)
    with pytest.raises(ValueError):
        pimg.poly.contains(pt(1))


def test_to_json_tags(pimg):
    js = pimg.poly.to_json()
    assert {g["type"] for g in js["generators"]} == {"vertex", "ray"}
    assert all(isinstance(x, str) for row in js["inequalities"] for x in row)


# ---------------------------------------------------------------------------
# properties

coef = st.integers(-3, 3)


def h_reps(dim=st.integers(1, 3), rows=st.integers(0, 6)):
    return st.tuples(dim, rows).flatmap(lambda dr: st.lists(
        st.tuples(st.lists(coef, min_size=dr[0], max_size=dr[0]), st.integers(-3, 3)),
        min_size=dr[1], max_size=dr[1]).map(lambda r: (dr[0], r)))


def _poly(dim, rows):
    ineqs = tuple((tuple(F(x) for x in a), F(b)) for a, b in rows if any(a))
    return Polyhedron.from_h(HRep(ineqs, (), dim)), ineqs


@given(h_reps())
def test_round_trip_same_set(data):
    dim, rows = data
    p, ineqs = _poly(dim, rows)
    original = HRep(ineqs, (), dim)
    if p.empty:
        return
    # every generator satisfies the original system, and every original row is implied by p
    for v in p.v.vertices:
        assert all(dot(a, v) >= b for a, b in ineqs)
    for r in p.v.rays + p.v.lines:
        assert all(dot(a, r) >= 0 for a, _ in ineqs)
    for l in p.v.lines:
        assert all(dot(a, l) == 0 for a, _ in ineqs)
    back = Polyhedron.from_v(dd_h_to_v(original))
    assert back.same_set(p)


@given(h_reps())
def test_incidence_consistency(data):
    dim, rows = data
    p, _ = _poly(dim, rows)
    if p.empty:
        return
    for j, (a, b) in enumerate(p.h.ineqs):
        assert p.vertex_sat[j] == {i for i, v in enumerate(p.v.vertices) if dot(a, v) == b}
        assert all(dot(a, v) >= b for v in p.v.vertices)


@given(h_reps(rows=st.integers(0, 8)))
def test_lattice_matches_brute_force(data):
    dim, rows = data
    p, _ = _poly(dim, rows)
    assume(not p.empty and len(p.h.ineqs) <= 8)
    lat = face_lattice(p)
    assert lattice_mismatches(lat, brute_force_faces(p)) == []
    full_dim = lat[lat.full].dim
    for f in lat:
        if len(f.active) == 1:  # facets
            assert f.dim == full_dim - 1


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=3, max_size=7))
def test_polygon_vertices_equal_edges(points):
    p = Polyhedron.from_generators(points)
    assume(p.affine_dim == 2)
    lat = face_lattice(p)
    assert sum(f.dim == 0 for f in lat) == sum(f.dim == 1 for f in lat)


@given(h_reps(dim=st.just(2)), st.lists(st.tuples(coef, coef), min_size=1, max_size=3))
def test_cone_sum_recession(data, rays):
    dim, rows = data
    p, _ = _poly(dim, rows)
    rays = [r for r in rays if any(r)]
    q = minkowski_add_cone(p, rays)
    if not q.empty:
        assert all(q.contains_direction(tuple(F(x) for x in r)) for r in rays)
        assert q.includes(p)


def test_unit_cube_lattice():
    cube = Polyhedron.from_inequalities(
        [(unit(3, i), 0) for i in range(3)] + [(unit(3, i, -1), -1) for i in range(3)])
    counts = [sum(f.dim == d for f in face_lattice(cube)) for d in range(4)]
    assert counts == [8, 12, 6, 1]
    assert lattice_mismatches(face_lattice(cube), brute_force_faces(cube)) == []


def test_faces_of_cone_with_lines():
    # a wedge times a line in R^3
    p = Polyhedron.from_inequalities([((1, 0, 0), 0), ((0, 1, 0), 0)])
    lat = face_lattice(p)
    assert sorted(f.dim for f in lat) == [1, 2, 2, 3]
    assert p.v.lines == (pt(0, 0, 1),)
