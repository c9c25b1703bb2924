"""Acceptance gate.  Each test covers one numbered criterion and reports a
PASS/FAIL line in the terminal summary (see ``conftest.py``)."""

import json
import os
import random
import subprocess
import sys
import time
from fractions import Fraction as F

import pytest

from molpdual.cli import main
from molpdual.duality import (
    Direction,
    gamma_image,
    phi_inverse,
    phi_map,
    slice_equation,
    verify_geometric,
    verify_parametric,
    verify_phi,
)
from molpdual.linalg import gauss_solve
from molpdual.oracle import brute_force_classify, run_campaign
from molpdual.polyhedra import relative_interior_point

from conftest import DUAL_VERTICES, PARAMETRIC_VERTICES, PRIMAL_VERTICES, find_face, pt


@pytest.fixture
def criterion(record_property):
    def tag(number, text, detail=""):
        record_property("criterion", (number, f"{text}{'  [' + detail + ']' if detail else ''}"))

    return tag


def _proper(img, attr):
    return [i for i in img.lattice.proper() if getattr(img.lattice[i].flags, attr)]


def test_criterion_1_dual_vertices(tmp_path, criterion):
    criterion(1, "example: geometric lower image vertex set, exact, < 1 s")
    inst = tmp_path / "example.json"
    main(["example", "--out", str(inst)])
    start = time.perf_counter()
    code = main(["solve", str(inst), "--out", str(tmp_path / "report.json")])
    elapsed = time.perf_counter() - start
    report = json.loads((tmp_path / "report.json").read_text())
    verts = {tuple(F(x) for x in g["coords"])
             for g in report["lower_image_geometric"]["generators"] if g["type"] == "vertex"}
    criterion(1, "example: geometric lower image vertex set, exact, < 1 s", f"{elapsed:.3f} s")
    assert code == 0
    assert verts == DUAL_VERTICES
    assert elapsed < 1.0


def test_criterion_2_parametric_vertices(dbar, criterion):
    criterion(2, "example: parametric lower image vertices and its 3 maximal bounded edges")
    assert set(dbar.poly.v.vertices) == PARAMETRIC_VERTICES
    bounded_edges = {i for i, f in enumerate(dbar.lattice) if f.dim == 1 and f.bounded}
    maximal_edges = {i for i in _proper(dbar, "orthant_maximal") if dbar.lattice[i].dim == 1}
    assert len(bounded_edges) == 3
    assert bounded_edges == maximal_edges


def test_criterion_3_primal_structure(pimg, criterion):
    criterion(3, "example: upper image has 4 weakly minimal facets, 3 weakly minimal vertices")
    facets = [i for i in _proper(pimg, "weakly_minimal") if pimg.lattice[i].dim == 1]
    vertices = [i for i in _proper(pimg, "weakly_minimal") if pimg.lattice[i].dim == 0]
    assert len(facets) == 4 and len(vertices) == 3
    found = {pimg.poly.v.vertices[next(iter(pimg.lattice[i].vertices))] for i in vertices}
    assert found == set(pimg.poly.v.vertices) == PRIMAL_VERTICES
    # independent oracle: intersect consecutive facet lines written down by hand,
    # listed in boundary order from the vertical facet to the unbounded sloped one
    lines = [((2, 0), 1), ((8, 2), 11), ((4, 2), 7), ((2, 4), 5)]
    corners = {gauss_solve([a1, a2], [b1, b2]).point for (a1, b1), (a2, b2) in zip(lines, lines[1:])}
    assert corners == PRIMAL_VERTICES
    facet_rows = [pimg.poly.h.ineqs[j] for i in facets for j in pimg.lattice[i].active]
    assert {_normalized(a, b) for a, b in lines} == {_normalized(a, b) for a, b in facet_rows}


def _normalized(a, b):
    s = sum(F(x) for x in a)
    return tuple(F(x) / s for x in a), F(b) / s


def test_criterion_4_geometric_duality(pimg, dimg, criterion):
    criterion(4, "example: geometric duality map verdicts on all 7 K-maximal proper faces")
    rep = verify_geometric(pimg, dimg)
    kmax = _proper(dimg, "k_maximal")
    assert len(kmax) == 7
    assert rep.failures == []
    assert rep.bijection_ok and rep.inclusion_reversing_ok and rep.dimension_formula_ok
    fwd = [e for e in rep.entries if e.direction is Direction.PSI_FORWARD]
    assert {e.source for e in fwd} == {f"D:{i}" for i in kmax}
    assert all(e.source_dim + e.target_dim == 1 for e in fwd)
    back = [e for e in rep.entries if e.direction is Direction.PSI_INVERSE]
    assert {(e.target, e.source) for e in back} == {(e.source, e.target) for e in fwd}


def test_criterion_5_parametric_duality(pimg, dbar, dimg, criterion):
    criterion(5, "example: composed map bijection, dimension formula, w > 0 minimality criterion")
    rep = verify_parametric(pimg, dbar)
    assert rep.failures == []
    composed = [e for e in rep.entries if e.direction is Direction.COMPOSED and e.source.startswith("Dbar:")]
    assert len(composed) == 7 and all(e.source_dim + e.target_dim == 1 for e in composed)
    assert len({e.target for e in composed}) == 7
    special = f"Dbar:{find_face(dbar, [pt(1, 0, '1/2')])}"
    rng = random.Random(0)
    for e in composed:
        src = dbar.lattice[int(e.source.split(":")[1])]
        face = pimg.lattice[int(e.target.split(":")[1])]
        w = relative_interior_point(src, dbar.poly)[:-1]
        positive = all(x > 0 for x in w)
        assert face.flags.minimal == positive
        oracle_flags, _ = brute_force_classify(face, pimg, rng)
        assert oracle_flags.minimal == positive and oracle_flags.weakly_minimal
        if e.source_dim == 0:
            assert face.flags.minimal == (e.source != special)


def test_criterion_6_phi_equivalence(dimg, dbar, criterion):
    criterion(6, "example: slice of parametric image equals gamma image; phi bijective both ways")
    cut = dbar.poly.intersect(eqs=[slice_equation(2)])
    embedded = gamma_image(dimg.poly)
    assert cut.includes(embedded) and embedded.includes(cut)
    rep = verify_phi(dimg, dbar)
    assert rep.failures == []
    kmax = _proper(dimg, "k_maximal")
    omax = _proper(dbar, "orthant_maximal")
    assert len(kmax) == len(omax) == 7
    forward = {i: phi_map(i, dimg, dbar) for i in kmax}
    assert sorted(forward.values()) == sorted(omax)
    for i, j in forward.items():
        assert phi_inverse(j, dbar, dimg) == i
        assert dbar.lattice[j].dim == dimg.lattice[i].dim


@pytest.fixture(scope="module")
def campaign():
    start = time.perf_counter()
    runs = [run_campaign(2024, 150, q=2), run_campaign(2024, 50, q=3)]
    return runs, time.perf_counter() - start


def test_criterion_7_fuzz_campaign(campaign, criterion):
    runs, elapsed = campaign
    run_total = sum(r["instances_run"] for r in runs)
    violations = sum(r["violations"] for r in runs)
    criterion(7, "fuzz: 150 instances at q=2 and 50 at q=3 with zero violations, < 5 min",
              f"{run_total} run, {violations} violations, {elapsed:.1f} s")
    for r in runs:
        assert r["instances_run"] == r["count"]
        assert all(x == "0" for x in r["results"][0]["instance"]["b"])
        for res in r["results"]:
            inst = res["instance"]
            assert inst["n"] <= 5 and inst["m"] <= 5
            assert all(abs(int(x)) <= 5 for row in inst["P"] + inst["A"] for x in row)
            assert all(abs(int(x)) <= 5 for x in inst["b"])
    assert (runs[0]["count"], runs[1]["count"]) == (150, 50)
    assert violations == 0, [v for r in runs for res in r["results"] for v in res["violations"]][:10]
    assert elapsed < 300


def test_criterion_8_kernel_oracles(campaign, criterion):
    runs, _ = campaign
    results = [res for r in runs for res in r["results"]]
    compared = sum(res["oracle_checks"]["lattices_compared"] for res in results)
    skipped = sum(res["oracle_checks"]["lattices_skipped"] for res in results)
    classified = sum(res["oracle_checks"]["faces_classified"] for res in results)
    mismatches = [v for res in results for v in res["violations"] if "/faces:" in v or "/classify:" in v]
    criterion(8, "fuzz: face lattices and classifications agree with brute-force oracles",
              f"{compared} lattices compared, {skipped} beyond guard, {classified} faces classified")
    assert compared > 0 and classified > 0
    assert mismatches == []


def _cli(args, cwd, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    res = subprocess.run([sys.executable, "-m", "molpdual", *args], capture_output=True, cwd=cwd, env=env)
    return res.returncode, res.stdout


def test_criterion_9_determinism(tmp_path, criterion):
    criterion(9, "determinism: repeated commands give byte-identical output")
    example = tmp_path / "example.json"
    main(["example", "--out", str(example)])
    commands = [
        ["example"],
        ["solve", str(example)],
        ["verify", str(example)],
        ["verify", str(example), "--inject-fault"],
        ["fuzz", "--seed", "9", "--count", "4", "--q", "2"],
        ["fuzz", "--seed", "9", "--count", "2", "--q", "3"],
    ]
    for args in commands:
        assert _cli(args, tmp_path, 1) == _cli(args, tmp_path, 2), args
    figures = []
    for seed in (1, 2):
        out = tmp_path / f"figs{seed}"
        assert _cli(["plot", str(example), "--out", str(out)], tmp_path, seed)[0] == 0
        figures.append({p.name: p.read_bytes() for p in out.iterdir()})
    assert figures[0] == figures[1] and len(figures[0]) == 3
