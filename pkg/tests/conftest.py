from fractions import Fraction as F

import pytest
from hypothesis import HealthCheck, settings

from molpdual.molp import example_instance
from molpdual.report import Pipeline

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def example():
    return example_instance()


@pytest.fixture(scope="session")
def pipe(example):
    p = Pipeline(example)
    p.verify()
    return p


@pytest.fixture(scope="session")
def pimg(pipe):
    return pipe.pimg


@pytest.fixture(scope="session")
def dimg(pipe):
    return pipe.dimg


@pytest.fixture(scope="session")
def dbar(pipe):
    return pipe.dbar


def pt(*xs):
    return tuple(F(x) for x in xs)


DUAL_VERTICES = {pt("1/3", "5/6"), pt("2/3", "7/6"), pt("4/5", "11/10"), pt(1, "1/2")}
PARAMETRIC_VERTICES = {pt(1, 0, "1/2"), pt("4/5", "1/5", "11/10"), pt("2/3", "1/3", "7/6"),
                       pt("1/3", "2/3", "5/6")}
PRIMAL_VERTICES = {pt("1/2", "7/2"), pt(1, "3/2"), pt("3/2", "1/2")}


def find_face(img, verts, rays=()):
    """Index of the face of ``img`` spanned by exactly these generators."""
    pts = frozenset(i for i, v in enumerate(img.poly.v.vertices) if v in set(verts))
    rs = frozenset(i for i, r in enumerate(img.poly.v.rays) if r in set(rays))
    assert len(pts) == len(set(verts)) and len(rs) == len(set(rays))
    return next(i for i, f in enumerate(img.lattice) if f.vertices == pts and f.rays == rs)


# ---------------------------------------------------------------------------
# acceptance summary: tests tag themselves with record_property("criterion", ...)

_CRITERIA: dict[int, tuple[str, str]] = {}
CRITERION_COUNT = 9


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    number, text = props["criterion"]
    if report.when == "call" or report.failed:
        verdict = "PASS" if report.passed else "FAIL"
        if report.failed or number not in _CRITERIA:
            _CRITERIA[number] = (verdict, text)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, CRITERION_COUNT + 1):
        verdict, text = _CRITERIA.get(n, ("NOT RUN", ""))
        terminalreporter.write_line(f"criterion {n}: {verdict}  {text}")
