import pytest

from acmoduli import generators
from acmoduli.simplicial import subdivide
from acmoduli.spectral import assemble


@pytest.fixture(scope="session")
def t3_meshes():
    m0 = generators.t3(3)
    m1 = subdivide(m0)
    return m0, m1


@pytest.fixture(scope="session")
def t3_fe(t3_meshes):
    return tuple(assemble(m) for m in t3_meshes)


@pytest.fixture(scope="session")
def s3_mesh1():
    return generators.s3_round(1)


ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance_log():
    """Criterion number -> list of (ok, detail); printed at the end of the run."""
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        rows = ACCEPTANCE[n]
        ok = all(r[0] for r in rows)
        detail = "; ".join(d for _, d in rows)
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
