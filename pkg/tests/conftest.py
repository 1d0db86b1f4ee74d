import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from critgrad.branch import scenario_spec, solve_u0  # noqa: E402
from critgrad.solve import SolveOptions  # noqa: E402


@pytest.fixture(scope="session")
def flip400():
    """h = 0, c+ = 1 on (0, 1) at n = 400 together with its trivial u0."""
    spec = scenario_spec("th_h0_flip", 400)
    return spec, solve_u0(spec, SolveOptions())


@pytest.fixture(scope="session")
def gamma1_400(flip400):
    from critgrad.spectral import assemble_linearized, principal_eigenvalue

    spec, u0 = flip400
    return principal_eigenvalue(assemble_linearized(spec, u0.u), spec.cplus, spec.ops)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
