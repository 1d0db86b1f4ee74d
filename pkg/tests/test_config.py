import math

import numpy as np
import pytest

from critgrad.config import Config, load_config, parse_config
from critgrad.errors import ConfigError

BASE = """
[domain]
dim = 1
x = -2*pi, 2*pi
n = 100

[coefficients]
mu = 1.0
cplus = "if x < 0 then 0 else cos(x) + 1"
cminus = "0"
h = "if x < 0 then cos(x) - sin(x)^2 else 0"
"""


def test_parse_base():
    cfg = parse_config(BASE)
    assert cfg.dim == 1 and cfg.counts == (100,)
    assert cfg.bounds[0] == pytest.approx((-2 * math.pi, 2 * math.pi))
    assert cfg.lambda_mode == "single" and cfg.lambdas == (0.0,)
    ops, mu, cp, cm, h = cfg.build()
    x = ops.mesh.coords[:, 0]
    np.testing.assert_allclose(cp, np.where(x < 0, 0, np.cos(x) + 1))


def test_lambda_modes():
    cfg = parse_config(BASE + "[lambda]\nmode = grid\nvalues = 0.5*pi^2, pi^2\n")
    assert cfg.lambdas == pytest.approx((0.5 * math.pi**2, math.pi**2))
    cfg = parse_config(BASE + "[lambda]\nmode = grid\nstart = 0\nstop = 1\nnum = 3\n")
    assert cfg.lambdas == (0.0, 0.5, 1.0)
    cfg = parse_config(BASE + "[lambda]\nmode = bracket\nlo = 1\nhi = 2\n")
    assert cfg.bracket == (1.0, 2.0)


def test_solver_and_run_sections():
    cfg = parse_config(BASE + "[solver]\nmax_newton = 7\nmp_tol = 1e-5\n[run]\nseed = 42\n")
    opts = cfg.options()
    assert opts.max_newton == 7 and opts.mp_tol == 1e-5 and cfg.seed == 42


def test_two_dimensional():
    cfg = parse_config("[domain]\ndim = 2\nx = 0, 1\ny = 0, 2\nnx = 5\nny = 7\n")
    assert cfg.counts == (5, 7)
    ops = cfg.build()[0]
    assert ops.mesh.size == 35


def test_grid_override():
    assert parse_config(BASE).with_grid(40).counts == (40,)
    assert parse_config("[domain]\ndim = 2\n").with_grid(9).counts == (9, 9)
    cfg = Config()
    assert cfg.with_grid(None) is cfg


@pytest.mark.parametrize(
    "text",
    [
        "[domain\n",
        "[nonsense]\n",
        "[domain]\ndim = 3\n",
        "[domain]\nx = 0\n",
        "[domain]\nn = many\n",
        "[domain]\nx = 0, x\n",
        "[coefficients]\nh = \"1 +\"\n",
        "[coefficients]\nk = 1\n",
        "[lambda]\nmode = spiral\n",
        "[lambda]\nmode = grid\nvalues = 2, 1\n",
        "[solver]\nwarp = 1\n",
        "[solver]\nnewton_tol = -1\n",
        "[solver]\nmax_newton = lots\n",
        "[run]\nseed = x\n",
    ],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_bad_mesh_is_config_error():
    with pytest.raises(ConfigError):
        parse_config("[domain]\nn = 1\n").build()


def test_domain_error_in_coefficient_is_config_error():
    with pytest.raises(ConfigError):
        parse_config("[domain]\nx = -1, 1\n[coefficients]\nh = \"ln(x)\"\n").build()


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.ini"))
