"""INI configuration files describing a problem family.

Example::

    [domain]
    dim = 1
    x = -2*pi, 2*pi
    n = 800

    [coefficients]
    mu = 1.0
    cplus = "if x < 0 then 0 else cos(x) + 1"
    cminus = "0"
    h = "if x < 0 then cos(x) - sin(x)^2 else 0"

    [lambda]
    mode = grid
    values = 0.5, 1.0, 1.5

    [solver]
    mp_tol = 1e-6

    [run]
    seed = 0

Bounds and λ values accept constant expressions such as ``2*pi``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError, ExprError
from .expr import evaluate, parse, sample, variables
from .mesh import assemble_operators, build_mesh
from .solve import SolveOptions

_INT_OPTIONS = {"max_newton", "max_halvings", "mp_path_points", "max_mp_iters", "max_monotone"}


@dataclass
class Config:
    dim: int = 1
    bounds: tuple = ((0.0, 1.0),)
    counts: tuple = (200,)
    mu: float = 1.0
    cplus: str = "1"
    cminus: str = "0"
    h: str = "0"
    lambda_mode: str = "single"
    lambdas: tuple = (0.0,)
    bracket: tuple | None = None
    solver: dict = field(default_factory=dict)
    seed: int = 0
    outputs: dict = field(default_factory=dict)

    def options(self) -> SolveOptions:
        try:
            return SolveOptions(**self.solver)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid solver options: {exc}") from exc

    def with_grid(self, n: int | None) -> "Config":
        if n is None:
            return self
        return Config(**{**self.__dict__, "counts": tuple(int(n) for _ in range(self.dim))})

    def build(self):
        """Return ``(ops, mu, cplus, cminus, h)`` sampled on the mesh."""
        try:
            mesh = build_mesh(self.dim, self.bounds, self.counts)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        ops = assemble_operators(mesh)
        try:
            fields_ = [sample(parse(t), mesh) for t in (self.cplus, self.cminus, self.h)]
        except ExprError as exc:
            raise ConfigError(f"coefficient expression: {exc}") from exc
        return (ops, self.mu, *fields_)


def _const(text: str, what: str) -> float:
    try:
        node = parse(text)
    except ExprError as exc:
        raise ConfigError(f"{what}: {exc}") from exc
    if variables(node):
        raise ConfigError(f"{what} must be constant, got {text!r}")
    return float(evaluate(node))


def _list(text: str, what: str) -> tuple[float, ...]:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"{what} is empty")
    return tuple(_const(p.strip(), what) for p in parts)


def _unquote(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    return text


def parse_config(text: str) -> Config:
    """Parse INI text into a :class:`Config`; raises :class:`ConfigError`."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    known = {"domain", "coefficients", "lambda", "solver", "run", "output"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ConfigError(f"unknown section(s): {sorted(unknown)}")
    cfg = Config()
    dom = cp["domain"] if cp.has_section("domain") else {}
    try:
        cfg.dim = int(dom.get("dim", "1"))
    except ValueError as exc:
        raise ConfigError("dim must be an integer") from exc
    if cfg.dim not in (1, 2):
        raise ConfigError("dim must be 1 or 2")
    axes = ("x", "y")[: cfg.dim]
    bounds = []
    for ax in axes:
        vals = _list(_unquote(dom.get(ax, "0, 1")), f"domain.{ax}")
        if len(vals) != 2:
            raise ConfigError(f"domain.{ax} needs two endpoints")
        bounds.append(vals)
    cfg.bounds = tuple(bounds)
    counts = []
    for ax in axes:
        raw = dom.get(f"n{ax}", dom.get("n", "200"))
        try:
            counts.append(int(raw))
        except ValueError as exc:
            raise ConfigError(f"grid size must be an integer, got {raw!r}") from exc
    cfg.counts = tuple(counts)

    co = cp["coefficients"] if cp.has_section("coefficients") else {}
    cfg.mu = _const(_unquote(co.get("mu", "1")), "mu")
    for name in ("cplus", "cminus", "h"):
        if name in co:
            setattr(cfg, name, _unquote(co[name]))
            try:
                parse(getattr(cfg, name))
            except ExprError as exc:
                raise ConfigError(f"{name}: {exc}") from exc
    extra = set(co.keys()) - {"mu", "cplus", "cminus", "h"}
    if extra:
        raise ConfigError(f"unknown coefficient key(s): {sorted(extra)}")

    la = cp["lambda"] if cp.has_section("lambda") else {}
    cfg.lambda_mode = la.get("mode", "single").strip()
    if cfg.lambda_mode == "single":
        cfg.lambdas = (_const(_unquote(la.get("value", "0")), "lambda.value"),)
    elif cfg.lambda_mode == "grid":
        if "values" in la:
            cfg.lambdas = _list(_unquote(la["values"]), "lambda.values")
        else:
            a = _const(la.get("start", "0"), "lambda.start")
            b = _const(la.get("stop", "1"), "lambda.stop")
            k = int(la.get("num", "5"))
            cfg.lambdas = tuple(float(t) for t in np.linspace(a, b, k))
        if any(b <= a for a, b in zip(cfg.lambdas, cfg.lambdas[1:])):
            raise ConfigError("lambda grid must be strictly increasing")
    elif cfg.lambda_mode == "bracket":
        cfg.bracket = (_const(la.get("lo", "0"), "lambda.lo"), _const(la.get("hi", "1"), "lambda.hi"))
        cfg.lambdas = cfg.bracket
    else:
        raise ConfigError(f"unknown lambda mode {cfg.lambda_mode!r}")

    if cp.has_section("solver"):
        names = {f.name for f in fields(SolveOptions)}
        for key, raw in cp["solver"].items():
            if key not in names:
                raise ConfigError(f"unknown solver option {key!r}")
            try:
                cfg.solver[key] = int(raw) if key in _INT_OPTIONS else float(raw)
            except ValueError as exc:
                raise ConfigError(f"solver option {key} must be numeric") from exc
        cfg.options()
    if cp.has_section("run"):
        try:
            cfg.seed = int(cp["run"].get("seed", "0"))
        except ValueError as exc:
            raise ConfigError("seed must be an integer") from exc
    if cp.has_section("output"):
        cfg.outputs = dict(cp["output"])
    return cfg


def load_config(path: str) -> Config:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    return parse_config(text)
