"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 assumption violation,
3 solver error (diagnostic JSON on stdout), 4 scenario ran but a verdict
failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .branch import BranchDiagram, _clean, find_lambda_bar, solve_u0, sweep, verify_scenario
from .config import Config, load_config
from .errors import AssumptionError, ConfigError, CritGradError, SolverError, UnknownScenarioError
from .model import ProblemSpec, violations
from .spectral import assemble_linearized, compute_md, md_sign_equivalence, principal_eigenvalue

EXIT_OK, EXIT_CONFIG, EXIT_ASSUMPTION, EXIT_SOLVER, EXIT_VERDICT = 0, 1, 2, 3, 4


def _dump(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(args, stem: str, text: str, csv_text: str | None = None) -> None:
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{stem}.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if csv_text is not None:
            with open(os.path.join(args.out, f"{stem}.csv"), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(csv_text)
    sys.stdout.write(text)


def _config(args) -> Config:
    if not args.config:
        raise ConfigError("--config is required for this command")
    cfg = load_config(args.config).with_grid(args.grid)
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _spec(cfg: Config) -> ProblemSpec:
    ops, mu, cp, cm, h = cfg.build()
    return ProblemSpec(ops, mu, cp, cm, h, 0.0)


def cmd_check(args) -> int:
    cfg = _config(args)
    ops, mu, cp, cm, h = cfg.build()
    found = violations(mu, cp, cm)
    report = {
        "status": "pass" if not found else "violation",
        "violations": [{"message": m, "nodes": nodes[:50], "count": len(nodes)} for m, nodes in found],
    }
    _emit(args, "check", _dump(report))
    return EXIT_OK if not found else EXIT_ASSUMPTION


def cmd_solve(args) -> int:
    cfg = _config(args)
    spec0 = _spec(cfg)
    diagram = sweep(spec0, sorted(cfg.lambdas), cfg.options(), scenario="solve")
    _raise_first_failure(diagram)
    _emit(args, "solve", diagram.to_json(), diagram.to_csv())
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config(args)
    spec0 = _spec(cfg)
    opts = cfg.options()
    if cfg.lambda_mode == "bracket":
        u0 = solve_u0(spec0, opts)
        lo, hi = find_lambda_bar(spec0, cfg.bracket, opts, u0=u0.u)
        diagram = BranchDiagram(scenario="sweep", records=[u0], lambda_bar=0.5 * (lo + hi), bracket=(lo, hi))
    else:
        diagram = sweep(spec0, cfg.lambdas, opts, scenario="sweep")
    _emit(args, "sweep", diagram.to_json(), diagram.to_csv())
    return EXIT_OK


def _raise_first_failure(diagram: BranchDiagram) -> None:
    for v in diagram.verdicts:
        if not v.passed:
            raise SolverError(v.evidence.get("error", v.name), {"verdict": v.name, **v.evidence})


def cmd_eigen(args) -> int:
    cfg = _config(args)
    spec0 = _spec(cfg)
    u0 = solve_u0(spec0, cfg.options())
    ep = principal_eigenvalue(assemble_linearized(spec0, u0.u), spec0.cplus, spec0.ops)
    out = {
        "gamma1": ep.gamma1,
        "residual": ep.residual,
        "phi1_min": float(np.min(ep.phi1)),
        "phi1_positive": bool(np.all(ep.phi1 > 0)),
        "mu1_curve": [list(p) for p in ep.mu1_curve],
        "n": spec0.mesh.size,
    }
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gamma", "mu1"])
    w.writerows(_clean(out["mu1_curve"]))
    _emit(args, "eigen", _dump(out), buf.getvalue())
    return EXIT_OK


def cmd_md(args) -> int:
    spec = _spec(_config(args))
    ops, cm, h, mu = spec.ops, spec.cminus, spec.h, spec.mu
    res = compute_md(ops, cm, h, mu)
    out = {
        "value": res.value,
        "subspace_dim": res.subspace_dim,
        "sign_equivalent": md_sign_equivalence(ops, cm, h, mu),
        "n": ops.mesh.size,
    }
    _emit(args, "md", _dump(out), f"value,subspace_dim\n{_clean(res.value)},{res.subspace_dim}\n")
    return EXIT_OK


def cmd_scenario(args) -> int:
    n = args.grid
    if args.config:
        raise ConfigError("scenario runs canned data; use --grid and --seed only")
    diagram = verify_scenario(args.name, n=n, seed=args.seed or 0)
    _emit(args, args.name, diagram.to_json(), diagram.to_csv())
    return EXIT_OK if diagram.passed else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--out", metavar="DIR", help="write JSON and CSV into DIR")
    common.add_argument("--seed", type=int, default=None, help="multistart seed (default 0)")
    common.add_argument("--grid", type=int, default=None, metavar="N", help="override interior nodes per axis")
    p = argparse.ArgumentParser(prog="critgrad", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (
        ("check", cmd_check, "validate sign and splitting assumptions"),
        ("solve", cmd_solve, "minimal and mountain-pass solutions at the configured lambda values"),
        ("sweep", cmd_sweep, "branch sweep over a lambda grid or fold bracketing"),
        ("eigen", cmd_eigen, "principal eigenvalue gamma1 of the linearized operator"),
        ("md", cmd_md, "existence criterion m_d with d = cminus"),
    ):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.set_defaults(func=fn)
    sp = sub.add_parser("scenario", parents=[common], help="run a canned verification scenario")
    sp.add_argument("name")
    sp.set_defaults(func=cmd_scenario)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AssumptionError as exc:
        sys.stdout.write(_dump({"error": str(exc), "kind": "assumption", "nodes": exc.nodes[:50]}))
        return EXIT_ASSUMPTION
    except SolverError as exc:
        sys.stdout.write(
            _dump({"error": str(exc), "kind": type(exc).__name__, "diagnostics": exc.diagnostics})
        )
        return EXIT_SOLVER
    except (ConfigError, UnknownScenarioError, CritGradError, ValueError) as exc:
        sys.stderr.write(f"critgrad: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
