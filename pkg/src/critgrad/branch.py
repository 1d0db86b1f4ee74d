"""Continuation in λ, fold bracketing and the canned verification scenarios."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .config import Config
from .errors import BracketError, SolverError, UnknownScenarioError
from .model import Order, ProblemSpec, check_ordering, inverse_cole_hopf, weak_residual
from .solve import (
    SolutionRecord,
    SolveOptions,
    construct_barrier,
    monotone_iteration,
    mountain_pass,
    random_starts,
    ray_blowdown,
    solution_barrier,
    uniqueness_probe,
)
from .spectral import assemble_linearized, compute_md, principal_eigenvalue

SAME_TOL = 1e-6


@dataclass
class Verdict:
    name: str
    passed: bool
    evidence: dict = field(default_factory=dict)


@dataclass
class BranchDiagram:
    scenario: str
    records: list = field(default_factory=list)
    lambda_bar: float | None = None
    bracket: tuple | None = None
    gamma1: float | None = None
    verdicts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def add(self, name: str, passed, **evidence) -> Verdict:
        v = Verdict(name, bool(passed), evidence)
        self.verdicts.append(v)
        return v

    def to_dict(self) -> dict:
        return _clean(
            {
                "scenario": self.scenario,
                "passed": self.passed,
                "lambda_bar": self.lambda_bar,
                "bracket": list(self.bracket) if self.bracket else None,
                "gamma1": self.gamma1,
                "records": [r.summary() for r in self.records],
                "verdicts": [
                    {"name": v.name, "passed": v.passed, "evidence": v.evidence} for v in self.verdicts
                ],
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scenario", "lambda", "kind", "energy", "residual", "umin", "umax", "ordering"])
        for r in self.to_dict()["records"]:
            flags = ";".join(f"{k}={r[k]}" for k in sorted(r) if k.startswith("vs_"))
            w.writerow(
                [self.scenario, r["lambda"], r["kind"], r["energy"], r["residual"], r["umin"], r["umax"], flags]
            )
        return buf.getvalue()


def _clean(obj):
    """JSON-safe copy: floats rounded to 12 significant digits, non-finite as strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    if isinstance(obj, Order):
        return obj.value
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


# --- building blocks -------------------------------------------------------

def base_direction(spec: ProblemSpec) -> np.ndarray:
    """Positive bump supported where ``c₋ = 0``; used as the ray direction."""
    mesh = spec.mesh
    phi = np.ones(mesh.size)
    for k in range(mesh.dim):
        a, b = mesh.bounds[k]
        phi *= np.sin(np.pi * (mesh.coords[:, k] - a) / (b - a))
    return np.where(spec.cminus > 0, 0.0, phi)


def solve_u0(spec0: ProblemSpec, opts: SolveOptions = SolveOptions()) -> SolutionRecord:
    """The solution at ``λ = 0`` as the minimal solution above a constructed barrier."""
    spec0 = spec0.with_lambda(0.0)
    b = construct_barrier(spec0, [], opts)
    rec = monotone_iteration(spec0, b, b.alpha, opts=opts)
    rec.kind = "trivial_u0"
    return rec


def barrier_for(spec: ProblemSpec, u0, candidates=(), opts: SolveOptions = SolveOptions()):
    """``α = v₀`` when ``λ >= 0`` and ``c₊u₀ ⪈ 0``, else a constructed level.

    In the first case every solution with ``c₊u >= 0`` lies above ``u₀``.
    """
    cu = spec.cplus * u0
    if spec.lam >= 0 and np.all(cu >= 0) and np.any(cu > 0):
        return solution_barrier(spec, u0)
    return construct_barrier(spec, [u0, *candidates], opts)


def _order_tag(a, b, mesh) -> str:
    if np.max(np.abs(a - b)) <= SAME_TOL:
        return "equal"
    fwd, bwd = check_ordering(a, b, mesh), check_ordering(b, a, mesh)
    if fwd is Order.MUCH_LESS:
        return "much_less"
    if bwd is Order.MUCH_LESS:
        return "much_greater"
    if fwd is not Order.INCOMPARABLE:
        return "less"
    if bwd is not Order.INCOMPARABLE:
        return "greater"
    return "incomparable"


def solve_at(spec: ProblemSpec, u0, opts: SolveOptions, seed_v=None, want_second: bool = True):
    """Minimal solution and, when it exists, a mountain-pass solution at one λ.

    Returns ``(minimal, second_or_None, barrier, info)``.
    """
    cands = [] if seed_v is None else [inverse_cole_hopf(seed_v, spec.mu)]
    b = barrier_for(spec, u0, cands, opts)
    lower = b.alpha
    if seed_v is not None and np.all(seed_v >= b.alpha) and np.all(weak_residual(spec, b, seed_v) <= 0):
        lower = seed_v
    minimal = monotone_iteration(spec, b, lower, opts=opts)
    mesh = spec.mesh
    minimal.notes["vs_u0"] = _order_tag(minimal.u, u0, mesh)
    if minimal.notes["vs_u0"] == "equal":
        minimal.kind = "trivial_u0"
    info = {"barrier": b.source}
    second = None
    if want_second:
        phi = base_direction(spec)
        try:
            t = ray_blowdown(spec, b, phi, base=minimal.v)
            second, diag = mountain_pass(spec, b, minimal.v, minimal.v + t * phi, opts)
            info["ps_bounded"] = diag.bounded
            if np.max(np.abs(second.u - minimal.u)) <= SAME_TOL:
                info["second"] = "collapsed onto minimal"
                second = None
            else:
                second.notes["vs_u0"] = _order_tag(second.u, u0, mesh)
                second.notes["vs_minimal"] = _order_tag(second.u, minimal.u, mesh)
        except (SolverError, ValueError) as exc:
            info["second"] = f"{type(exc).__name__}: {exc}"
    return minimal, second, b, info


def sweep(
    spec0: ProblemSpec,
    lambdas,
    opts: SolveOptions = SolveOptions(),
    scenario: str = "sweep",
    u0_record: SolutionRecord | None = None,
    want_second: bool = True,
) -> BranchDiagram:
    """Natural continuation over an increasing λ grid.

    Each minimal solution seeds the next λ when it is still a lower
    solution there.  Failures are stored as verdicts and the sweep goes on.
    """
    lambdas = [float(l) for l in lambdas]
    if any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise ValueError("lambda grid must be strictly increasing")
    diagram = BranchDiagram(scenario=scenario)
    if not lambdas:
        return diagram
    if u0_record is None:
        try:
            u0_record = solve_u0(spec0, opts)
        except SolverError as exc:
            diagram.add("u0_exists", False, error=str(exc), **exc.diagnostics)
            return diagram
    u0 = u0_record.u
    seed = None
    for lam in lambdas:
        spec = spec0.with_lambda(lam)
        if lam == 0.0:
            diagram.records.append(u0_record)
            continue
        try:
            minimal, second, _, info = solve_at(spec, u0, opts, seed, want_second)
        except SolverError as exc:
            diagram.add(f"solve@{lam:.12g}", False, error=str(exc), **exc.diagnostics)
            continue
        seed = minimal.v
        diagram.records.append(minimal)
        if second is not None:
            diagram.records.append(second)
        elif want_second:
            minimal.notes["second"] = info.get("second", "none")
    return diagram


def minimal_exists(spec: ProblemSpec, u0, opts: SolveOptions) -> bool:
    """Discrete solvability test: monotone iteration from the barrier converges."""
    b = barrier_for(spec, u0, (), opts)
    try:
        monotone_iteration(spec, b, b.alpha, opts=opts)
    except SolverError:
        return False
    return True


def find_lambda_bar(
    spec0: ProblemSpec,
    bracket,
    opts: SolveOptions = SolveOptions(),
    u0=None,
    rel_width: float = 1e-3,
) -> tuple[float, float]:
    """Bisect on solvability until ``hi - lo <= rel_width * hi``.

    Raises
    ------
    BracketError
        If the solver fails at ``lo`` or succeeds at ``hi``.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if u0 is None:
        u0 = solve_u0(spec0, opts).u
    if not minimal_exists(spec0.with_lambda(lo), u0, opts):
        raise BracketError("solver fails at the left end", {"lo": lo})
    if minimal_exists(spec0.with_lambda(hi), u0, opts):
        raise BracketError("solver succeeds at the right end", {"hi": hi})
    while hi - lo > rel_width * hi:
        mid = 0.5 * (lo + hi)
        if minimal_exists(spec0.with_lambda(mid), u0, opts):
            lo = mid
        else:
            hi = mid
    return lo, hi


# --- scenarios -------------------------------------------------------------

SCENARIOS = {
    "example1d": Config(
        bounds=((-2 * math.pi, 2 * math.pi),),
        counts=(800,),
        cplus="if x < 0 then 0 else cos(x) + 1",
        cminus="0",
        h="if x < 0 then cos(x) - sin(x)^2 else 0",
    ),
    "th2_fold": Config(counts=(200,), h="0.05"),
    "th3_sign": Config(counts=(200,), h="-0.1", lambda_mode="grid", lambdas=(1.0, 5.0, 20.0)),
    "th_h0_flip": Config(counts=(400,), h="0"),
    "coercive_iff": Config(counts=(200,), h="1"),
}


def scenario_spec(name: str, n: int | None = None) -> ProblemSpec:
    if name not in SCENARIOS:
        raise UnknownScenarioError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    ops, mu, cp, cm, h = SCENARIOS[name].with_grid(n).build()
    return ProblemSpec(ops, mu, cp, cm, h, 0.0)


def verify_scenario(name: str, n: int | None = None, seed: int = 0, opts: SolveOptions = SolveOptions()) -> BranchDiagram:
    """Run a canned configuration and evaluate each theorem clause as a verdict."""
    runners = {
        "example1d": _example1d,
        "th2_fold": _th2_fold,
        "th3_sign": _th3_sign,
        "th_h0_flip": _th_h0_flip,
        "coercive_iff": _coercive_iff,
    }
    if name not in runners:
        raise UnknownScenarioError(f"unknown scenario {name!r}; choose from {sorted(runners)}")
    return runners[name](scenario_spec(name, n), seed, opts)


def _example1d(spec0: ProblemSpec, seed: int, opts: SolveOptions) -> BranchDiagram:
    d = BranchDiagram(scenario="example1d")

    def error(spec):
        rec = solve_u0(spec, opts)
        x = spec.mesh.coords[:, 0]
        exact = np.where(x < 0, np.cos(x) - 1.0, 0.0)
        return rec, float(np.max(np.abs(rec.u - exact)))

    rec, err = error(spec0)
    n = spec0.mesh.counts[0]
    coarse = scenario_spec("example1d", n // 2 if (n // 2) % 2 == 0 else n // 2 + 1)
    _, err_c = error(coarse)
    rate = math.log2(err_c / err) if err > 0 else float("inf")
    rec.notes["vs_u0"] = "equal"
    d.records.append(rec)
    d.add("u0_matches_exact", err <= 5e-4, max_error=err, n=n)
    d.add("second_order_rate", 1.7 <= rate <= 2.3, rate=rate, coarse_error=err_c, coarse_n=coarse.mesh.counts[0])
    cu = float(np.max(np.abs(spec0.cplus * rec.u)))
    d.add("cplus_u0_vanishes", cu <= 5e-4, max_abs_cplus_u0=cu)
    d.add("u0_not_trivial", float(np.max(np.abs(rec.u))) > 1.0, u0_min=float(np.min(rec.u)))
    d.add("residual_small", rec.residual <= 10 * opts.newton_tol * max(1.0, float(np.max(np.abs(rec.v)))),
          residual=rec.residual)
    return d


def _multistart_nonneg(spec, u0, opts, count, seed):
    b = barrier_for(spec, u0, (), opts)
    stats = {}
    sols = uniqueness_probe(
        spec, b, random_starts(spec.mesh, count, seed),
        filter=lambda r: bool(np.all(spec.cplus * r.u >= -1e-12)), opts=opts, stats=stats,
    )
    return sols, stats


def _th2_fold(spec0: ProblemSpec, seed: int, opts: SolveOptions) -> BranchDiagram:
    d = BranchDiagram(scenario="th2_fold")
    u0 = solve_u0(spec0, opts).u
    mesh = spec0.mesh
    hi = 1.0
    while minimal_exists(spec0.with_lambda(hi), u0, opts):
        hi *= 2.0
        if hi > 1e6:
            d.add("fold_exists", False, last_lambda=hi)
            return d
    lo, hi = find_lambda_bar(spec0, (hi / 2 if hi > 1 else 0.0, hi), opts, u0=u0)
    d.lambda_bar, d.bracket = 0.5 * (lo + hi), (lo, hi)
    d.add("bracket_width", hi - lo <= 1e-3 * hi, lo=lo, hi=hi, rel_width=(hi - lo) / hi)

    tests = [lo * f for f in (0.2, 0.4, 0.6, 0.8, 0.95)]
    near = [lo * (1 - f) for f in (0.2, 0.1, 0.05, 0.02, 0.01)]
    grid = sorted(set(tests + near))
    dia = sweep(spec0, grid, opts, scenario="th2_fold", u0_record=None)
    d.records = dia.records
    d.verdicts.extend(dia.verdicts)
    by_lam = {}
    for r in dia.records:
        by_lam.setdefault(r.lam, {})[r.kind] = r
    ordered = []
    for lam in tests:
        recs = by_lam.get(lam, {})
        m, s = recs.get("minimal"), recs.get("mountain_pass")
        ok = (
            m is not None and s is not None
            and check_ordering(u0, m.u, mesh) is Order.MUCH_LESS
            and check_ordering(m.u, s.u, mesh) is Order.MUCH_LESS
            and s.energy > m.energy
        )
        ordered.append(ok)
        d.add(f"two_ordered_solutions@{lam:.6g}", ok,
              minimal_umax=None if m is None else float(np.max(m.u)),
              second_umax=None if s is None else float(np.max(s.u)))
    mins = [by_lam[l]["minimal"] for l in grid if "minimal" in by_lam.get(l, {})]
    mono = len(mins) == len(grid) and all(
        check_ordering(a.u, b.u, mesh) is Order.MUCH_LESS for a, b in zip(mins, mins[1:])
    )
    d.add("minimal_branch_increasing", mono, count=len(mins))
    dist = []
    for lam in sorted(near):
        recs = by_lam.get(lam, {})
        if "minimal" in recs and "mountain_pass" in recs:
            dist.append(float(np.max(np.abs(recs["minimal"].u - recs["mountain_pass"].u))))
    d.add("fold_merging", len(dist) == 5 and all(b < a for a, b in zip(dist, dist[1:])), sup_distances=dist)
    sols, stats = _multistart_nonneg(spec0.with_lambda(hi), u0, opts, 50, seed)
    d.add("no_solution_beyond_fold", len(sols) == 0 and not minimal_exists(spec0.with_lambda(hi), u0, opts),
          found=len(sols), **stats)
    return d


def _th3_sign(spec0: ProblemSpec, seed: int, opts: SolveOptions) -> BranchDiagram:
    d = BranchDiagram(scenario="th3_sign")
    u0 = solve_u0(spec0, opts).u
    mesh = spec0.mesh
    d.add("u0_negative", np.all(u0 < 0), u0_max=float(np.max(u0)))
    prev = None
    for lam in (1.0, 5.0, 20.0):
        spec = spec0.with_lambda(lam)
        try:
            m, s, b, info = solve_at(spec, u0, opts)
        except SolverError as exc:
            d.add(f"solve@{lam:g}", False, error=str(exc))
            continue
        d.records.append(m)
        if s is not None:
            d.records.append(s)
        d.add(f"two_solutions@{lam:g}", s is not None, **info)
        d.add(f"minimal_much_less_u0@{lam:g}", check_ordering(m.u, u0, mesh) is Order.MUCH_LESS)
        d.add(f"second_not_nonpositive@{lam:g}", s is not None and np.any(spec.cplus * s.u > 0),
              second_umax=None if s is None else float(np.max(s.u)))
        starts = random_starts(mesh, 20, seed) + [m.u] + ([s.u] if s is not None else [])
        uniq = uniqueness_probe(spec, b, starts, filter=lambda r: bool(np.all(spec.cplus * r.u <= 1e-12)), opts=opts)
        d.add(f"unique_nonpositive@{lam:g}", len(uniq) == 1, found=len(uniq))
        if prev is not None:
            d.add(f"minimal_decreasing@{lam:g}", check_ordering(m.u, prev.u, mesh) is Order.MUCH_LESS)
        prev = m
    return d


def _th_h0_flip(spec0: ProblemSpec, seed: int, opts: SolveOptions) -> BranchDiagram:
    d = BranchDiagram(scenario="th_h0_flip")
    mesh = spec0.mesh
    u0_rec = solve_u0(spec0, opts)
    u0 = u0_rec.u
    d.add("u0_trivial", float(np.max(np.abs(u0))) <= SAME_TOL, u0_sup=float(np.max(np.abs(u0))))
    ep = principal_eigenvalue(assemble_linearized(spec0, u0), spec0.cplus, spec0.ops)
    g1 = ep.gamma1
    d.gamma1 = g1
    d.add("gamma1_near_pi2", abs(g1 / math.pi**2 - 1) <= 5e-3, gamma1=g1, phi_min=float(np.min(ep.phi1)))
    factors = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75)
    for f in factors:
        lam = f * g1
        spec = spec0.with_lambda(lam)
        if f == 1.0:
            b = barrier_for(spec, u0, (), opts)
            sols = uniqueness_probe(spec, b, random_starts(mesh, 20, seed), opts=opts)
            sup = [float(np.max(np.abs(r.u))) for r in sols]
            d.add("only_trivial@gamma1", len(sols) == 1 and sup[0] <= SAME_TOL, found=len(sols), sup=sup)
            continue
        try:
            m, s, _, info = solve_at(spec, u0, opts)
        except SolverError as exc:
            d.add(f"solve@{f:g}gamma1", False, error=str(exc))
            continue
        d.records.append(m)
        if s is not None:
            d.records.append(s)
        if f < 1:
            ok = s is not None and m.kind == "trivial_u0" and check_ordering(u0, s.u, mesh) is Order.MUCH_LESS
            d.add(f"second_positive@{f:g}gamma1", ok, second_umin=None if s is None else float(np.min(s.u)))
        else:
            ok = m.kind == "minimal" and check_ordering(m.u, u0, mesh) is Order.MUCH_LESS
            d.add(f"second_negative@{f:g}gamma1", ok, second_umax=float(np.max(m.u)),
                  mountain_pass_is_u0=s is not None and s.notes.get("vs_u0") == "equal")
    return d


def _coercive_iff(spec0: ProblemSpec, seed: int, opts: SolveOptions) -> BranchDiagram:
    """Family ``h ≡ s`` at ``λ = 0`` with ``c₋ ≡ 0``: solvable iff ``m_0(s) > 0``."""
    d = BranchDiagram(scenario="coercive_iff")
    ops, mu = spec0.ops, spec0.mu
    one = np.ones(spec0.mesh.size)

    def spec_s(s):
        return ProblemSpec(ops, mu, spec0.cplus, spec0.cminus, s * one, 0.0)

    def solvable(s):
        try:
            solve_u0(spec_s(s), opts)
            return True
        except SolverError:
            return False

    samples = [0.25 * k * math.pi**2 for k in range(1, 8)]
    agree, md_err = [], 0.0
    for s in samples:
        md = compute_md(ops, spec0.cminus, s * one, mu).value
        md_err = max(md_err, abs(md - (1 - s / math.pi**2)))
        agree.append(solvable(s) == (md > 0))
    d.add("existence_iff_md_positive", all(agree), samples=samples, agreement=agree)
    d.add("md_matches_analytic", md_err <= 1e-3, max_abs_error=md_err)
    lo, hi = 0.5 * math.pi**2, 1.5 * math.pi**2
    if not (solvable(lo) and not solvable(hi)):
        d.add("onset_bracket", False, lo=lo, hi=hi)
        return d
    while hi - lo > 1e-4 * hi:
        mid = 0.5 * (lo + hi)
        if solvable(mid):
            lo = mid
        else:
            hi = mid
    onset = 0.5 * (lo + hi)
    md_onset = compute_md(ops, spec0.cminus, onset * one, mu).value
    d.bracket = (lo, hi)
    d.add("onset_near_pi2", abs(onset / math.pi**2 - 1) <= 0.02, onset=onset, md_at_onset=md_onset)
    return d
