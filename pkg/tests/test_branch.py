import json

import numpy as np
import pytest

import oracles
from critgrad.branch import (
    BranchDiagram,
    SCENARIOS,
    _clean,
    barrier_for,
    find_lambda_bar,
    scenario_spec,
    solve_u0,
    sweep,
    verify_scenario,
)
from critgrad.errors import BracketError, UnknownScenarioError
from critgrad.model import Order, check_ordering
from critgrad.solve import SolveOptions, random_starts, uniqueness_probe

OPTS = SolveOptions()
# frozen from find_lambda_bar at n = 200 inside the th2_fold scenario
LAMBDA_BAR_BRACKET_200 = (8.859375, 8.8671875)


@pytest.fixture(scope="module")
def fold200():
    spec = scenario_spec("th2_fold", 200)
    return spec, solve_u0(spec, OPTS)


@pytest.fixture(scope="module")
def fold_scenario():
    return verify_scenario("th2_fold")


def test_clean_rounds_and_stringifies():
    assert _clean({"a": np.float64(1 / 3), "b": [np.int64(2), np.inf], "c": np.bool_(True)}) == {
        "a": 0.333333333333,
        "b": [2, "inf"],
        "c": True,
    }


def test_sweep_empty_grid(fold200):
    spec, _ = fold200
    d = sweep(spec, [], OPTS)
    assert d.records == [] and d.verdicts == [] and d.passed


def test_sweep_rejects_unsorted(fold200):
    with pytest.raises(ValueError):
        sweep(fold200[0], [2.0, 1.0], OPTS)


def test_sweep_lambda_zero_only(fold200):
    spec, u0 = fold200
    d = sweep(spec, [0.0], OPTS)
    assert len(d.records) == 1 and d.records[0].kind == "trivial_u0"
    assert np.max(np.abs(d.records[0].u - u0.u)) <= 1e-12


def test_sweep_flip_grid(flip400, gamma1_400):
    spec, u0 = flip400
    g1 = gamma1_400.gamma1
    d = sweep(spec, [0.25 * g1, 0.75 * g1, 1.25 * g1, 1.75 * g1], OPTS, u0_record=u0)
    by = {}
    for r in d.records:
        by.setdefault(r.lam, {})[r.kind] = r
    for f in (0.25, 0.75):
        s = by[f * g1]["mountain_pass"]
        assert check_ordering(u0.u, s.u, spec.mesh) is Order.MUCH_LESS
        assert s.energy > by[f * g1]["trivial_u0"].energy
    for f in (1.25, 1.75):
        m = by[f * g1]["minimal"]
        assert check_ordering(m.u, u0.u, spec.mesh) is Order.MUCH_LESS


def test_sweep_grid_robust(fold200):
    spec, u0 = fold200
    coarse = sweep(spec, [1.0, 3.0, 5.0], OPTS, u0_record=u0, want_second=False)
    fine = sweep(spec, [1.0, 2.0, 3.0, 4.0, 5.0], OPTS, u0_record=u0, want_second=False)
    fmap = {r.lam: r for r in fine.records}
    for r in coarse.records:
        assert np.max(np.abs(r.u - fmap[r.lam].u)) <= 1e-6


def test_sweep_records_json_csv(fold200):
    spec, u0 = fold200
    d = sweep(spec, [2.0], OPTS, scenario="demo", u0_record=u0)
    data = json.loads(d.to_json())
    assert [r["kind"] for r in data["records"]] == ["minimal", "mountain_pass"]
    lines = d.to_csv().splitlines()
    assert lines[0] == "scenario,lambda,kind,energy,residual,umin,umax,ordering"
    assert lines[1].startswith("demo,2.0,minimal,")
    assert "vs_u0=much_greater" in lines[1]


def test_find_lambda_bar_golden_and_width(fold200):
    spec, u0 = fold200
    lo, hi = find_lambda_bar(spec, (4.0, 16.0), OPTS, u0=u0.u)
    assert hi - lo <= 1e-3 * hi
    assert lo <= 8.8596 <= hi


def test_lambda_bar_contains_continuous_oracle(fold_scenario):
    lo, hi = fold_scenario.bracket
    assert (lo, hi) == LAMBDA_BAR_BRACKET_200
    lam_bar = oracles.lambda_bar_continuous(0.05, 0.05, 0.5)
    assert lam_bar == pytest.approx(8.8596064, abs=1e-6)
    assert lo <= lam_bar <= hi


def test_lambda_bar_dense_grid_oracle(fold200, fold_scenario):
    # independent of the bisection: 50 Newton multistarts on a fixed grid
    spec, u0 = fold200
    starts = random_starts(spec.mesh, 50, 0, amplitude=2.0)
    solvable = {}
    for lam in np.round(np.arange(8.83, 8.895, 0.01), 2):
        s = spec.with_lambda(lam)
        found = uniqueness_probe(s, barrier_for(s, u0.u), starts, filter=lambda r: bool(np.all(r.u >= -1e-12)))
        solvable[lam] = len(found)
    lams = sorted(solvable)
    last_ok = max(l for l in lams if solvable[l] > 0)
    first_bad = min(l for l in lams if solvable[l] == 0)
    assert last_ok < first_bad
    assert all(solvable[l] == 2 for l in lams if l <= last_ok)
    lo, hi = fold_scenario.bracket
    assert last_ok <= hi and lo <= first_bad


def test_find_lambda_bar_bracket_errors(fold200, flip400, gamma1_400):
    spec, u0 = fold200
    with pytest.raises(BracketError):
        find_lambda_bar(spec, (10.0, 16.0), OPTS, u0=u0.u)
    fspec, fu0 = flip400
    with pytest.raises(BracketError):
        find_lambda_bar(fspec, (1.0, 0.99 * gamma1_400.gamma1), OPTS, u0=fu0.u)


def test_fold_scenario_clauses(fold_scenario):
    names = {v.name: v for v in fold_scenario.verdicts}
    assert fold_scenario.passed, [v for v in fold_scenario.verdicts if not v.passed]
    assert sum(n.startswith("two_ordered_solutions@") for n in names) == 5
    dist = names["fold_merging"].evidence["sup_distances"]
    assert len(dist) == 5 and all(b < a for a, b in zip(dist, dist[1:]))
    assert names["no_solution_beyond_fold"].evidence["starts"] == 50


def test_unknown_scenario():
    with pytest.raises(UnknownScenarioError):
        verify_scenario("nope")
    with pytest.raises(UnknownScenarioError):
        scenario_spec("nope")


def test_scenario_table_names():
    assert set(SCENARIOS) == {"example1d", "th2_fold", "th3_sign", "th_h0_flip", "coercive_iff"}


def test_diagram_passed_property():
    d = BranchDiagram("x")
    d.add("a", True)
    assert d.passed
    d.add("b", False, why="test")
    assert not d.passed
