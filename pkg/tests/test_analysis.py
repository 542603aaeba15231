import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssqn.analysis import (
    BELL_DOUBLE_VIOLATION_REFERENCE,
    FIGURES,
    GHZ_DOUBLE_VIOLATION_REFERENCE,
    Curve,
    Grid,
    NoRootError,
    SweepConfig,
    count_violating_observers,
    double_violation_witnesses,
    figure_sweeps,
    run_verification,
    solve_double_violation,
    sweep,
    table_rows,
    verify_closed_vs_sim,
)
from ssqn.closedform import ScenarioClass, gamma_sequence

MS1_PHASE = ScenarioClass("ms1", "phase-flip")
MS3_BIT = ScenarioClass("ms3", "bit-flip")


def _max_count(cls, grid, eps, p):
    return max(count_violating_observers(cls, t, eps, p, 5).count for t in grid.values())


FIG2_GRID = Grid(1e-7, 0.785, 400, log=True)
FIG4_GRID = Grid(0.001, 0.999, 999)


def test_count_examples():
    assert _max_count(ScenarioClass("ms1", "noiseless"), FIG2_GRID, 0.1, 1.0) == 5
    assert _max_count(MS1_PHASE, Grid(1.5e-7, 0.785, 400, log=True), 2.0, 0.95) == 4
    assert _max_count(MS3_BIT, FIG4_GRID, 0.1, 0.85) == 5


def test_count_matches_sequence():
    res = count_violating_observers(MS1_PHASE, 0.01, 0.1, 0.95, 5)
    assert res.count == 3 == gamma_sequence(MS1_PHASE, 0.01, 0.1, 0.95, 5).n_feasible
    assert count_violating_observers(MS1_PHASE, 0.01, 0.1, 0.95, 2).count == 2


def test_count_zero_when_first_fails():
    # W at theta=0: the weak input carries no correlation, so nobody can violate
    assert count_violating_observers(ScenarioClass("ms5", "phase-flip"), 0.0, 0.1, 0.9, 5).count == 0


def test_sharp_last_adds_at_most_one():
    for theta in (1e-4, 1e-3, 0.01, 0.1):
        base = count_violating_observers(MS1_PHASE, theta, 0.1, 0.95, 5).count
        sharp = count_violating_observers(MS1_PHASE, theta, 0.1, 0.95, 5, sharp_last=True).count
        assert base <= sharp <= min(base + 1, 5)
    # somewhere the next observer misses 1.1x its threshold yet a sharp measurement still violates
    gains = [
        count_violating_observers(MS1_PHASE, t, 0.1, 0.95, 5, sharp_last=True).count
        - count_violating_observers(MS1_PHASE, t, 0.1, 0.95, 5).count
        for t in Grid(1e-6, 0.7, 300, log=True).values()
    ]
    assert set(gains) == {0, 1}


def test_count_rejects_bad_input():
    with pytest.raises(ValueError):
        count_violating_observers(MS1_PHASE, 0.01, 0.1, 0.95, 0)
    with pytest.raises(ValueError):
        count_violating_observers(MS1_PHASE, 0.01, -1, 0.95, 3)


@given(theta=st.floats(1e-6, 0.78), e1=st.floats(0.01, 3), e2=st.floats(0.01, 3), p=st.floats(0.55, 1))
def test_count_non_increasing_in_epsilon(theta, e1, e2, p):
    lo, hi = sorted((e1, e2))
    for cls in (MS1_PHASE, ScenarioClass("ms1", "depolarizing"), ScenarioClass("ms2", "phase-flip")):
        assert count_violating_observers(cls, theta, hi, p, 5).count <= count_violating_observers(cls, theta, lo, p, 5).count


@pytest.mark.parametrize("theta,eps,g1", BELL_DOUBLE_VIOLATION_REFERENCE)
def test_table_one_rows(theta, eps, g1):
    sol = solve_double_violation(MS1_PHASE, theta, 0.9)
    assert abs(sol.epsilon - eps) < 5e-4 and abs(sol.gamma1 - g1) < 5e-4
    assert abs(sol.residual) < 1e-10
    assert sol.violating
    _, w2 = double_violation_witnesses(ScenarioClass("ms1", "bit-flip"), theta, sol.gamma1, 0.9)
    assert w2 < 2


@pytest.mark.parametrize("theta,eps,g1", GHZ_DOUBLE_VIOLATION_REFERENCE)
def test_table_two_rows(theta, eps, g1):
    sol = solve_double_violation(MS3_BIT, theta, 0.8)
    assert abs(sol.epsilon - eps) < 5e-4 and abs(sol.gamma1 - g1) < 5e-4
    assert sol.violating
    _, w2 = double_violation_witnesses(ScenarioClass("ms3", "phase-flip"), theta, sol.gamma1, 0.8)
    assert w2 < 2


def test_double_violation_second_observer_sharp():
    sol = solve_double_violation(MS1_PHASE, 0.3, 0.9)
    seq = gamma_sequence(MS1_PHASE, 0.3, sol.epsilon, 0.9, 2)
    assert seq.gammas[0] == pytest.approx(sol.gamma1, rel=1e-12)
    assert seq.gammas[1] == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize(
    "cls,theta,p",
    [
        (ScenarioClass("ms1", "bit-flip"), 0.3, 0.9),
        (ScenarioClass("ms1", "depolarizing"), 0.3, 0.5),
        (MS1_PHASE, 0.7, 0.9),
        (ScenarioClass("ms5", "phase-flip"), 0.0, 0.9),
    ],
)
def test_double_violation_no_root(cls, theta, p):
    with pytest.raises(NoRootError):
        solve_double_violation(cls, theta, p)


def test_grid_parsing():
    g = Grid.parse("0.1:0.5:5")
    assert g.values() == pytest.approx((0.1, 0.2, 0.3, 0.4, 0.5))
    lg = Grid.parse("1e-3:1e-1:3:log")
    assert lg.log and lg.values() == pytest.approx((1e-3, 1e-2, 1e-1))
    assert Grid.parse("0.2:0.9:1").values() == (0.2,)
    for bad in ("0.1:0.5", "a:b:c", "0.1:0.5:0", "0:1:3:log", "0.1:0.5:3:cubic"):
        with pytest.raises(ValueError):
            Grid.parse(bad)


def test_sweep_order_and_workers():
    curves = (Curve("a", MS1_PHASE, 0.1, 0.95), Curve("b", ScenarioClass("ms1", "bit-flip"), 0.1, 0.95))
    cfg = SweepConfig("count", Grid(1e-6, 0.7, 25, log=True).values(), curves)
    serial = sweep(cfg)
    parallel = sweep(SweepConfig("count", cfg.thetas, curves, workers=3))
    assert serial == parallel
    assert [r["curve"] for r in serial] == ["a"] * 25 + ["b"] * 25
    assert [r["theta"] for r in serial[:25]] == list(cfg.thetas)


def test_double_violation_sweep_reports_missing_roots():
    cfg = SweepConfig(
        "double-violation", (0.3, 0.7), (Curve("a", MS1_PHASE, p=0.9),), solve_class=MS1_PHASE, p=0.9
    )
    rows = sweep(cfg)
    assert rows[0]["status"] == "double-violation"
    assert rows[1]["status"] == "no-root" and rows[1]["epsilon"] is None


def test_sweep_config_validation():
    with pytest.raises(ValueError):
        SweepConfig("bogus", (0.1,), (Curve("a", MS1_PHASE, 0.1),))
    with pytest.raises(ValueError):
        SweepConfig("count", (), (Curve("a", MS1_PHASE, 0.1),))
    with pytest.raises(ValueError):
        SweepConfig("count", (0.1,), (Curve("a", MS1_PHASE),))
    with pytest.raises(ValueError):
        SweepConfig("double-violation", (0.1,), (Curve("a", MS1_PHASE),))
    with pytest.raises(ValueError):
        SweepConfig("count", (0.1,), ())


def _curve_max(rows):
    out = {}
    for r in rows:
        out[r["curve"]] = max(out.get(r["curve"], 0), r["count"])
    return out


def test_fig2_dataset():
    rows = sweep(figure_sweeps("fig2")[""])
    best = _curve_max(rows)
    assert best["ms1-phase-flip-eps0.1"] == 5 and best["ms1-noiseless-eps0.1"] == 5
    assert best["ms1-phase-flip-eps2"] == 4
    assert best["ms1-bit-flip-eps0.1"] < 5 and best["ms1-depolarizing-eps0.1"] < 5
    a = [r["count"] for r in rows if r["curve"] == "ms1-phase-flip-eps0.1"]
    b = [r["count"] for r in rows if r["curve"] == "ms2-bit-flip-eps0.1"]
    assert a == b


def test_fig4_and_fig5_datasets():
    best4 = _curve_max(sweep(figure_sweeps("fig4")[""]))
    assert best4["ms3-bit-flip-eps0.1"] == 5 and best4["ms4-phase-flip-eps0.1"] == 5
    assert best4["ms3-noiseless-eps1"] == 5
    assert best4["ms3-depolarizing-eps0.1"] < 5 and best4["ms3-phase-flip-eps0.1"] < 5
    eps2 = [r for r in sweep(figure_sweeps("fig4")[""]) if r["curve"] == "ms3-bit-flip-eps2" and r["theta"] <= 0.995]
    assert max(r["count"] for r in eps2) == 4
    best5 = _curve_max(sweep(figure_sweeps("fig5")[""]))
    assert best5["ms5-phase-flip-eps0.1"] == 5 and best5["ms6-bit-flip-eps0.1"] == 5
    assert best5["ms5-phase-flip-eps2"] == 4
    assert best5["ms5-bit-flip-eps0.1"] < 5 and best5["ms5-depolarizing-eps0.1"] < 5


@pytest.mark.parametrize("name,violating", [("fig6", "ad"), ("fig7", "ad")])
def test_panel_datasets(name, violating):
    panels = {suffix: sweep(cfg) for suffix, cfg in figure_sweeps(name).items()}
    assert sorted(panels) == ["a", "b", "c", "d"]
    for suffix, rows in panels.items():
        statuses = {r["status"] for r in rows}
        if suffix in violating:
            assert statuses == {"double-violation"}
        elif suffix == "b":
            assert statuses == {"no-double-violation"}
    assert [r["witness2"] for r in panels["a"]] == pytest.approx([r["witness2"] for r in panels["d"]], abs=1e-12)


def test_fig7_depolarizing_needs_large_theta():
    rows = sweep(figure_sweeps("fig7")["c"])
    ok = [r["theta"] for r in rows if r["status"] == "double-violation"]
    assert ok and min(ok) > 0.8 and rows[-1]["status"] == "double-violation"
    assert rows[0]["status"] == "no-double-violation"
    assert {r["status"] for r in sweep(figure_sweeps("fig6")["c"])} == {"no-double-violation"}


def test_unknown_names():
    with pytest.raises(ValueError):
        figure_sweeps("fig3")
    with pytest.raises(ValueError):
        table_rows("table3")
    assert FIGURES == ("fig2", "fig4", "fig5", "fig6", "fig7")


def test_table_rows_columns():
    rows = table_rows("table2")
    assert len(rows) == 12
    assert rows[0]["theta"] == 0.8 and rows[0]["gamma1_reference"] == 0.278067
    assert max(r["epsilon_error"] for r in rows) < 5e-4


def test_verify_small():
    rep = verify_closed_vs_sim(draws=3, seed=5)
    assert rep.passed and len(rep.deviations) == 24 and rep.failures() == []
    strict = verify_closed_vs_sim([MS1_PHASE], draws=3, tolerance=0.0, seed=5)
    assert not strict.passed and strict.failures() == ["ms1/phase-flip"]
    with pytest.raises(ValueError):
        verify_closed_vs_sim(draws=0)


def test_verification_is_deterministic():
    a = run_verification(draws=2, seed=9)
    b = run_verification(draws=2, seed=9)
    assert a == b and all(r.passed for r in a)
    assert len({r.name for r in a}) == len(a)
