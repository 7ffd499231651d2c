"""Smoke tests for the compiled powerflow module.

The exhaustive coverage lives in the C++ suites; these just prove the
bindings expose working end-to-end paths.
"""

import json

import numpy as np
import pytest

import powerflow as pf


@pytest.fixture()
def data_dir(tmp_path):
    (tmp_path / "wealth.csv").write_text(
        "country,year,wealth\n"
        "AAA,2019,100\nAAA,2020,102.5\n"
        "BBB,2019,200\nBBB,2020,205\n"
        "SYR,2018,50\nSYR,2019,50\nSYR,2020,50\n"
    )
    (tmp_path / "trade.csv").write_text(
        "reporter,partner,year,flow\n"
        "AAA,BBB,2019,5\nBBB,AAA,2019,8\n"
        "AAA,BBB,2020,5\nBBB,AAA,2020,8\n"
    )
    (tmp_path / "milex.csv").write_text(
        "country,year,expenditure\nSYR,2019,2\nSYR,2020,2\n"
    )
    (tmp_path / "conflicts.csv").write_text(
        "aggressor,target,year,expenditure\nSYR,SYR,2020,1\n"
    )
    return tmp_path


def test_step_isolated_state():
    registry = pf.CountryRegistry(["AAA"])
    ps = pf.PowerStructure(registry, np.array([100.0]), pf.TacticMatrix.pure_retention(1))
    out = pf.step(ps, pf.Parameters())
    assert out[0] == pytest.approx(102.5, rel=1e-12)
    assert pf.validate(ps) == []


def test_validate_reports_bad_columns():
    registry = pf.CountryRegistry(["AAA"])
    tactics = pf.TacticMatrix.pure_retention(1)
    tactics.retained = np.array([1.05])
    ps = pf.PowerStructure(registry, np.array([100.0]), tactics)
    violations = pf.validate(ps)
    assert violations and "sums to" in " ".join(violations)


def test_deltas():
    assert pf.constructive_delta(1.0, 1.392) == (-1.0, 1.392)
    assert pf.destructive_delta(1.0, 30.0) == (-1.0, -30.0)


def test_panel_and_simulations(data_dir):
    panel = pf.load_panel(data_dir)
    assert panel.registry.codes == ["AAA", "BBB", "SYR"]
    assert panel.wealth_at("AAA", 2019) == 100.0
    assert panel.trade_volume("AAA", 2019) == 13.0

    trajectory = pf.simulate_naive(panel, 2019, 3, pf.Parameters())
    assert trajectory.years == [2019, 2020, 2021, 2022]
    assert trajectory.sizes.shape == (4, 3)
    assert trajectory.sizes.min() >= 0.0

    dynamic = pf.simulate_dynamic(panel, 2019, 2020, pf.Parameters())
    assert dynamic.sizes[0, 0] == 100.0

    report = pf.backtest(panel, pf.Parameters(), 2019, 2020)
    assert len(report.year_distance) == 2

    series = pf.coalition_power(trajectory, ["AAA", "BBB"])
    assert series[0] == pytest.approx(300.0)


def test_calibration_paths(data_dir):
    panel = pf.load_panel(data_dir)
    episodes = pf.episodes_from_conflicts(panel)
    assert [e.country for e in episodes] == ["SYR"]

    estimate = pf.estimate_mu(panel, episodes)
    assert estimate.count == 1
    record = estimate.records[0]
    assert record.x * (1 + record.mu) == pytest.approx(record.expected - record.actual)

    growth = pf.peacetime_growth({2000: 100.0, 2001: 110.0, 2002: 121.0}, set())
    assert growth == pytest.approx(1.10, rel=1e-12)


def test_scenario_round_trip(data_dir, tmp_path):
    panel = pf.load_panel(data_dir)
    scenario_path = tmp_path / "scenario.json"
    scenario_path.write_text(json.dumps({
        "name": "no war",
        "base_year": 2019,
        "horizon": 1,
        "edits": [
            {"kind": "remove_conflict", "aggressor": "SYR", "target": "SYR",
             "from_year": 2020, "to_year": 2020},
        ],
    }))
    scenario = pf.load_scenario(scenario_path)
    edited = pf.apply_scenario(panel, scenario)
    assert edited.conflict_between("SYR", "SYR", 2020) == 0.0
    assert panel.conflict_between("SYR", "SYR", 2020) == 1.0  # input untouched


def test_parse_errors_surface_as_value_error(tmp_path):
    (tmp_path / "wealth.csv").write_text("country,year,wealth\nAAA,2019,-1\n")
    (tmp_path / "trade.csv").write_text("reporter,partner,year,flow\n")
    (tmp_path / "milex.csv").write_text("country,year,expenditure\n")
    (tmp_path / "conflicts.csv").write_text("aggressor,target,year,expenditure\n")
    with pytest.raises(ValueError, match="negative wealth"):
        pf.load_panel(tmp_path)
