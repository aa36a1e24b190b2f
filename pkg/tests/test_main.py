# -*- coding: utf-8 -*-
import io
import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from main import cli
from results_store import read_coefficients
from saddle import critical_beta


@pytest.fixture
def run():
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(cli, list(args))
    return _run


def _csv(result) -> pd.DataFrame:
    return pd.read_csv(io.StringIO(result.stdout))


# ----------------- heat-kernel -----------------
def test_heat_kernel_factor_row(run):
    res = run("heat-kernel", "--d", "1", "--L", "4", "--beta", "0")
    assert res.exit_code == 0
    assert res.stdout.splitlines() == ["r_0,r_1,r_2,r_3", "1,0,0,0"]


def test_heat_kernel_at(run):
    res = run("heat-kernel", "--d", "1", "--L", "4", "--beta", "1", "--at", "0,0")
    assert res.exit_code == 0
    assert _csv(res)["g"][0] == pytest.approx(((1 + np.exp(-2)) / 2) ** 2, rel=1e-12)


def test_heat_kernel_at_keeps_factor_table(run):
    res = run("heat-kernel", "--d", "2", "--L", "4", "--beta", "0", "--at", "0,0", "--at", "0,1")
    assert res.exit_code == 0
    df = _csv(res)
    assert list(df.columns) == ["i", "j", "g", "r_0", "r_1", "r_2", "r_3"]
    assert df["g"].tolist() == [1, 0]
    assert df["r_0"].tolist() == [1, 1]


def test_heat_kernel_argument_errors(run):
    assert run("heat-kernel", "--d", "1", "--L", "4").exit_code == 2
    assert run("heat-kernel", "--L", "2", "--beta", "1").exit_code == 2
    assert run("heat-kernel", "--beta", "1", "--at", "0").exit_code == 2


# ----------------- expand -----------------
def test_expand_summary(run):
    res = run("expand", "--d", "1", "--L", "3", "--beta", "0")
    assert res.exit_code == 0
    data = json.loads(res.stdout)
    assert data["schema_version"] == 1
    assert data["sum"] == 1.0
    assert data["support"] == 1
    assert data["trace"] == pytest.approx(8.0)


def test_expand_normalized_with_file_and_profile(run, tmp_path):
    path = tmp_path / "ring6.bin"
    res = run("expand", "--L", "6", "--beta", "2", "--coeff-file", str(path), "--profile")
    assert res.exit_code == 0
    data = json.loads(res.stdout)
    assert abs(data["sum"] - 1.0) <= 1e-12
    assert np.dot(np.arange(1, 7), data["profile"]) == pytest.approx(6.0)
    coeffs, meta = read_coefficients(str(path))
    assert meta["N"] == 6 and meta["beta"] == 2.0
    assert coeffs.support == data["support"]


def test_expand_budget_guard(run):
    res = run("expand", "--L", "10", "--beta", "1")
    assert res.exit_code == 3
    assert "❌" in res.output


# ----------------- conjecture -----------------
def test_conjecture_grid_report(run):
    res = run("conjecture", "--L", "6", "--beta-grid", "1:8:4", "--log")
    assert res.exit_code == 0
    fits = json.loads(res.stdout)["fits"]
    assert len(fits) == 4
    assert [f["beta"] for f in fits] == pytest.approx([1, 2, 4, 8])
    assert all(np.isfinite(f["anchored_median"]) for f in fits)


def test_conjecture_single_permutation(run):
    res = run("conjecture", "--L", "6", "--beta", "4", "--perm", "1,0,2,3,4,5")
    assert res.exit_code == 0
    fit = json.loads(res.stdout)["fits"][0]
    assert fit["coefficient"] > 0 and fit["rhs"] > 0
    assert fit["anchored_prediction"] == pytest.approx(fit["anchored_constant"] * fit["rhs"])


def test_conjecture_errors(run):
    assert run("conjecture", "--L", "6", "--beta", "1", "--floor", "2").exit_code == 4
    assert run("conjecture", "--L", "6", "--beta", "1", "--perm", "1,0").exit_code == 2
    assert run("conjecture", "--L", "6").exit_code == 2


# ----------------- walks -----------------
def test_walks_table(run):
    res = run("walks", "--d", "2", "--L", "4", "--beta", "1", "--k", "2", "--k", "3")
    assert res.exit_code == 0
    df = _csv(res)
    assert list(df.columns) == ["k", "distinct", "unrestricted", "gaussian"]
    assert (df["distinct"] <= df["unrestricted"]).all()


def test_walks_budget_from_env():
    runner = CliRunner(env={"ENUM_BUDGET": "5"})
    res = runner.invoke(cli, ["walks", "--d", "2", "--L", "4", "--beta", "1", "--k", "4"])
    assert res.exit_code == 3


@pytest.mark.parametrize("value,code", [("1e8", 0), ("5e0", 3), ("muitos", 2)])
def test_walks_budget_scientific_notation(value, code):
    runner = CliRunner(env={"ENUM_BUDGET": value})
    res = runner.invoke(cli, ["walks", "--d", "2", "--L", "4", "--beta", "1", "--k", "4"])
    assert res.exit_code == code


# ----------------- saddle -----------------
def test_saddle_three_dimensional_onset(run):
    res = run("saddle", "--d", "3", "--beta-grid", "0.5:10:20")
    assert res.exit_code == 0
    df = _csv(res)
    assert list(df.columns) == ["beta", "alpha", "condensate_fraction", "s1", "mu"]
    bc = critical_beta(3)
    assert (df.loc[df["beta"] < bc, "condensate_fraction"] == 0).all()
    assert (df.loc[df["beta"] > bc, "condensate_fraction"] > 0).all()


def test_saddle_two_dimensions_no_condensate(run):
    res = run("saddle", "--d", "2", "--beta-grid", "0.5:100:20")
    assert res.exit_code == 0
    assert (_csv(res)["condensate_fraction"] == 0).all()


def test_saddle_sector(run):
    res = run("saddle", "--d", "3", "--beta", "25", "--sector-k", "0.25", "--n-max", "50")
    assert res.exit_code == 0
    df = _csv(res)
    assert list(df.columns) == ["tau", "n", "s", "r"]
    assert len(df) == 50
    assert (df["r"] <= df["s"]).all()


def test_saddle_json_carries_densities(run):
    res = run("saddle", "--d", "1", "--beta", "2", "--n-max", "20", "--format", "json")
    assert res.exit_code == 0
    data = json.loads(res.stdout)
    assert data["critical_beta"] is None
    assert len(data["densities"][0]) == 20


def test_saddle_bad_grid(run):
    assert run("saddle", "--d", "3", "--beta-grid", "1:2").exit_code == 2
    assert run("saddle", "--d", "3", "--beta-grid", "2:1:5").exit_code == 2


# ----------------- sectors -----------------
def test_sectors_binomial_table(run):
    res = run("sectors", "--d", "1", "--L", "4", "--beta", "0", "--table")
    assert res.exit_code == 0
    df = _csv(res)
    assert list(df.columns) == ["k", "dim", "trace"]
    assert df["trace"].tolist() == [1, 4, 6, 4, 1]


def test_sectors_triangle(run):
    res = run("sectors", "--d", "1", "--L", "3", "--beta", "1", "--table")
    assert _csv(res)["trace"][1] == pytest.approx(1.099574, abs=1e-6)


def test_sectors_ratio_vs_L(run):
    res = run("sectors", "--d", "1", "--L", "4", "--L", "6", "--L", "8", "--beta", "4", "--ratio", "0.25")
    assert res.exit_code == 0
    df = _csv(res)
    assert df["L"].tolist() == [4, 6, 8]
    assert ((df["ratio"] > 0) & (df["ratio"] < 1)).all()


def test_sectors_field_and_correlations(run):
    res = run("sectors", "--L", "4", "--beta", "1", "--field", "0.1", "--field", "-0.1")
    df = _csv(res)
    assert df["A"][0] == pytest.approx(df["A"][1], rel=1e-12)
    assert (df["A"] >= 1).all()

    res = run("sectors", "--L", "4", "--beta", "2", "--correlations")
    assert list(_csv(res).columns) == ["i", "j", "rho"]


def test_sectors_rejects_two_queries(run):
    assert run("sectors", "--L", "4", "--beta", "1", "--table", "--ratio", "0.25").exit_code == 2


def test_sectors_budget(run):
    assert run("sectors", "--L", "6", "--beta", "1", "--budget", "5").exit_code == 3
