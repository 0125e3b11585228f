import csv
import io
import math

import numpy as np
import pytest

from twistlab import bounds, hecke, sums
from twistlab.config import ExperimentConfig
from twistlab.experiments import (
    HISTOGRAM_COLUMNS,
    IDENTITY_COLUMNS,
    SWEEP_COLUMNS,
    Table,
    fit_slope,
    run_experiment,
    run_identity_suite,
    run_sqrtcancel_histogram,
    run_sweep,
    strip_timing,
)
from twistlab.trace import crt_product, family
from twistlab.window import SmoothWindow


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def sweep_cfg(**kw):
    base = dict(kind="sweep-thm1", q0=101, q1=7, x_values=(200.0, 600.0, 1800.0), timing=False)
    base.update(kw)
    return ExperimentConfig(**base)


def test_table_formatting():
    t = Table(("a", "b", "c"), [{"a": 0.1, "b": True}, {"a": 3, "c": "x"}])
    assert t.to_csv().splitlines() == ["a,b,c", "0.1,1,", "3,,x"]


def test_fit_slope():
    xs = np.geomspace(10, 1e5, 6)
    assert fit_slope(xs, 3 * xs**0.75) == pytest.approx(0.75, abs=1e-12)
    assert fit_slope([10.0], [1.0]) is None


def test_sweep_thm1_values():
    cfg = sweep_cfg()
    out = rows(run_sweep(cfg).to_csv())
    assert list(out[0]) == list(SWEEP_COLUMNS)
    data = [r for r in out if r["row_type"] == "point"]
    K = crt_product(family("kl:3", 101), family("chi:1", 7))
    f = hecke.delta_coefficients(3600)
    khat1 = float(data[0]["khat1"])
    for r in data:
        X = float(r["X"])
        S = sums.twisted_sum(f, K, SmoothWindow(), X)
        assert float(r["S_re"]) == S.real and float(r["S_im"]) == S.imag
        assert float(r["bound"]) == bounds.bound_thm1(X, 1.0, 101, 7, khat1)
        assert r["status"] == "ok" and r["wall_ms"] == ""
    fit = [r for r in out if r["row_type"] == "fit"]
    assert len(fit) == 1 and fit[0]["status"] == "ok"


def test_sweep_reruns_identical():
    a = run_sweep(sweep_cfg(threads=1)).to_csv()
    assert a == run_sweep(sweep_cfg(threads=4)).to_csv()
    timed = run_sweep(sweep_cfg(timing=True)).to_csv()
    assert strip_timing(timed) == strip_timing(a)


def test_empty_grid_header_only():
    text = run_sweep(sweep_cfg(x_values=())).to_csv()
    assert text.strip() == ",".join(SWEEP_COLUMNS)


def test_zero_family_gives_zero():
    out = rows(run_sweep(sweep_cfg(k0="zero", x_values=(500.0,))).to_csv())
    point = [r for r in out if r["row_type"] == "point"][0]
    assert float(point["S_abs"]) == 0.0
    assert [r for r in out if r["row_type"] == "fit"][0]["status"] == "insufficient"


def test_sweep_thm2_constraint_rows():
    out = rows(run_sweep(sweep_cfg(kind="sweep-thm2", q0=13, q1=5, x_values=(100.0,))).to_csv())
    assert out[0]["status"] == "constraint-violated"


def test_sweep_ap_level():
    out = rows(run_sweep(sweep_cfg(kind="sweep-ap", q0=11, q1=3, residue=2, x_values=(100.0, 10000.0))).to_csv())
    points = [r for r in out if r["row_type"] == "point"]
    # q = 33 against X^(15/52): outside at X = 100 and 10^4
    assert all(r["status"] == "outside-level" for r in points)
    f = hecke.delta_coefficients(200)
    assert float(points[0]["S_re"]) == pytest.approx(sums.ap_sum(f, 2, 33, SmoothWindow(), 100.0), abs=1e-12)


def test_histogram():
    cfg = ExperimentConfig(kind="sqrtcancel-histogram", q0_list=(101,), draws=40, zz_draws=10,
                           resonant_draws=5, seed=3, timing=False)
    text = run_sqrtcancel_histogram(cfg).to_csv()
    assert text == run_sqrtcancel_histogram(cfg).to_csv()
    out = rows(text)
    assert list(out[0]) == list(HISTOGRAM_COLUMNS)
    kinds = [r["row_type"] for r in out]
    assert kinds.count("corr") == 40 and kinds.count("zz") == 15
    summary = {r["row_type"]: r for r in out if r["row_type"].startswith("summary")}
    assert set(summary) == {"summary-corr", "summary-zz", "summary-zz-resonant"}
    assert float(summary["summary-corr"]["max"]) < 6
    assert float(summary["summary-zz-resonant"]["mean"]) > 0.5
    for r in out:
        if r["row_type"] == "zz" and r["resonant"] == "1":
            assert r["delta"] == "0" and r["alpha"] == r["alpha2"]
            assert int(r["beta"]) * int(r["gamma"]) % 101 == int(r["beta2"]) * int(r["gamma2"]) % 101
    empty = run_sqrtcancel_histogram(ExperimentConfig(kind="sqrtcancel-histogram", q0_list=(101,), draws=0,
                                                      zz_draws=0, resonant_draws=0))
    assert empty.to_csv().strip() == ",".join(HISTOGRAM_COLUMNS)


def test_identity_suite():
    out = rows(run_identity_suite(ExperimentConfig(kind="identity-suite", timing=False)).to_csv())
    assert list(out[0]) == list(IDENTITY_COLUMNS)
    assert len(out) == 7
    assert all(r["passed"] == "1" for r in out), [r for r in out if r["passed"] != "1"]


def test_run_experiment_dispatch():
    assert run_experiment(sweep_cfg(x_values=())).to_csv().startswith("row_type,X")
