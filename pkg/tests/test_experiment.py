import csv
import io

import pytest

from crralloc.experiment import CSV_COLUMNS, ExperimentConfig, run_experiment, run_trial


def _small(**kw):
    base = dict(n=3, m=5, agent_caps=(1, 2), item_caps=(1, 1), phis=(0.0, 0.5), trials=2, seed=4)
    base.update(kw)
    return ExperimentConfig(**base)


def _data_rows(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return [r for r in rows if r["trial"] not in ("mean", "std")], rows


def test_header_and_row_count():
    cfg = _small()
    text = run_experiment(cfg).to_csv()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    data, rows = _data_rows(text)
    per_run = len(cfg.notions)
    assert len(data) == len(cfg.objectives) * len(cfg.phis) * cfg.trials * per_run
    assert len(rows) - len(data) == 2 * len(cfg.objectives) * len(cfg.phis) * per_run


def test_single_run_single_row():
    cfg = _small(phis=(0.5,), trials=1, objectives=("UM",), notions=("NEF1",))
    data, _ = _data_rows(run_experiment(cfg).to_csv())
    assert len(data) == 1 and data[0]["status"] == "ok"


def test_byte_identical_reruns_and_parallel():
    cfg = _small()
    first = run_experiment(cfg).to_csv()
    assert run_experiment(cfg).to_csv() == first
    assert run_experiment(cfg, jobs=2).to_csv() == first


def test_timing_fills_runtime():
    cfg = _small(phis=(0.5,), trials=1, objectives=("UM",), notions=("EF1",))
    data, _ = _data_rows(run_experiment(cfg, timing=True).to_csv())
    assert float(data[0]["runtime_ms"]) >= 0


def test_failures_become_rows():
    # a tiny budget cuts the exact search short; infeasible caps raise outright
    cfg = _small(n=4, m=8, agent_caps=(2, 2), item_caps=(1, 1), objectives=("Nash", "UM"), budget=1, trials=1)
    rows = run_trial(cfg, 0, 0)
    assert {r["status"] for r in rows if r["objective"] == "Nash"} == {"approximate"}
    bad = _small(agent_caps=(3, 3), item_caps=(1, 1), trials=1)
    rows = run_trial(bad, 0, 0)
    assert len(rows) == len(bad.objectives) * len(bad.notions)
    assert all(r["status"].startswith("error:") for r in rows)


def test_mean_lookup():
    cfg = _small(objectives=("UM", "UM-CRR"))
    result = run_experiment(cfg)
    assert 0.0 <= result.mean(0.5, "UM-CRR", "EF1") <= 1.0


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(objectives=("UM", "Leximin"))
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"n": 3, "colour": "blue"})
    cfg = _small()
    assert ExperimentConfig.from_json(cfg.to_json()) == cfg
