import json
import re
from pathlib import Path

import numpy as np
import pytest

from knotlab import experiment as ex
from knotlab.experiment import TrialRecord
from knotlab.geometry import read_ndjson

PAPER = Path(__file__).resolve().parents[1] / "paper.md"


def rec(host, k, method, pred, true, start=0):
    return TrialRecord(host, k, start, method, pred, true, pred == true)


TOY = [
    rec(0, 10, "pu", "0_1", "0_1"),
    rec(1, 10, "pu", "0_1", "+3_1"),
    rec(2, 10, "pu", "+3_1", "+3_1"),
    rec(3, 10, "pu", "+3_1", "+3_1"),
    rec(0, 30, "pu", "0_1", "0_1"),
    rec(1, 30, "pu", "+3_1", "+3_1"),
    rec(2, 30, "pu", "+3_1", "+3_1"),
    rec(3, 30, "pu", "0_1", "+3_1"),
    rec(0, 10, "sr", "+3_1", "0_1"),
    rec(1, 10, "sr", "0_1", "+3_1"),
]


def test_prior_matches_reference_table():
    if not PAPER.exists():
        pytest.skip("reference text not available")
    text = PAPER.read_text()
    text = text[text.index("knotprobtable"):]
    text = text[text.index("Knot & \\%"):text.index("\\caption")]
    rows = re.findall(r"\$([+-]?\d+_\{?\d+\}?(?:\\#[+-]\d+_\d+)?)\$\s*&\s*([\d.]+)", text)
    table = {name.replace("{", "").replace("}", "").replace("\\#", "#"): float(v) / 100
             for name, v in rows}
    assert len(table) == 25
    assert set(table) == set(ex.KNOT_FREQUENCY_PRIOR)
    for name, v in table.items():
        assert ex.KNOT_FREQUENCY_PRIOR[name] == pytest.approx(v, abs=1e-12)
    assert set(ex.DESK_LABELS) <= set(table)


def test_tabulate_counts():
    m = ex.tabulate(TOY)
    assert m.accuracy[("pu", "+3_1", 10)] == [2, 3]
    assert m.accuracy[("pu", "0_1", 10)] == [1, 1]
    assert m.ppv[("pu", "0_1", 10)] == [1, 2]
    assert m.ppv[("pu", "+3_1", 10)] == [2, 2]
    assert m.methods() == ["pu", "sr"]
    assert m.ks() == [10, 30]


def test_accuracy_and_ppv():
    acc = ex.accuracy_by_label(TOY)
    assert acc[("pu", "+3_1", 30)] == pytest.approx(2 / 3)
    ppv = ex.compute_ppv(TOY)
    assert ppv[("pu", "0_1", 30)] == pytest.approx(0.5)
    assert ppv[("sr", "+3_1", 10)] == 0.0
    mean = ex.mean_ppv(ppv)
    assert mean[("pu", 10)] == pytest.approx((0.5 + 1.0) / 2)
    assert ex.mean_ppv(ppv, nontrivial=True)[("pu", 10)] == pytest.approx(1.0)


def test_weighted_overall_accuracy_normalizations():
    prior = {"0_1": 0.6, "+3_1": 0.2, "4_1": 0.2}
    inc = ex.weighted_overall_accuracy(TOY, prior, "included")
    allp = ex.weighted_overall_accuracy(TOY, prior, "prior")
    # pu, k=10: accuracies 1.0 (0_1) and 2/3 (+3_1)
    assert inc[("pu", 10)] == pytest.approx((0.6 * 1 + 0.2 * 2 / 3) / 0.8)
    assert allp[("pu", 10)] == pytest.approx(0.6 * 1 + 0.2 * 2 / 3)
    with pytest.raises(ValueError):
        ex.weighted_overall_accuracy(TOY, prior, "bogus")
    with pytest.raises(KeyError):
        ex.weighted_overall_accuracy(TOY, {"0_1": 1.0})


def test_threshold_50():
    acc = {("pu", "+3_1", 10): 0.2, ("pu", "+3_1", 30): 0.5, ("pu", "+3_1", 50): 0.4,
           ("pu", "4_1", 10): 0.1}
    th = ex.threshold_50(acc)
    assert th == {("pu", "+3_1"): 30}


def test_emit_and_load_round_trip(tmp_path):
    m = ex.tabulate(TOY)
    written = ex.emit(m, tmp_path, fmt="both")
    names = {p.name for p in written}
    assert {"accuracy.csv", "ppv.csv", "mean_ppv.csv", "threshold50.csv", "overall_accuracy.csv",
            "accuracy.dat"} <= names
    back = ex.load_metrics(tmp_path)
    assert back.accuracy == m.accuracy and back.ppv == m.ppv
    acc = (tmp_path / "accuracy.csv").read_text().splitlines()
    assert acc[0] == ",".join(ex.ACCURACY_COLS)
    assert "pu,+3_1,10,2,3,0.666667,0.272166" in acc
    th = (tmp_path / "threshold50.csv").read_text().splitlines()
    assert "pu,+3_1,10" in th and "sr,+3_1," in th
    dat = (tmp_path / "accuracy.dat").read_text()
    assert "# pu +3_1" in dat and "\n\n\n" in dat


def test_parse_k_grid():
    assert ex.parse_k_grid("1-5,10:30:10") == [1, 2, 3, 4, 5, 10, 20, 30]
    assert ex.parse_k_grid("7, 7,3") == [3, 7]
    assert ex.parse_k_grid("58:64:3") == [58, 61, 64]
    with pytest.raises(ValueError):
        ex.parse_k_grid("")
    with pytest.raises(ValueError):
        ex.parse_k_grid("1:5:0")


def test_config_file(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("# desk run\nn = 60\nhosts-per-knot = 3\nk_grid = \"10:50:20\"\n"
                    "labels = 0_1, +3_1\nmethods = pu,sr\n")
    cfg = ex.config_from_mapping(ex.read_config(path))
    assert cfg.n == 60 and cfg.hosts_per_knot == 3
    assert cfg.k_grid == [10, 30, 50]
    assert cfg.labels == ["0_1", "+3_1"] and cfg.methods == ["pu", "sr"]
    with pytest.raises(ValueError):
        ex.config_from_mapping({"bogus": 1})
    path.write_text("no equals sign\n")
    with pytest.raises(ValueError):
        ex.read_config(path)


def test_subchains_and_starts(trefoil6):
    arcs = ex.enumerate_subchains(trefoil6, 2)
    assert len(arcs) == 6
    np.testing.assert_array_equal(arcs[5].vertices, trefoil6.vertices[[5, 0, 1]])
    assert ex.subchain(trefoil6, 3, 6).k == 6
    with pytest.raises(ValueError):
        ex.subchain(trefoil6, 0, 7)
    s = ex.choose_starts(100, 20, 1, 4, 30)
    assert s == ex.choose_starts(100, 20, 1, 4, 30)
    assert len(set(s)) == 20 and s == sorted(s)
    assert ex.choose_starts(100, 100, 1, 4, 30) == list(range(100))


def test_spectrum_is_split_independent(table):
    a = ex.spectrum(100, 30, 5, table, workers=1, chunk=7)
    b = ex.spectrum(100, 20, 5, table, workers=1, start=10)
    c = ex.spectrum(100, 30, 5, table, workers=2, chunk=4)
    assert a[10:] == b
    assert a == c


def test_harvest_budget(table):
    with pytest.raises(ex.HarvestBudgetExceeded):
        ex.harvest_hosts(["+9_46"], 1, 100, 5, table, budget=50)
    hosts, counts, draws = ex.harvest_hosts(["+3_1"], 2, 100, 5, table)
    assert len(hosts) == 2 and sum(counts.values()) == draws
    assert all(str(h.true_label) == "+3_1" for h in hosts)
    assert hosts[0].host_id < hosts[1].host_id


def test_small_campaign_outputs(tmp_path, table):
    cfg = ex.ExperimentConfig(n=40, labels=["0_1", "+3_1"], hosts_per_knot=2, k_grid=[5, 39],
                              starts=2, closures=5, seed=3)
    hosts, records, counts, draws = ex.run_campaign(cfg, table)
    assert len(records) == 2 * 2 * 2 * 2 * 4
    ex.write_outputs(tmp_path, cfg, "all", hosts, records, counts, draws)
    man = json.loads((tmp_path / "run_manifest.json").read_text())
    assert man["seed"] == 3 and man["config"]["k_grid"] == [5, 39]
    assert "workers" not in man["config"]
    got = [(obj.n, extra["true_label"]) for obj, extra in read_ndjson(tmp_path / "hosts.ndjson")]
    assert got == [(40, "0_1")] * 2 + [(40, "+3_1")] * 2
    acc = ex.load_metrics(tmp_path).accuracy
    # SR and PR at k = n - 1 are exact
    for lb in ("0_1", "+3_1"):
        for m in ("sr", "pr"):
            c, t = acc[(m, lb, 39)]
            assert c == t
