"""Acceptance criteria, each at its stated tolerance.

Every test prints one PASS/FAIL line; the lines are repeated at the end of
the pytest run.  Everything is seeded from ``SEED``, fixed before any run.
Set ``KNOTLAB_ACCEPTANCE_CACHE`` to a directory to reuse the 10^5-draw
spectrum between runs.
"""
import json
import os
import random
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import dblquad

from knotlab import experiment as ex
from knotlab.diagram import generic_project, kmt_simplify
from knotlab.geometry import RngStream
from knotlab.homfly import KnotLabel, LaurentPoly2, gauss, homfly, homfly_gauss, identify, parse_label
from knotlab.sampling import MomentPolytope, sample_closed_equilateral, sample_polytope_uniform

pytestmark = pytest.mark.slow

SEED = 20240601
N = 100
SPECTRUM_DRAWS = 100_000


@pytest.fixture(scope="module")
def labels(table):
    cache = os.environ.get("KNOTLAB_ACCEPTANCE_CACHE")
    path = Path(cache) / ("spectrum_%d_%d.json" % (SEED, SPECTRUM_DRAWS)) if cache else None
    if path is not None and path.exists():
        return json.loads(path.read_text())
    out = ex.spectrum(N, SPECTRUM_DRAWS, SEED, table, workers=ex.default_workers())
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(out))
    return out


def _fmt(d):
    return ", ".join("%s=%s" % (k, ("%.4f" % v) if isinstance(v, float) else v) for k, v in d.items())


def test_c1_knot_spectrum(labels, report):
    f = ex.frequencies(labels)
    got = {lb: f.get(lb, 0.0) for lb in ("0_1", "+3_1", "4_1")}
    want = {"0_1": (0.7066, 0.006), "+3_1": (0.0843, 0.004), "4_1": (0.0328, 0.003)}
    ok = all(abs(got[k] - m) <= tol for k, (m, tol) in want.items())
    extra = {"-3_1": f.get("-3_1", 0.0), "unknown": f.get("unknown", 0.0), "draws": len(labels)}
    report("criterion 1 (knot spectrum, 10^5 100-gons)", ok, _fmt({**got, **extra}))


def test_c2_small_k_limits(labels, table, report):
    hosts = ex.random_hosts(500, N, SEED, table, labels_cache=list(labels[:500]))
    unknot_share = sum(h.true_label == KnotLabel(()) for h in hosts) / len(hosts)
    ks = [1, 2, 3, 4, 5]
    ray = ex.run_accuracy(hosts, ["pu", "su"], ks, 1, seed=SEED, table=table)
    sr = ex.run_accuracy(hosts, ["sr"], ks, 4, seed=SEED, table=table)
    pr_trials = [(h.host_id, 1 + h.host_id % 5) for h in hosts]
    pr = ex.run_accuracy(hosts, ["pr"], ks, 1, closures=100, seed=SEED, table=table, trials=pr_trials)

    def acc(recs, m):
        sel = [r for r in recs if r.method == m]
        return sum(r.correct for r in sel) / len(sel)

    got = {"pu": acc(ray, "pu"), "su": acc(ray, "su"), "sr": acc(sr, "sr"),
           "pr_predicts_0_1": sum(r.predicted == "0_1" for r in pr) / len(pr)}
    ok = (abs(got["pu"] - 0.706) <= 0.02 and abs(got["su"] - 0.706) <= 0.02
          and abs(got["sr"] - 0.52) <= 0.02 and got["pr_predicts_0_1"] >= 0.99)
    got["host_unknot_share"] = unknot_share
    report("criterion 2 (small-k limits, 500 random hosts, k<=5)", ok, _fmt(got))


def test_c3_full_information(labels, table, report):
    knotted = [i for i, lb in enumerate(labels) if lb not in ("0_1", "unknown")][:100]
    hosts = [ex.HostSample(ex.draw_polygon(N, SEED, i), parse_label(labels[i]), i) for i in knotted]
    near = ex.run_accuracy(hosts, ["sr", "pr"], [N - 1], 1, closures=100, seed=SEED, table=table)
    full = ex.run_accuracy(hosts, list(ex.METHODS), [N], 1, seed=SEED, table=table)
    got = {}
    for recs, k in ((near, N - 1), (full, N)):
        for m in sorted({r.method for r in recs}, key=ex.METHODS.index):
            got["%s@k=%d" % (m, k)] = "%d/%d" % (sum(r.correct for r in recs if r.method == m),
                                                 sum(r.method == m for r in recs))
    ok = len(hosts) == 100 and all(r.correct for r in near + full)
    report("criterion 3 (full information, 100 knotted hosts)", ok, _fmt(got))


def test_c4_thresholds(labels, table, report):
    grid = ex.parse_k_grid("60:94:2")
    cache = list(labels)
    tre, _, _ = ex.harvest_hosts(["+3_1"], 25, N, SEED, table, labels_cache=cache)
    fig8, _, _ = ex.harvest_hosts(["4_1"], 25, N, SEED, table, labels_cache=cache)
    recs = ex.run_accuracy(tre, ["pu", "sr"], grid, 20, seed=SEED, table=table)
    recs += ex.run_accuracy(fig8, ["pu"], grid, 20, seed=SEED, table=table)
    th = ex.threshold_50(ex.accuracy_by_label(recs))
    got = {"PU +3_1": th.get(("pu", "+3_1")), "SR +3_1": th.get(("sr", "+3_1")),
           "PU 4_1": th.get(("pu", "4_1"))}
    want = {"PU +3_1": 73, "SR +3_1": 79, "PU 4_1": 79}
    ok = all(got[k] is not None and abs(got[k] - v) <= 3 for k, v in want.items())
    report("criterion 4 (50%% thresholds, grid %d:%d:2)" % (grid[0], grid[-1]), ok, _fmt(got))


def test_c5_pu_pr_equivalence(labels, table, report):
    cfg = ex.ExperimentConfig(n=N, starts=4, seed=SEED)
    hosts, _, _ = ex.harvest_hosts(cfg.labels, cfg.hosts_per_knot, N, SEED, table,
                                   labels_cache=list(labels))
    recs = ex.run_accuracy(hosts, cfg.methods, cfg.k_grid, cfg.starts, cfg.closures, SEED, table)
    overall = ex.weighted_overall_accuracy(recs, normalize="included")
    mp = ex.mean_ppv(ex.compute_ppv(recs))
    acc_gap = {k: abs(overall[("pu", k)] - overall[("pr", k)]) for k in cfg.k_grid}
    ppv_gap = {k: abs(mp[("pu", k)] - mp[("pr", k)]) for k in (50, 70, 90)}
    su_sr = {k: (mp[("su", k)], mp[("sr", k)]) for k in (50, 70)}
    ok = (all(g < 0.03 for g in acc_gap.values()) and all(g < 0.05 for g in ppv_gap.values())
          and all(a > b for a, b in su_sr.values()))
    detail = "acc|PU-PR| " + _fmt({"k=%d" % k: g for k, g in acc_gap.items()})
    detail += "; meanPPV|PU-PR| " + _fmt({"k=%d" % k: g for k, g in ppv_gap.items()})
    detail += "; meanPPV SU/SR " + ", ".join("k=%d %.4f/%.4f" % (k, a, b) for k, (a, b) in su_sr.items())
    report("criterion 5 (PU ~ PR, desk campaign: 10 labels x 25 hosts x 4 starts)", ok, detail)


def test_c6a_sampler_closure(report):
    worst_res = worst_edge = 0.0
    for i in range(100_000):
        v = sample_closed_equilateral(N, RngStream(SEED, (9, i))).vertices
        e = np.roll(v, -1, axis=0) - v
        worst_res = max(worst_res, float(np.linalg.norm(e.sum(axis=0))))
        worst_edge = max(worst_edge, float(np.max(np.abs(np.sqrt(np.einsum("ij,ij->i", e, e)) - 1))))
    ok = worst_res < 1e-9 and worst_edge < 1e-9
    report("criterion 6a (closure and unit edges, 10^5 polygons)", ok,
           "max residual %.2e, max edge error %.2e" % (worst_res, worst_edge))


def test_c6b_moment_oracle(report):
    rng = RngStream(SEED, (10,))
    pt4 = MomentPolytope(np.ones(4))
    d4 = np.array([sample_polytope_uniform(pt4, rng)[0] for _ in range(100_000)])
    pt5 = MomentPolytope(np.ones(5))
    d5 = np.array([sample_polytope_uniform(pt5, rng)[0] for _ in range(100_000)])
    lo = lambda x: max(0.0, x - 1, 1 - x)
    hi = lambda x: min(2.0, x + 1)
    oracle5 = dblquad(lambda y, x: x * x, 0, 2, lo, hi)[0] / dblquad(lambda y, x: 1.0, 0, 2, lo, hi)[0]
    m4, m5 = float(np.mean(d4 ** 2)), float(np.mean(d5 ** 2))
    ok = abs(m4 - 4 / 3) <= 0.01 and abs(m5 - oracle5) <= 0.02
    report("criterion 6b (polytope moments)", ok,
           "n=4 mean d^2 %.4f (4/3), n=5 mean d1^2 %.4f (quadrature %.4f)" % (m4, m5, oracle5))


def test_c6c_skein_identity(report):
    rng = random.Random(SEED)
    a, a_inv, z = (LaurentPoly2.monomial(1, 0), LaurentPoly2.monomial(-1, 0),
                   LaurentPoly2.monomial(0, 1))
    held = tried = i = 0
    while tried < 100:
        p = sample_closed_equilateral(16, RngStream(SEED, (11, i)))
        d = generic_project(p, RngStream(SEED, (12, i)))
        i += 1
        if not 1 <= len(d) <= 8:
            continue
        (word,), signs = d.gauss_code()
        x = rng.choice(sorted(signs))
        flip = lambda w: [q ^ 1 if q >> 1 == x else q for q in w]  # noqa: E731
        pos = word if signs[x] > 0 else flip(word)
        neg = flip(pos)
        sp = {**signs, x: 1}
        sn = {**signs, x: -1}
        j, k = [t for t, q in enumerate(word) if q >> 1 == x]
        zero = [word[j + 1:k], word[k + 1:] + word[:j]]
        s0 = {y: s for y, s in signs.items() if y != x}
        lhs = a * homfly_gauss([pos], sp, cap=None) - a_inv * homfly_gauss([neg], sn, cap=None)
        held += lhs == z * homfly_gauss(zero, s0, cap=None)
        tried += 1
    report("criterion 6c (skein identity, <=8 crossings)", held == tried, "%d/%d triples" % (held, tried))


def test_c6d_kmt_invariance(report):
    same = 0
    for i in range(1000):
        p = sample_closed_equilateral(N, RngStream(SEED, (13, i)))
        raw = homfly(generic_project(p, RngStream(SEED, (14, i))), cap=None)
        red = homfly(generic_project(kmt_simplify(p), RngStream(SEED, (15, i))), cap=None)
        same += raw == red
    report("criterion 6d (kmt_simplify preserves HOMFLYPT)", same == 1000, "%d/1000 polygons" % same)


def test_c6e_mirror(labels, table, report):
    bad = []
    chiral = 0
    for e in table:
        if e.label.mirror() == e.label:
            continue
        chiral += 1
        word, signs = gauss.from_pd([list(x) for x in e.pd_code])
        mw, ms = gauss.mirror([word], signs)
        got = table.lookup(homfly_gauss(mw, ms, cap=None))
        if got != table.label_for(e.label.mirror()):
            bad.append(str(e.label))
    knotted = [i for i, lb in enumerate(labels[:5000]) if lb not in ("0_1", "unknown")][:300]
    poly_bad = 0
    for i in knotted:
        p = ex.draw_polygon(N, SEED, i)
        lb = parse_label(labels[i])
        if identify(p.mirrored(), table, RngStream(SEED, (16, i))) != lb.mirror():
            poly_bad += 1
    ok = not bad and poly_bad == 0
    report("criterion 6e (mirror flips chirality)", ok,
           "%d chiral table entries, %d failures; %d sampled knotted polygons, %d failures"
           % (chiral, len(bad), len(knotted), poly_bad))


def test_c6f_product_rule(table, report):
    lhs = table.poly("+3_1") * table.poly("-3_1")
    rhs = table.poly("+3_1#-3_1")
    report("criterion 6f (composite product rule)", lhs == rhs, "table(+3_1)*table(-3_1) %s table(+3_1#-3_1)"
           % ("==" if lhs == rhs else "!="))


def test_c6g_worker_independence(tmp_path, table, report):
    outs = {}
    for w in (1, 8):
        cfg = ex.ExperimentConfig(n=60, labels=["0_1", "+3_1", "4_1"], hosts_per_knot=3,
                                  k_grid=[10, 30, 50], starts=3, closures=20, seed=SEED, workers=w)
        hosts, records, counts, draws = ex.run_campaign(cfg, table)
        d = tmp_path / ("w%d" % w)
        ex.write_outputs(d, cfg, "all", hosts, records, counts, draws)
        outs[w] = {p.name: p.read_bytes() for p in sorted(d.iterdir())}
    same = outs[1] == outs[8]
    report("criterion 6g (1 vs 8 workers)", same,
           "%d files compared, %s" % (len(outs[1]), "byte-identical" if same else "differ"))
