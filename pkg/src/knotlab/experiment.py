"""Classifier campaigns: host harvesting, subchain trials and their metrics.

Every random quantity is drawn from an :class:`RngStream` keyed by what it
belongs to (draw index, or host/k/start/method for a trial), so results do
not depend on how work is split between processes.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import platform
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .classify import METHODS, build_direction_set, classify
from .geometry import OpenArc, Polygon3, RngStream, to_record
from .homfly import KnotTable, default_table, identify, parse_label
from .sampling import sample_closed_equilateral

# stream namespaces under the campaign seed
_DRAW, _IDENT, _STARTS, _TRIAL = 1, 2, 3, 4

# Percentages of the 5,000,000-polygon reference spectrum, as fractions.
KNOT_FREQUENCY_PRIOR = {
    "0_1": 0.706613, "+3_1": 0.084252, "4_1": 0.032827, "+5_1": 0.004994,
    "+5_2": 0.008546, "+6_1": 0.002066, "+6_2": 0.002358, "6_3": 0.002694,
    "+3_1#+3_1": 0.003865, "+3_1#-3_1": 0.007738, "+7_1": 0.000234, "+7_2": 0.000499,
    "+8_2": 0.000113, "+8_8": 0.000201, "+8_16": 0.000039, "+8_19": 0.000263,
    "+8_20": 0.000518, "+8_21": 0.000293, "+9_2": 0.000024, "+9_15": 0.000035,
    "+9_21": 0.000028, "+9_36": 0.000023, "+9_43": 0.000107, "+9_44": 0.000162,
    "+9_46": 0.000054,
}

DESK_LABELS = ["0_1", "+3_1", "4_1", "+5_1", "+5_2", "+6_1", "+6_2", "6_3",
               "+3_1#+3_1", "+3_1#-3_1"]


class HarvestBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class HostSample:
    polygon: Polygon3
    true_label: object
    host_id: int


@dataclass(frozen=True)
class TrialRecord:
    host_id: int
    k: int
    start: int
    method: str
    predicted: str
    true_label: str
    correct: bool


# ------------------------------------------------------------------ workers

_WORKER_TABLE = None


def _init_worker(table):
    global _WORKER_TABLE
    _WORKER_TABLE = table


def _table():
    return _WORKER_TABLE if _WORKER_TABLE is not None else default_table()


def _pmap(fn, items, workers: int, table, chunksize: int = 1):
    """Ordered map, serial or over a process pool."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        _init_worker(table)
        try:
            return [fn(x) for x in items]
        finally:
            _init_worker(None)
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(table,)) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))


# ------------------------------------------------------------------- hosts

def draw_polygon(n: int, seed: int, index: int) -> Polygon3:
    """Draw ``index`` of the campaign's stream of random ``n``-gons."""
    return sample_closed_equilateral(n, RngStream(seed, (_DRAW, n, index)))


def _identify_draw(job):
    n, seed, index = job
    poly = draw_polygon(n, seed, index)
    return str(identify(poly, _table(), RngStream(seed, (_IDENT, n, index))))


def _identify_chunk(job):
    n, seed, lo, hi = job
    return [_identify_draw((n, seed, i)) for i in range(lo, hi)]


def spectrum(n: int, count: int, seed: int, table: KnotTable | None = None,
             workers: int = 1, start: int = 0, chunk: int = 500) -> list[str]:
    """Labels of draws ``start .. start + count - 1``."""
    table = default_table() if table is None else table
    jobs = [(n, seed, lo, min(lo + chunk, start + count)) for lo in range(start, start + count, chunk)]
    out: list = []
    for part in _pmap(_identify_chunk, jobs, workers, table):
        out.extend(part)
    return out


def frequencies(labels) -> dict:
    cnt = Counter(labels)
    total = sum(cnt.values())
    return {k: v / total for k, v in sorted(cnt.items(), key=lambda kv: (-kv[1], kv[0]))}


def harvest_hosts(target_labels, per_label: int, n: int, seed: int,
                  table: KnotTable | None = None, budget: int = 200_000,
                  workers: int = 1, chunk: int = 2000, labels_cache: list | None = None,
                  min_draws: int = 0):
    """Rejection-sample hosts of each target type, scanning draws in order.

    Returns ``(hosts, counts, draws)``: the hosts (grouped by target, in
    draw order), the label counts over every draw scanned and the number of
    draws.  At least ``min_draws`` draws are scanned, so an empty target
    list gives a pure frequency report.  ``labels_cache`` may hold already computed labels of the first
    draws and is extended in place.
    """
    table = default_table() if table is None else table
    want = {}
    for lb in target_labels:
        key = str(table.label_for(parse_label(lb))) if lb != "unknown" else "unknown"
        want[key] = lb
    found: dict = {key: [] for key in want}
    labels = labels_cache if labels_cache is not None else []
    counts: Counter = Counter()
    i = 0
    while i < min_draws or any(len(v) < per_label for v in found.values()):
        if i >= budget:
            short = [want[k] for k, v in found.items() if len(v) < per_label]
            raise HarvestBudgetExceeded("budget of %d draws exhausted; short of %s" % (budget, short))
        if i >= len(labels):
            hi = min(budget, len(labels) + chunk * max(workers, 1))
            labels.extend(spectrum(n, hi - len(labels), seed, table, workers, start=len(labels)))
        lb = labels[i]
        counts[lb] += 1
        if lb in found and len(found[lb]) < per_label:
            found[lb].append(i)
        i += 1
    hosts = []
    for key, ids in found.items():
        for hid in ids:
            hosts.append(HostSample(draw_polygon(n, seed, hid), parse_label(key), hid))
    return hosts, counts, i


def random_hosts(count: int, n: int, seed: int, table: KnotTable | None = None,
                 workers: int = 1, labels_cache: list | None = None) -> list[HostSample]:
    """The first ``count`` draws, whatever their knot type."""
    labels = labels_cache if labels_cache is not None else []
    if len(labels) < count:
        labels.extend(spectrum(n, count - len(labels), seed, table, workers, start=len(labels)))
    return [HostSample(draw_polygon(n, seed, i), parse_label(labels[i]), i) for i in range(count)]


def subchain(p: Polygon3, start: int, k: int) -> OpenArc:
    n = p.n
    if not 1 <= k <= n:
        raise ValueError("k must be in 1..%d" % n)
    idx = (start + np.arange(k + 1)) % n
    return OpenArc(p.vertices[idx])


def enumerate_subchains(p: Polygon3, k: int) -> list[OpenArc]:
    """All ``n`` cyclic-start subarcs with ``k`` edges."""
    return [subchain(p, s, k) for s in range(p.n)]


def choose_starts(n: int, count: int, seed: int, host_id: int, k: int) -> list[int]:
    if count >= n:
        return list(range(n))
    rng = RngStream(seed, (_STARTS, host_id, k))
    return sorted(int(s) for s in rng.choice(n, size=count, replace=False))


# ------------------------------------------------------------------ trials

def _trial(job):
    verts, host_id, true_label, k, start, method, n, closures, seed = job
    poly = Polygon3(verts)
    arc = subchain(poly, start, k)
    rng = RngStream(seed, (_TRIAL, host_id, k, start, METHODS.index(method)))
    pred = classify(method, arc, n=n, table=_table(), rng=rng,
                    ds=build_direction_set(), closures=closures)
    label = str(pred.label)
    return TrialRecord(host_id, k, start, method, label, true_label, label == true_label)


def _trial_chunk(jobs):
    return [_trial(j) for j in jobs]


def run_accuracy(hosts, methods, k_list, subchains_per_k: int = 100, closures: int = 100,
                 seed: int = 0, table: KnotTable | None = None, workers: int = 1,
                 trials=None) -> list[TrialRecord]:
    """Classify sampled subchains of every host with every method.

    ``trials`` optionally restricts the work to explicit ``(host_id, k)``
    pairs.  Records come back sorted by (host, k, start, method).
    """
    table = default_table() if table is None else table
    methods = [m.lower() for m in methods]
    for m in methods:
        if m not in METHODS:
            raise ValueError("unknown method %r" % m)
    allowed = None if trials is None else set(trials)
    jobs = []
    for h in hosts:
        n = h.polygon.n
        verts = np.array(h.polygon.vertices)
        for k in k_list:
            if not 1 <= k <= n:
                raise ValueError("k=%d out of range for n=%d" % (k, n))
            if allowed is not None and (h.host_id, k) not in allowed:
                continue
            for s in choose_starts(n, subchains_per_k, seed, h.host_id, k):
                for m in methods:
                    jobs.append((verts, h.host_id, str(h.true_label), k, s, m, n, closures, seed))
    size = max(1, min(64, len(jobs) // (8 * max(workers, 1)) or 1))
    chunks = [jobs[i:i + size] for i in range(0, len(jobs), size)]
    out = []
    for part in _pmap(_trial_chunk, chunks, workers, table):
        out.extend(part)
    order = {m: i for i, m in enumerate(METHODS)}
    out.sort(key=lambda r: (r.host_id, r.k, r.start, order[r.method]))
    return out


# ----------------------------------------------------------------- metrics

def _se(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n) if n else float("nan")


@dataclass
class MetricsTable:
    """Counts behind every reported rate; rates are derived on demand."""

    accuracy: dict = field(default_factory=dict)  # (method, label, k) -> [correct, trials]
    ppv: dict = field(default_factory=dict)  # (method, predicted, k) -> [correct, predicted]

    def accuracy_rate(self, method, label, k) -> float:
        c, t = self.accuracy[(method, label, k)]
        return c / t

    def methods(self):
        return sorted({m for m, _, _ in self.accuracy} | {m for m, _, _ in self.ppv},
                      key=METHODS.index)

    def ks(self):
        return sorted({k for _, _, k in self.accuracy} | {k for _, _, k in self.ppv})


def tabulate(records) -> MetricsTable:
    acc: dict = defaultdict(lambda: [0, 0])
    ppv: dict = defaultdict(lambda: [0, 0])
    for r in records:
        a = acc[(r.method, r.true_label, r.k)]
        a[0] += r.correct
        a[1] += 1
        p = ppv[(r.method, r.predicted, r.k)]
        p[0] += r.correct
        p[1] += 1
    return MetricsTable(dict(acc), dict(ppv))


def accuracy_by_label(records) -> dict:
    """(method, true label, k) -> accuracy."""
    return {key: c / t for key, (c, t) in tabulate(records).accuracy.items()}


def weighted_overall_accuracy(records, prior: dict | None = None,
                              normalize: str = "included") -> dict:
    """Prior-weighted mean of per-label accuracies, per (method, k).

    ``normalize="included"`` divides by the prior mass of the labels that
    have records; ``normalize="prior"`` divides by the whole prior mass,
    so labels without records count as never correct.
    """
    prior = KNOT_FREQUENCY_PRIOR if prior is None else prior
    table = records if isinstance(records, MetricsTable) else tabulate(records)
    per: dict = defaultdict(dict)
    for (m, lb, k), (c, t) in table.accuracy.items():
        if lb not in prior:
            raise KeyError("no prior for label %s" % lb)
        per[(m, k)][lb] = c / t
    out = {}
    total_prior = sum(prior.values())
    for key, accs in sorted(per.items(), key=lambda kv: (METHODS.index(kv[0][0]), kv[0][1])):
        num = sum(prior[lb] * a for lb, a in accs.items())
        den = sum(prior[lb] for lb in accs) if normalize == "included" else total_prior
        if normalize not in ("included", "prior"):
            raise ValueError("normalize must be 'included' or 'prior'")
        out[key] = num / den
    return out


def compute_ppv(records) -> dict:
    """(method, predicted label, k) -> fraction of those predictions that were right."""
    table = records if isinstance(records, MetricsTable) else tabulate(records)
    return {key: c / t for key, (c, t) in table.ppv.items() if t}


def mean_ppv(ppv: dict, nontrivial: bool = False) -> dict:
    """(method, k) -> unweighted mean PPV over the labels emitted at that k."""
    groups: dict = defaultdict(list)
    for (m, lb, k), v in ppv.items():
        if nontrivial and lb == "0_1":
            continue
        groups[(m, k)].append(v)
    return {key: sum(v) / len(v) for key, v in groups.items()}


def threshold_50(accuracy: dict) -> dict:
    """(method, label) -> smallest k whose accuracy is at least one half."""
    curves: dict = defaultdict(list)
    for (m, lb, k), v in accuracy.items():
        curves[(m, lb)].append((k, v))
    out = {}
    for key, pts in curves.items():
        for k, v in sorted(pts):
            if v >= 0.5:
                out[key] = k
                break
    return out


# -------------------------------------------------------------------- emit

ACCURACY_COLS = ["method", "label", "k", "correct", "trials", "accuracy", "stderr"]
PPV_COLS = ["method", "predicted_label", "k", "correct", "predicted", "ppv", "stderr"]
MEAN_PPV_COLS = ["method", "k", "mean_ppv", "labels", "mean_ppv_nontrivial", "nontrivial_labels"]
OVERALL_COLS = ["method", "k", "weighted_accuracy_included", "weighted_accuracy_prior"]
THRESHOLD_COLS = ["method", "label", "k50"]


def _f(x) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else "%.6f" % x


def _sort_key(m, lb, k):
    return (METHODS.index(m), lb, k)


def _csv(rows, cols) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    w.writerows(rows)
    return buf.getvalue()


def render(metrics: MetricsTable, prior: dict | None = None) -> dict:
    """File name -> CSV text for every metrics family."""
    acc_rows = []
    for (m, lb, k) in sorted(metrics.accuracy, key=lambda t: _sort_key(*t)):
        c, t = metrics.accuracy[(m, lb, k)]
        acc_rows.append([m, lb, k, c, t, _f(c / t), _f(_se(c / t, t))])
    ppv_rows = []
    for (m, lb, k) in sorted(metrics.ppv, key=lambda t: _sort_key(*t)):
        c, t = metrics.ppv[(m, lb, k)]
        ppv_rows.append([m, lb, k, c, t, _f(c / t), _f(_se(c / t, t))])
    ppv = compute_ppv(metrics)
    mp, mpn = mean_ppv(ppv), mean_ppv(ppv, nontrivial=True)
    nlab = Counter((m, k) for m, _, k in ppv)
    nnon = Counter((m, k) for m, lb, k in ppv if lb != "0_1")
    mean_rows = [[m, k, _f(mp[(m, k)]), nlab[(m, k)], _f(mpn.get((m, k))), nnon[(m, k)]]
                 for m, k in sorted(mp, key=lambda t: (METHODS.index(t[0]), t[1]))]
    acc = {key: c / t for key, (c, t) in metrics.accuracy.items()}
    th = threshold_50(acc)
    pairs = sorted({(m, lb) for m, lb, _ in metrics.accuracy}, key=lambda t: (METHODS.index(t[0]), t[1]))
    th_rows = [[m, lb, th.get((m, lb), "")] for m, lb in pairs]
    files = {
        "accuracy.csv": _csv(acc_rows, ACCURACY_COLS),
        "ppv.csv": _csv(ppv_rows, PPV_COLS),
        "mean_ppv.csv": _csv(mean_rows, MEAN_PPV_COLS),
        "threshold50.csv": _csv(th_rows, THRESHOLD_COLS),
    }
    prior = KNOT_FREQUENCY_PRIOR if prior is None else prior
    if metrics.accuracy and all(lb in prior for _, lb, _ in metrics.accuracy):
        inc = weighted_overall_accuracy(metrics, prior, "included")
        allp = weighted_overall_accuracy(metrics, prior, "prior")
        rows = [[m, k, _f(inc[(m, k)]), _f(allp[(m, k)])] for m, k in inc]
        files["overall_accuracy.csv"] = _csv(rows, OVERALL_COLS)
    else:
        files["overall_accuracy.csv"] = _csv([], OVERALL_COLS)
    return files


def _gnuplot(text: str, group_cols: int) -> str:
    """Blank-line separated data blocks, one per leading-column group."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return ""
    head, body = rows[0], rows[1:]
    out = ["# " + " ".join(head)]
    last = None
    for r in body:
        key = tuple(r[:group_cols])
        if key != last:
            if last is not None:
                out.extend(["", ""])
            out.append("# " + " ".join(key))
            last = key
        out.append(" ".join(v if v != "" else "NaN" for v in r))
    return "\n".join(out) + "\n"


def emit(metrics: MetricsTable, out_dir, fmt: str = "csv", prior: dict | None = None,
         only=None) -> list[Path]:
    """Write the metrics CSV files (and ``.dat`` gnuplot blocks for ``fmt='gnuplot'``)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = render(metrics, prior)
    groups = {"accuracy.csv": 2, "ppv.csv": 2, "mean_ppv.csv": 1, "threshold50.csv": 1,
              "overall_accuracy.csv": 1}
    written = []
    for name, text in files.items():
        if only is not None and name not in only:
            continue
        if fmt in ("csv", "both"):
            (out_dir / name).write_text(text, encoding="utf-8")
            written.append(out_dir / name)
        if fmt in ("gnuplot", "both"):
            dat = out_dir / name.replace(".csv", ".dat")
            dat.write_text(_gnuplot(text, groups[name]), encoding="utf-8")
            written.append(dat)
        if fmt not in ("csv", "gnuplot", "both"):
            raise ValueError("format must be csv, gnuplot or both")
    return written


def load_metrics(out_dir) -> MetricsTable:
    """Parse ``accuracy.csv`` and ``ppv.csv`` back into a :class:`MetricsTable`."""
    out_dir = Path(out_dir)
    m = MetricsTable()
    with open(out_dir / "accuracy.csv", encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            m.accuracy[(r["method"], r["label"], int(r["k"]))] = [int(r["correct"]), int(r["trials"])]
    with open(out_dir / "ppv.csv", encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            m.ppv[(r["method"], r["predicted_label"], int(r["k"]))] = [int(r["correct"]), int(r["predicted"])]
    return m


# ---------------------------------------------------------------- campaign

@dataclass
class ExperimentConfig:
    n: int = 100
    labels: list = field(default_factory=lambda: list(DESK_LABELS))
    hosts_per_knot: int = 25
    k_grid: list = field(default_factory=lambda: [10, 30, 50, 70, 90])
    starts: int = 20
    closures: int = 100
    methods: list = field(default_factory=lambda: list(METHODS))
    seed: int = 20240601
    budget: int = 200_000
    workers: int = 1
    table: str | None = None


def parse_k_grid(spec: str) -> list[int]:
    """``"1-5,10,20:90:10"`` -> sorted unique ks (ranges inclusive)."""
    out = set()
    for part in str(spec).replace(" ", "").split(","):
        if not part:
            continue
        if ":" in part:
            bits = [int(b) for b in part.split(":")]
            lo, hi = bits[0], bits[1]
            step = bits[2] if len(bits) > 2 else 1
            if step <= 0:
                raise ValueError("k-grid step must be positive")
            out.update(range(lo, hi + 1, step))
        elif "-" in part:
            lo, hi = (int(b) for b in part.split("-"))
            out.update(range(lo, hi + 1))
        else:
            out.add(int(part))
    if not out:
        raise ValueError("empty k-grid")
    return sorted(out)


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line or line.startswith("["):
                continue
            if "=" not in line:
                raise ValueError("%s:%d: expected key = value" % (path, lineno))
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val.strip().strip('"').strip("'")
    return out


def config_from_mapping(values: dict, base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = base or ExperimentConfig()
    for key, val in values.items():
        if val is None:
            continue
        if not hasattr(cfg, key):
            raise ValueError("unknown config key %r" % key)
        if key == "k_grid":
            val = parse_k_grid(val) if isinstance(val, str) else [int(k) for k in val]
        elif key in ("labels", "methods"):
            val = [s.strip() for s in val.split(",") if s.strip()] if isinstance(val, str) else list(val)
        elif key != "table":
            val = int(val)
        setattr(cfg, key, val)
    return cfg


def table_digest(table_path) -> str:
    from .homfly.table import default_table_path
    path = Path(table_path) if table_path else default_table_path()
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_campaign(cfg: ExperimentConfig, table: KnotTable | None = None):
    """Harvest hosts and run every trial; returns ``(hosts, records, counts, draws)``."""
    if table is None:
        from .homfly import build_table
        table = build_table(cfg.table, verify=False) if cfg.table else default_table()
    hosts, counts, draws = harvest_hosts(cfg.labels, cfg.hosts_per_knot, cfg.n, cfg.seed,
                                         table, cfg.budget, cfg.workers)
    records = run_accuracy(hosts, cfg.methods, cfg.k_grid, cfg.starts, cfg.closures,
                           cfg.seed, table, cfg.workers)
    return hosts, records, counts, draws


def manifest(cfg: ExperimentConfig, command: str, counts: Counter, draws: int) -> dict:
    import numba
    import scipy

    conf = asdict(cfg)
    conf.pop("workers")  # outputs do not depend on it
    return {
        "command": command,
        "config": conf,
        "seed": cfg.seed,
        "table_sha256": table_digest(cfg.table),
        "draws_scanned": draws,
        "label_counts": dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))),
        "versions": {"knotlab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "numba": numba.__version__, "python": platform.python_version()},
        "rng": "Philox4x64 via numpy SeedSequence(seed, spawn_key=stream key)",
    }


def write_outputs(out_dir, cfg, command, hosts, records, counts, draws, fmt="csv") -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    only = {
        "accuracy": {"accuracy.csv", "overall_accuracy.csv"},
        "ppv": {"ppv.csv", "mean_ppv.csv"},
        "thresholds": {"threshold50.csv", "accuracy.csv"},
        "all": None,
    }[command]
    emit(tabulate(records), out_dir, fmt=fmt, only=only)
    with open(out_dir / "hosts.ndjson", "w", encoding="utf-8") as fh:
        for h in hosts:
            fh.write(to_record(h.polygon, host_id=h.host_id, true_label=str(h.true_label)) + "\n")
    with open(out_dir / "run_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest(cfg, command, counts, draws), fh, indent=1, sort_keys=True)
        fh.write("\n")


def default_workers() -> int:
    return max(1, min(8, os.cpu_count() or 1))
