"""Benchmark harness: repetitions, CSV results, geometric means,
improvement-over-baseline and performance profiles.

Objective values enter geometric means and profile ratios shifted by
``OBJECTIVE_OFFSET`` (so zero-cut instances do not collapse the mean);
running times are used unshifted.
"""

from __future__ import annotations

import configparser
import csv
import math
import os
import tempfile
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .baselines import hashing_partition, minmax_n2p_partition
from .freight import CONNECTIVITY, CUTNET, OBJECTIVES, ScoreParams, partition_graph, partition_stream
from .io import (GraphStreamFile, HgrFile, parse_hgr, parse_metis_graph,
                 parse_vstream, transpose_back, transpose_to_stream, write_vstream)
from .metrics import evaluate, evaluate_graph, graph_balance
from .streaming import partition_file

DEFAULT_KS = (512, 1024, 1536, 2048, 2560)
ALGORITHMS = ("freight-con", "freight-cut", "hashing", "minmax-n2p")
METRICS = ("time", "cutnet", "connectivity")
OBJECTIVE_OFFSET = 1.0
TIMING_MODES = ("memory", "file")

COLUMNS = ("instance", "algorithm", "k", "repetition", "seed", "status", "cutnet", "connectivity",
           "imbalance", "balanced", "runtime_ns", "ns_per_pin", "pins")


@dataclass
class Instance:
    """An instance already in memory (hypergraph or graph)."""

    name: str
    data: Union[HgrFile, GraphStreamFile]


@dataclass
class RunConfig:
    instances: list
    algorithms: tuple = ALGORITHMS
    ks: tuple = DEFAULT_KS
    epsilon: float = 0.03
    repetitions: int = 5
    seeds: Optional[tuple] = None
    objective: str = CONNECTIVITY
    output: Optional[str] = None
    timing: str = "memory"

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if any(k < 1 for k in self.ks):
            raise ValueError("every k must be >= 1")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        # plain "freight" follows the configured objective
        plain = "freight-cut" if self.objective == CUTNET else "freight-con"
        self.algorithms = tuple(dict.fromkeys(plain if a == "freight" else a for a in self.algorithms))
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithm(s) {bad}; choose from {ALGORITHMS}")
        if self.timing not in TIMING_MODES:
            raise ValueError(f"timing must be one of {TIMING_MODES}")
        if self.seeds is not None and len(self.seeds) != self.repetitions:
            raise ValueError("need one seed per repetition")

    def seed_for(self, rep: int) -> int:
        return rep if self.seeds is None else int(self.seeds[rep])


def _split(value: str) -> list[str]:
    return [t.strip() for t in value.replace("\n", ",").split(",") if t.strip()]


def parse_config(path) -> RunConfig:
    """Read ``key = value`` lines (``#`` comments, comma-separated lists).

    Keys: instances, algorithms, k, epsilon, repetitions, seeds, objective,
    output, timing.  Relative instance paths resolve against the config's
    directory.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    with open(path, encoding="utf-8") as fh:
        cp.read_string("[run]\n" + fh.read(), source=os.fspath(path))
    sec = cp["run"]
    known = {"instances", "algorithms", "k", "epsilon", "repetitions", "seeds", "objective", "output",
             "timing"}
    unknown = set(sec) - known
    if unknown:
        raise ValueError(f"unknown config key(s): {sorted(unknown)}")
    if "instances" not in sec:
        raise ValueError("config needs an 'instances' entry")
    base = os.path.dirname(os.path.abspath(path))
    kw = {"instances": [os.path.join(base, p) for p in _split(sec["instances"])]}
    if "algorithms" in sec:
        kw["algorithms"] = tuple(_split(sec["algorithms"]))
    if "k" in sec:
        kw["ks"] = tuple(int(t) for t in _split(sec["k"]))
    if "epsilon" in sec:
        kw["epsilon"] = float(sec["epsilon"])
    if "repetitions" in sec:
        kw["repetitions"] = int(sec["repetitions"])
    if "seeds" in sec:
        kw["seeds"] = tuple(int(t) for t in _split(sec["seeds"]))
    if "objective" in sec:
        kw["objective"] = sec["objective"].strip()
    if "output" in sec:
        kw["output"] = os.path.join(base, sec["output"].strip())
    if "timing" in sec:
        kw["timing"] = sec["timing"].strip()
    return RunConfig(**kw)


def load_instance(path):
    """``.hgr`` / ``.vstream`` give a hypergraph, ``.graph`` a graph."""
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == ".hgr":
        return parse_hgr(path)
    if ext == ".vstream":
        return transpose_back(parse_vstream(path))
    if ext == ".graph":
        return parse_metis_graph(path)
    raise ValueError(f"cannot tell the format of {path!r} from its extension")


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def ok_rows(self) -> list[dict]:
        return [r for r in self.rows if r["status"] == "ok"]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# geometric means add {OBJECTIVE_OFFSET:g} to objective values before "
                     f"averaging and subtract it after; runtimes are not shifted\n")
            w = csv.DictWriter(fh, fieldnames=COLUMNS)
            w.writeheader()
            for r in self.rows:
                w.writerow({c: _cell(r[c]) for c in COLUMNS})

    @classmethod
    def from_csv(cls, path) -> "ResultTable":
        with open(path, newline="", encoding="utf-8") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
        rows = []
        for r in csv.DictReader(lines):
            rows.append({
                "instance": r["instance"], "algorithm": r["algorithm"], "k": int(r["k"]),
                "repetition": int(r["repetition"]), "seed": int(r["seed"]), "status": r["status"],
                "cutnet": _float(r["cutnet"]), "connectivity": _float(r["connectivity"]),
                "imbalance": _float(r["imbalance"]), "balanced": r["balanced"] == "1",
                "runtime_ns": _float(r["runtime_ns"]), "ns_per_pin": _float(r["ns_per_pin"]),
                "pins": int(r["pins"]) if r["pins"] else 0,
            })
        return cls(rows)


def _cell(v):
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return int(v) if v.is_integer() else repr(v)
    return v


def _float(s: str) -> float:
    return float(s) if s != "" else math.nan


def _run_one(alg, data, stream, k, eps, seed, vpath):
    """Returns ``(assignment, runtime_ns)``."""
    graph = isinstance(data, GraphStreamFile)
    if vpath is not None:
        algo = "freight" if alg.startswith("freight") else alg
        obj = CUTNET if alg == "freight-cut" else CONNECTIVITY
        res = partition_file(vpath, k, algo, eps, obj, seed)
        return res.assignment, res.timings["total_ns"]
    n = data.num_vertices
    total = stream.total_vertex_weight()
    total = int(total) if float(total).is_integer() else total
    if alg.startswith("freight"):
        obj = CUTNET if alg == "freight-cut" else CONNECTIVITY
        m = len(data.adj) // 2 if graph else data.num_nets
        params = ScoreParams.for_instance(n, m, k, total_weight=total, epsilon=eps, objective=obj)
        res = partition_graph(data, params, seed) if graph else partition_stream(stream, params, seed)
    else:
        l_max = ScoreParams.for_instance(n, 0, k, total_weight=total, epsilon=eps).l_max
        if alg == "hashing":
            res = hashing_partition(stream, k, l_max, seed)
        elif graph:
            raise ValueError("minmax-n2p needs a hypergraph")
        else:
            res = minmax_n2p_partition(stream, k, l_max, seed)
    return res.assignment, res.timings["assign_ns"]


def warmup() -> None:
    """Compile every kernel once so no timed run pays for it."""
    h = HgrFile(num_nets=2, num_vertices=3, net_ptr=np.array([0, 2, 4]),
                pins=np.array([0, 1, 1, 2], dtype=np.int32))
    s = transpose_to_stream(h)
    for obj in (CUTNET, CONNECTIVITY):
        partition_stream(s, ScoreParams.for_instance(3, 2, 2, objective=obj))
    hashing_partition(s, 2, 2)
    minmax_n2p_partition(s, 2, 2)
    with tempfile.TemporaryDirectory() as tmp:
        p = os.path.join(tmp, "w.vstream")
        write_vstream(s, p)
        for alg in ("freight", "hashing", "minmax-n2p"):
            partition_file(p, 2, alg)


def run_suite(cfg: RunConfig, progress=None) -> ResultTable:
    """One row per (instance, algorithm, k, repetition).

    A failing instance or cell is recorded with its error in ``status``
    and the suite moves on.
    """
    warmup()
    table = ResultTable()
    with tempfile.TemporaryDirectory() as tmp:
        for idx, inst in enumerate(cfg.instances):
            name = inst.name if isinstance(inst, Instance) else os.path.basename(os.fspath(inst))
            try:
                data = inst.data if isinstance(inst, Instance) else load_instance(inst)
                graph = isinstance(data, GraphStreamFile)
                stream = data if graph else transpose_to_stream(data)
                pins = len(data.adj) if graph else data.pin_count
                vpath = None
                if cfg.timing == "file":
                    if graph:
                        raise ValueError("file timing needs a hypergraph instance")
                    vpath = os.path.join(tmp, f"{idx}.vstream")
                    write_vstream(stream, vpath)
            except Exception as exc:  # noqa: BLE001 - recorded, suite continues
                for alg in cfg.algorithms:
                    for k in cfg.ks:
                        for rep in range(cfg.repetitions):
                            table.rows.append(_failed(name, alg, k, rep, cfg.seed_for(rep), exc))
                continue
            for alg in cfg.algorithms:
                for k in cfg.ks:
                    for rep in range(cfg.repetitions):
                        seed = cfg.seed_for(rep)
                        try:
                            assign, ns = _run_one(alg, data, stream, k, cfg.epsilon, seed, vpath)
                            if graph:
                                cutnet = conn = evaluate_graph(data, assign, k)
                                imb, bal = graph_balance(data, assign, k, cfg.epsilon)
                            else:
                                rep_ = evaluate(data, assign, k, cfg.epsilon)
                                cutnet, conn = rep_.cutnet, rep_.connectivity
                                imb, bal = rep_.imbalance, rep_.balanced
                            table.rows.append({
                                "instance": name, "algorithm": alg, "k": k, "repetition": rep,
                                "seed": seed, "status": "ok", "cutnet": cutnet, "connectivity": conn,
                                "imbalance": imb, "balanced": bal,
                                "runtime_ns": float(ns), "ns_per_pin": ns / max(pins, 1), "pins": pins,
                            })
                        except Exception as exc:  # noqa: BLE001
                            table.rows.append(_failed(name, alg, k, rep, seed, exc))
                        if progress:
                            progress(table.rows[-1])
    if cfg.output:
        table.to_csv(cfg.output)
    return table


def _failed(name, alg, k, rep, seed, exc) -> dict:
    msg = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
    return {"instance": name, "algorithm": alg, "k": k, "repetition": rep, "seed": seed,
            "status": msg, "cutnet": math.nan, "connectivity": math.nan, "imbalance": math.nan,
            "balanced": False, "runtime_ns": math.nan, "ns_per_pin": math.nan, "pins": 0}


# --- aggregation -----------------------------------------------------------

def _column(metric: str) -> str:
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}")
    return "runtime_ns" if metric == "time" else metric


def _offset(metric: str) -> float:
    return 0.0 if metric == "time" else OBJECTIVE_OFFSET


def geometric_mean(values, offset: float = 0.0) -> float:
    v = np.asarray(values, dtype=np.float64) + offset
    if v.size == 0:
        raise ValueError("geometric mean of nothing")
    if np.any(v <= 0):
        raise ValueError("geometric mean needs positive values (after offset)")
    return float(np.exp(np.mean(np.log(v)))) - offset


def cell_means(table: ResultTable, metric: str) -> dict:
    """Arithmetic mean over repetitions: ``{(instance, k): {algorithm: value}}``."""
    col = _column(metric)
    acc = defaultdict(list)
    for r in table.ok_rows():
        acc[(r["instance"], r["k"], r["algorithm"])].append(r[col])
    out: dict = defaultdict(dict)
    for (inst, k, alg), vals in sorted(acc.items()):
        out[(inst, k)][alg] = float(np.mean(vals))
    return dict(out)


def per_k_geomeans(table: ResultTable, metric: str) -> dict:
    """``{k: {algorithm: geometric mean over instances}}``."""
    by_k = defaultdict(lambda: defaultdict(list))
    for (inst, k), algs in cell_means(table, metric).items():
        for alg, v in algs.items():
            by_k[k][alg].append(v)
    off = _offset(metric)
    return {k: {a: geometric_mean(v, off) for a, v in algs.items()} for k, algs in sorted(by_k.items())}


def improvement(sigma_a: float, sigma_b: float) -> float:
    """Improvement of A over B in percent: ``(sigma_B / sigma_A - 1) * 100``."""
    return (sigma_b / sigma_a - 1.0) * 100.0


def _paired(cells: dict, baseline: str) -> dict:
    """``{group: {algorithm: (values, baseline values)}}`` over the cells where
    both the algorithm and the baseline succeeded; ``group`` is k."""
    out: dict = defaultdict(lambda: defaultdict(lambda: ([], [])))
    for (inst, k), algs in cells.items():
        if baseline not in algs:
            raise ValueError(f"baseline {baseline!r} missing for instance {inst!r}, k={k}")
        for a, v in algs.items():
            if a != baseline:
                out[k][a][0].append(v)
                out[k][a][1].append(algs[baseline])
    return out


def improvement_over(table: ResultTable, baseline: str, metric: str = CONNECTIVITY) -> dict:
    """``{k: {algorithm: percent}}`` using shifted geometric means per k.

    Each algorithm is compared with the baseline on the instances where both
    have results.  Raises ``ValueError`` if some instance lacks a baseline
    value at some k.
    """
    off = _offset(metric)
    out = {}
    for k, algs in sorted(_paired(cell_means(table, metric), baseline).items()):
        out[k] = {a: improvement(geometric_mean(va, off) + off, geometric_mean(vb, off) + off)
                  for a, (va, vb) in algs.items()}
    return out


def overall_improvement(table: ResultTable, baseline: str, metric: str = CONNECTIVITY) -> dict:
    """Like :func:`improvement_over` but pooled over every (instance, k) cell."""
    off = _offset(metric)
    pooled = defaultdict(lambda: ([], []))
    for algs in _paired(cell_means(table, metric), baseline).values():
        for a, (va, vb) in algs.items():
            pooled[a][0].extend(va)
            pooled[a][1].extend(vb)
    return {a: improvement(geometric_mean(va, off) + off, geometric_mean(vb, off) + off)
            for a, (va, vb) in pooled.items()}


def performance_profile(table: ResultTable, metric: str, taus=None) -> dict:
    """``{algorithm: [(tau, fraction), ...]}`` over (instance, k) cells.

    ``fraction`` is the share of cells where the algorithm is within a
    factor ``tau`` of the best; exact ties all count as best.  Without
    ``taus`` the curve is given at every distinct ratio (a step function).
    """
    off = _offset(metric)
    cells = cell_means(table, metric)
    algs = sorted({a for c in cells.values() for a in c})
    ratios = defaultdict(list)
    for algs_v in cells.values():
        best = min(algs_v.values()) + off
        for a in algs:
            v = algs_v.get(a)
            r = math.inf if v is None else ((v + off) / best if best > 0 else 1.0)
            ratios[a].append(r)
    out = {}
    for a in algs:
        rs = np.sort(np.asarray(ratios[a]))
        pts = sorted(set(rs[np.isfinite(rs)].tolist())) if taus is None else list(taus)
        out[a] = [(float(t), float(np.searchsorted(rs, t, side="right")) / len(rs)) for t in pts]
    return out


def profile_rows(profile: dict) -> list[tuple[str, float, float]]:
    return [(a, t, f) for a, curve in profile.items() for t, f in curve]


def write_profile_csv(profile: dict, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "tau", "fraction"])
        for a, t, f in profile_rows(profile):
            w.writerow([a, repr(t), repr(f)])

