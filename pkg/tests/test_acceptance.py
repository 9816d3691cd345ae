"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line
(shown in the terminal summary).  Heavy computations live in module-scoped
fixtures so the balance criterion can audit every partition they emit."""

import math
import os
import time

import numpy as np
import pytest
from numba import njit

from conftest import random_hypergraph, report
from hyperstream.baselines import hashing_partition, minmax_n2p_partition
from hyperstream.bench import geometric_mean, improvement
from hyperstream.cli import main as cli_main
from hyperstream.freight import CONNECTIVITY, CUTNET, ScoreParams, partition_graph, partition_stream
from hyperstream.generators import large_stream_hgr, powerlaw_hgr, random_graph
from hyperstream.io import clean_hypergraph, transpose_to_stream, write_hgr, write_metis_graph, write_vstream
from hyperstream.metrics import block_loads, evaluate
from hyperstream.reference import naive_fennel, naive_partition_stream
from hyperstream.registry import increment_arrays, new_registry_arrays
from hyperstream.streaming import partition_file

EPS = 0.03
OFFSET = 1.0


def balance_record(label, loads, l_max, unit=True):
    return (label, float(np.max(loads)), int(l_max), unit)


# --- criterion 1 -------------------------------------------------------------

@njit(cache=True)
def _check_registry(pos_block, pos_bucket, block_pos, bucket_card, bucket_left, bucket_right, meta,
                    counts, card_at):
    """Full audit against the shadow counters; returns the violation count.

    Buckets are walked left to right: each must start where the previous
    one ended, carry a strictly larger cardinality and the walk must end at
    k with as many buckets as are live.  ``pos_bucket`` may change only at
    those run starts.  Finally every block b must sit at a position q with
    ``A[q] = b`` (so B inverts A) whose bucket cardinality equals the
    shadow count of b.  Sortedness of A follows from the increasing walk.
    """
    k = pos_block.shape[0]
    bad = 0
    runs = 0
    card = -1
    p = 0
    while p < k:
        bk = pos_bucket[p]
        c = bucket_card[bk]
        hi = bucket_right[bk]
        if hi < p or hi >= k:
            return bad + 1
        bad += (c <= card) + (bucket_left[bk] != p)
        card_at[p:hi + 1] = c
        card = c
        runs += 1
        p = hi + 1
    bad += runs != meta[1]
    bad += (meta[1] > k) + (meta[0] + meta[1] != k + 1)
    changes = 0
    for q in range(1, k):
        changes += pos_bucket[q] != pos_bucket[q - 1]
    bad += changes != runs - 1
    acc = 0
    for b in range(k):
        q = block_pos[b]
        acc += (q < 0) | (q >= k)
        q = min(max(q, 0), k - 1)
        acc += (pos_block[q] != b) | (card_at[q] != counts[b])
    return bad + acc


@njit(cache=True)
def _drive_registry(reg, seq, counts, sort_every):
    pb, pk, bp, bc, bl, br, fs, meta = reg
    card_at = np.empty(pb.shape[0], dtype=np.int64)
    bad = 0
    for t in range(seq.shape[0]):
        d = seq[t]
        increment_arrays(pb, pk, bp, bc, bl, br, fs, meta, d)
        counts[d] += 1
        bad += _check_registry(pb, pk, bp, bc, bl, br, meta, counts, card_at)
        if (t + 1) % sort_every == 0:
            # explicit full sort of the shadow counters against A
            ref = np.sort(counts)
            for p in range(pb.shape[0]):
                bad += counts[pb[p]] != ref[p]
    return bad


def _audit_catches_corruption():
    caught = 0
    for mutate in range(5):
        reg = new_registry_arrays(16)
        counts = np.zeros(16, dtype=np.int64)
        _drive_registry(reg, np.array([3, 3, 5, 9, 3, 0], dtype=np.int64), counts, 4)
        if mutate == 0:
            counts[7] += 1
        elif mutate == 1:
            reg.block_pos[3], reg.block_pos[5] = reg.block_pos[5], reg.block_pos[3]
        elif mutate == 2:
            reg.pos_block[0], reg.pos_block[15] = reg.pos_block[15], reg.pos_block[0]
        elif mutate == 3:
            reg.bucket_card[reg.pos_bucket[15]] += 1
        else:
            reg.pos_bucket[2] = reg.pos_bucket[15]
        card_at = np.empty(16, dtype=np.int64)
        caught += _check_registry(*reg[:6], reg.meta, counts, card_at) > 0
    return caught


def test_criterion_1_registry_correctness():
    k, steps = 4096, 10 ** 6
    warm = new_registry_arrays(k)
    _drive_registry(warm, np.zeros(10, dtype=np.int64), np.zeros(k, dtype=np.int64), 4)
    seq = np.random.default_rng(2024).integers(0, k, steps).astype(np.int64)
    reg = new_registry_arrays(k)
    counts = np.zeros(k, dtype=np.int64)
    t0 = time.perf_counter()
    bad = _drive_registry(reg, seq, counts, 4096)
    elapsed = time.perf_counter() - t0
    caught = _audit_catches_corruption()
    ok = bad == 0 and elapsed < 10.0 and caught == 5
    report(1, ok, f"{steps} random increments, k={k}, full audit after every increment: "
                  f"{bad} violations in {elapsed:.2f} s (need 0 and < 10 s); audit flags {caught}/5 "
                  f"injected corruptions")
    assert caught == 5
    assert bad == 0
    assert elapsed < 10.0


# --- criterion 2 -------------------------------------------------------------

@pytest.fixture(scope="module")
def equivalence_runs():
    rng = np.random.default_rng(7)
    mismatches, runs, balance = 0, 0, []
    for i in range(200):
        n = int(rng.integers(1, 2001))
        m = int(rng.integers(0, 4001))
        max_size = int(rng.integers(2, 12))
        nets = [rng.integers(0, n, rng.integers(1, max_size + 1)) for _ in range(m)]
        nw = rng.integers(1, 4, m).tolist() if i % 2 else None
        h = clean_hypergraph(n, nets, nw)
        s = transpose_to_stream(h)
        for k in (2, 3, 8, 64, 257):
            for obj in (CUTNET, CONNECTIVITY):
                p = ScoreParams.for_instance(n, h.num_nets, k, epsilon=EPS, objective=obj)
                fast = partition_stream(s, p)
                slow = naive_partition_stream(s, p)
                runs += 1
                mismatches += int(not np.array_equal(fast.assignment, slow.assignment))
                balance.append(balance_record(f"equiv-{i}-{k}-{obj}", fast.loads, p.l_max))
    return {"runs": runs, "mismatches": mismatches, "balance": balance}


def test_criterion_2_selection_equivalence(equivalence_runs):
    r = equivalence_runs
    ok = r["mismatches"] == 0
    report(2, ok, f"200 random hypergraphs x k in {{2,3,8,64,257}} x both objectives = {r['runs']} runs; "
                  f"{r['runs'] - r['mismatches']}/{r['runs']} vertex-for-vertex identical to the O(nk) scorer")
    assert ok


# --- criteria 4 and 5 ----------------------------------------------------------

@pytest.fixture(scope="module")
def quality_suite():
    rng = np.random.default_rng(4)
    sizes = np.exp(rng.uniform(np.log(1e4), np.log(1e5), 20)).astype(int)
    cells, balance = [], []
    for i, n in enumerate(sizes):
        h = powerlaw_hgr(int(n), int(n), seed=100 + i)
        s = transpose_to_stream(h)
        for k in (512, 1024):
            cell = {"instance": i, "n": int(n), "k": k}
            for name in ("freight-con", "freight-cut", "hashing", "minmax-n2p"):
                p = ScoreParams.for_instance(h.num_vertices, h.num_nets, k, epsilon=EPS,
                                             objective=CUTNET if name == "freight-cut" else CONNECTIVITY)
                if name.startswith("freight"):
                    res = partition_stream(s, p)
                elif name == "hashing":
                    res = hashing_partition(s, k, p.l_max)
                else:
                    res = minmax_n2p_partition(s, k, p.l_max)
                ev = evaluate(h, res.assignment, k, EPS)
                cell[name] = (ev.cutnet, ev.connectivity)
                balance.append(balance_record(f"quality-{i}-{k}-{name}", res.loads, p.l_max))
            cells.append(cell)
    return {"cells": cells, "balance": balance}


def _geo(cells, alg, idx):
    return geometric_mean([c[alg][idx] for c in cells], OFFSET) + OFFSET


def test_criterion_4_connectivity_direction(quality_suite):
    cells = quality_suite["cells"]
    fc, h, mm = (_geo(cells, a, 1) for a in ("freight-con", "hashing", "minmax-n2p"))
    over_hash = improvement(fc, h)
    over_mm = improvement(fc, mm)
    mm_over_hash = improvement(mm, h)
    ok_hash = over_hash >= 50.0
    ok_mm = fc < mm
    report(4, ok_hash and ok_mm,
           f"20 power-law hypergraphs x k in {{512,1024}}: FREIGHT-con connectivity improves "
           f"{over_hash:.1f}% over Hashing (need >= 50%: {'ok' if ok_hash else 'no'}); "
           f"vs Min-Max-N2P {over_mm:+.1f}% (need > 0: {'ok' if ok_mm else 'no'}; "
           f"Min-Max-N2P itself improves {mm_over_hash:.1f}% over Hashing)")
    assert ok_hash, "FREIGHT-con improvement over Hashing below 50%"
    assert ok_mm, "FREIGHT-con does not beat Min-Max-N2P on geomean connectivity"


def test_criterion_5_cutnet_direction(quality_suite):
    cells = quality_suite["cells"]
    fcut, h = _geo(cells, "freight-cut", 0), _geo(cells, "hashing", 0)
    imp = improvement(fcut, h)
    wins = sum(c["freight-cut"][0] <= c["hashing"][0] for c in cells)
    share = wins / len(cells)
    ok = imp >= 10.0 and share >= 0.9
    report(5, ok, f"FREIGHT-cut cut-net improves {imp:.1f}% over Hashing (need >= 10%); "
                  f"cut-net <= Hashing on {wins}/{len(cells)} cells (need >= 90%)")
    assert imp >= 10.0
    assert share >= 0.9


# --- criterion 6 -------------------------------------------------------------

@pytest.fixture(scope="module")
def runtime_runs(tmp_path_factory):
    d = tmp_path_factory.mktemp("runtime")
    k, paths, pins, streams = 512, [], [], []
    for i in range(5):
        target = 10 ** 6 * 2 ** i
        n = target // 4
        h = large_stream_hgr(n, n, 4.0, seed=i)
        s = transpose_to_stream(h)
        path = d / f"s{i}.vstream"
        write_vstream(s, path)
        paths.append(path)
        pins.append(s.pin_count)
        if i == 0:
            streams.append((h, s))
        del h, s
    os.sync()
    for alg in ("freight", "hashing"):
        partition_file(paths[0], k, alg)
    best = {}
    balance = []
    for rep in range(5):
        for i, path in enumerate(paths):
            for alg in ("freight", "hashing"):
                res = partition_file(path, k, alg, epsilon=EPS)
                ns = res.timings["total_ns"]
                best[i, alg] = min(best.get((i, alg), math.inf), ns)
                if rep == 0:
                    balance.append(balance_record(f"runtime-{i}-{alg}", res.loads, res.params.l_max))
    # the assignment loop alone, with the stream already in memory
    h, s = streams[0]
    p = ScoreParams.for_instance(s.num_vertices, s.num_nets, k, epsilon=EPS)
    mem_f = min(partition_stream(s, p).timings["assign_ns"] for _ in range(5))
    mem_h = min(hashing_partition(s, k, p.l_max).timings["assign_ns"] for _ in range(5))
    return {"pins": pins, "best": best, "balance": balance, "memory": (mem_f, mem_h, s.pin_count)}


def test_criterion_6_runtime_linearity(runtime_runs):
    pins, best = runtime_runs["pins"], runtime_runs["best"]
    growth = [best[i, "freight"] / best[i - 1, "freight"] for i in range(1, 5)]
    ratios = [best[i, "freight"] / best[i, "hashing"] for i in range(5)]
    per_pin = [best[i, "freight"] / pins[i] for i in range(5)]
    ok_growth = max(growth) <= 2.5
    ok_ratio = max(ratios) <= 10.0
    report(6, ok_growth and ok_ratio,
           f"streaming .vstream files of {pins[0]:,}..{pins[-1]:,} pins, k=512: FREIGHT time per doubling "
           f"x{', x'.join(f'{g:.2f}' for g in growth)} (need <= 2.5); FREIGHT/Hashing per-pin "
           f"{min(ratios):.2f}..{max(ratios):.2f} (need <= 10); FREIGHT "
           f"{min(per_pin):.0f}..{max(per_pin):.0f} ns/pin")
    mem_f, mem_h, mp = runtime_runs["memory"]
    report(6, None, f"with the stream already in memory FREIGHT takes {mem_f / mp:.1f} ns/pin and "
                    f"Hashing {mem_h / mp:.1f} ns/pin (ratio {mem_f / mem_h:.1f}); in-memory Hashing reads "
                    f"no pins, so only end-to-end streaming gives a per-pin comparison")
    assert ok_growth
    assert ok_ratio


# --- criterion 7 -------------------------------------------------------------

@pytest.fixture(scope="module")
def graph_runs():
    g = random_graph(100_000, 1_000_000, seed=0)
    k = 2560
    p = ScoreParams.for_instance(g.num_vertices, g.num_edges, k, epsilon=EPS)
    fast = [partition_graph(g, p) for _ in range(3)]
    slow = [naive_fennel(g, p) for _ in range(3)]
    t_fast = min(r.timings["assign_ns"] for r in fast)
    t_slow = min(r.timings["assign_ns"] for r in slow)
    same = all(np.array_equal(r.assignment, slow[0].assignment) for r in fast + slow)
    balance = [balance_record("graph-fast", fast[0].loads, p.l_max),
               balance_record("graph-naive", slow[0].loads, p.l_max)]
    return {"same": same, "fast": t_fast, "slow": t_slow, "balance": balance, "k": k,
            "m": g.num_edges, "n": g.num_vertices}


def test_criterion_7_graph_speedup(graph_runs):
    r = graph_runs
    speedup = r["slow"] / r["fast"]
    ok = r["same"] and speedup >= 5.0
    report(7, ok, f"graph with n={r['n']:,}, m={r['m']:,}, k={r['k']}: assignments "
                  f"{'identical' if r['same'] else 'DIFFER'}; fast path {r['fast'] / 1e6:.1f} ms vs naive "
                  f"{r['slow'] / 1e6:.1f} ms = {speedup:.1f}x faster (need >= 5x)")
    assert r["same"]
    assert speedup >= 5.0


# --- criterion 8 -------------------------------------------------------------

def _oracle(h, a):
    cut = conn = 0
    for e, pins in enumerate(h.nets):
        lam = len({int(a[p]) for p in pins})
        w = 1 if h.net_weights is None else int(h.net_weights[e])
        if lam > 1:
            cut += w
            conn += (lam - 1) * w
    return cut, conn


def test_criterion_8_metric_correctness():
    rng = np.random.default_rng(8)
    exact = dominated = 0
    for i in range(500):
        n = int(rng.integers(1, 200))
        k = int(rng.integers(1, 17))
        h = random_hypergraph(rng, n, int(rng.integers(0, 300)), max_size=int(rng.integers(2, 10)),
                              weighted=i % 3 == 0)
        a = rng.integers(0, k, n)
        ev = evaluate(h, a, k)
        exact += (ev.cutnet, ev.connectivity) == _oracle(h, a)
        dominated += ev.connectivity >= ev.cutnet
    ex = evaluate(clean_hypergraph(3, [[0, 1, 2]], net_weights=[2]), [0, 1, 2], 3)
    ok_ex = (ex.cutnet, ex.connectivity) == (2, 4)
    ok = exact == 500 and dominated == 500 and ok_ex
    report(8, ok, f"{exact}/500 random (hypergraph, partition) pairs equal the per-net set oracle; "
                  f"connectivity >= cut-net on {dominated}/500; 3-pin/3-block example with weight 2 gives "
                  f"(cut-net {ex.cutnet:g}, connectivity {ex.connectivity:g})")
    assert exact == 500 and dominated == 500 and ok_ex


# --- criterion 9 -------------------------------------------------------------

@pytest.fixture(scope="module")
def cli_runs(tmp_path_factory):
    d = tmp_path_factory.mktemp("determinism")
    h = powerlaw_hgr(5000, 5000, seed=3)
    write_hgr(h, d / "p.hgr")
    write_vstream(transpose_to_stream(h), d / "p.vstream")
    g = random_graph(5000, 20000, seed=3)
    write_metis_graph(g, d / "g.graph")
    cases = []
    for src in ("p.hgr", "p.vstream"):
        for alg in ("freight", "hashing", "minmax-n2p"):
            for obj in ("cutnet", "connectivity"):
                cases.append((src, alg, obj))
    cases += [("g.graph", alg, "connectivity") for alg in ("freight", "hashing")]
    results, balance = [], []
    for src, alg, obj in cases:
        outs = []
        for rep in range(3):
            out = d / f"{src}-{alg}-{obj}-{rep}.part"
            rc = cli_main(["partition", str(d / src), "--algorithm", alg, "--k", "64", "--objective", obj,
                           "--seed", "11", "--epsilon", str(EPS), "--output", str(out)])
            assert rc == 0
            outs.append(out.read_bytes())
        results.append(((src, alg, obj), len(set(outs)) == 1))
        a = np.array(outs[0].split(), dtype=np.int64)
        l_max = ScoreParams.for_instance(5000, 0, 64, epsilon=EPS).l_max
        balance.append(balance_record(f"cli-{src}-{alg}-{obj}", block_loads(a, 64), l_max))
    return {"results": results, "balance": balance}


def test_criterion_9_determinism(cli_runs):
    res = cli_runs["results"]
    same = sum(ok for _, ok in res)
    ok = same == len(res)
    report(9, ok, f"{same}/{len(res)} partition invocations (3 algorithms x 2 objectives x .hgr/.vstream, "
                  f"plus .graph) byte-identical over 3 repeats")
    assert ok


# --- criterion 3 (audits every run above) ---------------------------------------

def test_criterion_3_balance(equivalence_runs, quality_suite, runtime_runs, graph_runs, cli_runs):
    records = (equivalence_runs["balance"] + quality_suite["balance"] + runtime_runs["balance"]
               + graph_runs["balance"] + cli_runs["balance"])
    bad = [r for r in records if r[1] > r[2]]
    ok = not bad
    report(3, ok, f"{len(records)} unit-weight partitions from criteria 2, 4-7 and 9: {len(bad)} with "
                  f"max block load above L_max = ceil(1.03 c(V)/k)")
    assert not bad, bad[:5]
