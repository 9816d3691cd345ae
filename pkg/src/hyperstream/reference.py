"""Straightforward O(k)-per-vertex scorers.

These evaluate the score of every block for every vertex, the way a plain
Fennel implementation does.  They keep their own net and load state and
share nothing with :mod:`hyperstream.freight` except the block registry,
which is consulted only for the tie order among equally loaded blocks.
"""

from __future__ import annotations

import time

import numpy as np
from numba import njit

from .freight import PartitionResult, ScoreParams, _as_f64, _penalty, _unit_weights, _EMPTY_F64
from .registry import increment_arrays, new_registry_arrays


@njit(cache=True)
def _scan_best(k, cv, unit, alpha, gamma, l_max, loads, gain, block_pos):
    best = -1
    best_score = 0.0
    best_load = 0.0
    best_tie = 0
    for i in range(k):
        ld = loads[i]
        if ld + cv > l_max:
            continue
        s = gain[i] - _penalty(cv, ld, alpha, gamma)
        tie = block_pos[i] if unit else i
        better = best < 0
        if not better:
            if s != best_score:
                better = s > best_score
            elif ld != best_load:
                better = ld < best_load
            else:
                better = tie < best_tie
        if better:
            best, best_score, best_load, best_tie = i, s, ld, tie
    ok = best >= 0
    if not ok:
        best = 0
        for i in range(1, k):
            ti = block_pos[i] if unit else i
            tb = block_pos[best] if unit else best
            if loads[i] < loads[best] or (loads[i] == loads[best] and ti < tb):
                best = i
    return best, ok


@njit(cache=True)
def _naive_freight_run(vtx_ptr, nets, num_nets, k, vw, use_vw, net_w, use_nw, cutnet, alpha, gamma,
                       l_max, reg, out):
    pb, pk, bp, bc, bl, br, fs, meta = reg
    unit = not use_vw
    net_block = np.full(num_nets, -1, dtype=np.int64)
    net_cut = np.zeros(num_nets, dtype=np.bool_)
    loads = np.zeros(k, dtype=np.float64)
    gain = np.zeros(k, dtype=np.float64)
    violations = 0
    for v in range(vtx_ptr.shape[0] - 1):
        cv = vw[v] if use_vw else 1.0
        gain[:] = 0.0
        for j in range(vtx_ptr[v], vtx_ptr[v + 1]):
            e = nets[j]
            b = net_block[e]
            if b >= 0 and not (cutnet and net_cut[e]):
                gain[b] += net_w[e] if use_nw else 1.0
        d, ok = _scan_best(k, cv, unit, alpha, gamma, l_max, loads, gain, bp)
        if not ok:
            violations += 1
        loads[d] += cv
        if unit:
            increment_arrays(pb, pk, bp, bc, bl, br, fs, meta, d)
        for j in range(vtx_ptr[v], vtx_ptr[v + 1]):
            e = nets[j]
            if net_block[e] >= 0 and net_block[e] != d:
                net_cut[e] = True
            net_block[e] = d
        out[v] = d
    return violations, loads


@njit(cache=True)
def _naive_fennel_run(adj_ptr, adj, k, vw, use_vw, ew, use_ew, alpha, gamma, l_max, reg, out):
    pb, pk, bp, bc, bl, br, fs, meta = reg
    unit = not use_vw
    loads = np.zeros(k, dtype=np.float64)
    gain = np.zeros(k, dtype=np.float64)
    violations = 0
    out[:] = -1
    for v in range(adj_ptr.shape[0] - 1):
        cv = vw[v] if use_vw else 1.0
        gain[:] = 0.0
        for j in range(adj_ptr[v], adj_ptr[v + 1]):
            b = out[adj[j]]
            if b >= 0:
                gain[b] += ew[j] if use_ew else 1.0
        d, ok = _scan_best(k, cv, unit, alpha, gamma, l_max, loads, gain, bp)
        if not ok:
            violations += 1
        loads[d] += cv
        if unit:
            increment_arrays(pb, pk, bp, bc, bl, br, fs, meta, d)
        out[v] = d
    return violations, loads


def naive_partition_stream(stream, params: ScoreParams) -> PartitionResult:
    unit = _unit_weights(stream.vertex_weights)
    vw = _EMPTY_F64 if unit else _as_f64(stream.vertex_weights)
    out = np.empty(stream.num_vertices, dtype=np.int32)
    t0 = time.perf_counter_ns()
    viol, loads = _naive_freight_run(
        np.ascontiguousarray(stream.vtx_ptr, dtype=np.int64),
        np.ascontiguousarray(stream.nets, dtype=np.int32),
        stream.num_nets, params.k, vw, not unit, _as_f64(stream.net_weights),
        stream.net_weights is not None, params.cutnet, params.alpha, params.gamma,
        float(params.l_max), new_registry_arrays(params.k), out,
    )
    elapsed = time.perf_counter_ns() - t0
    counts = np.bincount(out, minlength=params.k)
    return PartitionResult(out, loads, counts, params, "naive-freight", 0, {"assign_ns": elapsed}, viol > 0)


def naive_fennel(graph, params: ScoreParams) -> PartitionResult:
    """Fennel scoring all ``k`` blocks per vertex: ``O(m + n k)``."""
    unit = _unit_weights(graph.vertex_weights)
    vw = _EMPTY_F64 if unit else _as_f64(graph.vertex_weights)
    out = np.empty(graph.num_vertices, dtype=np.int32)
    t0 = time.perf_counter_ns()
    viol, loads = _naive_fennel_run(
        np.ascontiguousarray(graph.adj_ptr, dtype=np.int64),
        np.ascontiguousarray(graph.adj, dtype=np.int32),
        params.k, vw, not unit, _as_f64(graph.edge_weights), graph.edge_weights is not None,
        params.alpha, params.gamma, float(params.l_max), new_registry_arrays(params.k), out,
    )
    elapsed = time.perf_counter_ns() - t0
    counts = np.bincount(out, minlength=params.k)
    return PartitionResult(out, loads, counts, params, "naive-fennel", 0, {"assign_ns": elapsed}, viol > 0)
