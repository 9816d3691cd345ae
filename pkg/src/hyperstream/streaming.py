"""Partition a ``.vstream`` file straight from disk, chunk by chunk.

The timed region covers reading, parsing and assigning, which is what a
streaming partitioner pays per pin in practice.  FREIGHT and Hashing make a
single pass; a pre-pass is added only when the file carries weights, since
``c(V)`` (for ``L_max``) and fmt-1 net weights are not known before the
records are exhausted.  Min-Max-N2P pre-counts net sizes to lay out its
net-to-blocks index.
"""

from __future__ import annotations

import time

import numpy as np

from .baselines import (NetToBlocksIndex, _hashing_run, _n2p_run, n2p_scratch, seed_offset)
from .freight import (CONNECTIVITY, PartitionResult, ScoreParams, _EMPTY_F64, _freight_run, new_state)
from .io import VertexStreamBatches

ALGORITHMS = ("freight", "hashing", "minmax-n2p")


def _prepass(path, chunk_bytes, need_sizes):
    total = 0.0
    sizes = None
    with VertexStreamBatches(path, chunk_bytes) as rd:
        if need_sizes:
            sizes = np.zeros(rd.num_nets, dtype=np.int64)
        for b in rd:
            total += float(b.vertex_weights.sum()) if b.vertex_weights is not None else b.num_vertices
            if need_sizes:
                sizes += np.bincount(b.nets, minlength=rd.num_nets)
        return total, rd.net_weights, sizes


def partition_file(path, k: int, algorithm: str = "freight", epsilon: float = 0.03,
                   objective: str = CONNECTIVITY, seed: int = 0, gamma: float = 1.5, alpha=None,
                   chunk_bytes: int = 1 << 22) -> PartitionResult:
    """Stream ``path`` once (plus any pre-pass) and return the partition.

    ``timings["total_ns"]`` spans opening the file to the last assignment.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    t0 = time.perf_counter_ns()
    with VertexStreamBatches(path, chunk_bytes) as head:
        n, m = head.num_vertices, head.num_nets
        weighted_v, weighted_n = head.has_vertex_weights, head.has_net_weights
    need_sizes = algorithm == "minmax-n2p"
    total, net_w, sizes = float(n), None, None
    if weighted_v or weighted_n or need_sizes:
        total, net_w, sizes = _prepass(path, chunk_bytes, need_sizes)
    total = int(total) if float(total).is_integer() else total
    params = ScoreParams.for_instance(n, m, k, total_weight=total, epsilon=epsilon,
                                      objective=objective, gamma=gamma, alpha=alpha)
    l_max = float(params.l_max)
    out = np.empty(n, dtype=np.int32)
    viol = 0
    rd = VertexStreamBatches(path, chunk_bytes)
    with rd:
        if algorithm == "freight":
            unit = not weighted_v
            st = new_state(m, k, unit)
            nw = _EMPTY_F64 if net_w is None else net_w.astype(np.float64)
            for b in rd:
                vw = _EMPTY_F64 if unit else b.vertex_weights.astype(np.float64)
                viol += _freight_run(b.vtx_ptr, b.nets, vw, not unit, nw, net_w is not None,
                                     params.cutnet, params.alpha, params.gamma, l_max, st,
                                     out[b.first:b.first + b.num_vertices])
            loads, counts = st.loads, st.counts
            name = f"freight-{'cut' if params.cutnet else 'con'}"
        elif algorithm == "hashing":
            loads = np.zeros(k, dtype=np.float64)
            counts = np.zeros(k, dtype=np.int64)
            offset = np.uint64(seed_offset(seed))
            for b in rd:
                vw = _EMPTY_F64 if not weighted_v else b.vertex_weights.astype(np.float64)
                viol += _hashing_run(b.num_vertices, b.first, k, offset, vw, weighted_v, l_max, loads,
                                     counts, out[b.first:b.first + b.num_vertices])
            name = "hashing"
        else:
            loads = np.zeros(k, dtype=np.float64)
            counts = np.zeros(k, dtype=np.int64)
            index = NetToBlocksIndex(sizes, k)
            cnt, stamp = n2p_scratch(k)
            for b in rd:
                vw = _EMPTY_F64 if not weighted_v else b.vertex_weights.astype(np.float64)
                viol += _n2p_run(b.vtx_ptr, b.nets, b.first, vw, weighted_v, l_max, index.ptr,
                                 index.length, index.blocks, cnt, stamp, loads, counts,
                                 out[b.first:b.first + b.num_vertices])
            name = "minmax-n2p"
    elapsed = time.perf_counter_ns() - t0
    return PartitionResult(out, loads, counts, params, name, seed, {"total_ns": elapsed}, viol > 0)
