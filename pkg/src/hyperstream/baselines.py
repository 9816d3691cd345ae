"""Streaming baselines: Hashing and Min-Max-N2P."""

from __future__ import annotations

import time

import numpy as np
from numba import njit

from .freight import PartitionResult, _as_f64, _unit_weights, _EMPTY_F64

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def seed_offset(seed: int) -> int:
    return (seed * 0xD1B54A32D192ED03 + 1) & MASK64


def mix64(x: int, seed: int = 0) -> int:
    """Fibonacci (multiplicative) mix: ``(x + offset(seed)) * golden mod 2**64``."""
    return ((x + seed_offset(seed)) * GOLDEN) & MASK64


def hashing_assign(vertex: int, k: int, seed: int = 0) -> int:
    """Stateless block of ``vertex``: the top 32 bits of ``mix64`` scaled to
    ``[0, k)``.  Consecutive ids then spread like a Weyl sequence, far more
    evenly than a random map would."""
    if not 1 <= k < 1 << 32:
        raise ValueError("k must be in [1, 2**32)")
    return ((mix64(vertex, seed) >> 32) * k) >> 32


@njit(cache=True)
def _mix64(x, offset):
    return (np.uint64(x) + offset) * np.uint64(GOLDEN)


@njit(cache=True)
def _reduce(z, k):
    return np.int64(((z >> np.uint64(32)) * np.uint64(k)) >> np.uint64(32))


@njit(cache=True)
def _hash_blocks(ids, k, offset, out):
    for i in range(ids.shape[0]):
        out[i] = _reduce(_mix64(ids[i], offset), k)


@njit(cache=True)
def _hashing_run(n, base, k, offset, vw, use_vw, l_max, loads, counts, out):
    # a full home block sends the vertex to the next block with room;
    # ``base`` is the stream id of the first vertex of this batch
    violations = 0
    for v in range(n):
        cv = vw[v] if use_vw else 1.0
        b = _reduce(_mix64(base + v, offset), k)
        if loads[b] + cv > l_max:
            probe = b
            placed = False
            for _ in range(k - 1):
                probe = probe + 1 if probe + 1 < k else 0
                if loads[probe] + cv <= l_max:
                    b = probe
                    placed = True
                    break
            if not placed:
                violations += 1
        loads[b] += cv
        counts[b] += 1
        out[v] = b
    return violations


def hash_blocks(ids, k: int, seed: int = 0) -> np.ndarray:
    ids = np.ascontiguousarray(ids, dtype=np.int64)
    out = np.empty(len(ids), dtype=np.int64)
    _hash_blocks(ids, k, np.uint64(seed_offset(seed)), out)
    return out


def hashing_partition(stream, k: int, l_max: int, seed: int = 0) -> PartitionResult:
    """Hash each vertex id into ``{0..k-1}``.

    The home block is :func:`hashing_assign`; if it is full, the vertex is
    placed in the next block (cyclically) that still fits.
    """
    unit = _unit_weights(stream.vertex_weights)
    vw = _EMPTY_F64 if unit else _as_f64(stream.vertex_weights)
    loads = np.zeros(k, dtype=np.float64)
    counts = np.zeros(k, dtype=np.int64)
    out = np.empty(stream.num_vertices, dtype=np.int32)
    t0 = time.perf_counter_ns()
    viol = _hashing_run(stream.num_vertices, 0, k, np.uint64(seed_offset(seed)), vw, not unit,
                        float(l_max), loads, counts, out)
    elapsed = time.perf_counter_ns() - t0
    return PartitionResult(out, loads, counts, None, "hashing", seed, {"assign_ns": elapsed}, viol > 0)


# --- Min-Max-N2P -----------------------------------------------------------

class NetToBlocksIndex:
    """For every net, the blocks already holding one of its pins.

    Slots per net are capped at ``min(|e|, k)``, which bounds ``lambda(e)``.
    """

    def __init__(self, net_sizes, k: int):
        cap = np.minimum(np.asarray(net_sizes, dtype=np.int64), k)
        self.ptr = np.zeros(len(cap) + 1, dtype=np.int64)
        np.cumsum(cap, out=self.ptr[1:])
        self.length = np.zeros(len(cap), dtype=np.int32)
        self.blocks = np.empty(int(self.ptr[-1]), dtype=np.int32)

    def blocks_of(self, e: int) -> set[int]:
        lo = self.ptr[e]
        return set(self.blocks[lo:lo + self.length[e]].tolist())


def n2p_scratch(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-block counters and the timestamps that lazily reset them."""
    return np.zeros(k, dtype=np.int32), np.full(k, -1, dtype=np.int64)


@njit(cache=True)
def _n2p_vertex(nets, lo, hi, v, cv, l_max, ptr, length, blocks, cnt, stamp, loads):
    for j in range(lo, hi):
        e = nets[j]
        base = ptr[e]
        for t in range(length[e]):
            b = blocks[base + t]
            if stamp[b] != v:
                stamp[b] = v
                cnt[b] = 0
            cnt[b] += 1
    k = loads.shape[0]
    best = -1
    best_cnt = 0
    best_load = 0.0
    for i in range(k):
        if loads[i] + cv > l_max:
            continue
        c = cnt[i] if stamp[i] == v else 0
        if best < 0 or c > best_cnt or (c == best_cnt and loads[i] < best_load):
            best, best_cnt, best_load = i, c, loads[i]
    ok = best >= 0
    if not ok:
        best = 0
        for i in range(1, k):
            if loads[i] < loads[best]:
                best = i
    for j in range(lo, hi):
        e = nets[j]
        base = ptr[e]
        n_e = length[e]
        present = False
        for t in range(n_e):
            if blocks[base + t] == best:
                present = True
                break
        if not present:
            blocks[base + n_e] = best
            length[e] = n_e + 1
    return best, ok


@njit(cache=True)
def _n2p_run(vtx_ptr, nets, base, vw, use_vw, l_max, ptr, length, blocks, cnt, stamp, loads, counts,
             out):
    violations = 0
    for v in range(vtx_ptr.shape[0] - 1):
        cv = vw[v] if use_vw else 1.0
        d, ok = _n2p_vertex(nets, vtx_ptr[v], vtx_ptr[v + 1], base + v, cv, l_max, ptr, length,
                            blocks, cnt, stamp, loads)
        loads[d] += cv
        counts[d] += 1
        out[v] = d
        if not ok:
            violations += 1
    return violations


def minmax_n2p_partition(stream, k: int, l_max: int, seed: int = 0) -> PartitionResult:
    """Min-Max-N2P: pick the feasible block sharing the most nets with the
    vertex; ties go to the lighter block, then the smaller id."""
    unit = _unit_weights(stream.vertex_weights)
    vw = _EMPTY_F64 if unit else _as_f64(stream.vertex_weights)
    nets = np.ascontiguousarray(stream.nets, dtype=np.int32)
    ptr = np.ascontiguousarray(stream.vtx_ptr, dtype=np.int64)
    loads = np.zeros(k, dtype=np.float64)
    counts = np.zeros(k, dtype=np.int64)
    out = np.empty(stream.num_vertices, dtype=np.int32)
    t0 = time.perf_counter_ns()
    sizes = np.bincount(nets, minlength=stream.num_nets)
    index = NetToBlocksIndex(sizes, k)
    cnt, stamp = n2p_scratch(k)
    viol = _n2p_run(ptr, nets, 0, vw, not unit, float(l_max), index.ptr, index.length, index.blocks,
                    cnt, stamp, loads, counts, out)
    elapsed = time.perf_counter_ns() - t0
    res = PartitionResult(out, loads, counts, None, "minmax-n2p", seed, {"assign_ns": elapsed}, viol > 0)
    res.index = index
    return res


class MinMaxN2P:
    """Record-at-a-time Min-Max-N2P sharing the jitted step."""

    def __init__(self, net_sizes, k: int, l_max: int):
        self.k = k
        self.l_max = float(l_max)
        self.index = NetToBlocksIndex(net_sizes, k)
        self.loads = np.zeros(k, dtype=np.float64)
        self._cnt, self._stamp = n2p_scratch(k)
        self._v = 0

    def assign(self, nets, weight=1) -> int:
        arr = np.asarray(nets, dtype=np.int32)
        d, ok = _n2p_vertex(arr, 0, len(arr), self._v, float(weight), self.l_max, self.index.ptr,
                            self.index.length, self.index.blocks, self._cnt, self._stamp, self.loads)
        if not ok:
            raise RuntimeError("no feasible block")
        self.loads[d] += weight
        self._v += 1
        return int(d)
