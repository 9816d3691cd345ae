"""FREIGHT: one-pass Fennel-style streaming hypergraph partitioning.

Each incoming vertex ``v`` goes to the feasible block maximising

    gain_i(v) - c(v) * alpha * gamma * load_i ** (gamma - 1)

where ``gain_i(v)`` is the weight of the nets of ``v`` whose most recently
streamed pin sits in block ``i`` (connectivity objective), excluding nets
that are already cut (cut-net objective).  Only blocks with positive gain
are scored explicitly; every other block is represented by the least
loaded one, read in O(1) from :mod:`hyperstream.registry` (unit vertex
weights) or from a min-load tournament tree (weighted vertices).

Ties are broken by smaller load, then by earlier position in the registry
(unit weights) or smaller block id (weighted).  Position order refines
load order, so both rules agree on the load component.
"""

from __future__ import annotations

import math
import time
from collections import namedtuple
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from numba import njit

from .registry import BlockRegistry, increment_arrays, new_registry_arrays

CUTNET = "cutnet"
CONNECTIVITY = "connectivity"
OBJECTIVES = (CUTNET, CONNECTIVITY)

UNASSIGNED = -1

_EMPTY_F64 = np.zeros(0, dtype=np.float64)


class InfeasibleError(RuntimeError):
    """No block can take the vertex without exceeding ``l_max``."""


def compute_lmax(total_weight, k: int, epsilon: float) -> int:
    """``ceil((1 + epsilon) * total_weight / k)``, evaluated exactly."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    eps = Fraction(repr(float(epsilon)))
    total = Fraction(repr(total_weight)) if isinstance(total_weight, float) else Fraction(total_weight)
    return math.ceil((1 + eps) * total / k)


def compute_alpha(n: int, m: int, k: int) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.sqrt(k) * m / n ** 1.5


@njit(cache=True, inline="always")
def _penalty(cv, load, alpha, gamma):
    # sqrt is several times cheaper than pow for the default exponent
    root = math.sqrt(load) if gamma == 1.5 else load ** (gamma - 1.0)
    return cv * alpha * gamma * root


def weighted_penalty(v_weight, block_load, alpha: float, gamma: float = 1.5) -> float:
    """Penalty term ``-c(v) * alpha * gamma * c(V_i) ** (gamma - 1)``."""
    return -float(_penalty(float(v_weight), float(block_load), float(alpha), float(gamma)))


@dataclass(frozen=True)
class ScoreParams:
    k: int
    epsilon: float
    gamma: float
    alpha: float
    l_max: int
    objective: str = CONNECTIVITY

    def __post_init__(self):
        if not 1 <= self.k <= BLOCK_MASK:
            raise ValueError(f"k must be in [1, {BLOCK_MASK}]")
        if not self.gamma > 1:
            raise ValueError("gamma must be > 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")

    @classmethod
    def for_instance(cls, n, m, k, total_weight=None, epsilon=0.03, objective=CONNECTIVITY,
                     gamma=1.5, alpha=None) -> "ScoreParams":
        """Defaults: ``gamma = 3/2`` and ``alpha = sqrt(k) * m / n**1.5``."""
        total = n if total_weight is None else total_weight
        if alpha is None:
            alpha = compute_alpha(max(n, 1), m, k)
        return cls(k=k, epsilon=epsilon, gamma=gamma, alpha=alpha,
                   l_max=compute_lmax(total, k, epsilon), objective=objective)

    @property
    def cutnet(self) -> bool:
        return self.objective == CUTNET


@dataclass
class PartitionResult:
    assignment: np.ndarray
    loads: np.ndarray
    cardinalities: np.ndarray
    params: Optional[ScoreParams]
    algorithm: str = "freight"
    seed: int = 0
    timings: dict = field(default_factory=dict)
    balance_violation: bool = False

    @property
    def k(self) -> int:
        return len(self.loads)

    def write_assignment(self, path) -> None:
        from .io import write_assignment

        write_assignment(path, self.assignment)

    def metadata(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "k": self.k,
            "seed": self.seed,
            "params": None if self.params is None else asdict(self.params),
            "num_vertices": int(len(self.assignment)),
            "max_load": float(self.loads.max()) if len(self.loads) else 0.0,
            "balance_violation": self.balance_violation,
            "timings_ns": dict(self.timings),
        }


# --- net tracker -----------------------------------------------------------

CUT_BIT = 1 << 30
BLOCK_MASK = CUT_BIT - 1


class NetTracker:
    """Per-net streaming state: latest block ``d_e`` and a sticky cut flag,
    packed into one int32 per net so a pin costs a single random access.

    ``-1`` means no pin of the net has been streamed yet; otherwise the low
    30 bits hold the block and bit 30 is set once the net is cut.
    """

    def __init__(self, num_nets: int, packed: Optional[np.ndarray] = None):
        self.packed = np.full(num_nets, UNASSIGNED, dtype=np.int32) if packed is None else packed

    @property
    def block(self) -> np.ndarray:
        return np.where(self.packed < 0, UNASSIGNED, self.packed & BLOCK_MASK)

    @property
    def cut(self) -> np.ndarray:
        return ((self.packed >= 0) & (self.packed & CUT_BIT != 0)).astype(np.uint8)

    def status(self, e: int) -> str:
        s = int(self.packed[e])
        if s < 0:
            return "unassigned"
        return "cut" if s & CUT_BIT else "assigned"

    def last_block(self, e: int) -> Optional[int]:
        s = int(self.packed[e])
        return None if s < 0 else s & BLOCK_MASK

    @property
    def nbytes(self) -> int:
        return self.packed.nbytes


# --- min-load tournament tree (weighted vertices) --------------------------

def _new_tree(k: int) -> np.ndarray:
    size = 1
    while size < k:
        size *= 2
    tree = np.full(2 * size, -1, dtype=np.int32)
    tree[size:size + k] = np.arange(k, dtype=np.int32)
    for i in range(size - 1, 0, -1):
        left, right = tree[2 * i], tree[2 * i + 1]
        tree[i] = left if left >= 0 else right
    return tree


@njit(cache=True, inline="always")
def _lighter(a, b, loads):
    # argmin by (load, id); -1 marks padding leaves
    if a < 0:
        return b
    if b < 0:
        return a
    if loads[b] < loads[a] or (loads[b] == loads[a] and b < a):
        return b
    return a


@njit(cache=True, inline="always")
def _tree_update(tree, b, loads):
    i = (tree.shape[0] >> 1) + b
    i >>= 1
    while i >= 1:
        tree[i] = _lighter(tree[2 * i], tree[2 * i + 1], loads)
        i >>= 1


# --- per-vertex kernels ----------------------------------------------------

FreightState = namedtuple(
    "FreightState",
    ["net_state", "loads", "counts", "gain", "touched", "reg", "tree"],
)


def new_state(num_nets: int, k: int, unit: bool) -> FreightState:
    return FreightState(
        net_state=np.full(num_nets, UNASSIGNED, dtype=np.int32),
        loads=np.zeros(k, dtype=np.float64),
        counts=np.zeros(k, dtype=np.int64),
        gain=np.zeros(k, dtype=np.float64),
        touched=np.zeros(k, dtype=np.int32),
        reg=new_registry_arrays(k),
        tree=_new_tree(1 if unit else k),
    )


@njit(cache=True, inline="always")
def _gather(nets, lo, hi, net_w, use_nw, cutnet, net_state, gain, touched):
    """Accumulate gains of the blocks holding the latest pin of each net of
    the vertex; returns how many distinct blocks were touched."""
    nt = 0
    for j in range(lo, hi):
        e = nets[j]
        s = net_state[e]
        if s < 0:
            continue
        if cutnet and s & CUT_BIT:
            continue
        b = s & BLOCK_MASK
        if gain[b] == 0.0:
            touched[nt] = b
            nt += 1
        if use_nw:
            gain[b] += net_w[e]
        else:
            gain[b] += 1.0
    return nt


@njit(cache=True, inline="always")
def _beats(score, load, tie, best_score, best_load, best_tie):
    if score != best_score:
        return score > best_score
    if load != best_load:
        return load < best_load
    return tie < best_tie


@njit(cache=True, inline="always")
def _select(nt, cv, unit, alpha, gamma, l_max, loads, gain, touched, pos_block, block_pos, tree):
    """Best block among S1 (touched) and the least-loaded champion.

    Returns ``(block, feasible)``; when nothing fits, the least-loaded block
    is returned with ``feasible = False``.
    """
    best = -1
    best_score = 0.0
    best_load = 0.0
    best_tie = 0
    for t in range(nt):
        b = touched[t]
        ld = loads[b]
        if ld + cv <= l_max:
            s = gain[b] - _penalty(cv, ld, alpha, gamma)
            tie = block_pos[b] if unit else b
            if best < 0 or _beats(s, ld, tie, best_score, best_load, best_tie):
                best, best_score, best_load, best_tie = b, s, ld, tie
    if unit:
        champ = pos_block[0]
        champ_tie = 0
    else:
        champ = tree[1]
        champ_tie = champ
    ld = loads[champ]
    if ld + cv > l_max:
        # the lightest block is full, so every block is
        return np.int64(champ), False
    if gain[champ] == 0.0:
        s = gain[champ] - _penalty(cv, ld, alpha, gamma)
        if best < 0 or _beats(s, ld, champ_tie, best_score, best_load, best_tie):
            best = champ
    return np.int64(best), True


@njit(cache=True, inline="always")
def _commit_nets(nets, lo, hi, d, net_state):
    for j in range(lo, hi):
        e = nets[j]
        s = net_state[e]
        # a cut net never equals a bare block id, so it stays cut
        if s >= 0 and s != d:
            net_state[e] = d | CUT_BIT
        else:
            net_state[e] = d


# The run kernels unpack the state tuples once up front: reading a field of
# a namedtuple inside the loop costs a refcount round trip per access,
# which used to dominate the per-pin time.

@njit(cache=True)
def _freight_run(vtx_ptr, nets, vw, use_vw, net_w, use_nw, cutnet, alpha, gamma, l_max, st, out):
    net_state, loads, counts, gain, touched, reg, tree = st
    pb, pk, bp, bc, bl, br, fs, meta = reg
    unit = not use_vw
    violations = 0
    for v in range(vtx_ptr.shape[0] - 1):
        lo = vtx_ptr[v]
        hi = vtx_ptr[v + 1]
        cv = vw[v] if use_vw else 1.0
        nt = _gather(nets, lo, hi, net_w, use_nw, cutnet, net_state, gain, touched)
        d, ok = _select(nt, cv, unit, alpha, gamma, l_max, loads, gain, touched, pb, bp, tree)
        for t in range(nt):
            gain[touched[t]] = 0.0
        loads[d] += cv
        counts[d] += 1
        if unit:
            increment_arrays(pb, pk, bp, bc, bl, br, fs, meta, d)
        else:
            _tree_update(tree, d, loads)
        _commit_nets(nets, lo, hi, d, net_state)
        out[v] = d
        if not ok:
            violations += 1
    return violations


@njit(cache=True)
def _fennel_run(adj_ptr, adj, vw, use_vw, ew, use_ew, alpha, gamma, l_max, assign, st):
    """Graph mode: gains come from already-assigned neighbours."""
    _, loads, counts, gain, touched, reg, tree = st
    pb, pk, bp, bc, bl, br, fs, meta = reg
    unit = not use_vw
    violations = 0
    for v in range(adj_ptr.shape[0] - 1):
        cv = vw[v] if use_vw else 1.0
        nt = 0
        for j in range(adj_ptr[v], adj_ptr[v + 1]):
            b = assign[adj[j]]
            if b < 0:
                continue
            if gain[b] == 0.0:
                touched[nt] = b
                nt += 1
            if use_ew:
                gain[b] += ew[j]
            else:
                gain[b] += 1.0
        d, ok = _select(nt, cv, unit, alpha, gamma, l_max, loads, gain, touched, pb, bp, tree)
        for t in range(nt):
            gain[touched[t]] = 0.0
        loads[d] += cv
        counts[d] += 1
        if unit:
            increment_arrays(pb, pk, bp, bc, bl, br, fs, meta, d)
        else:
            _tree_update(tree, d, loads)
        assign[v] = d
        if not ok:
            violations += 1
    return violations


# --- Python-level API ------------------------------------------------------

def _as_f64(a) -> np.ndarray:
    return _EMPTY_F64 if a is None else np.ascontiguousarray(a, dtype=np.float64)


def _unit_weights(vw) -> bool:
    return vw is None or bool(np.all(np.asarray(vw) == 1))


def partition_stream(stream, params: ScoreParams, seed: int = 0) -> PartitionResult:
    """Partition an in-memory :class:`~hyperstream.io.VertexStreamFile`.

    Vertices are visited once in stream order; only the timed loop touches
    the per-net tracker (``O(m)``) and the block structures (``O(k)``).
    """
    unit = _unit_weights(stream.vertex_weights)
    vw = _EMPTY_F64 if unit else _as_f64(stream.vertex_weights)
    nw = _as_f64(stream.net_weights)
    st = new_state(stream.num_nets, params.k, unit)
    out = np.empty(stream.num_vertices, dtype=np.int32)
    nets = np.ascontiguousarray(stream.nets, dtype=np.int32)
    ptr = np.ascontiguousarray(stream.vtx_ptr, dtype=np.int64)
    t0 = time.perf_counter_ns()
    viol = _freight_run(ptr, nets, vw, not unit, nw, stream.net_weights is not None, params.cutnet,
                        params.alpha, params.gamma, float(params.l_max), st, out)
    elapsed = time.perf_counter_ns() - t0
    return PartitionResult(
        assignment=out,
        loads=st.loads,
        cardinalities=st.counts,
        params=params,
        algorithm=f"freight-{'cut' if params.cutnet else 'con'}",
        seed=seed,
        timings={"assign_ns": elapsed},
        balance_violation=viol > 0,
    )


def partition_graph(graph, params: ScoreParams, seed: int = 0) -> PartitionResult:
    """Fennel on a graph via the same S1/S2 decomposition (``O(m + n)``)."""
    unit = _unit_weights(graph.vertex_weights)
    vw = _EMPTY_F64 if unit else _as_f64(graph.vertex_weights)
    ew = _as_f64(graph.edge_weights)
    st = new_state(0, params.k, unit)
    assign = np.full(graph.num_vertices, UNASSIGNED, dtype=np.int32)
    ptr = np.ascontiguousarray(graph.adj_ptr, dtype=np.int64)
    adj = np.ascontiguousarray(graph.adj, dtype=np.int32)
    t0 = time.perf_counter_ns()
    viol = _fennel_run(ptr, adj, vw, not unit, ew, graph.edge_weights is not None,
                       params.alpha, params.gamma, float(params.l_max), assign, st)
    elapsed = time.perf_counter_ns() - t0
    return PartitionResult(assign, st.loads, st.counts, params, "freight-graph", seed,
                           {"assign_ns": elapsed}, viol > 0)


@dataclass
class ScoreDecomposition:
    s1: dict
    s2_champion: int


class FreightPartitioner:
    """Incremental FREIGHT for records arriving one at a time (e.g. straight
    from :func:`hyperstream.io.stream_vertices` on a file).

    Runs the same jitted per-vertex step as :func:`partition_stream`.
    ``weighted=True`` selects the min-load tree instead of the registry.
    """

    def __init__(self, num_nets: int, params: ScoreParams, net_weights=None, weighted: bool = False):
        self.params = params
        self.unit = not weighted
        self.state = new_state(num_nets, params.k, self.unit)
        self.net_weights = _as_f64(net_weights)
        self.use_nw = net_weights is not None
        self.violations = 0
        self.assignment: list[int] = []
        self.registry = BlockRegistry.wrap(self.state.reg)
        self._out = np.empty(1, dtype=np.int32)

    @property
    def tracker(self) -> NetTracker:
        return NetTracker(0, packed=self.state.net_state)

    def gather_gains(self, nets, weight=1) -> ScoreDecomposition:
        """S1 gains of feasible blocks plus the S2 champion, without committing."""
        st, p = self.state, self.params
        arr = np.asarray(nets, dtype=np.int32)
        nt = _gather(arr, 0, len(arr), self.net_weights, self.use_nw, p.cutnet,
                     st.net_state, st.gain, st.touched)
        s1 = {}
        for t in range(nt):
            b = int(st.touched[t])
            if st.loads[b] + weight <= p.l_max:
                s1[b] = float(st.gain[b])
            st.gain[b] = 0.0
        champ = int(st.reg.pos_block[0]) if self.unit else int(st.tree[1])
        return ScoreDecomposition(s1, champ)

    def assign(self, nets, weight=1) -> int:
        if self.unit and weight != 1:
            raise ValueError("non-unit vertex weight on a unit-weight partitioner")
        st, p = self.state, self.params
        arr = np.asarray(nets, dtype=np.int32)
        ptr = np.array([0, len(arr)], dtype=np.int64)
        vw = np.array([float(weight)]) if not self.unit else _EMPTY_F64
        viol = _freight_run(ptr, arr, vw, not self.unit, self.net_weights, self.use_nw, p.cutnet,
                            p.alpha, p.gamma, float(p.l_max), st, self._out)
        self.violations += viol
        d = self._out[0]
        self.assignment.append(int(d))
        return int(d)

    def result(self, seed: int = 0) -> PartitionResult:
        return PartitionResult(np.asarray(self.assignment, dtype=np.int32), self.state.loads,
                               self.state.counts, self.params,
                               f"freight-{'cut' if self.params.cutnet else 'con'}", seed, {},
                               self.violations > 0)


def select_block(dec: ScoreDecomposition, params: ScoreParams, registry: BlockRegistry, loads,
                 v_weight: float = 1.0) -> int:
    """Resolve a decomposition: best S1 block vs. the registry champion.

    Uses the registry position as the final tie-break.  Raises
    :class:`InfeasibleError` when no block can take the vertex.
    """
    loads = np.asarray(loads, dtype=np.float64)
    a, g, cap = params.alpha, params.gamma, float(params.l_max)
    best = None
    for b, gain in dec.s1.items():
        if loads[b] + v_weight > cap or gain <= 0:
            continue
        key = (gain - _penalty(v_weight, loads[b], a, g), -loads[b], -registry.position_of(b))
        if best is None or key > best[0]:
            best = (key, b)
    champ = dec.s2_champion
    if loads[champ] + v_weight <= cap and champ not in dec.s1:
        key = (0.0 - _penalty(v_weight, loads[champ], a, g), -loads[champ], -registry.position_of(champ))
        if best is None or key > best[0]:
            best = (key, champ)
    if best is None:
        raise InfeasibleError("no block can take the vertex without exceeding l_max")
    return best[1]
