"""Offline quality metrics of a finished partition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .freight import compute_lmax

REPORT_COLUMNS = ("cutnet", "connectivity", "imbalance", "max_load", "l_max", "balanced")


@dataclass
class EvaluationReport:
    cutnet: float
    connectivity: float
    imbalance: float
    max_load: float
    l_max: int
    balanced: bool
    lambda_histogram: dict

    def csv_row(self) -> str:
        vals = [_num(self.cutnet), _num(self.connectivity), f"{self.imbalance:.6f}",
                _num(self.max_load), str(self.l_max), str(int(self.balanced))]
        return ",".join(vals)


def _num(x) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _check_assignment(assignment, n: int, k: int) -> np.ndarray:
    a = np.asarray(assignment, dtype=np.int64)
    if a.shape != (n,):
        raise ValueError(f"assignment covers {a.size} vertices, expected {n} (unassigned vertex)")
    if n and a.min() < 0:
        raise ValueError(f"vertex {int(np.argmin(a))} is unassigned")
    if n and a.max() >= k:
        raise ValueError(f"block id {int(a.max())} out of range [0,{k - 1}]")
    return a


def block_loads(assignment, k: int, vertex_weights=None) -> np.ndarray:
    w = None if vertex_weights is None else np.asarray(vertex_weights, dtype=np.float64)
    return np.bincount(np.asarray(assignment, dtype=np.int64), weights=w, minlength=k).astype(np.float64)


def net_connectivity(h, assignment, k: int) -> np.ndarray:
    """lambda(e) for every net."""
    a = _check_assignment(assignment, h.num_vertices, k)
    net_of_pin = np.repeat(np.arange(h.num_nets, dtype=np.int64), np.diff(h.net_ptr))
    keys = np.unique(net_of_pin * k + a[h.pins])
    return np.bincount(keys // k, minlength=h.num_nets)


def evaluate(h, assignment, k: int, epsilon: float = 0.03) -> EvaluationReport:
    """Cut-net, connectivity (lambda - 1) and balance of ``assignment``."""
    lam = net_connectivity(h, assignment, k)
    w = np.ones(h.num_nets) if h.net_weights is None else h.net_weights.astype(np.float64)
    cut = lam >= 2
    cutnet = float(w[cut].sum())
    conn = float(((lam[cut] - 1) * w[cut]).sum())
    loads = block_loads(assignment, k, h.vertex_weights)
    total = float(loads.sum())
    max_load = float(loads.max()) if k else 0.0
    imbalance = max_load * k / total - 1.0 if total > 0 else 0.0
    l_max = compute_lmax(int(total) if total.is_integer() else total, k, epsilon)
    values, counts = np.unique(lam, return_counts=True)
    return EvaluationReport(
        cutnet=cutnet,
        connectivity=conn,
        imbalance=imbalance,
        max_load=max_load,
        l_max=l_max,
        balanced=max_load <= l_max,
        lambda_histogram={int(v): int(c) for v, c in zip(values, counts)},
    )


def graph_balance(g, assignment, k: int, epsilon: float = 0.03) -> tuple[float, bool]:
    """``(imbalance, balanced)`` of a graph partition."""
    a = _check_assignment(assignment, g.num_vertices, k)
    loads = block_loads(a, k, g.vertex_weights)
    total = float(loads.sum())
    if total <= 0:
        return 0.0, True
    l_max = compute_lmax(int(total) if total.is_integer() else total, k, epsilon)
    return float(loads.max()) * k / total - 1.0, bool(loads.max() <= l_max)


def evaluate_graph(g, assignment, k: int) -> float:
    """Total weight of edges whose endpoints lie in different blocks."""
    a = _check_assignment(assignment, g.num_vertices, k)
    src = np.repeat(np.arange(g.num_vertices, dtype=np.int64), np.diff(g.adj_ptr))
    crossing = a[src] != a[g.adj]
    if g.edge_weights is None:
        total = float(np.count_nonzero(crossing))
    else:
        total = float(g.edge_weights[crossing].sum())
    # every edge appears once from each side
    return total / 2
