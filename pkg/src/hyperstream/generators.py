"""Synthetic instances: desk-scale stand-ins for benchmark corpora.

All generators are deterministic per ``seed`` and return cleaned objects.
"""

from __future__ import annotations

import numpy as np

from .io import GraphStreamFile, HgrFile, clean_hypergraph, graph_from_edges


def powerlaw_pmf(exponent: float, min_size: int, max_size: int) -> tuple[np.ndarray, np.ndarray]:
    sizes = np.arange(min_size, max_size + 1)
    w = sizes.astype(np.float64) ** -exponent
    return sizes, w / w.sum()


def _fill_nets(rng, n, sizes, centers, width, noise):
    """Pick ``sizes[e]`` distinct pins per net: mostly inside a window of
    ``width`` vertices around ``centers[e]``, a ``noise`` fraction uniform.
    Duplicates are re-drawn until every net is full."""
    m = len(sizes)
    need = sizes.copy()
    net_ids = np.arange(m)
    keys = np.empty(0, dtype=np.int64)
    for _ in range(64):
        todo = need > 0
        if not todo.any():
            break
        owners = np.repeat(net_ids[todo], need[todo])
        half = np.maximum(width, 2 * sizes[owners]) // 2
        local = (centers[owners] + rng.integers(-half, half + 1)) % n
        far = rng.integers(0, n, size=len(owners))
        pick = np.where(rng.random(len(owners)) < noise, far, local)
        keys = np.unique(np.concatenate([keys, owners * n + pick]))
        counts = np.bincount(keys // n, minlength=m)
        need = sizes - counts
    else:
        raise RuntimeError("could not fill nets; sizes too close to n")
    net_of = keys // n
    ptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(net_of, minlength=m), out=ptr[1:])
    return ptr, (keys % n)


def _hypergraph(n, ptr, pins) -> HgrFile:
    nets = [pins[ptr[e]:ptr[e + 1]] for e in range(len(ptr) - 1)]
    return clean_hypergraph(n, nets)


def powerlaw_hgr(n: int, m: int, exponent: float = 2.5, min_size: int = 2, max_size: int = 200,
                 locality: int = 64, noise: float = 0.1, seed: int = 0) -> HgrFile:
    """Net sizes follow ``P(s) ~ s**-exponent`` on ``[min_size, max_size]``.

    Pins cluster around a random centre (a band of ``locality`` vertices),
    except a ``noise`` fraction drawn uniformly; this mimics the natural
    ordering locality of row-net matrices and circuit netlists.
    """
    if not (1 <= min_size <= max_size <= n):
        raise ValueError("need 1 <= min_size <= max_size <= n")
    if exponent <= 0:
        raise ValueError("exponent must be positive")
    rng = np.random.default_rng(seed)
    support, pmf = powerlaw_pmf(exponent, min_size, max_size)
    sizes = rng.choice(support, size=m, p=pmf).astype(np.int64)
    # nets are numbered along the vertex order, as rows of a banded matrix are
    centers = np.sort(rng.integers(0, n, size=m))
    ptr, pins = _fill_nets(rng, n, sizes, centers, locality, noise)
    return _hypergraph(n, ptr, pins)


def random_hgr(n: int, m: int, avg_pins: float = 3.0, seed: int = 0) -> HgrFile:
    """Uniform random nets; sizes are ``1 + Poisson(avg_pins - 1)`` capped at ``n``."""
    if n < 1 or m < 0 or avg_pins < 1:
        raise ValueError("need n >= 1, m >= 0, avg_pins >= 1")
    rng = np.random.default_rng(seed)
    sizes = np.minimum(1 + rng.poisson(avg_pins - 1, size=m), n).astype(np.int64)
    ptr, pins = _fill_nets(rng, n, sizes, np.zeros(m, dtype=np.int64), 2 * n, 1.0)
    return _hypergraph(n, ptr, pins)


def large_stream_hgr(n: int, m: int, avg_pins: float, locality: int = 64, seed: int = 0) -> HgrFile:
    """Fast generator for multi-million-pin instances.

    Duplicated pins are dropped rather than re-drawn and parallel nets are
    kept, so net sizes are only approximately ``1 + Poisson(avg_pins - 1)``.
    """
    rng = np.random.default_rng(seed)
    sizes = 1 + rng.poisson(avg_pins - 1, size=m)
    owners = np.repeat(np.arange(m, dtype=np.int64), sizes)
    centers = np.sort(rng.integers(0, n, size=m))
    pins = (centers[owners] + rng.integers(-locality, locality + 1, size=len(owners))) % n
    keys = np.unique(owners * n + pins)
    net_of = keys // n
    ptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(np.bincount(net_of, minlength=m), out=ptr[1:])
    return HgrFile(num_nets=m, num_vertices=n, net_ptr=ptr, pins=(keys % n).astype(np.int32))


def grid_graph(rows: int, cols: int) -> GraphStreamFile:
    """4-neighbour grid, vertices numbered row by row."""
    if rows < 1 or cols < 1:
        raise ValueError("grid dimensions must be positive")
    idx = np.arange(rows * cols).reshape(rows, cols)
    horiz = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    vert = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()], axis=1)
    return graph_from_edges(rows * cols, np.concatenate([horiz, vert]))


def random_graph(n: int, m: int, locality: int = 1000, noise: float = 0.2, seed: int = 0) -> GraphStreamFile:
    """``m`` distinct edges, mostly between vertices less than ``locality`` apart."""
    if m > n * (n - 1) // 2:
        raise ValueError("too many edges for n")
    rng = np.random.default_rng(seed)
    keys = np.empty(0, dtype=np.int64)
    for _ in range(64):
        need = m - len(keys)
        if need == 0:
            break
        u = rng.integers(0, n, size=need)
        local = (u + rng.integers(1, locality + 1, size=need)) % n
        v = np.where(rng.random(need) < noise, rng.integers(0, n, size=need), local)
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        fresh = lo[lo != hi] * n + hi[lo != hi]
        keys = np.unique(np.concatenate([keys, fresh]))
        if len(keys) > m:
            keys = np.sort(rng.choice(keys, size=m, replace=False))
    else:
        raise RuntimeError("could not draw enough distinct edges")
    return graph_from_edges(n, np.stack([keys // n, keys % n], axis=1))


GENERATORS = {
    "powerlaw-hgr": powerlaw_hgr,
    "random-hgr": random_hgr,
    "grid-graph": grid_graph,
    "random-graph": random_graph,
}


def generate_instance(kind: str, seed: int = 0, **params):
    """Dispatch to a generator by name; grid graphs ignore ``seed``."""
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown instance kind {kind!r}; choose from {sorted(GENERATORS)}") from None
    if kind == "grid-graph":
        return fn(**params)
    return fn(seed=seed, **params)
