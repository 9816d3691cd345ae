"""Readers and writers for hMetis ``.hgr``, vertex-stream ``.vstream`` and
METIS ``.graph`` files.

Files are 1-indexed; everything in memory is 0-indexed CSR numpy arrays.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np
from numba import njit

WEIGHT_FORMATS = {None: (False, False), "0": (False, False), "1": (True, False),
                  "10": (False, True), "11": (True, True)}


class FormatError(ValueError):
    """Malformed input file; message carries the 1-based line number."""

    def __init__(self, msg: str, line: Optional[int] = None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + msg)
        self.line = line


class StreamError(RuntimeError):
    """Raised on truncated streams and on reuse of a consumed stream handle."""


def _csr_rows(ptr: np.ndarray, data: np.ndarray) -> list[list[int]]:
    return [data[ptr[i]:ptr[i + 1]].tolist() for i in range(len(ptr) - 1)]


@dataclass
class HgrFile:
    """A cleaned hypergraph.

    ``pins[net_ptr[e]:net_ptr[e+1]]`` are the (0-based, ascending) vertices of
    net ``e``.  ``removed`` counts what cleaning dropped.
    """

    num_nets: int
    num_vertices: int
    net_ptr: np.ndarray
    pins: np.ndarray
    net_weights: Optional[np.ndarray] = None
    vertex_weights: Optional[np.ndarray] = None
    fmt_code: Optional[str] = None
    removed: dict = field(default_factory=dict)

    @property
    def nets(self) -> list[list[int]]:
        return _csr_rows(self.net_ptr, self.pins)

    @property
    def pin_count(self) -> int:
        return int(self.net_ptr[-1])

    def net_sizes(self) -> np.ndarray:
        return np.diff(self.net_ptr)

    def total_vertex_weight(self) -> float:
        if self.vertex_weights is None:
            return float(self.num_vertices)
        return float(self.vertex_weights.sum())

    def validate(self) -> None:
        if len(self.net_ptr) != self.num_nets + 1:
            raise ValueError("net_ptr length does not match num_nets")
        if self.pins.size and (self.pins.min() < 0 or self.pins.max() >= self.num_vertices):
            raise ValueError("pin id out of range")
        if self.num_nets and np.any(np.diff(self.net_ptr) <= 0):
            raise ValueError("empty net")
        for e in range(self.num_nets):
            p = self.pins[self.net_ptr[e]:self.net_ptr[e + 1]]
            if np.any(np.diff(p) <= 0):
                raise ValueError(f"net {e} has unsorted or duplicate pins")

    def __eq__(self, other):
        if not isinstance(other, HgrFile):
            return NotImplemented
        return (
            self.num_nets == other.num_nets
            and self.num_vertices == other.num_vertices
            and np.array_equal(self.net_ptr, other.net_ptr)
            and np.array_equal(self.pins, other.pins)
            and _opt_equal(self.net_weights, other.net_weights)
            and _opt_equal(self.vertex_weights, other.vertex_weights)
        )


@dataclass
class VertexStreamFile:
    """Vertices in stream order, each with its incident nets.

    ``nets[vtx_ptr[v]:vtx_ptr[v+1]]`` are the 0-based net ids of vertex ``v``.
    """

    num_vertices: int
    num_nets: int
    vtx_ptr: np.ndarray
    nets: np.ndarray
    vertex_weights: Optional[np.ndarray] = None
    net_weights: Optional[np.ndarray] = None

    @property
    def records(self) -> list[list[int]]:
        return _csr_rows(self.vtx_ptr, self.nets)

    @property
    def pin_count(self) -> int:
        return int(self.vtx_ptr[-1])

    @property
    def fmt_code(self) -> Optional[str]:
        return _fmt(self.net_weights is not None, self.vertex_weights is not None)

    def total_vertex_weight(self) -> float:
        if self.vertex_weights is None:
            return float(self.num_vertices)
        return float(self.vertex_weights.sum())

    def __iter__(self) -> Iterator[tuple[int, int, list[int]]]:
        vw = self.vertex_weights
        for v in range(self.num_vertices):
            w = 1 if vw is None else vw[v].item()
            yield v, w, self.nets[self.vtx_ptr[v]:self.vtx_ptr[v + 1]].tolist()

    def __eq__(self, other):
        if not isinstance(other, VertexStreamFile):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and self.num_nets == other.num_nets
            and np.array_equal(self.vtx_ptr, other.vtx_ptr)
            and np.array_equal(self.nets, other.nets)
            and _opt_equal(self.vertex_weights, other.vertex_weights)
            and _opt_equal(self.net_weights, other.net_weights)
        )


@dataclass
class GraphStreamFile:
    """Undirected graph as symmetric adjacency CSR (0-based neighbours)."""

    num_vertices: int
    num_edges: int
    adj_ptr: np.ndarray
    adj: np.ndarray
    edge_weights: Optional[np.ndarray] = None
    vertex_weights: Optional[np.ndarray] = None

    @property
    def neighbors(self) -> list[list[int]]:
        return _csr_rows(self.adj_ptr, self.adj)

    def total_vertex_weight(self) -> float:
        if self.vertex_weights is None:
            return float(self.num_vertices)
        return float(self.vertex_weights.sum())

    def __iter__(self) -> Iterator[tuple[int, int, list[int]]]:
        vw = self.vertex_weights
        for v in range(self.num_vertices):
            w = 1 if vw is None else vw[v].item()
            yield v, w, self.adj[self.adj_ptr[v]:self.adj_ptr[v + 1]].tolist()

    def __eq__(self, other):
        if not isinstance(other, GraphStreamFile):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and self.num_edges == other.num_edges
            and np.array_equal(self.adj_ptr, other.adj_ptr)
            and np.array_equal(self.adj, other.adj)
            and _opt_equal(self.edge_weights, other.edge_weights)
            and _opt_equal(self.vertex_weights, other.vertex_weights)
        )


def _opt_equal(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)


def _fmt(net_w: bool, vtx_w: bool) -> Optional[str]:
    return {(False, False): None, (True, False): "1", (False, True): "10", (True, True): "11"}[
        (net_w, vtx_w)
    ]


def _content_lines(handle):
    """Yield ``(lineno, tokens)`` skipping ``%`` comment lines."""
    for lineno, raw in enumerate(handle, start=1):
        if raw.startswith("%"):
            continue
        yield lineno, raw.split()


def _ints(tokens, lineno, path, what="token"):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        bad = next(t for t in tokens if not _is_int(t))
        raise FormatError(f"non-numeric {what} {bad!r}", lineno, path) from None


def _is_int(tok: str) -> bool:
    try:
        int(tok)
    except ValueError:
        return False
    return True


def _header(lines, path, names):
    for lineno, toks in lines:
        if not toks:
            continue
        if len(toks) < 2 or len(toks) > 4:
            raise FormatError(f"malformed header, expected '{names}'", lineno, path)
        vals = _ints(toks[:2], lineno, path, "header field")
        if vals[0] < 0 or vals[1] < 0:
            raise FormatError("malformed header, negative count", lineno, path)
        fmt = toks[2] if len(toks) >= 3 else None
        if fmt is not None and fmt.lstrip("0") == "":
            fmt = None
        if fmt is not None:
            fmt = fmt.lstrip("0")
            if fmt not in WEIGHT_FORMATS:
                raise FormatError(f"malformed header, unknown weight format {toks[2]!r}", lineno, path)
        return lineno, vals[0], vals[1], fmt
    raise FormatError("malformed header, file is empty", None, path)


def _check_trailing(lines, path):
    for lineno, toks in lines:
        if toks:
            raise FormatError("unexpected trailing data", lineno, path)


def parse_hgr(path) -> HgrFile:
    """Read and clean an hMetis hypergraph file."""
    with open(path, "r", encoding="ascii") as fh:
        lines = _content_lines(fh)
        _, m, n, fmt = _header(lines, path, "m n [fmt]")
        has_nw, has_vw = WEIGHT_FORMATS[fmt]
        raw_nets = []
        raw_weights = []
        for _ in range(m):
            try:
                lineno, toks = next(lines)
            except StopIteration:
                raise FormatError(f"expected {m} net lines, found {len(raw_nets)}", None, path) from None
            vals = _ints(toks, lineno, path)
            if has_nw:
                if not vals:
                    raise FormatError("missing net weight", lineno, path)
                w, vals = vals[0], vals[1:]
                if w <= 0:
                    raise FormatError(f"net weight {w} must be positive", lineno, path)
                raw_weights.append(w)
            for pin in vals:
                if pin < 1 or pin > n:
                    raise FormatError(f"pin id {pin} out of range [1,{n}]", lineno, path)
            raw_nets.append(vals)
        vweights = None
        if has_vw:
            vweights = np.empty(n, dtype=np.int64)
            for v in range(n):
                try:
                    lineno, toks = next(lines)
                except StopIteration:
                    raise FormatError(f"expected {n} vertex weight lines, found {v}", None, path) from None
                vals = _ints(toks, lineno, path, "vertex weight")
                if len(vals) != 1 or vals[0] < 0:
                    raise FormatError("vertex weight must be one non-negative integer", lineno, path)
                vweights[v] = vals[0]
        _check_trailing(lines, path)
    return clean_hypergraph(n, raw_nets, raw_weights if has_nw else None, vweights, one_based=True)


def clean_hypergraph(num_vertices, nets, net_weights=None, vertex_weights=None, one_based=False) -> HgrFile:
    """Build an :class:`HgrFile` from pin lists, dropping duplicate pins,
    empty nets and parallel nets (weights of parallel nets are summed)."""
    off = 1 if one_based else 0
    seen: dict[tuple, int] = {}
    kept: list[tuple] = []
    weights: list[int] = []
    dup_pins = empty = parallel = 0
    for i, net in enumerate(nets):
        key = tuple(sorted(set(net)))
        dup_pins += len(net) - len(key)
        if not key:
            empty += 1
            continue
        w = 1 if net_weights is None else int(net_weights[i])
        if key in seen:
            parallel += 1
            weights[seen[key]] += w
            continue
        seen[key] = len(kept)
        kept.append(key)
        weights.append(w)
    sizes = np.fromiter((len(t) for t in kept), dtype=np.int64, count=len(kept))
    net_ptr = np.zeros(len(kept) + 1, dtype=np.int64)
    np.cumsum(sizes, out=net_ptr[1:])
    pins = np.fromiter((p - off for t in kept for p in t), dtype=np.int32, count=int(net_ptr[-1]))
    vw = None if vertex_weights is None else np.asarray(vertex_weights, dtype=np.int64)
    nw = None if net_weights is None else np.asarray(weights, dtype=np.int64)
    return HgrFile(
        num_nets=len(kept),
        num_vertices=int(num_vertices),
        net_ptr=net_ptr,
        pins=pins,
        net_weights=nw,
        vertex_weights=vw,
        fmt_code=_fmt(nw is not None, vw is not None),
        removed={"duplicate_pins": dup_pins, "empty_nets": empty, "parallel_nets": parallel},
    )


@njit(cache=True)
def _digits(x):
    d = 1
    while x >= 10:
        x //= 10
        d += 1
    return d


@njit(cache=True)
def _put(buf, at, x):
    end = at + _digits(x)
    i = end
    while True:
        i -= 1
        buf[i] = 48 + x % 10
        x //= 10
        if x == 0:
            break
    return end


@njit(cache=True)
def _format_rows(ptr, data, lead, use_lead, lo, hi):
    """ASCII lines ``[lead[r]] data[ptr[r]:ptr[r+1]] + 1`` for rows lo..hi-1."""
    size = 0
    for r in range(lo, hi):
        size += 1
        if use_lead:
            size += _digits(lead[r]) + 1
        for j in range(ptr[r], ptr[r + 1]):
            size += _digits(data[j] + 1) + 1
    buf = np.empty(size, dtype=np.uint8)
    at = 0
    for r in range(lo, hi):
        sep = False
        if use_lead:
            at = _put(buf, at, lead[r])
            sep = True
        for j in range(ptr[r], ptr[r + 1]):
            if sep:
                buf[at] = 32
                at += 1
            at = _put(buf, at, data[j] + 1)
            sep = True
        buf[at] = 10
        at += 1
    return buf[:at]


_EMPTY_I64 = np.zeros(0, dtype=np.int64)


def _write_rows(fh, ptr, data, lead=None, rows_per_chunk: int = 1 << 16) -> None:
    ptr = np.ascontiguousarray(ptr, dtype=np.int64)
    data = np.ascontiguousarray(data, dtype=np.int64)
    use = lead is not None
    lead = _EMPTY_I64 if lead is None else np.ascontiguousarray(lead, dtype=np.int64)
    if use and lead.size and lead.min() < 0:
        raise ValueError("weights must be non-negative")
    rows = len(ptr) - 1
    for lo in range(0, rows, rows_per_chunk):
        fh.write(_format_rows(ptr, data, lead, use, lo, min(rows, lo + rows_per_chunk)).tobytes())


def _write_values(fh, values) -> None:
    vals = np.asarray(values, dtype=np.int64)
    _write_rows(fh, np.zeros(len(vals) + 1, dtype=np.int64), _EMPTY_I64, vals)


def write_hgr(h: HgrFile, path) -> None:
    fmt = _fmt(h.net_weights is not None, h.vertex_weights is not None)
    with open(path, "wb") as fh:
        fh.write((f"{h.num_nets} {h.num_vertices}" + (f" {fmt}" if fmt else "") + "\n").encode())
        _write_rows(fh, h.net_ptr, h.pins, h.net_weights)
        if h.vertex_weights is not None:
            _write_values(fh, h.vertex_weights)


def _transpose(nrows: int, ncols: int, ptr: np.ndarray, data: np.ndarray, dtype):
    """CSR transpose; rows of the result list their entries ascending."""
    rows = np.repeat(np.arange(nrows, dtype=dtype), np.diff(ptr))
    order = np.argsort(data, kind="stable")
    counts = np.bincount(data, minlength=ncols) if data.size else np.zeros(ncols, dtype=np.int64)
    new_ptr = np.zeros(ncols + 1, dtype=np.int64)
    np.cumsum(counts, out=new_ptr[1:])
    return new_ptr, rows[order]


def transpose_to_stream(h: HgrFile) -> VertexStreamFile:
    vtx_ptr, nets = _transpose(h.num_nets, h.num_vertices, h.net_ptr, h.pins, np.int32)
    return VertexStreamFile(
        num_vertices=h.num_vertices,
        num_nets=h.num_nets,
        vtx_ptr=vtx_ptr,
        nets=nets,
        vertex_weights=None if h.vertex_weights is None else h.vertex_weights.copy(),
        net_weights=None if h.net_weights is None else h.net_weights.copy(),
    )


def transpose_back(s: VertexStreamFile) -> HgrFile:
    net_ptr, pins = _transpose(s.num_vertices, s.num_nets, s.vtx_ptr, s.nets, np.int32)
    return HgrFile(
        num_nets=s.num_nets,
        num_vertices=s.num_vertices,
        net_ptr=net_ptr,
        pins=pins,
        net_weights=None if s.net_weights is None else s.net_weights.copy(),
        vertex_weights=None if s.vertex_weights is None else s.vertex_weights.copy(),
        fmt_code=s.fmt_code,
    )


def write_vstream(s: VertexStreamFile, path) -> None:
    """Header ``n m [fmt]``; fmt 10 puts the vertex weight first on each
    record line, fmt 1 appends ``m`` net-weight lines after the records."""
    fmt = s.fmt_code
    with open(path, "wb") as fh:
        fh.write((f"{s.num_vertices} {s.num_nets}" + (f" {fmt}" if fmt else "") + "\n").encode())
        _write_rows(fh, s.vtx_ptr, s.nets, s.vertex_weights)
        if s.net_weights is not None:
            _write_values(fh, s.net_weights)


def _dedupe(ids: list[int]) -> list[int]:
    if len(ids) == len(set(ids)):
        return ids
    return list(dict.fromkeys(ids))


class VertexStreamReader:
    """One-pass reader over a ``.vstream`` file.

    Holds one record at a time.  The handle can be iterated exactly once;
    a second consumer must open its own reader.
    """

    def __init__(self, path):
        self.path = os.fspath(path)
        self._fh = open(self.path, "r", encoding="ascii")
        self._lines = _content_lines(self._fh)
        _, n, m, fmt = _header(self._lines, self.path, "n m [fmt]")
        self.num_vertices, self.num_nets, self.fmt_code = n, m, fmt
        self.has_net_weights, self.has_vertex_weights = WEIGHT_FORMATS[fmt]
        self._started = False
        self.net_weights: Optional[np.ndarray] = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self) -> None:
        self._fh.close()

    def __iter__(self):
        if self._started:
            raise StreamError("stream already consumed; open a new reader for a second pass")
        self._started = True
        return self._records()

    def _records(self):
        n, m = self.num_vertices, self.num_nets
        vw = self.has_vertex_weights
        for v in range(n):
            try:
                lineno, toks = next(self._lines)
            except StopIteration:
                raise StreamError(f"{self.path}: truncated stream, expected {n} records, got {v}") from None
            vals = _ints(toks, lineno, self.path, "net id")
            w = 1
            if vw:
                if not vals:
                    raise FormatError("missing vertex weight", lineno, self.path)
                w, vals = vals[0], vals[1:]
                if w < 0:
                    raise FormatError(f"vertex weight {w} must be non-negative", lineno, self.path)
            for e in vals:
                if e < 1 or e > m:
                    raise FormatError(f"net id {e} out of range [1,{m}]", lineno, self.path)
            yield v, w, _dedupe([e - 1 for e in vals])
        if self.has_net_weights:
            weights = np.empty(m, dtype=np.int64)
            for e in range(m):
                try:
                    lineno, toks = next(self._lines)
                except StopIteration:
                    raise StreamError(f"{self.path}: truncated stream, missing net weights") from None
                vals = _ints(toks, lineno, self.path, "net weight")
                if len(vals) != 1 or vals[0] <= 0:
                    raise FormatError("net weight must be one positive integer", lineno, self.path)
                weights[e] = vals[0]
            self.net_weights = weights
        _check_trailing(self._lines, self.path)


def read_net_weights(path) -> Optional[np.ndarray]:
    """Net weights of a ``.vstream`` file (they trail the records)."""
    with VertexStreamReader(path) as r:
        if not r.has_net_weights:
            return None
        for _ in r:
            pass
        return r.net_weights


def stream_vertices(source) -> Iterator[tuple[int, int, list[int]]]:
    """Yield ``(vertex, weight, nets)`` in stream order, exactly once.

    ``source`` is a path (read lazily, one record in memory) or an in-memory
    :class:`VertexStreamFile`.  Net weights of fmt-1 files are not known
    until the records are exhausted; use :func:`read_net_weights`.
    """
    if isinstance(source, (VertexStreamFile, GraphStreamFile)):
        return iter(source)
    return iter(VertexStreamReader(source))


def parse_vstream(path) -> VertexStreamFile:
    with VertexStreamReader(path) as r:
        ptr = [0]
        nets: list[int] = []
        weights = []
        for _, w, ids in r:
            nets.extend(ids)
            ptr.append(len(nets))
            weights.append(w)
        n, m = r.num_vertices, r.num_nets
        return VertexStreamFile(
            num_vertices=n,
            num_nets=m,
            vtx_ptr=np.asarray(ptr, dtype=np.int64),
            nets=np.asarray(nets, dtype=np.int32),
            vertex_weights=np.asarray(weights, dtype=np.int64) if r.has_vertex_weights else None,
            net_weights=r.net_weights,
        )


def parse_metis_graph(path) -> GraphStreamFile:
    """Read a METIS graph; rejects self-loops, duplicate and asymmetric edges."""
    with open(path, "r", encoding="ascii") as fh:
        lines = _content_lines(fh)
        _, n, m, fmt = _header(lines, path, "n m [fmt]")
        has_ew, has_vw = WEIGHT_FORMATS[fmt]
        ptr = [0]
        adj: list[int] = []
        ew: list[int] = []
        vw: list[int] = []
        for u in range(1, n + 1):
            try:
                lineno, toks = next(lines)
            except StopIteration:
                raise FormatError(f"expected {n} adjacency lines, found {u - 1}", None, path) from None
            vals = _ints(toks, lineno, path)
            if has_vw:
                if not vals:
                    raise FormatError("missing vertex weight", lineno, path)
                vw.append(vals[0])
                vals = vals[1:]
            if has_ew:
                if len(vals) % 2:
                    raise FormatError("odd number of tokens in weighted adjacency", lineno, path)
                nbrs, wts = vals[0::2], vals[1::2]
                if any(w <= 0 for w in wts):
                    raise FormatError("edge weight must be positive", lineno, path)
                ew.extend(wts)
            else:
                nbrs = vals
            for x in nbrs:
                if x < 1 or x > n:
                    raise FormatError(f"neighbor id {x} out of range [1,{n}]", lineno, path)
                if x == u:
                    raise FormatError(f"self-loop on vertex {u}", lineno, path)
            if len(set(nbrs)) != len(nbrs):
                raise FormatError(f"duplicate neighbor of vertex {u}", lineno, path)
            adj.extend(x - 1 for x in nbrs)
            ptr.append(len(adj))
        _check_trailing(lines, path)
    g = GraphStreamFile(
        num_vertices=n,
        num_edges=m,
        adj_ptr=np.asarray(ptr, dtype=np.int64),
        adj=np.asarray(adj, dtype=np.int32),
        edge_weights=np.asarray(ew, dtype=np.int64) if has_ew else None,
        vertex_weights=np.asarray(vw, dtype=np.int64) if has_vw else None,
    )
    check_symmetric(g, path)
    return g


def check_symmetric(g: GraphStreamFile, path=None) -> None:
    n = g.num_vertices
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.adj_ptr))
    dst = g.adj.astype(np.int64)
    fwd = src * n + dst
    rev = dst * n + src
    order_f = np.argsort(fwd, kind="stable")
    order_r = np.argsort(rev, kind="stable")
    if not np.array_equal(fwd[order_f], rev[order_r]):
        missing = np.setdiff1d(fwd, rev, assume_unique=True)
        key = int(missing[0]) if missing.size else int(np.setdiff1d(rev, fwd)[0])
        u, v = divmod(key, n) if missing.size else divmod(key, n)[::-1]
        raise FormatError(f"asymmetric adjacency: {u + 1} lists {v + 1} but {v + 1} does not list {u + 1}",
                          None, path)
    if g.edge_weights is not None:
        if not np.array_equal(g.edge_weights[order_f], g.edge_weights[order_r]):
            raise FormatError("asymmetric edge weights", None, path)
    if len(g.adj) != 2 * g.num_edges:
        raise FormatError(f"header says {g.num_edges} edges but adjacency lists hold {len(g.adj) // 2}",
                          None, path)


def write_metis_graph(g: GraphStreamFile, path) -> None:
    fmt = _fmt(g.edge_weights is not None, g.vertex_weights is not None)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{g.num_vertices} {g.num_edges}" + (f" {fmt}" if fmt else "") + "\n")
        for u in range(g.num_vertices):
            lo, hi = g.adj_ptr[u], g.adj_ptr[u + 1]
            toks: list[int] = []
            if g.vertex_weights is not None:
                toks.append(int(g.vertex_weights[u]))
            nbrs = (g.adj[lo:hi] + 1).tolist()
            if g.edge_weights is not None:
                for x, w in zip(nbrs, g.edge_weights[lo:hi].tolist()):
                    toks += [x, w]
            else:
                toks += nbrs
            fh.write(" ".join(map(str, toks)) + "\n")


def graph_from_edges(n: int, edges, weights=None) -> GraphStreamFile:
    """Symmetric CSR from an undirected edge list (0-based, no duplicates)."""
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    order = np.lexsort((dst, src))
    counts = np.bincount(src, minlength=n)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    ew = None
    if weights is not None:
        w = np.asarray(weights, dtype=np.int64)
        ew = np.concatenate([w, w])[order]
    return GraphStreamFile(n, len(e), ptr, dst[order].astype(np.int32), ew)


def write_assignment(path, assignment) -> None:
    """One 0-based block id per line, in vertex order."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(map(str, np.asarray(assignment).tolist())))
        fh.write("\n")


def read_assignment(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        vals = []
        for lineno, toks in _content_lines(fh):
            if not toks:
                continue
            if len(toks) != 1:
                raise FormatError("expected one block id per line", lineno, path)
            vals.extend(_ints(toks, lineno, path, "block id"))
    return np.asarray(vals, dtype=np.int64)


# --- chunked vertex-stream reader -----------------------------------------

_PARSE_OK, _PARSE_TOKEN, _PARSE_RANGE, _PARSE_NEG_WEIGHT, _PARSE_NO_WEIGHT = range(5)


@njit(cache=True)
def _parse_records(buf, pos, final, max_records, m, want_vw, vbase, seen, ptr, nets, vw):
    """Parse whole record lines of ``buf[pos:]``.

    Stops at the last complete line unless ``final``.  Returns ``(pos,
    records, lines, status, bad_line)``; ``lines`` counts comment lines too
    so the caller can report file line numbers.  Repeated net ids within a
    record are dropped (``seen`` holds the last vertex that saw each net).
    """
    end = buf.shape[0]
    r = 0
    lines = 0
    npins = 0
    ptr[0] = 0
    while r < max_records:
        nl = pos
        while nl < end and buf[nl] != 10:
            nl += 1
        if nl == end and (not final or pos == end):
            break
        lines += 1
        if nl > pos and buf[pos] == 37:  # '%'
            pos = nl + 1
            continue
        v = vbase + r
        first = want_vw
        have_w = False
        i = pos
        while i < nl:
            c = buf[i]
            if c == 32 or c == 9 or c == 13:
                i += 1
                continue
            neg = c == 45
            if neg:
                i += 1
            val = 0
            digits = 0
            while i < nl and 48 <= buf[i] <= 57:
                val = val * 10 + (buf[i] - 48)
                digits += 1
                i += 1
            if digits == 0 or (i < nl and not (buf[i] == 32 or buf[i] == 9 or buf[i] == 13)):
                return pos, r, lines, _PARSE_TOKEN, lines
            if neg:
                val = -val
            if first:
                if val < 0:
                    return pos, r, lines, _PARSE_NEG_WEIGHT, lines
                vw[r] = val
                first = False
                have_w = True
                continue
            if val < 1 or val > m:
                return pos, r, lines, _PARSE_RANGE, lines
            e = val - 1
            if seen[e] != v:
                seen[e] = v
                nets[npins] = e
                npins += 1
        if want_vw and not have_w:
            return pos, r, lines, _PARSE_NO_WEIGHT, lines
        r += 1
        ptr[r] = npins
        pos = nl + 1
    return pos, r, lines, _PARSE_OK, 0


@dataclass
class VertexBatch:
    """Consecutive records ``first .. first + len(vtx_ptr) - 2`` of a stream."""

    first: int
    vtx_ptr: np.ndarray
    nets: np.ndarray
    vertex_weights: Optional[np.ndarray] = None

    @property
    def num_vertices(self) -> int:
        return len(self.vtx_ptr) - 1


class VertexStreamBatches:
    """One-pass reader yielding :class:`VertexBatch` objects of up to
    ``chunk_bytes`` of input each; only one chunk is held in memory.

    Same format rules and single-consumer contract as
    :class:`VertexStreamReader`.  ``net_weights`` is filled in once the
    records are exhausted (fmt 1 and 11 keep them at the end of the file).
    """

    def __init__(self, path, chunk_bytes: int = 1 << 22):
        if chunk_bytes < 1:
            raise ValueError("chunk_bytes must be positive")
        self.path = os.fspath(path)
        self.chunk_bytes = chunk_bytes
        self._fh = open(self.path, "rb")
        self._lineno = 0
        while True:
            raw = self._fh.readline()
            if not raw:
                raise FormatError("malformed header, file is empty", None, self.path)
            self._lineno += 1
            text = raw.decode("ascii", errors="replace")
            if text.startswith("%") or not text.split():
                continue
            _, n, m, fmt = _header(iter([(self._lineno, text.split())]), self.path, "n m [fmt]")
            break
        self.num_vertices, self.num_nets, self.fmt_code = n, m, fmt
        self.has_net_weights, self.has_vertex_weights = WEIGHT_FORMATS[fmt]
        self.net_weights: Optional[np.ndarray] = None
        self._started = False

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self) -> None:
        self._fh.close()

    def __iter__(self) -> Iterator[VertexBatch]:
        if self._started:
            raise StreamError("stream already consumed; open a new reader for a second pass")
        self._started = True
        return self._batches()

    def _fail(self, status, line):
        msg = {
            _PARSE_TOKEN: "non-numeric net id",
            _PARSE_RANGE: f"net id out of range [1,{self.num_nets}]",
            _PARSE_NEG_WEIGHT: "vertex weight must be non-negative",
            _PARSE_NO_WEIGHT: "missing vertex weight",
        }[status]
        raise FormatError(msg, self._lineno + line, self.path)

    def _batches(self):
        n, m = self.num_vertices, self.num_nets
        seen = np.full(m, -1, dtype=np.int64)
        done = 0
        tail = b""
        eof = False
        while done < n:
            chunk = self._fh.read(self.chunk_bytes)
            eof = not chunk
            buf = np.frombuffer(tail + chunk, dtype=np.uint8)
            # every id takes a digit and a separator, every record a newline
            ptr = np.empty(buf.size + 2, dtype=np.int64)
            nets = np.empty(buf.size // 2 + 1, dtype=np.int32)
            vw = np.empty(buf.size + 1 if self.has_vertex_weights else 0, dtype=np.int64)
            pos, r, lines, status, bad = _parse_records(
                buf, 0, eof, n - done, m, self.has_vertex_weights, done, seen, ptr, nets, vw)
            if status != _PARSE_OK:
                self._fail(status, bad)
            self._lineno += lines
            tail = bytes(buf[pos:])
            if r:
                yield VertexBatch(
                    done, ptr[:r + 1].copy(), nets[:ptr[r]].copy(),
                    vw[:r].copy() if self.has_vertex_weights else None,
                )
                done += r
            if eof and done < n:
                raise StreamError(f"{self.path}: truncated stream, expected {n} records, got {done}")
        rest = (tail + self._fh.read()).decode("ascii", errors="replace")
        lines = ((self._lineno + i + 1, ln.split()) for i, ln in enumerate(rest.split("\n"))
                 if not ln.startswith("%"))
        if self.has_net_weights:
            weights = np.empty(m, dtype=np.int64)
            for e in range(m):
                nxt = next(lines, None)
                if nxt is None:
                    raise StreamError(f"{self.path}: truncated stream, missing net weights")
                lineno, toks = nxt
                vals = _ints(toks, lineno, self.path, "net weight")
                if len(vals) != 1 or vals[0] <= 0:
                    raise FormatError("net weight must be one positive integer", lineno, self.path)
                weights[e] = vals[0]
            self.net_weights = weights
        _check_trailing(lines, self.path)
