"""One-pass streaming hypergraph partitioning (FREIGHT) with baselines,
metrics, file tooling and a benchmark harness."""

from .baselines import MinMaxN2P, NetToBlocksIndex, hashing_assign, hashing_partition, minmax_n2p_partition
from .freight import (CONNECTIVITY, CUTNET, FreightPartitioner, InfeasibleError, NetTracker,
                      PartitionResult, ScoreParams, compute_alpha, compute_lmax, partition_graph,
                      partition_stream, select_block, weighted_penalty)
from .io import (FormatError, GraphStreamFile, HgrFile, StreamError, VertexStreamBatches,
                 VertexStreamFile, VertexStreamReader, parse_hgr, parse_metis_graph, parse_vstream,
                 stream_vertices, transpose_back, transpose_to_stream)
from .metrics import EvaluationReport, evaluate, evaluate_graph
from .registry import BlockRegistry
from .streaming import partition_file

__all__ = [
    "BlockRegistry", "CONNECTIVITY", "CUTNET", "EvaluationReport", "FormatError", "FreightPartitioner",
    "GraphStreamFile", "HgrFile", "InfeasibleError", "MinMaxN2P", "NetToBlocksIndex", "NetTracker",
    "PartitionResult", "ScoreParams", "StreamError", "VertexStreamBatches", "VertexStreamFile",
    "VertexStreamReader", "compute_alpha", "compute_lmax", "evaluate", "evaluate_graph",
    "hashing_assign", "hashing_partition", "minmax_n2p_partition", "parse_hgr", "parse_metis_graph",
    "parse_vstream", "partition_file", "partition_graph", "partition_stream", "select_block",
    "stream_vertices", "transpose_back", "transpose_to_stream", "weighted_penalty",
]
