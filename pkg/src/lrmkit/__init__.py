"""LRM-trees and what they buy: adaptive sorting, compressed RMQ indices and
compressed permutations."""

__version__ = "0.1.0"

from .bitseq import CompressedBitSeq, PlainBitSeq, SizeReport
from .bp_forest import BPForest
from .counters import CountingArray, OpCounter
from .errors import CapabilityError, ContractError, LRMKitError, RangeError, StructureError
from .lrm import LRMTree, build_lrm_tree, psv, run_heads
from .partition_sort import (
    MergeTree,
    Partition,
    SortStats,
    entropy,
    huffman_merge_plan,
    lrm_partition,
    measures,
    merge_sort_partition,
    sort_lrm,
    sort_runs_baseline,
)
from .permcode import PermCode, encode
from .rmq import (
    PlainRMQIndex,
    RunsRMQIndex,
    StrictRunsRMQIndex,
    build_plain,
    build_runs,
    build_strict_runs,
    query_plain,
    query_runs,
    query_strict_runs,
    tree_entropy_bits,
)

__all__ = [
    "BPForest",
    "CapabilityError",
    "CompressedBitSeq",
    "ContractError",
    "CountingArray",
    "LRMKitError",
    "LRMTree",
    "MergeTree",
    "OpCounter",
    "Partition",
    "PermCode",
    "PlainBitSeq",
    "PlainRMQIndex",
    "RangeError",
    "RunsRMQIndex",
    "SizeReport",
    "SortStats",
    "StrictRunsRMQIndex",
    "StructureError",
    "build_lrm_tree",
    "build_plain",
    "build_runs",
    "build_strict_runs",
    "encode",
    "entropy",
    "huffman_merge_plan",
    "lrm_partition",
    "measures",
    "merge_sort_partition",
    "psv",
    "query_plain",
    "query_runs",
    "query_strict_runs",
    "run_heads",
    "sort_lrm",
    "sort_runs_baseline",
    "tree_entropy_bits",
]
