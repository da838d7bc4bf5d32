"""Budgeted online kernel classification for streams of labeled graphs."""

from .budget import FScoreTracker, Policy, PolicyConfig, batch_fscore
from .evaluation import EvalConfig, EvalRecord, RunResult, Summary, auroc, balanced_accuracy, run_prequential
from .graph import Graph, GraphError, LabeledExample, bfs_dag, bfs_distances, canonical_subtree_string
from .kernels import FeatureIndex, KernelConfig, SparseVector, features, gram_matrix, kernel
from .learners import DualModel, LearnerConfig, MixedModel, PrimalModel, UpdateOutcome, make_model
from .stream import (
    DriftStreamConfig,
    StreamFormatError,
    StreamSegmentConfig,
    generate_drift_stream,
    parse_stream,
    read_stream,
    write_stream,
)

__version__ = "0.1.0"

__all__ = [
    "DriftStreamConfig",
    "DualModel",
    "EvalConfig",
    "EvalRecord",
    "FScoreTracker",
    "FeatureIndex",
    "Graph",
    "GraphError",
    "KernelConfig",
    "LabeledExample",
    "LearnerConfig",
    "MixedModel",
    "Policy",
    "PolicyConfig",
    "PrimalModel",
    "RunResult",
    "SparseVector",
    "StreamFormatError",
    "StreamSegmentConfig",
    "Summary",
    "UpdateOutcome",
    "auroc",
    "balanced_accuracy",
    "batch_fscore",
    "bfs_dag",
    "bfs_distances",
    "canonical_subtree_string",
    "features",
    "generate_drift_stream",
    "gram_matrix",
    "kernel",
    "make_model",
    "parse_stream",
    "read_stream",
    "run_prequential",
    "write_stream",
]
