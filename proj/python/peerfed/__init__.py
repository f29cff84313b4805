"""Peer-to-peer federated learning simulator with pluggable aggregation strategies."""

from ._core import (
    Dataset,
    ParamSet,
    Partition,
    ParticipantStats,
    PeerfedError,
    RngStream,
    Strategy,
    Topology,
    __version__,
    aggregate,
    bce_loss,
    compute_contribution,
    compute_weights,
    confusion,
    forward,
    init_params,
    load_dataset,
    partition,
    run_federation,
    train_local,
)

__all__ = [
    "Dataset",
    "ParamSet",
    "Partition",
    "ParticipantStats",
    "PeerfedError",
    "RngStream",
    "Strategy",
    "Topology",
    "__version__",
    "aggregate",
    "bce_loss",
    "compute_contribution",
    "compute_weights",
    "confusion",
    "forward",
    "init_params",
    "load_dataset",
    "partition",
    "run_federation",
    "train_local",
]
