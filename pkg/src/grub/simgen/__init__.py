from .batch import BatchResult, aggregate, run_batch
from .instances import (
    BanditInstance,
    GraphSpec,
    InstanceManifest,
    generate_graph,
    generate_means,
    read_means,
    rng_stream,
    sample_reward,
    write_means,
)

__all__ = [
    "BanditInstance",
    "BatchResult",
    "GraphSpec",
    "InstanceManifest",
    "aggregate",
    "generate_graph",
    "generate_means",
    "read_means",
    "rng_stream",
    "run_batch",
    "sample_reward",
    "write_means",
]
