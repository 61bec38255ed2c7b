"""Transport network dynamics and hypergraph analytics."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ConfigError,
    IoError,
    PgmError,
    SolverError,
    SolverConfig,
    analyze_run,
    convergence_time,
    default_config,
    generate_problem,
    graph_from_field,
    hypergraph_from_graph,
    hypergraph_properties,
    run_batch,
    run_dmk,
    run_solve,
    skeleton,
    triangulate_unit_square,
)

__all__ = [
    "ConfigError",
    "IoError",
    "PgmError",
    "SolverError",
    "SolverConfig",
    "analyze_run",
    "convergence_time",
    "default_config",
    "generate_problem",
    "graph_from_field",
    "hypergraph_from_graph",
    "hypergraph_properties",
    "run_batch",
    "run_dmk",
    "run_solve",
    "skeleton",
    "triangulate_unit_square",
]
