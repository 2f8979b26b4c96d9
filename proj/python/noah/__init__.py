"""Attributed-hypergraph generation, fitting, and interplay metrics."""

from ._core import (
    AttributedHypergraph,
    CoreFringePartition,
    EpochRecord,
    FitConfig,
    FitTrace,
    MetricReport,
    NoahParams,
    StructuralReport,
    affinity_ratio,
    affinity_score,
    all_core_partition,
    baseline_score,
    degree_vector,
    fit,
    generate,
    higher_order_hyperedge_entropy,
    hyperedge_entropy,
    hypercl_generate,
    interplay_discrepancy,
    load_hypergraph,
    load_params,
    minimal_hitting_set,
    node_homophily,
    save_attributes,
    save_edges,
    save_params,
    size_vector,
    structural_report,
    total_loss,
    umhs_partition,
    wasserstein1,
)

__all__ = [
    "AttributedHypergraph",
    "CoreFringePartition",
    "EpochRecord",
    "FitConfig",
    "FitTrace",
    "MetricReport",
    "NoahParams",
    "StructuralReport",
    "affinity_ratio",
    "affinity_score",
    "all_core_partition",
    "baseline_score",
    "degree_vector",
    "fit",
    "generate",
    "higher_order_hyperedge_entropy",
    "hyperedge_entropy",
    "hypercl_generate",
    "interplay_discrepancy",
    "load_hypergraph",
    "load_params",
    "minimal_hitting_set",
    "node_homophily",
    "save_attributes",
    "save_edges",
    "save_params",
    "size_vector",
    "structural_report",
    "total_loss",
    "umhs_partition",
    "wasserstein1",
]
