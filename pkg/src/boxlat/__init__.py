"""Probabilistic box-lattice concept embeddings.

Concepts are axis-aligned boxes inside a base measure's support; meets,
joins, and measure volumes give joint and conditional probabilities.
Training fits box parameters to pairwise conditional and unary marginal
targets with analytic gradients; utilities cover multi-variable queries
with negation, DAG extraction from asymmetric score tables, hierarchy
dataset pipelines, evaluation metrics, and SVG rendering.
"""

from .boxes import (
    BOTTOM,
    Box,
    LatticeElement,
    contains,
    correlation,
    join,
    log_volume,
    meet,
    volume,
)
from .cpd import (
    CpdTable,
    load_cpd,
    load_marginals_tsv,
    load_matrix_tsv,
    save_cpd,
    save_marginals_tsv,
    save_matrix_tsv,
)
from .dag import (
    CYCLE_GAUSSIANS,
    DiagGaussian,
    Digraph,
    asymmetrize,
    gaussian_kl,
    is_acyclic,
    kl_graph,
    kl_matrix,
    oe_energy_matrix,
    perturb_ties,
)
from .datasets import (
    Hierarchy,
    ToySpec,
    corrupt_negatives,
    cpd_examples,
    default_toy,
    leaf_cooccurrence_cpd,
    load_edges_tsv,
    load_soft_edges_tsv,
    node_marginals,
    parse_toy,
    prune_cpd,
    random_hierarchy,
    save_edges_tsv,
    save_soft_edges_tsv,
    split_closure,
    toy_dataset,
    transitive_closure,
)
from .errors import (
    BoxlatError,
    CycleError,
    DataFormatError,
    DegenerateMarginal,
    DimensionMismatch,
    NullEvidence,
    SupportViolation,
    TrainingDiverged,
    UnionCapExceeded,
    UnknownConcept,
)
from .measures import (
    DEFAULT_EXPONENTIAL_CLIP,
    ProductMeasure,
    cone_to_box,
    full_box,
)
from .metrics import (
    calibration_bins,
    classify_accuracy,
    pair_scores,
    prob_metrics,
    sweep_threshold,
)
from .model import FORMAT_VERSION, Model
from .plotting import render_svg
from .poe import (
    Cone,
    box_covariance,
    cone_meet,
    poe_covariance,
    poe_joint,
    poe_prob,
    realize,
)
from .queries import (
    UNION_CAP,
    Query,
    conditional,
    conditional_query,
    joint,
    query_prob,
    union_volume,
)
from .training import (
    InitSpec,
    TrainConfig,
    TrainExample,
    fit,
    init_params,
    loss,
    pair_log_prob,
    project,
    surrogate_gap,
)

__version__ = "0.1.0"

__all__ = [
    "BOTTOM",
    "Box",
    "BoxlatError",
    "CYCLE_GAUSSIANS",
    "Cone",
    "CpdTable",
    "CycleError",
    "DEFAULT_EXPONENTIAL_CLIP",
    "DataFormatError",
    "DegenerateMarginal",
    "DiagGaussian",
    "Digraph",
    "DimensionMismatch",
    "FORMAT_VERSION",
    "Hierarchy",
    "InitSpec",
    "LatticeElement",
    "Model",
    "NullEvidence",
    "ProductMeasure",
    "Query",
    "SupportViolation",
    "ToySpec",
    "TrainConfig",
    "TrainExample",
    "TrainingDiverged",
    "UNION_CAP",
    "UnionCapExceeded",
    "UnknownConcept",
    "asymmetrize",
    "box_covariance",
    "calibration_bins",
    "classify_accuracy",
    "conditional",
    "conditional_query",
    "cone_meet",
    "cone_to_box",
    "contains",
    "correlation",
    "corrupt_negatives",
    "cpd_examples",
    "default_toy",
    "fit",
    "full_box",
    "gaussian_kl",
    "init_params",
    "is_acyclic",
    "join",
    "joint",
    "kl_graph",
    "kl_matrix",
    "leaf_cooccurrence_cpd",
    "load_cpd",
    "load_edges_tsv",
    "load_marginals_tsv",
    "load_matrix_tsv",
    "load_soft_edges_tsv",
    "log_volume",
    "loss",
    "meet",
    "node_marginals",
    "oe_energy_matrix",
    "pair_log_prob",
    "pair_scores",
    "parse_toy",
    "perturb_ties",
    "poe_covariance",
    "poe_joint",
    "poe_prob",
    "prob_metrics",
    "project",
    "prune_cpd",
    "query_prob",
    "random_hierarchy",
    "realize",
    "render_svg",
    "save_cpd",
    "save_edges_tsv",
    "save_marginals_tsv",
    "save_matrix_tsv",
    "save_soft_edges_tsv",
    "split_closure",
    "surrogate_gap",
    "sweep_threshold",
    "toy_dataset",
    "transitive_closure",
    "union_volume",
    "volume",
]
