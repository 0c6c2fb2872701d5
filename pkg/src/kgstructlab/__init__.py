"""Structural analysis toolkit for knowledge-graph link prediction.

Samples connected subgraphs, extracts structural indices, trains and
evaluates embedding models from scratch, and quantifies how structure drives
performance through correlation, variance-based sensitivity, and local
score explanations.
"""

from .graph import (
    KnowledgeGraph,
    LoadReport,
    SubgraphSample,
    Triple,
    TripleParseError,
    induce_subgraph,
    load_graph,
    save_graph,
)
from .sampler import SamplerParams, candidate_set, generate_corpus, sample_subgraph
from .features import (
    CATEGORY_ORDER,
    FEATURE_NAMES,
    RelationCategory,
    StructuralFeatures,
    category_distribution,
    classify_relations,
    compute_features,
    gini,
    global_clustering,
    graph_density,
    scc_count,
)
from .seeding import derive_seed, derived_rng

__version__ = "0.1.0"
