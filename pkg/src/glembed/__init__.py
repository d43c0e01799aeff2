"""Graphlet-based network representations, ONMTF embeddings, and evaluation.

The pipeline mirrors its modules: load a graph (`graph`), count graphlets
(`graphlets`), build a log-ratio representation matrix (`representations`),
measure homophily (`homophily`), factorize into an embedding space
(`factorization`), quantify linear separability (`separability`), run
downstream tasks (`downstream`), and sweep synthetic graphs (`synth`).
`glembed.cli` ties it together behind a config file.
"""
from .graph import (
    Graph,
    LabelSet,
    largest_connected_component,
    load_edge_list,
    load_labels,
    save_edge_list,
)
from .graphlets import (
    Gdv,
    GraphletAdjacency,
    GraphletCensus,
    NON_REDUNDANT,
    OrbitWeights,
    count_orbits,
    gdv_distance,
    gdv_similarity_matrix,
    graphlet_adjacency,
    graphlet_census,
    graphlet_coverage,
)
from .representations import (
    MatrixRepresentation,
    adjacency_representation,
    deepgraphlet_matrix,
    deepwalk_matrix,
    gdv_ppmi_matrix,
    gpmi_matrix,
    line_matrix,
)
from .homophily import (
    HomophilyReport,
    edge_homophily,
    gsi,
    homophily_report,
    multilabel_share,
    node_homophily,
    weighted_edge_homophily,
    weighted_node_homophily,
)
from .factorization import (
    EmbeddingSpace,
    FactorizationError,
    default_dimension,
    embedding_vectors,
    factorize,
    save_embedding_space,
    svd_initialize,
)
from .separability import (
    ClassificationResult,
    SeparabilityVerdict,
    classify_separability,
    kfold_f1,
    mann_whitney_u,
    pearson,
    train_knn,
    train_linear,
    train_nonlinear,
    weighted_f1,
)
from .downstream import (
    EnrichmentResult,
    bh_correct,
    cosine_auroc,
    hypergeom_p,
    kmeans_clusters,
    module_discovery,
)
from .synth import (
    PartitionSpec,
    correlate_sweep,
    random_partition_graph,
    sweep,
)
from .config import RunConfig, validate_config
from .pipeline import build_representation, run_pipeline

__version__ = "0.1.0"
