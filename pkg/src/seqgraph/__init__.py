"""Graph-style co-occurrence features for symbolic sequences.

A sequence over a finite token alphabet is mapped to a dense token-by-token
association matrix: each ordered pair gets the normalized sum of
exponentially decayed position gaps over all of its occurrences. The matrix
doubles as a weighted directed graph over the alphabet and, vectorized, as a
fixed-width embedding for clustering, classification and search.
"""

from .alphabet import AlphabetIndex, Sequence
from .errors import IngestionError, StateError
from .formats import (
    CorpusFormat,
    read_alphabet_file,
    read_features_csv,
    read_labels_csv,
    read_sequences,
    write_dot,
    write_features_csv,
    write_labels_csv,
)
from .mining import (
    KMeansResult,
    PcaModel,
    SearchConfig,
    SearchResult,
    davies_bouldin,
    kmeans,
    manhattan,
    nn_classify,
    nn_search,
    pca_fit,
    pca_transform,
    random_search,
    spectral_alphabet_clusters,
)
from .moments import (
    ClosedFormTerms,
    MomentEstimate,
    PatternParams,
    SeparationCurve,
    closed_form_terms,
    delta_separation,
    expected_psi,
    monte_carlo_psi,
    simulate_pattern_sequence,
    variance_psi,
)
from .synthetic import (
    ClusterSpec,
    LabeledCorpus,
    clustering_f1,
    gen_bicluster_corpus,
    gen_clustered_corpus,
    ngram_columns,
    ngram_features,
    same_cluster_recall,
)
from .transform import (
    Algorithm,
    AssociationMatrix,
    Directionality,
    FeatureTable,
    Normalization,
    TransformConfig,
    decay_effect,
    make_undirected,
    pair_columns,
    pair_instances,
    transform,
    transform_corpus,
    vectorize,
)

__version__ = "0.1.0"

__all__ = [
    "AlphabetIndex",
    "Algorithm",
    "AssociationMatrix",
    "ClosedFormTerms",
    "ClusterSpec",
    "CorpusFormat",
    "Directionality",
    "FeatureTable",
    "IngestionError",
    "KMeansResult",
    "LabeledCorpus",
    "MomentEstimate",
    "Normalization",
    "PatternParams",
    "PcaModel",
    "SearchConfig",
    "SearchResult",
    "SeparationCurve",
    "Sequence",
    "StateError",
    "TransformConfig",
    "clustering_f1",
    "closed_form_terms",
    "davies_bouldin",
    "decay_effect",
    "delta_separation",
    "expected_psi",
    "gen_bicluster_corpus",
    "gen_clustered_corpus",
    "kmeans",
    "make_undirected",
    "manhattan",
    "monte_carlo_psi",
    "ngram_columns",
    "ngram_features",
    "nn_classify",
    "nn_search",
    "pair_columns",
    "pair_instances",
    "pca_fit",
    "pca_transform",
    "random_search",
    "read_alphabet_file",
    "read_features_csv",
    "read_labels_csv",
    "read_sequences",
    "same_cluster_recall",
    "simulate_pattern_sequence",
    "spectral_alphabet_clusters",
    "transform",
    "transform_corpus",
    "variance_psi",
    "vectorize",
    "write_dot",
    "write_features_csv",
    "write_labels_csv",
]
