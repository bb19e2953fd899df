"""Entity similarity from relevance-ranked feature lists."""

__version__ = "0.1.0"

from .clustering import LINKAGES, Dendrogram, Merge, Partition, agglomerate, cut
from .errors import (
    CacheMissError,
    ConfigError,
    CycleError,
    DataError,
    DuplicateFeatureError,
    NonConjointError,
    RankedSimError,
    ResultsParseError,
    TransportError,
)
from .evaluation import (
    adjusted_rand_index,
    confusion_matrix,
    dcg,
    ndcg_at_k,
    rand_index,
    ranking_ndcg,
)
from .extraction import (
    CategoryHierarchy,
    ProfileHistogram,
    QueryTemplate,
    filter_min_features,
    histogram_to_ranked_list,
    query_based_extract,
    rollup_categories,
    stem_extract,
)
from .graph import FeatureGraph, FeatureMarker, ScsParams, count_paths, graph_explore_features, scs
from .metrics import (
    Metric,
    RboParams,
    WlmInput,
    agreement_at_depth,
    average_overlap,
    cosine,
    jaccard,
    kendall_tau,
    rank_similars,
    rbo,
    similarity_matrix,
    spearman_rho,
    wlm_distance,
    wlm_relatedness,
)
from .model import (
    GroundTruth,
    RankedFeatureList,
    SimilarityMatrix,
    TieBreak,
    build_ranked_list,
    to_distance,
)
from .sparql import BindingsTable, EndpointConfig, SparqlClient, execute_select, parse_results

__all__ = [name for name in dir() if not name.startswith("_")]
