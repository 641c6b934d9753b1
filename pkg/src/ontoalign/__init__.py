"""Cross-lingual ontology alignment toolkit.

Pipeline: parse RDF/OWL ontologies, derive structural context, verbalize
entities into natural-language descriptions, embed the descriptions into
a shared vector space, and extract high-confidence one-to-one
correspondences via cosine similarity, mutual top-k agreement, optimal
assignment, and type filtering. Includes an evaluation harness against
gold alignments and a product-quantization index for large inputs.
"""

from .closure import InferredOntology, bare_closure, compute_closure
from .embedding import (
    EmbeddingError,
    EmbeddingMatrix,
    MissingVector,
    ProviderConfig,
    ProviderKind,
    ServiceError,
    ServiceTimeout,
    embed_batch,
    load_vector_file,
    normalize_rows,
)
from .evaluation import (
    EmptyGold,
    GoldAlignment,
    GoldFormat,
    Metrics,
    MissingEntity,
    UnknownArm,
    ablation_jsonl,
    check_arms,
    format_metrics_table,
    load_gold,
    run_ablation,
    score,
    score_ranked,
    set_metrics,
)
from .matching import (
    AlignmentCell,
    AlignmentSet,
    AnnConfig,
    MatcherConfig,
    SimilarityMatrix,
    align,
    align_scored,
    hungarian_assign,
    mutual_topk,
    similarity_matrix,
    threshold_filter,
    type_filter,
)
from .model import Entity, EntityKind, Iri, Ontology, get_labels, local_name, split_local_name
from .oaei import MalformedAlignment, read_alignment_xml, write_alignment_xml
from .parsing import (
    MalformedSyntax,
    ParseError,
    RdfFormat,
    UnsupportedFeature,
    parse_ontology,
    parse_ontology_file,
    serialize_ntriples,
)
from .pipeline import (
    ABLATION_ARMS,
    PipelineConfig,
    PipelineResult,
    SideConfig,
    apply_arm,
    run_pipeline,
)
from .pq import PqIndex, build_pq, load_pq, query_topk, save_pq
from .verbalize import Template, Verbalization, VerbalizerConfig, verbalize, verbalize_all

__all__ = [
    "ABLATION_ARMS",
    "AlignmentCell",
    "AlignmentSet",
    "AnnConfig",
    "EmbeddingError",
    "EmbeddingMatrix",
    "EmptyGold",
    "Entity",
    "EntityKind",
    "GoldAlignment",
    "GoldFormat",
    "InferredOntology",
    "Iri",
    "MalformedAlignment",
    "MalformedSyntax",
    "MatcherConfig",
    "Metrics",
    "MissingEntity",
    "MissingVector",
    "Ontology",
    "ParseError",
    "PipelineConfig",
    "PipelineResult",
    "PqIndex",
    "ProviderConfig",
    "ProviderKind",
    "RdfFormat",
    "ServiceError",
    "ServiceTimeout",
    "SideConfig",
    "SimilarityMatrix",
    "Template",
    "UnknownArm",
    "UnsupportedFeature",
    "Verbalization",
    "VerbalizerConfig",
    "ablation_jsonl",
    "align",
    "align_scored",
    "apply_arm",
    "bare_closure",
    "build_pq",
    "check_arms",
    "compute_closure",
    "embed_batch",
    "format_metrics_table",
    "get_labels",
    "hungarian_assign",
    "load_gold",
    "load_pq",
    "load_vector_file",
    "local_name",
    "mutual_topk",
    "normalize_rows",
    "parse_ontology",
    "parse_ontology_file",
    "query_topk",
    "read_alignment_xml",
    "run_ablation",
    "run_pipeline",
    "save_pq",
    "score",
    "score_ranked",
    "serialize_ntriples",
    "set_metrics",
    "similarity_matrix",
    "split_local_name",
    "threshold_filter",
    "type_filter",
    "verbalize",
    "verbalize_all",
    "write_alignment_xml",
]

__version__ = "0.1.0"
