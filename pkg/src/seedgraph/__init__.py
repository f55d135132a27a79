"""Seed-based retrieval of research publications over a citation network.

Given a handful of known-relevant publications (seeds), the engine ranks
the rest of the corpus by citation-network relatedness (direct citations,
bibliographic coupling, co-citation), optionally blended with lexical
similarity, and ships an evaluation harness that replays the process
against review reference lists.
"""

from seedgraph.corpus import (
    CorpusGraph,
    PublicationRecord,
    ReviewCase,
    ReviewCriteria,
    build_graph,
    derive_seed,
    parse_citations,
    parse_metadata,
    sample_seeds,
    select_reviews,
)
from seedgraph.citescore import Approach, ScoreMap, bc_scores, cc_scores, dc_scores
from seedgraph.textsim import TermIndex, build_index, ra_pair_score, ra_scores, tokenize
from seedgraph.fusion import (
    RankedList,
    combine_all,
    combine_citation,
    rank,
    rescale_to_range,
)
from seedgraph.config import EvalConfig, ExperimentConfig, load_manifest
from seedgraph.evalharness import export_audit, export_outputs, run_experiment
from seedgraph.service import Overrides, RetrievalEngine, create_app
from seedgraph.synthetic import generate_corpus

__version__ = "0.1.0"

__all__ = [
    "Approach",
    "CorpusGraph",
    "EvalConfig",
    "ExperimentConfig",
    "Overrides",
    "PublicationRecord",
    "RankedList",
    "RetrievalEngine",
    "ReviewCase",
    "ReviewCriteria",
    "ScoreMap",
    "TermIndex",
    "bc_scores",
    "build_graph",
    "build_index",
    "cc_scores",
    "combine_all",
    "combine_citation",
    "create_app",
    "dc_scores",
    "derive_seed",
    "export_audit",
    "export_outputs",
    "generate_corpus",
    "load_manifest",
    "parse_citations",
    "parse_metadata",
    "ra_pair_score",
    "ra_scores",
    "rank",
    "rescale_to_range",
    "run_experiment",
    "sample_seeds",
    "select_reviews",
    "tokenize",
]
