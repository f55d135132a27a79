"""Interactive retrieval engine and its HTTP face.

One engine method does the scoring for both the command line and the
HTTP service, so a request with the same seeds and tie seed produces the
same ranking no matter which door it came through. Responses always carry
the per-component scores next to the fused score — the point of comparing
approaches is seeing why something ranked where it did.
"""

from __future__ import annotations

import dataclasses
import threading
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field, field_validator

import seedgraph
from seedgraph.citescore import Approach, ScoreMap, bc_scores, cc_scores, dc_scores
from seedgraph.config import ScoringConfig, TextConfig
from seedgraph.corpus import CorpusGraph, UnknownSeedError
from seedgraph.fusion import combine_all, combine_citation, rank
from seedgraph.textsim import TermIndex, build_index, ra_scores

DEFAULT_TIE_SEED = 0
DEFAULT_MAX_SEEDS = 50

_APPROACH_DESCRIPTIONS = {
    Approach.DC: "direct citations between candidate and seeds, both directions",
    Approach.BC: "references shared with the seeds (coupling strength >= cutoff)",
    Approach.CC: "third parties citing candidate and seed together (>= cutoff)",
    Approach.RA: "lexical similarity over titles, abstracts, and headings",
    Approach.DC_BC_CC: "weighted blend of the three citation scores",
    Approach.DC_BC_CC_RA: "citation blend plus range-rescaled lexical score",
}


@dataclass(frozen=True)
class Overrides:
    """Per-request tweaks to cutoffs, blend weights, and pooling."""

    bc_min_score: int | None = None
    cc_min_score: int | None = None
    dc_weight: float | None = None
    bc_weight: float | None = None
    cc_weight: float | None = None
    pool_per_seed: int | None = None


@dataclass(frozen=True)
class RetrievedItem:
    rank: int
    pub_id: int
    title: str
    year: int | None
    score: float
    components: dict[str, float]


@dataclass(frozen=True)
class RetrievalResult:
    approach: Approach
    tie_seed: int
    k: int
    total_candidates: int
    items: list[RetrievedItem]


class RetrievalEngine:
    """Seed-based retrieval over one loaded corpus.

    The graph is immutable; the text index is built lazily on the first
    lexical request and shared afterwards. Safe for concurrent use.
    """

    def __init__(
        self,
        graph: CorpusGraph,
        scoring: ScoringConfig | None = None,
        text: TextConfig | None = None,
    ) -> None:
        self.graph = graph
        self.scoring = scoring or ScoringConfig()
        self.text = text or TextConfig()
        self._index: TermIndex | None = None
        self._index_lock = threading.Lock()

    @classmethod
    def from_snapshot(cls, path: str, **kwargs) -> "RetrievalEngine":
        return cls(CorpusGraph.load(path), **kwargs)

    def index(self) -> TermIndex:
        with self._index_lock:
            if self._index is None:
                self._index = build_index(
                    self.graph.iter_records(), self.text.params()
                )
            return self._index

    def _resolve_seeds(self, seed_pub_ids: list[int]) -> list[int]:
        unknown = [pid for pid in seed_pub_ids if not self.graph.has_pub_id(pid)]
        if unknown:
            err = UnknownSeedError(
                f"unknown seed publication ids: {sorted(set(unknown))}"
            )
            err.offenders = sorted(set(unknown))
            raise err
        return sorted({self.graph.internal_index(pid) for pid in seed_pub_ids})

    def retrieve(
        self,
        seed_pub_ids: list[int],
        approach: Approach = Approach.DC_BC_CC_RA,
        k: int = 50,
        tie_seed: int = DEFAULT_TIE_SEED,
        overrides: Overrides | None = None,
    ) -> RetrievalResult:
        """Rank the corpus against the given seeds and return the top k.

        Every returned item carries all four component scores (the
        lexical one raw, before any rescaling) besides the score of the
        requested approach. Seeds themselves are excluded.
        """
        if not seed_pub_ids:
            raise ValueError("at least one seed is required")
        if k < 1:
            raise ValueError("k must be >= 1")
        scoring, text = self.scoring, self.text
        if overrides is not None:
            patch = {
                key: value
                for key, value in dataclasses.asdict(overrides).items()
                if value is not None and key != "pool_per_seed"
            }
            scoring = dataclasses.replace(scoring, **patch)
            if overrides.pool_per_seed is not None:
                text = dataclasses.replace(
                    text, pool_per_seed=overrides.pool_per_seed
                )

        seeds = self._resolve_seeds(seed_pub_ids)
        excluded = frozenset(seeds)
        graph = self.graph

        dc = dc_scores(graph, seeds, excluded)
        bc = bc_scores(graph, seeds, excluded, scoring.bc_min_score)
        cc = cc_scores(graph, seeds, excluded, scoring.cc_min_score)
        ra = ra_scores(self.index(), seeds, excluded, text.pool_per_seed)
        citation = combine_citation(
            dc, bc, cc, weights=scoring.weights, mode=scoring.combine_mode
        )
        maps: dict[Approach, ScoreMap] = {
            Approach.DC: dc,
            Approach.BC: bc,
            Approach.CC: cc,
            Approach.RA: ra,
            Approach.DC_BC_CC: citation,
            Approach.DC_BC_CC_RA: combine_all(
                citation, ra, mode=scoring.combine_mode
            ),
        }

        ranking = rank(maps[approach], tie_seed)
        items: list[RetrievedItem] = []
        for position, (index, score) in enumerate(ranking, start=1):
            if position > k:
                break
            items.append(
                RetrievedItem(
                    rank=position,
                    pub_id=graph.pub_id_of(index),
                    title=graph.titles[index],
                    year=graph.year_of(index),
                    score=float(score),
                    components={
                        "dc": dc.get(index),
                        "bc": bc.get(index),
                        "cc": cc.get(index),
                        "ra": ra.get(index),
                    },
                )
            )
        return RetrievalResult(
            approach=approach,
            tie_seed=int(tie_seed),
            k=k,
            total_candidates=len(ranking),
            items=items,
        )


# ---------------------------------------------------------------------------
# HTTP layer
# ---------------------------------------------------------------------------


class OverridesBody(BaseModel):
    bc_min_score: int | None = Field(default=None, ge=1)
    cc_min_score: int | None = Field(default=None, ge=1)
    dc_weight: float | None = Field(default=None, ge=0)
    bc_weight: float | None = Field(default=None, ge=0)
    cc_weight: float | None = Field(default=None, ge=0)
    pool_per_seed: int | None = Field(default=None, ge=1)


class RetrieveBody(BaseModel):
    seeds: list[int] = Field(min_length=1)
    approach: Approach = Approach.DC_BC_CC_RA
    k: int = Field(default=50, ge=1)
    tie_seed: int = DEFAULT_TIE_SEED
    overrides: OverridesBody | None = None

    @field_validator("approach", mode="before")
    @classmethod
    def _parse_approach(cls, value: object) -> object:
        if isinstance(value, str):
            return Approach.parse(value)
        return value


def create_app(
    engine: RetrievalEngine | None = None, max_seeds: int = DEFAULT_MAX_SEEDS
) -> FastAPI:
    """Build the service app around an already-loaded engine.

    With no engine, data endpoints answer 503 until ``attach_engine`` is
    called — loading is exclusive, requests don't block on it.
    """
    app = FastAPI(title="seedgraph service", version=seedgraph.__version__)
    app.state.engine = engine
    app.state.max_seeds = max_seeds

    def current_engine() -> RetrievalEngine:
        engine = app.state.engine
        if engine is None:
            raise HTTPException(status_code=503, detail="corpus not loaded")
        return engine

    @app.post("/v1/retrieve")
    def retrieve(body: RetrieveBody) -> dict:
        engine = current_engine()
        if len(body.seeds) > app.state.max_seeds:
            raise HTTPException(
                status_code=422,
                detail=f"at most {app.state.max_seeds} seeds per request",
            )
        overrides = (
            Overrides(**body.overrides.model_dump()) if body.overrides else None
        )
        try:
            result = engine.retrieve(
                body.seeds,
                approach=body.approach,
                k=body.k,
                tie_seed=body.tie_seed,
                overrides=overrides,
            )
        except UnknownSeedError as exc:
            # KeyError's str() wraps the message in quotes; use args directly
            message = exc.args[0] if exc.args else "unknown seed"
            raise HTTPException(
                status_code=400,
                detail={
                    "message": message,
                    "unknown_seeds": getattr(exc, "offenders", []),
                },
            )
        return {
            "approach": result.approach.value,
            "tie_seed": result.tie_seed,
            "k": result.k,
            "total_candidates": result.total_candidates,
            "results": [dataclasses.asdict(item) for item in result.items],
        }

    @app.get("/v1/publications/{pub_id}")
    def publication(pub_id: int) -> dict:
        engine = current_engine()
        graph = engine.graph
        if not graph.has_pub_id(pub_id):
            raise HTTPException(status_code=404, detail=f"unknown pub_id {pub_id}")
        index = graph.internal_index(pub_id)
        record = graph.record(index)
        return {
            "pub_id": record.pub_id,
            "year": record.year,
            "title": record.title,
            "abstract": record.abstract,
            "headings": list(record.headings),
            "reference_count": graph.out_degree(index),
            "citer_count": graph.in_degree(index),
        }

    @app.get("/v1/approaches")
    def approaches() -> dict:
        return {
            "approaches": [
                {"name": a.value, "description": _APPROACH_DESCRIPTIONS[a]}
                for a in Approach
            ],
            "default": Approach.DC_BC_CC_RA.value,
        }

    @app.get("/v1/health")
    def health() -> dict:
        engine = app.state.engine
        if engine is None:
            return {"status": "loading", "corpus_loaded": False}
        return {
            "status": "ok",
            "corpus_loaded": True,
            "nodes": engine.graph.node_count,
            "edges": engine.graph.edge_count,
        }

    return app


def attach_engine(app: FastAPI, engine: RetrievalEngine) -> None:
    app.state.engine = engine
