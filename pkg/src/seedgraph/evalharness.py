"""Evaluation harness: replay seed-based retrieval against review cases.

For every review case and enabled approach: score, rank with a derived
tie seed, and measure hits against the review's held-out references.
Aggregation produces mean at-k curves with 95% confidence bands and
five-number distribution summaries, written out as CSV plus a run
manifest that pins everything needed to reproduce the bytes.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

import seedgraph
from seedgraph.citescore import (
    Approach,
    ScoreMap,
    bc_scores,
    cc_scores,
    dc_scores,
)
from seedgraph.config import ExperimentConfig
from seedgraph.corpus import (
    CorpusGraph,
    ReviewCase,
    build_graph,
    derive_seed,
    parse_citations,
    parse_metadata,
    sample_seeds,
    select_reviews,
)
from seedgraph.fusion import RankedList, combine_all, combine_citation, rank
from seedgraph.textsim import STEMMER_NAME, STOPWORDS, TermIndex, build_index, ra_scores

logger = logging.getLogger(__name__)

Z_95 = 1.96


# ---------------------------------------------------------------------------
# Per-case results
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class EvalResult:
    """Hit-based metrics for one (review, approach) pair.

    ``recall_at``/``precision_at`` are indexed by k = 1..K_max (position
    k-1). Past the end of the ranking the recall curve stays flat and
    precision decays as hits_total/k.
    """

    review_id: int
    approach: Approach
    retrieved_count: int
    hits_total: int
    total_recall: float
    total_precision: float
    recall_at: np.ndarray
    precision_at: np.ndarray
    zero_retrieval: bool = False
    max_score: float = 0.0
    ranking: RankedList | None = None
    hit_flags: np.ndarray | None = None


def metrics(
    ranked: RankedList,
    not_seeds: frozenset[int],
    k_max: int,
    review_id: int = -1,
    keep_ranking: bool = True,
) -> EvalResult:
    """Score one ranking against the held-out references.

    A hit is a ranked candidate belonging to ``not_seeds``. Total recall
    divides hits by |not_seeds|, total precision by the retrieved count;
    an empty ranking reports precision 0 with ``zero_retrieval`` set.
    """
    if not not_seeds:
        raise ValueError("not_seeds must be nonempty to evaluate a ranking")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")

    retrieved = len(ranked)
    targets = frozenset(int(i) for i in not_seeds)
    hit_flags = np.fromiter(
        (i in targets for i in ranked.indices.tolist()), dtype=bool, count=retrieved
    )
    hits_total = int(hit_flags.sum())
    total_recall = hits_total / len(targets)
    zero_retrieval = retrieved == 0
    total_precision = 0.0 if zero_retrieval else hits_total / retrieved

    ks = np.arange(1, k_max + 1, dtype=np.int64)
    if retrieved:
        cumulative = np.cumsum(hit_flags, dtype=np.int64)
        hits_at = cumulative[np.minimum(ks, retrieved) - 1]
    else:
        hits_at = np.zeros(k_max, dtype=np.int64)

    return EvalResult(
        review_id=review_id,
        approach=ranked.approach,
        retrieved_count=retrieved,
        hits_total=hits_total,
        total_recall=total_recall,
        total_precision=total_precision,
        recall_at=hits_at / len(targets),
        precision_at=hits_at / ks,
        zero_retrieval=zero_retrieval,
        max_score=float(ranked.scores[0]) if retrieved else 0.0,
        ranking=ranked if keep_ranking else None,
        hit_flags=hit_flags if keep_ranking else None,
    )


@dataclass(eq=False)
class CaseEvaluation:
    """All per-approach results for one review case."""

    case: ReviewCase
    review_pub_id: int
    results: dict[Approach, EvalResult]
    failures: dict[Approach, str]
    skipped: bool = False
    skip_reason: str = ""


def _component_scores(
    graph: CorpusGraph,
    index: TermIndex | None,
    case: ReviewCase,
    config: ExperimentConfig,
    needed: set[Approach],
) -> tuple[dict[Approach, ScoreMap], dict[Approach, str]]:
    """Compute base DC/BC/CC/RA maps, recording per-component failures."""
    excluded = frozenset(case.seeds) | {case.review_id}
    seeds = sorted(case.seeds)
    scoring = config.scoring
    maps: dict[Approach, ScoreMap] = {}
    failures: dict[Approach, str] = {}

    want_dc = needed & {Approach.DC, Approach.DC_BC_CC, Approach.DC_BC_CC_RA}
    want_ra = needed & {Approach.RA, Approach.DC_BC_CC_RA}

    if want_dc:
        for approach, compute in (
            (Approach.DC, lambda: dc_scores(graph, seeds, excluded)),
            (
                Approach.BC,
                lambda: bc_scores(graph, seeds, excluded, scoring.bc_min_score),
            ),
            (
                Approach.CC,
                lambda: cc_scores(
                    graph,
                    seeds,
                    excluded,
                    scoring.cc_min_score,
                    disregard=case.review_id,
                ),
            ),
        ):
            try:
                maps[approach] = compute()
            except Exception as exc:  # recorded, not fatal for other approaches
                failures[approach] = f"{type(exc).__name__}: {exc}"
    if want_ra:
        if index is None:
            failures[Approach.RA] = "no text index available"
        else:
            try:
                maps[Approach.RA] = ra_scores(
                    index, seeds, excluded, config.text.pool_per_seed
                )
            except Exception as exc:
                failures[Approach.RA] = f"{type(exc).__name__}: {exc}"
    return maps, failures


def evaluate_case(
    graph: CorpusGraph,
    index: TermIndex | None,
    case: ReviewCase,
    config: ExperimentConfig,
    master_seed: int,
) -> CaseEvaluation:
    """Run every enabled approach on one seeded review case.

    Tie seeds are derived per (review, approach) from the master seed, so
    results do not depend on case processing order. A case whose seeds
    swallow every eligible reference has nothing to retrieve and is
    skipped; a failing approach is recorded and the others proceed.
    """
    review_pub_id = graph.pub_id_of(case.review_id)
    if not case.seeds:
        raise ValueError(f"case {review_pub_id}: seeds not sampled yet")
    if not case.not_seeds:
        return CaseEvaluation(
            case=case,
            review_pub_id=review_pub_id,
            results={},
            failures={},
            skipped=True,
            skip_reason="no retrieval targets: every eligible reference is a seed",
        )

    enabled = list(config.enabled_approaches())
    component_maps, failures = _component_scores(
        graph, index, case, config, set(enabled)
    )

    candidate_maps: dict[Approach, ScoreMap] = dict(component_maps)
    citation_parts = (Approach.DC, Approach.BC, Approach.CC)
    if Approach.DC_BC_CC in enabled or Approach.DC_BC_CC_RA in enabled:
        broken = [a.value for a in citation_parts if a in failures]
        if broken:
            message = f"component failure in {', '.join(broken)}"
            failures.setdefault(Approach.DC_BC_CC, message)
            failures.setdefault(Approach.DC_BC_CC_RA, message)
        else:
            candidate_maps[Approach.DC_BC_CC] = combine_citation(
                component_maps[Approach.DC],
                component_maps[Approach.BC],
                component_maps[Approach.CC],
                weights=config.scoring.weights,
                mode=config.scoring.combine_mode,
            )
    if Approach.DC_BC_CC_RA in enabled and Approach.DC_BC_CC_RA not in failures:
        if Approach.RA in failures:
            failures[Approach.DC_BC_CC_RA] = "component failure in ra"
        else:
            candidate_maps[Approach.DC_BC_CC_RA] = combine_all(
                candidate_maps[Approach.DC_BC_CC],
                component_maps[Approach.RA],
                mode=config.scoring.combine_mode,
            )

    results: dict[Approach, EvalResult] = {}
    for approach in enabled:
        if approach in failures:
            continue
        if approach not in candidate_maps:
            failures[approach] = "score map unavailable"
            continue
        tie_seed = derive_seed(master_seed, "tie", review_pub_id, approach.value)
        ranking = rank(candidate_maps[approach], tie_seed)
        results[approach] = metrics(
            ranking,
            case.not_seeds,
            config.eval.k_max,
            review_id=case.review_id,
            keep_ranking=config.eval.keep_rankings,
        )

    reported_failures = {a: msg for a, msg in failures.items() if a in enabled}
    return CaseEvaluation(
        case=case,
        review_pub_id=review_pub_id,
        results=results,
        failures=reported_failures,
    )


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class AggregateCurve:
    """Mean at-k curves with normal-approximation 95% CI half-widths."""

    approach: Approach
    k_grid: np.ndarray
    mean_recall: np.ndarray
    recall_ci_half: np.ndarray
    mean_precision: np.ndarray
    precision_ci_half: np.ndarray
    review_count: int


@dataclass(frozen=True)
class FiveNumber:
    min: float
    q1: float
    median: float
    q3: float
    max: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "FiveNumber":
        lo, q1, med, q3, hi = np.percentile(np.asarray(values, dtype=np.float64),
                                            [0, 25, 50, 75, 100])
        return cls(float(lo), float(q1), float(med), float(q3), float(hi))


@dataclass(eq=False)
class DistributionSummary:
    """Five-number summaries of the per-review totals for one approach."""

    approach: Approach
    retrieved_count: FiveNumber
    total_recall: FiveNumber
    total_precision: FiveNumber


def _ci_half(matrix: np.ndarray) -> np.ndarray:
    n = matrix.shape[0]
    sd = np.std(matrix, axis=0, ddof=1)
    return Z_95 * sd / np.sqrt(n)


def aggregate(
    results: Iterable[EvalResult], k_max: int | None = None
) -> tuple[dict[Approach, AggregateCurve], dict[Approach, DistributionSummary]]:
    """Average per-review results into curves and distribution summaries.

    Requires at least two reviews per approach (a confidence interval
    needs a sample standard deviation).
    """
    by_approach: dict[Approach, list[EvalResult]] = {}
    for result in results:
        by_approach.setdefault(result.approach, []).append(result)
    if not by_approach:
        raise ValueError("no results to aggregate")

    curves: dict[Approach, AggregateCurve] = {}
    summaries: dict[Approach, DistributionSummary] = {}
    for approach, group in by_approach.items():
        if len(group) < 2:
            raise ValueError(
                f"approach {approach.value}: need >= 2 reviews to aggregate, "
                f"got {len(group)}"
            )
        lengths = {len(r.recall_at) for r in group}
        if len(lengths) != 1:
            raise ValueError(f"approach {approach.value}: mixed k_max in results")
        (length,) = lengths
        if k_max is not None and k_max != length:
            raise ValueError(
                f"approach {approach.value}: results have k_max {length}, "
                f"expected {k_max}"
            )
        recall = np.vstack([r.recall_at for r in group])
        precision = np.vstack([r.precision_at for r in group])
        curves[approach] = AggregateCurve(
            approach=approach,
            k_grid=np.arange(1, length + 1, dtype=np.int64),
            mean_recall=recall.mean(axis=0),
            recall_ci_half=_ci_half(recall),
            mean_precision=precision.mean(axis=0),
            precision_ci_half=_ci_half(precision),
            review_count=len(group),
        )
        summaries[approach] = DistributionSummary(
            approach=approach,
            retrieved_count=FiveNumber.of([r.retrieved_count for r in group]),
            total_recall=FiveNumber.of([r.total_recall for r in group]),
            total_precision=FiveNumber.of([r.total_precision for r in group]),
        )
    return curves, summaries


@dataclass(frozen=True)
class ScaleDiagnostic:
    """Run-level maximum score per citation approach, and their ratios.

    The coupled-reference and co-citation maxima typically run an order
    of magnitude above direct-citation counts; these ratios are what
    motivates down-weighting them in the citation blend.
    """

    max_dc: float
    max_bc: float
    max_cc: float
    bc_dc_ratio: float
    cc_dc_ratio: float


def score_scale_diagnostic(results: Iterable[EvalResult]) -> ScaleDiagnostic:
    """Ratios of run-maximum BC and CC scores to the run-maximum DC score."""
    peaks = {Approach.DC: 0.0, Approach.BC: 0.0, Approach.CC: 0.0}
    for result in results:
        if result.approach in peaks:
            peaks[result.approach] = max(peaks[result.approach], result.max_score)
    if peaks[Approach.DC] <= 0.0:
        raise ValueError(
            "score scale diagnostic needs at least one review with a "
            "nonempty direct-citation map"
        )
    return ScaleDiagnostic(
        max_dc=peaks[Approach.DC],
        max_bc=peaks[Approach.BC],
        max_cc=peaks[Approach.CC],
        bc_dc_ratio=peaks[Approach.BC] / peaks[Approach.DC],
        cc_dc_ratio=peaks[Approach.CC] / peaks[Approach.DC],
    )


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class ExperimentRun:
    """Everything a harness run produced, ready for export."""

    config: ExperimentConfig
    graph: CorpusGraph
    corpus_fingerprint: str
    evaluations: list[CaseEvaluation]
    curves: dict[Approach, AggregateCurve]
    summaries: dict[Approach, DistributionSummary]
    diagnostic: ScaleDiagnostic | None

    @property
    def evaluated(self) -> list[CaseEvaluation]:
        return [e for e in self.evaluations if not e.skipped]

    @property
    def skipped(self) -> list[CaseEvaluation]:
        return [e for e in self.evaluations if e.skipped]


def load_corpus(config: ExperimentConfig) -> CorpusGraph:
    """Load the graph snapshot if configured and present, else parse inputs.

    A fresh parse is cached back to the snapshot path when one is set.
    """
    corpus = config.corpus
    if corpus.snapshot_path and Path(corpus.snapshot_path).exists():
        return CorpusGraph.load(corpus.snapshot_path)
    if not corpus.citations_path:
        raise ValueError("manifest names neither a snapshot nor a citations file")
    with open(corpus.citations_path, encoding="utf-8") as fh:
        parsed = parse_citations(fh, corpus.citations_format)
    records = []
    if corpus.metadata_path:
        with open(corpus.metadata_path, encoding="utf-8") as fh:
            records, _ = parse_metadata(fh, corpus.metadata_format)
    graph = build_graph(parsed.pairs, records)
    if corpus.snapshot_path:
        graph.save(corpus.snapshot_path)
    return graph


def prepare_cases(
    graph: CorpusGraph, config: ExperimentConfig
) -> list[ReviewCase]:
    """Select review cases and sample their seed sets, reproducibly."""
    selection_seed = derive_seed(config.master_seed, "select_reviews")
    cases = select_reviews(graph, config.criteria, rng_seed=selection_seed)
    seeded: list[ReviewCase] = []
    for case in cases:
        pub_id = graph.pub_id_of(case.review_id)
        rng = np.random.default_rng(derive_seed(config.master_seed, "seeds", pub_id))
        n = min(config.eval.n_seeds, len(case.eligible_refs))
        seeded.append(sample_seeds(case, n, rng))
    return seeded


def run_experiment(
    config: ExperimentConfig,
    graph: CorpusGraph | None = None,
    cases: Sequence[ReviewCase] | None = None,
) -> ExperimentRun:
    """Full harness pass: select, seed, evaluate, aggregate, diagnose.

    Case evaluations run on a thread pool (``config.workers``); outputs
    are sorted by review id afterwards, so worker count cannot change a
    single output byte.
    """
    if graph is None:
        graph = load_corpus(config)
    if cases is None:
        cases = prepare_cases(graph, config)
    logger.info("evaluating %d review cases", len(cases))

    enabled = set(config.enabled_approaches())
    index: TermIndex | None = None
    if enabled & {Approach.RA, Approach.DC_BC_CC_RA}:
        index = build_index(graph.iter_records(), config.text.params())

    def run_one(case: ReviewCase) -> CaseEvaluation:
        return evaluate_case(graph, index, case, config, config.master_seed)

    if config.workers > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            evaluations = list(pool.map(run_one, cases))
    else:
        evaluations = [run_one(case) for case in cases]
    evaluations.sort(key=lambda e: e.review_pub_id)

    flat = [
        result
        for evaluation in evaluations
        if not evaluation.skipped
        for result in evaluation.results.values()
    ]
    counts: dict[Approach, int] = {}
    for result in flat:
        counts[result.approach] = counts.get(result.approach, 0) + 1
    thin = {a for a, c in counts.items() if c < 2}
    if thin:
        logger.warning(
            "approaches with fewer than 2 evaluated reviews left out of "
            "aggregation: %s",
            ", ".join(sorted(a.value for a in thin)),
        )
    aggregable = [r for r in flat if r.approach not in thin]
    curves, summaries = (
        aggregate(aggregable, config.eval.k_max) if aggregable else ({}, {})
    )

    diagnostic = None
    if any(r.approach == Approach.DC and r.max_score > 0 for r in flat):
        diagnostic = score_scale_diagnostic(flat)

    return ExperimentRun(
        config=config,
        graph=graph,
        corpus_fingerprint=graph.fingerprint(),
        evaluations=evaluations,
        curves=curves,
        summaries=summaries,
        diagnostic=diagnostic,
    )


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

_APPROACH_ORDER = list(Approach)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def export_outputs(run: ExperimentRun, out_dir: str | Path) -> dict[str, Path]:
    """Write per-review, curve, and distribution CSVs plus the run manifest.

    Everything is derived from sorted in-memory state and fixed float
    formatting, so identical runs produce identical bytes.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "per_review": out / "per_review.csv",
        "curves": out / "curves.csv",
        "distributions": out / "distributions.csv",
        "run_manifest": out / "run_manifest.json",
    }

    with open(paths["per_review"], "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "review_pub_id",
                "approach",
                "retrieved_count",
                "hits",
                "total_recall",
                "total_precision",
                "zero_retrieval",
            ]
        )
        for evaluation in run.evaluated:
            for approach in _APPROACH_ORDER:
                result = evaluation.results.get(approach)
                if result is None:
                    continue
                writer.writerow(
                    [
                        evaluation.review_pub_id,
                        approach.value,
                        result.retrieved_count,
                        result.hits_total,
                        _fmt(result.total_recall),
                        _fmt(result.total_precision),
                        int(result.zero_retrieval),
                    ]
                )

    with open(paths["curves"], "w", encoding="utf-8", newline="\n") as fh:
        fh.write("approach,k,mean_recall,ci_half,mean_precision,ci_half\n")
        for approach in _APPROACH_ORDER:
            curve = run.curves.get(approach)
            if curve is None:
                continue
            for i, k in enumerate(curve.k_grid):
                fh.write(
                    f"{approach.value},{int(k)},{_fmt(curve.mean_recall[i])},"
                    f"{_fmt(curve.recall_ci_half[i])},{_fmt(curve.mean_precision[i])},"
                    f"{_fmt(curve.precision_ci_half[i])}\n"
                )

    with open(paths["distributions"], "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["approach", "metric", "min", "q1", "median", "q3", "max"])
        for approach in _APPROACH_ORDER:
            summary = run.summaries.get(approach)
            if summary is None:
                continue
            for metric_name in ("retrieved_count", "total_recall", "total_precision"):
                five: FiveNumber = getattr(summary, metric_name)
                writer.writerow(
                    [
                        approach.value,
                        metric_name,
                        _fmt(five.min),
                        _fmt(five.q1),
                        _fmt(five.median),
                        _fmt(five.q3),
                        _fmt(five.max),
                    ]
                )

    manifest = {
        "software_version": seedgraph.__version__,
        "config": run.config.to_dict(),
        "master_seed": run.config.master_seed,
        "corpus_fingerprint": run.corpus_fingerprint,
        "stemmer": STEMMER_NAME,
        "stopword_count": len(STOPWORDS),
        "cases_selected": len(run.evaluations),
        "cases_evaluated": len(run.evaluated),
        "cases_skipped": len(run.skipped),
        "skip_reasons": sorted(
            {e.skip_reason for e in run.skipped if e.skip_reason}
        ),
        "approach_failures": {
            a.value: sum(1 for e in run.evaluated if a in e.failures)
            for a in _APPROACH_ORDER
        },
        "score_scale": (
            dataclasses.asdict(run.diagnostic) if run.diagnostic else None
        ),
    }
    with open(paths["run_manifest"], "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return paths


def export_audit(
    run: ExperimentRun,
    graph: CorpusGraph,
    m: int = 3,
    path: str | Path = "audit.tsv",
    approach: Approach = Approach.DC_BC_CC,
) -> Path:
    """Write the manual-assessment sheet: per review, its seed titles and
    the top-m ranked publications that were *not* hits, with scores.

    Needs retained rankings (``eval.keep_rankings``).
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("review_pub_id\tkind\trank\tpub_id\tyear\tscore\ttitle\n")
        if m == 0:
            return path
        for evaluation in run.evaluated:
            result = evaluation.results.get(approach)
            if result is None:
                continue
            if result.ranking is None or result.hit_flags is None:
                raise ValueError(
                    "audit export needs rankings; rerun with keep_rankings enabled"
                )
            for seed in sorted(evaluation.case.seeds):
                record = graph.record(seed)
                fh.write(
                    f"{evaluation.review_pub_id}\tseed\t\t{record.pub_id}\t"
                    f"{record.year if record.year is not None else ''}\t\t"
                    f"{_clean_tsv(record.title)}\n"
                )
            taken = 0
            for position, (candidate, score) in enumerate(
                zip(result.ranking.indices.tolist(), result.ranking.scores.tolist()),
                start=1,
            ):
                if result.hit_flags[position - 1]:
                    continue
                record = graph.record(int(candidate))
                fh.write(
                    f"{evaluation.review_pub_id}\tsuggestion\t{position}\t"
                    f"{record.pub_id}\t"
                    f"{record.year if record.year is not None else ''}\t"
                    f"{_fmt(float(score))}\t{_clean_tsv(record.title)}\n"
                )
                taken += 1
                if taken >= m:
                    break
    return path


def _clean_tsv(text: str) -> str:
    return text.replace("\t", " ").replace("\n", " ")
