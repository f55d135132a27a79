"""Citation-network relatedness scores between candidates and a seed set.

Three kernels, all defined on sets of citation relations:

* direct citation  — candidate cites a seed or is cited by one
* coupled references — candidate and seed cite the same publications
* co-citation     — candidate and seed are cited together by third parties

Each kernel walks outward from the seeds and accumulates per-candidate
counts with one scatter-add, so cost is proportional to the adjacency
actually touched, never to all candidate pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping

import numpy as np

from seedgraph.corpus import CorpusGraph, UnknownSeedError


class Approach(str, Enum):
    """The six retrieval approaches, in canonical reporting order."""

    DC = "dc"
    BC = "bc"
    CC = "cc"
    RA = "ra"
    DC_BC_CC = "dc_bc_cc"
    DC_BC_CC_RA = "dc_bc_cc_ra"

    @classmethod
    def parse(cls, text: str) -> "Approach":
        try:
            return cls(text.strip().lower())
        except ValueError:
            valid = ", ".join(a.value for a in cls)
            raise ValueError(f"unknown approach {text!r}; expected one of: {valid}")


@dataclass(frozen=True, eq=False)
class ScoreMap:
    """Sparse candidate → score mapping for one approach.

    ``indices`` are internal indices, sorted ascending; ``scores`` the
    parallel positive scores. Zero-score candidates are simply absent
    ("not retrieved"), and no excluded index ever appears.
    """

    approach: Approach
    indices: np.ndarray
    scores: np.ndarray
    excluded: frozenset[int]

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.scores):
            raise ValueError("indices and scores must be parallel arrays")

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, index: int) -> bool:
        pos = int(np.searchsorted(self.indices, index))
        return pos < len(self.indices) and int(self.indices[pos]) == index

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return zip((int(i) for i in self.indices), (float(s) for s in self.scores))

    def get(self, index: int, default: float = 0.0) -> float:
        pos = int(np.searchsorted(self.indices, index))
        if pos < len(self.indices) and int(self.indices[pos]) == index:
            return float(self.scores[pos])
        return default

    def as_dict(self) -> dict[int, float]:
        return dict(self)

    @classmethod
    def from_dict(
        cls,
        approach: Approach,
        entries: Mapping[int, float],
        excluded: frozenset[int],
    ) -> "ScoreMap":
        indices = np.array(sorted(entries), dtype=np.int64)
        scores = np.array([entries[int(i)] for i in indices], dtype=np.float64)
        return cls(approach=approach, indices=indices, scores=scores, excluded=excluded)


def _check_seeds(graph: CorpusGraph, seeds: Iterable[int]) -> list[int]:
    seed_list = sorted(set(int(s) for s in seeds))
    bad = [s for s in seed_list if not 0 <= s < graph.node_count]
    if bad:
        raise UnknownSeedError(f"seed indices not in graph: {bad}")
    return seed_list


def _check_excluded(seeds: list[int], excluded: frozenset[int]) -> frozenset[int]:
    excluded = frozenset(int(e) for e in excluded)
    if any(e < 0 for e in excluded):
        raise ValueError("excluded indices must be nonnegative")
    missing = [s for s in seeds if s not in excluded]
    if missing:
        raise ValueError(f"excluded set must cover the seeds; missing {missing}")
    return excluded


def _map_from_counts(
    approach: Approach,
    counts: np.ndarray,
    excluded: frozenset[int],
    min_score: int,
) -> ScoreMap:
    """Keep candidates at or above the cutoff, minus the excluded set."""
    if excluded:
        counts[np.fromiter(excluded, dtype=np.int64, count=len(excluded))] = 0
    kept = np.nonzero(counts >= min_score)[0].astype(np.int64)
    return ScoreMap(
        approach=approach,
        indices=kept,
        scores=counts[kept].astype(np.float64),
        excluded=excluded,
    )


def _scatter_count(chunks: list[np.ndarray], node_count: int) -> np.ndarray:
    if not chunks:
        return np.zeros(node_count, dtype=np.int64)
    return np.bincount(np.concatenate(chunks), minlength=node_count)


def dc_scores(
    graph: CorpusGraph, seeds: Iterable[int], excluded: frozenset[int]
) -> ScoreMap:
    """Direct-citation score: per seed, +1 if the seed cites the candidate
    and +1 if the candidate cites the seed (a mutual pair contributes 2).
    """
    seed_list = _check_seeds(graph, seeds)
    excluded = _check_excluded(seed_list, excluded)
    chunks = [graph.references(s) for s in seed_list]
    chunks += [graph.citers(s) for s in seed_list]
    counts = _scatter_count(chunks, graph.node_count)
    return _map_from_counts(Approach.DC, counts, excluded, min_score=1)


def bc_scores(
    graph: CorpusGraph,
    seeds: Iterable[int],
    excluded: frozenset[int],
    min_score: int = 2,
) -> ScoreMap:
    """Shared-reference score: sum over seeds of the number of references
    the candidate has in common with the seed; totals below ``min_score``
    are dropped.

    Walks seed-outward: each reference of a seed credits every other
    publication citing that reference, which is exactly one shared
    reference per (seed, reference, candidate) triple.
    """
    if min_score < 1:
        raise ValueError("min_score must be >= 1")
    seed_list = _check_seeds(graph, seeds)
    excluded = _check_excluded(seed_list, excluded)
    chunks = [graph.citers(r) for s in seed_list for r in graph.references(s)]
    counts = _scatter_count(chunks, graph.node_count)
    return _map_from_counts(Approach.BC, counts, excluded, min_score=min_score)


def cc_scores(
    graph: CorpusGraph,
    seeds: Iterable[int],
    excluded: frozenset[int],
    min_score: int = 2,
    disregard: int | None = None,
) -> ScoreMap:
    """Co-citation score: sum over seeds of the number of third parties
    citing both the candidate and the seed; totals below ``min_score`` are
    dropped.

    ``disregard`` removes one citing publication from every intersection —
    in the evaluation harness this is the review under test, which cites
    all of its references and would otherwise co-cite everything with
    everything.
    """
    if min_score < 1:
        raise ValueError("min_score must be >= 1")
    seed_list = _check_seeds(graph, seeds)
    excluded = _check_excluded(seed_list, excluded)
    chunks = [
        graph.references(c)
        for s in seed_list
        for c in graph.citers(s)
        if disregard is None or int(c) != disregard
    ]
    counts = _scatter_count(chunks, graph.node_count)
    return _map_from_counts(Approach.CC, counts, excluded, min_score=min_score)
