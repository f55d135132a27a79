"""Blend per-approach score maps and produce randomized-tie rankings.

The citation blend is a weighted sum over the union of the component
entry sets (a candidate missing from a component contributes zero there).
The lexical blend first rescales the lexical scores into the citation
blend's score range so neither side dominates by scale alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from seedgraph.citescore import Approach, ScoreMap

DEFAULT_WEIGHTS = (1.0, 0.1, 0.1)


@dataclass(frozen=True, eq=False)
class RankedList:
    """Entries of a ScoreMap in retrieval order.

    Scores are non-increasing; within each equal-score block the order is
    a uniform random permutation determined by ``tie_seed``, so a fixed
    seed reproduces the list exactly.
    """

    approach: Approach
    indices: np.ndarray
    scores: np.ndarray
    tie_seed: int

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.scores):
            raise ValueError("indices and scores must be parallel arrays")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return zip((int(i) for i in self.indices), (float(s) for s in self.scores))

    @property
    def items(self) -> list[tuple[int, float]]:
        return list(self)


def _check_same_exclusions(maps: Sequence[ScoreMap]) -> frozenset[int]:
    excluded = maps[0].excluded
    for m in maps[1:]:
        if m.excluded != excluded:
            raise ValueError(
                "score maps to combine must share identical excluded sets"
            )
    return excluded


def _zero_filled(score_map: ScoreMap, all_indices: np.ndarray) -> np.ndarray:
    """Scores of ``score_map`` aligned to ``all_indices``, zero where absent.

    ``all_indices`` may omit entries of the map (intersection mode), so the
    lookup runs from ``all_indices`` into the map, not the other way round.
    """
    out = np.zeros(len(all_indices), dtype=np.float64)
    if len(score_map) and len(all_indices):
        pos = np.searchsorted(score_map.indices, all_indices)
        pos = np.minimum(pos, len(score_map.indices) - 1)
        found = score_map.indices[pos] == all_indices
        out[found] = score_map.scores[pos[found]]
    return out


def _combined_indices(maps: Sequence[ScoreMap], mode: str) -> np.ndarray:
    if mode == "union":
        merged = np.unique(np.concatenate([m.indices for m in maps]))
        return merged.astype(np.int64)
    if mode == "intersection":
        common = maps[0].indices
        for m in maps[1:]:
            common = np.intersect1d(common, m.indices)
        return common.astype(np.int64)
    raise ValueError(f"combine mode must be 'union' or 'intersection', got {mode!r}")


def combine_citation(
    dc: ScoreMap,
    bc: ScoreMap,
    cc: ScoreMap,
    weights: tuple[float, float, float] = DEFAULT_WEIGHTS,
    mode: str = "union",
) -> ScoreMap:
    """Weighted sum of the three citation scores, default 1, 1/10, 1/10.

    The down-weighting compensates for the coupled-reference and
    co-citation scores running roughly an order of magnitude larger than
    direct-citation counts. Zero-weighted-out entries are dropped (score
    zero means "not retrieved").
    """
    if len(weights) != 3 or any(w < 0 for w in weights):
        raise ValueError(f"weights must be three nonnegative reals, got {weights!r}")
    excluded = _check_same_exclusions((dc, bc, cc))
    indices = _combined_indices((dc, bc, cc), mode)
    combined = _zero_filled(dc, indices) * weights[0]
    combined += _zero_filled(bc, indices) * weights[1]
    combined += _zero_filled(cc, indices) * weights[2]
    keep = combined > 0.0
    return ScoreMap(
        approach=Approach.DC_BC_CC,
        indices=indices[keep],
        scores=combined[keep],
        excluded=excluded,
    )


def rescale_to_range(
    values: Sequence[float] | np.ndarray, target_min: float, target_max: float
) -> np.ndarray:
    """Affine map of ``values`` onto [target_min, target_max].

    Input minimum lands on target_min and maximum on target_max; an
    all-equal input has no usable spread and maps to the midpoint.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("cannot rescale an empty value list")
    if target_min > target_max:
        raise ValueError(f"target_min {target_min} > target_max {target_max}")
    lo, hi = float(arr.min()), float(arr.max())
    if lo == hi:
        return np.full(arr.shape, (target_min + target_max) / 2.0)
    return target_min + (arr - lo) * ((target_max - target_min) / (hi - lo))


def combine_all(
    dc_bc_cc: ScoreMap, ra: ScoreMap, mode: str = "union"
) -> ScoreMap:
    """Citation blend plus lexical scores rescaled into its value range.

    Rescaling uses the min and max of the citation blend's own entries;
    when that blend is empty the rescale target is undefined and the raw
    lexical scores pass through unchanged.
    """
    excluded = _check_same_exclusions((dc_bc_cc, ra))
    if len(dc_bc_cc) == 0:
        return ScoreMap(
            approach=Approach.DC_BC_CC_RA,
            indices=ra.indices.copy(),
            scores=ra.scores.copy(),
            excluded=excluded,
        )
    if len(ra):
        ra = ScoreMap(
            approach=ra.approach,
            indices=ra.indices,
            scores=rescale_to_range(
                ra.scores, float(dc_bc_cc.scores.min()), float(dc_bc_cc.scores.max())
            ),
            excluded=ra.excluded,
        )
    indices = _combined_indices((dc_bc_cc, ra), mode)
    combined = _zero_filled(dc_bc_cc, indices)
    combined += _zero_filled(ra, indices)
    keep = combined > 0.0
    return ScoreMap(
        approach=Approach.DC_BC_CC_RA,
        indices=indices[keep],
        scores=combined[keep],
        excluded=excluded,
    )


def rank(scores: ScoreMap, tie_seed: int) -> RankedList:
    """Order entries by score descending, permuting ties uniformly.

    Equal-score blocks are shuffled with a single generator seeded by
    ``tie_seed``, consumed in descending-score block order (single-entry
    blocks draw nothing), so the whole list is reproducible.
    """
    order = np.lexsort((scores.indices, -scores.scores))
    indices = scores.indices[order].copy()
    ranked_scores = scores.scores[order].copy()

    rng = np.random.default_rng(tie_seed)
    n = len(indices)
    boundaries = np.flatnonzero(ranked_scores[1:] != ranked_scores[:-1]) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n])) if n else np.empty(0, dtype=np.int64)
    for start, end in zip(starts, ends):
        if end - start > 1:
            block = indices[start:end]
            indices[start:end] = block[rng.permutation(end - start)]

    return RankedList(
        approach=scores.approach,
        indices=indices,
        scores=ranked_scores,
        tie_seed=int(tie_seed),
    )
