"""Independent brute-force reference implementations.

Everything here works from raw edge lists and token streams with plain
dicts and sets — no shared code with the package's array kernels — so an
agreement test between the two is a real cross-check, not a tautology.
"""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np

from seedgraph.corpus import CorpusGraph, PublicationRecord, build_graph
from seedgraph.textsim import TextParams, tokenize


# ---------------------------------------------------------------------------
# Random graphs
# ---------------------------------------------------------------------------


def external_id(i: int) -> int:
    return 7 + 5 * i


def random_graph(
    rng: np.random.Generator, max_nodes: int = 200, max_edges: int = 2000
) -> tuple[CorpusGraph, set[tuple[int, int]], int]:
    """A random digraph plus its ground-truth edge set on internal indices.

    External ids are spread out (7 + 5i) so the id mapping is exercised;
    monotonicity makes internal index i correspond to external_id(i).
    """
    n = int(rng.integers(10, max_nodes + 1))
    m = int(rng.integers(0, max_edges + 1))
    src = rng.integers(0, n, size=m)
    dst = rng.integers(0, n, size=m)
    edges = {(int(a), int(b)) for a, b in zip(src, dst) if a != b}
    pairs = [(external_id(a), external_id(b)) for a, b in sorted(edges)]
    records = [
        PublicationRecord(pub_id=external_id(i), year=2015) for i in range(n)
    ]
    return build_graph(pairs, records), edges, n


# ---------------------------------------------------------------------------
# Citation-score oracles (nested loops over all candidates)
# ---------------------------------------------------------------------------


def oracle_dc(
    edges: set[tuple[int, int]],
    n: int,
    seeds: set[int],
    excluded: set[int],
) -> dict[int, int]:
    out: dict[int, int] = {}
    for p in range(n):
        if p in excluded:
            continue
        score = sum((s, p) in edges for s in seeds) + sum(
            (p, s) in edges for s in seeds
        )
        if score:
            out[p] = score
    return out


def oracle_bc(
    edges: set[tuple[int, int]],
    n: int,
    seeds: set[int],
    excluded: set[int],
    min_score: int = 2,
) -> dict[int, int]:
    refs: dict[int, set[int]] = defaultdict(set)
    for a, b in edges:
        refs[a].add(b)
    out: dict[int, int] = {}
    for p in range(n):
        if p in excluded:
            continue
        score = sum(len(refs[p] & refs[s]) for s in seeds)
        if score >= min_score:
            out[p] = score
    return out


def oracle_cc(
    edges: set[tuple[int, int]],
    n: int,
    seeds: set[int],
    excluded: set[int],
    min_score: int = 2,
    disregard: int | None = None,
) -> dict[int, int]:
    """Pair-enumeration form: walk every citing paper's reference list and
    count, per seed, the candidates cited alongside it."""
    refs: dict[int, set[int]] = defaultdict(set)
    for a, b in edges:
        refs[a].add(b)
    counts: dict[int, int] = defaultdict(int)
    for citer, cited in refs.items():
        if citer == disregard:
            continue
        for s in seeds:
            if s in cited:
                for p in cited:
                    counts[p] += 1
    return {
        p: c
        for p, c in counts.items()
        if p not in excluded and c >= min_score
    }


def oracle_cc_intersection(
    edges: set[tuple[int, int]],
    n: int,
    seeds: set[int],
    excluded: set[int],
    min_score: int = 2,
    disregard: int | None = None,
) -> dict[int, int]:
    """Set-intersection form of the co-citation score (second opinion)."""
    citers: dict[int, set[int]] = defaultdict(set)
    for a, b in edges:
        citers[b].add(a)
    drop = {disregard} if disregard is not None else set()
    out: dict[int, int] = {}
    for p in range(n):
        if p in excluded:
            continue
        score = sum(len((citers[p] & citers[s]) - drop) for s in seeds)
        if score >= min_score:
            out[p] = score
    return out


# ---------------------------------------------------------------------------
# Lexical-similarity oracle (dict-based, recomputed from raw text)
# ---------------------------------------------------------------------------


def naive_text_stats(
    records: list[PublicationRecord],
) -> tuple[dict[str, int], list[dict[int, tuple[int, int]]], list[int]]:
    """Recount term statistics from scratch with plain dicts.

    Term ids follow the engine's documented rule: first encounter wins,
    scanning documents in order, title stream before body stream.
    """
    term_ids: dict[str, int] = {}
    doc_tfs: list[dict[int, tuple[int, int]]] = []
    doc_lens: list[int] = []
    for rec in records:
        title = tokenize(rec.title, "title")
        body = tokenize(rec.abstract, "body")
        for heading in rec.headings:
            body.extend(tokenize(heading, "body"))
        tfs: dict[int, tuple[int, int]] = {}
        for term in title:
            tid = term_ids.setdefault(term, len(term_ids))
            t, b = tfs.get(tid, (0, 0))
            tfs[tid] = (t + 1, b)
        for term in body:
            tid = term_ids.setdefault(term, len(term_ids))
            t, b = tfs.get(tid, (0, 0))
            tfs[tid] = (t, b + 1)
        doc_tfs.append(tfs)
        doc_lens.append(len(title) + len(body))
    return term_ids, doc_tfs, doc_lens


def naive_weight(
    tid: int,
    doc: int,
    doc_tfs: list[dict[int, tuple[int, int]]],
    doc_lens: list[int],
    params: TextParams,
) -> float:
    title_tf, body_tf = doc_tfs[doc].get(tid, (0, 0))
    if title_tf == 0 and body_tf == 0:
        return 0.0
    n_docs = len(doc_tfs)
    df = sum(1 for tfs in doc_tfs if tid in tfs)
    total_len = sum(doc_lens)
    avg_len = total_len / n_docs if total_len else 1.0
    tf_part = title_tf * params.title_weight + body_tf
    length_norm = params.k1 * (
        (1.0 - params.b_len) + params.b_len * doc_lens[doc] / avg_len
    )
    idf = math.log((n_docs + 1) / (df + 0.5))
    return tf_part / (length_norm + tf_part) * idf


def naive_pair_score(
    a: int,
    b: int,
    doc_tfs: list[dict[int, tuple[int, int]]],
    doc_lens: list[int],
    params: TextParams,
) -> float:
    shared = sorted(set(doc_tfs[a]) & set(doc_tfs[b]))
    total = 0.0
    for tid in shared:
        total += naive_weight(tid, a, doc_tfs, doc_lens, params) * naive_weight(
            tid, b, doc_tfs, doc_lens, params
        )
    return total


# ---------------------------------------------------------------------------
# Metrics oracle (rescans a ranked list with plain loops)
# ---------------------------------------------------------------------------


def rescan_metrics(
    ranked_indices: list[int], not_seeds: set[int], k_max: int
) -> dict:
    hits = [i in not_seeds for i in ranked_indices]
    hits_total = sum(hits)
    retrieved = len(ranked_indices)
    recall_at: list[float] = []
    precision_at: list[float] = []
    for k in range(1, k_max + 1):
        top = hits[: min(k, retrieved)]
        recall_at.append(sum(top) / len(not_seeds))
        precision_at.append(sum(top) / k)
    return {
        "retrieved_count": retrieved,
        "hits_total": hits_total,
        "total_recall": hits_total / len(not_seeds),
        "total_precision": hits_total / retrieved if retrieved else 0.0,
        "recall_at": recall_at,
        "precision_at": precision_at,
    }
