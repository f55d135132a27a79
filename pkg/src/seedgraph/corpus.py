"""Citation corpus: publication records, the citation graph, and review cases.

The graph is stored in compressed sparse row form (one contiguous, sorted
index array per direction) because every downstream relatedness kernel is
an intersection or scatter over adjacency lists. External publication ids
map to dense internal indices ``0..N-1``; all scoring code works on the
internal indices.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

logger = logging.getLogger(__name__)

YEAR_MIN = 1800
YEAR_MAX = 2100
UNKNOWN_YEAR = -1  # internal sentinel for records without a usable year

SNAPSHOT_MAGIC = b"SDGR"
SNAPSHOT_VERSION = 1


class CitationParseError(ValueError):
    """Input stream is unreadable or exceeds the malformed-row budget."""


class SnapshotError(ValueError):
    """Graph snapshot is missing, corrupt, or has a mismatched version."""


class UnknownSeedError(KeyError):
    """A seed id does not resolve to a node of the corpus graph."""


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PublicationRecord:
    """Metadata for one publication.

    ``year`` is None when unknown; known years must lie in a sane bound
    so that obviously corrupt metadata cannot enter the corpus.
    """

    pub_id: int
    year: int | None = None
    title: str = ""
    abstract: str = ""
    headings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.year is not None and not (YEAR_MIN <= self.year <= YEAR_MAX):
            raise ValueError(
                f"publication {self.pub_id}: year {self.year} outside "
                f"[{YEAR_MIN}, {YEAR_MAX}]"
            )


@dataclass(frozen=True)
class ReviewCase:
    """One review with its eligible references split into seeds and targets.

    ``eligible_refs`` is the within-window subset of the review's reference
    list; ``seeds`` is the sampled known-relevant subset and ``not_seeds``
    the retrieval targets. All members are internal indices.
    """

    review_id: int
    eligible_refs: frozenset[int]
    seeds: frozenset[int] = frozenset()
    not_seeds: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.review_id in self.eligible_refs:
            raise ValueError("review cannot be one of its own eligible references")
        if self.seeds or self.not_seeds:
            if self.seeds | self.not_seeds != self.eligible_refs:
                raise ValueError("seeds and not_seeds must partition eligible_refs")
            if self.seeds & self.not_seeds:
                raise ValueError("seeds and not_seeds overlap")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


@dataclass
class ParsedEdges:
    """Raw citation pairs plus a tally of rows that failed to parse."""

    pairs: list[tuple[int, int]]
    malformed: int = 0
    total_rows: int = 0


def _parse_pair(fields: Sequence[str]) -> tuple[int, int] | None:
    if len(fields) != 2:
        return None
    a, b = fields[0].strip(), fields[1].strip()
    if not a or not b:
        return None
    try:
        return int(a), int(b)
    except ValueError:
        return None


def parse_citations(
    stream: TextIO | Iterable[str],
    fmt: str = "occ_csv",
    max_malformed_fraction: float = 0.01,
) -> ParsedEdges:
    """Parse ``citing,referenced`` rows into raw integer pairs.

    ``occ_csv`` is comma-separated with a header row: the first row is
    skipped when it does not parse as an integer pair. ``generic_tsv`` is
    tab-separated with no header. Malformed rows are counted and reported;
    the parse fails only when their fraction exceeds
    ``max_malformed_fraction``.
    """
    if fmt == "occ_csv":
        sep, header_tolerated = ",", True
    elif fmt == "generic_tsv":
        sep, header_tolerated = "\t", False
    else:
        raise ValueError(f"unknown citation format: {fmt!r}")

    pairs: list[tuple[int, int]] = []
    malformed = 0
    total = 0
    for row_no, line in enumerate(stream):
        line = line.strip()
        if not line:
            continue
        pair = _parse_pair(line.split(sep))
        if pair is None and row_no == 0 and header_tolerated:
            continue  # header row, not counted
        total += 1
        if pair is None:
            malformed += 1
        else:
            pairs.append(pair)

    if total and malformed / total > max_malformed_fraction:
        raise CitationParseError(
            f"{malformed}/{total} rows malformed, above the "
            f"{max_malformed_fraction:.2%} budget"
        )
    if malformed:
        logger.warning("citation parse: %d/%d rows malformed", malformed, total)
    return ParsedEdges(pairs=pairs, malformed=malformed, total_rows=total)


def _coerce_year(raw: object) -> int | None:
    if raw is None or raw == "":
        return None
    try:
        year = int(raw)
    except (TypeError, ValueError):
        return None
    if not (YEAR_MIN <= year <= YEAR_MAX):
        return None
    return year


def parse_metadata(
    stream: TextIO | Iterable[str],
    fmt: str = "tsv",
    max_malformed_fraction: float = 0.01,
) -> tuple[list[PublicationRecord], int]:
    """Parse publication metadata from TSV (header row) or line-delimited JSON.

    TSV columns: pub_id, year, title, abstract, headings (pipe-separated).
    Rows without a usable pub_id are malformed; a missing or out-of-range
    year degrades to "unknown" rather than rejecting the row.
    """
    records: list[PublicationRecord] = []
    malformed = 0
    total = 0

    if fmt == "tsv":
        reader = csv.DictReader(stream, delimiter="\t")
        for row in reader:
            total += 1
            try:
                pub_id = int((row.get("pub_id") or "").strip())
            except ValueError:
                malformed += 1
                continue
            headings_raw = (row.get("headings") or "").strip()
            headings = tuple(h for h in headings_raw.split("|") if h) if headings_raw else ()
            records.append(
                PublicationRecord(
                    pub_id=pub_id,
                    year=_coerce_year(row.get("year")),
                    title=(row.get("title") or "").strip(),
                    abstract=(row.get("abstract") or "").strip(),
                    headings=headings,
                )
            )
    elif fmt == "jsonl":
        for line in stream:
            line = line.strip()
            if not line:
                continue
            total += 1
            try:
                obj = json.loads(line)
                pub_id = int(obj["pub_id"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                malformed += 1
                continue
            headings = tuple(str(h) for h in obj.get("headings") or ())
            records.append(
                PublicationRecord(
                    pub_id=pub_id,
                    year=_coerce_year(obj.get("year")),
                    title=str(obj.get("title") or ""),
                    abstract=str(obj.get("abstract") or ""),
                    headings=headings,
                )
            )
    else:
        raise ValueError(f"unknown metadata format: {fmt!r}")

    if total and malformed / total > max_malformed_fraction:
        raise CitationParseError(
            f"{malformed}/{total} metadata rows malformed, above the "
            f"{max_malformed_fraction:.2%} budget"
        )
    return records, malformed


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------


class CorpusGraph:
    """Immutable bidirectional citation graph with dense internal indices.

    Built once, then shared read-only across any number of workers. The
    forward (references) and reverse (citers) adjacency are exact mirrors
    of each other, duplicate-free, self-loop-free, and sorted ascending.
    """

    def __init__(
        self,
        pub_ids: np.ndarray,
        years: np.ndarray,
        titles: list[str],
        abstracts: list[str],
        headings: list[tuple[str, ...]],
        out_ptr: np.ndarray,
        out_idx: np.ndarray,
        in_ptr: np.ndarray,
        in_idx: np.ndarray,
        dropped_duplicates: int = 0,
        dropped_self_loops: int = 0,
    ) -> None:
        self.pub_ids = pub_ids
        self.years = years
        self.titles = titles
        self.abstracts = abstracts
        self.headings = headings
        self.out_ptr = out_ptr
        self.out_idx = out_idx
        self.in_ptr = in_ptr
        self.in_idx = in_idx
        self.dropped_duplicates = dropped_duplicates
        self.dropped_self_loops = dropped_self_loops

    # -- basic shape --------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self.pub_ids)

    @property
    def edge_count(self) -> int:
        return len(self.out_idx)

    def __len__(self) -> int:
        return self.node_count

    # -- id mapping ---------------------------------------------------------

    def internal_index(self, pub_id: int) -> int:
        """Map an external pub_id to its dense internal index."""
        pos = int(np.searchsorted(self.pub_ids, pub_id))
        if pos >= len(self.pub_ids) or self.pub_ids[pos] != pub_id:
            raise KeyError(f"unknown pub_id {pub_id}")
        return pos

    def has_pub_id(self, pub_id: int) -> bool:
        pos = int(np.searchsorted(self.pub_ids, pub_id))
        return pos < len(self.pub_ids) and int(self.pub_ids[pos]) == pub_id

    def pub_id_of(self, index: int) -> int:
        return int(self.pub_ids[index])

    # -- adjacency ----------------------------------------------------------

    def references(self, index: int) -> np.ndarray:
        """Internal indices of publications this node cites (sorted)."""
        return self.out_idx[self.out_ptr[index] : self.out_ptr[index + 1]]

    def citers(self, index: int) -> np.ndarray:
        """Internal indices of publications citing this node (sorted)."""
        return self.in_idx[self.in_ptr[index] : self.in_ptr[index + 1]]

    def out_degree(self, index: int) -> int:
        return int(self.out_ptr[index + 1] - self.out_ptr[index])

    def in_degree(self, index: int) -> int:
        return int(self.in_ptr[index + 1] - self.in_ptr[index])

    # -- records ------------------------------------------------------------

    def year_of(self, index: int) -> int | None:
        y = int(self.years[index])
        return None if y == UNKNOWN_YEAR else y

    def record(self, index: int) -> PublicationRecord:
        return PublicationRecord(
            pub_id=self.pub_id_of(index),
            year=self.year_of(index),
            title=self.titles[index],
            abstract=self.abstracts[index],
            headings=self.headings[index],
        )

    def iter_records(self) -> Iterator[PublicationRecord]:
        return (self.record(i) for i in range(self.node_count))

    # -- identity -----------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CorpusGraph):
            return NotImplemented
        return (
            np.array_equal(self.pub_ids, other.pub_ids)
            and np.array_equal(self.years, other.years)
            and self.titles == other.titles
            and self.abstracts == other.abstracts
            and self.headings == other.headings
            and np.array_equal(self.out_ptr, other.out_ptr)
            and np.array_equal(self.out_idx, other.out_idx)
            and np.array_equal(self.in_ptr, other.in_ptr)
            and np.array_equal(self.in_idx, other.in_idx)
        )

    def fingerprint(self) -> str:
        """Stable hash of graph structure, used to stamp experiment outputs."""
        h = hashlib.sha256()
        for arr in (self.pub_ids, self.years, self.out_ptr, self.out_idx):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]

    # -- persistence --------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write a versioned binary snapshot (magic ``SDGR`` + version)."""
        payload = io.BytesIO()
        titles_blob, titles_off = _pack_strings(self.titles)
        abstracts_blob, abstracts_off = _pack_strings(self.abstracts)
        headings_blob, headings_off = _pack_strings(
            ["|".join(h) for h in self.headings]
        )
        np.savez_compressed(
            payload,
            pub_ids=self.pub_ids,
            years=self.years,
            out_ptr=self.out_ptr,
            out_idx=self.out_idx,
            in_ptr=self.in_ptr,
            in_idx=self.in_idx,
            titles_blob=titles_blob,
            titles_off=titles_off,
            abstracts_blob=abstracts_blob,
            abstracts_off=abstracts_off,
            headings_blob=headings_blob,
            headings_off=headings_off,
            dropped=np.array(
                [self.dropped_duplicates, self.dropped_self_loops], dtype=np.int64
            ),
        )
        with open(path, "wb") as fh:
            fh.write(SNAPSHOT_MAGIC)
            fh.write(SNAPSHOT_VERSION.to_bytes(4, "little"))
            fh.write(payload.getvalue())

    @classmethod
    def load(cls, path: str | Path) -> "CorpusGraph":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != SNAPSHOT_MAGIC:
                raise SnapshotError(f"{path}: not a graph snapshot (bad magic)")
            version = int.from_bytes(fh.read(4), "little")
            if version != SNAPSHOT_VERSION:
                raise SnapshotError(
                    f"{path}: snapshot version {version} != {SNAPSHOT_VERSION}, "
                    "cache invalid"
                )
            data = np.load(io.BytesIO(fh.read()), allow_pickle=False)
        titles = _unpack_strings(data["titles_blob"], data["titles_off"])
        abstracts = _unpack_strings(data["abstracts_blob"], data["abstracts_off"])
        headings_joined = _unpack_strings(data["headings_blob"], data["headings_off"])
        headings = [tuple(h for h in s.split("|") if h) for s in headings_joined]
        dropped = data["dropped"]
        return cls(
            pub_ids=data["pub_ids"],
            years=data["years"],
            titles=titles,
            abstracts=abstracts,
            headings=headings,
            out_ptr=data["out_ptr"],
            out_idx=data["out_idx"],
            in_ptr=data["in_ptr"],
            in_idx=data["in_idx"],
            dropped_duplicates=int(dropped[0]),
            dropped_self_loops=int(dropped[1]),
        )


def _pack_strings(strings: list[str]) -> tuple[np.ndarray, np.ndarray]:
    """Encode a string list as one UTF-8 blob plus end offsets."""
    encoded = [s.encode("utf-8") for s in strings]
    offsets = np.cumsum([0] + [len(b) for b in encoded], dtype=np.int64)
    blob = np.frombuffer(b"".join(encoded), dtype=np.uint8)
    return blob, offsets


def _unpack_strings(blob: np.ndarray, offsets: np.ndarray) -> list[str]:
    raw = blob.tobytes()
    return [
        raw[offsets[i] : offsets[i + 1]].decode("utf-8")
        for i in range(len(offsets) - 1)
    ]


def _csr_from_edges(
    src: np.ndarray, dst: np.ndarray, node_count: int
) -> tuple[np.ndarray, np.ndarray]:
    order = np.lexsort((dst, src))
    counts = np.bincount(src, minlength=node_count)
    ptr = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
    return ptr, dst[order].astype(np.int32)


def build_graph(
    pairs: Iterable[tuple[int, int]],
    records: Iterable[PublicationRecord] = (),
) -> CorpusGraph:
    """Build the immutable citation graph from raw pairs and metadata.

    Nodes are the union of ids seen in pairs and records. Nodes without a
    metadata record keep an unknown year and empty text. Duplicate pairs
    are collapsed and self-loops dropped, both counted, so that coupling
    and co-citation scores cannot be silently inflated.
    """
    record_map: dict[int, PublicationRecord] = {}
    for rec in records:
        record_map[rec.pub_id] = rec

    if isinstance(pairs, np.ndarray):
        pair_arr = pairs.astype(np.int64, copy=False).reshape(-1, 2)
    else:
        pair_arr = np.asarray(list(pairs), dtype=np.int64)
    if pair_arr.size == 0:
        pair_arr = pair_arr.reshape(0, 2)

    all_ids = np.unique(
        np.concatenate(
            [pair_arr.reshape(-1), np.fromiter(record_map, dtype=np.int64, count=len(record_map))]
        )
    )
    node_count = len(all_ids)

    # external ids -> dense internal indices
    src = np.searchsorted(all_ids, pair_arr[:, 0])
    dst = np.searchsorted(all_ids, pair_arr[:, 1])

    self_loops = src == dst
    dropped_self_loops = int(self_loops.sum())
    src, dst = src[~self_loops], dst[~self_loops]

    # collapse duplicates via a combined 1-D key
    key = src * node_count + dst
    unique_key = np.unique(key)
    dropped_duplicates = len(key) - len(unique_key)
    src = (unique_key // node_count).astype(np.int64)
    dst = (unique_key % node_count).astype(np.int64)

    out_ptr, out_idx = _csr_from_edges(src, dst, node_count)
    in_ptr, in_idx = _csr_from_edges(dst, src, node_count)

    years = np.full(node_count, UNKNOWN_YEAR, dtype=np.int32)
    titles = [""] * node_count
    abstracts = [""] * node_count
    headings: list[tuple[str, ...]] = [()] * node_count
    for pub_id, rec in record_map.items():
        i = int(np.searchsorted(all_ids, pub_id))
        if rec.year is not None:
            years[i] = rec.year
        titles[i] = rec.title
        abstracts[i] = rec.abstract
        headings[i] = rec.headings

    return CorpusGraph(
        pub_ids=all_ids,
        years=years,
        titles=titles,
        abstracts=abstracts,
        headings=headings,
        out_ptr=out_ptr,
        out_idx=out_idx,
        in_ptr=in_ptr,
        in_idx=in_idx,
        dropped_duplicates=dropped_duplicates,
        dropped_self_loops=dropped_self_loops,
    )


# ---------------------------------------------------------------------------
# Review selection and seeding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReviewCriteria:
    """Eligibility rules for picking review cases out of the corpus."""

    review_year: int = 2022
    title_pattern: str = "systematic review"
    ref_year_min: int = 2010
    ref_year_max: int = 2021
    min_refs: int = 30
    sample_size: int = 3000
    sample_before_filter: bool = False


def derive_seed(*parts: object) -> int:
    """Stable sub-seed from a master seed and context labels.

    Hash-derived so that per-review randomness is independent of the
    order in which cases are processed.
    """
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def select_reviews(
    graph: CorpusGraph,
    criteria: ReviewCriteria,
    rng_seed: int = 0,
) -> list[ReviewCase]:
    """Select review cases: matching title and year, enough in-window refs.

    Returns skeleton cases (``seeds`` empty) ordered by pub_id. The title
    match is a case-insensitive substring test. By default candidates are
    filtered on ``min_refs`` before the random sample is drawn; set
    ``sample_before_filter`` to sample first and filter after.
    """
    pattern = criteria.title_pattern.lower()
    candidate_rows = np.nonzero(graph.years == criteria.review_year)[0]
    candidates = [
        int(i) for i in candidate_rows if pattern in graph.titles[i].lower()
    ]

    def eligible_refs(i: int) -> frozenset[int]:
        refs = graph.references(i)
        years = graph.years[refs]
        in_window = (years >= criteria.ref_year_min) & (years <= criteria.ref_year_max)
        return frozenset(int(r) for r in refs[in_window])

    rng = np.random.default_rng(rng_seed)

    def sample(items: list[int], size: int) -> list[int]:
        if len(items) <= size:
            return list(items)
        picked = rng.choice(np.array(items, dtype=np.int64), size=size, replace=False)
        return sorted(int(i) for i in picked)

    if criteria.sample_before_filter:
        sampled = sample(candidates, criteria.sample_size)
        kept = [
            (i, refs)
            for i in sampled
            if len(refs := eligible_refs(i)) >= criteria.min_refs
        ]
    else:
        filtered = [
            (i, refs)
            for i in candidates
            if len(refs := eligible_refs(i)) >= criteria.min_refs
        ]
        index_of = {i: refs for i, refs in filtered}
        kept = [(i, index_of[i]) for i in sample([i for i, _ in filtered], criteria.sample_size)]

    return [ReviewCase(review_id=i, eligible_refs=refs) for i, refs in kept]


def sample_seeds(
    case: ReviewCase, n: int, rng: np.random.Generator
) -> ReviewCase:
    """Fill a case with a uniform random n-subset of its eligible refs."""
    if not 1 <= n <= len(case.eligible_refs):
        raise ValueError(
            f"cannot sample {n} seeds from {len(case.eligible_refs)} eligible refs"
        )
    ordered = np.array(sorted(case.eligible_refs), dtype=np.int64)
    picked = rng.choice(ordered, size=n, replace=False)
    seeds = frozenset(int(i) for i in picked)
    return replace(case, seeds=seeds, not_seeds=case.eligible_refs - seeds)
