"""Lexical relatedness over titles, abstracts, and subject headings.

Pipeline: tokenize (lowercase, split on non-alphanumerics, drop letterless
tokens and stopwords, suffix-strip), index into term-major postings with a
precomputed per-(term, document) weight, then score a candidate against a
seed as the sum of products of shared-term weights.

The per-term weight is a saturating term-frequency (title occurrences
boosted) normalized by document length, times an inverse-document-frequency
factor:

    w(t, d) = tf_part / (k1 * ((1 - b_len) + b_len * len(d) / avg_len) + tf_part)
              * ln((N + 1) / (doc_freq(t) + 0.5))
    tf_part = title_tf * title_weight + body_tf

Weights are computed once, scalar, at build time; every scoring path sums
them for shared terms in ascending term-id order, left to right, so the
fast postings traversal and a naive double loop agree bit for bit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from seedgraph.citescore import Approach, ScoreMap
from seedgraph.corpus import PublicationRecord, UnknownSeedError

# ---------------------------------------------------------------------------
# Tokenization
# ---------------------------------------------------------------------------

# Tokens are maximal alphanumeric runs (underscore is a separator) that
# contain at least one letter: "covid-19" -> "covid" (the "19" is dropped).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

STOPWORDS = frozenset(
    """
    a about above after again against all also am among an and any are as at
    be because been before being below between both but by can cannot could
    did do does doing down during each etc few for from further had has have
    having he her here hers herself him himself his how however i if in into
    is it its itself just may me might more most must my myself no nor not
    now of off on once only or other our ours ourselves out over own same
    shall she should so some such than that the their theirs them themselves
    then there these they this those through thus to too under until up upon
    very via vs was we were what when where which while who whom why will
    with within without would you your yours yourself yourselves
    """.split()
)

STEMMER_NAME = "porter-1980"


def tokenize(text: str, field: str = "body") -> list[str]:
    """Normalize text to stemmed terms, order preserved.

    ``field`` tags which stream the tokens feed ("title" or "body");
    both are tokenized by identical rules — the distinction matters only
    at indexing time, where title occurrences are counted separately.
    """
    if field not in ("title", "body"):
        raise ValueError(f"field must be 'title' or 'body', got {field!r}")
    terms: list[str] = []
    for token in _TOKEN_RE.findall(text.lower()):
        if not any(ch.isalpha() for ch in token):
            continue
        if token in STOPWORDS:
            continue
        terms.append(_porter_stem(token))
    return terms


# ---------------------------------------------------------------------------
# Stemmer (Porter's 1980 suffix-stripping algorithm, original rule set)
# ---------------------------------------------------------------------------

_VOWELS = frozenset("aeiou")


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel→consonant transitions (the m in [C](VC)^m[V])."""
    m = 0
    i, n = 0, len(stem)
    while i < n and _is_consonant(stem, i):
        i += 1
    while i < n:
        while i < n and not _is_consonant(stem, i):
            i += 1
        if i >= n:
            break
        m += 1
        while i < n and _is_consonant(stem, i):
            i += 1
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    n = len(word)
    return (
        n >= 3
        and _is_consonant(word, n - 3)
        and not _is_consonant(word, n - 2)
        and _is_consonant(word, n - 1)
        and word[-1] not in "wxy"
    )


# suffix → replacement tables; within a step the longest matching suffix is
# chosen first and, if its condition fails, no shorter suffix is tried
_STEP2 = (
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
)
_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
)
_STEP4 = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
)


def _longest_match(word: str, suffixes: Iterable[str]) -> str | None:
    best: str | None = None
    for suf in suffixes:
        if word.endswith(suf) and (best is None or len(suf) > len(best)):
            best = suf
    return best


def _porter_stem(word: str) -> str:
    if len(word) <= 2:
        return word
    w = word

    # step 1a: plurals
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-2]
    elif not w.endswith("ss") and w.endswith("s"):
        w = w[:-1]

    # step 1b: -ed / -ing
    restore = False
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    elif w.endswith("ed"):
        if _has_vowel(w[:-2]):
            w = w[:-2]
            restore = True
    elif w.endswith("ing"):
        if _has_vowel(w[:-3]):
            w = w[:-3]
            restore = True
    if restore:
        if w.endswith(("at", "bl", "iz")):
            w += "e"
        elif _ends_double_consonant(w) and w[-1] not in "lsz":
            w = w[:-1]
        elif _measure(w) == 1 and _ends_cvc(w):
            w += "e"

    # step 1c: terminal y
    if w.endswith("y") and _has_vowel(w[:-1]):
        w = w[:-1] + "i"

    # step 2: double suffixes (condition m > 0)
    suf = _longest_match(w, (s for s, _ in _STEP2))
    if suf is not None:
        stem = w[: -len(suf)]
        if _measure(stem) > 0:
            w = stem + dict(_STEP2)[suf]

    # step 3: -ic-, -full, -ness etc. (condition m > 0)
    suf = _longest_match(w, (s for s, _ in _STEP3))
    if suf is not None:
        stem = w[: -len(suf)]
        if _measure(stem) > 0:
            w = stem + dict(_STEP3)[suf]

    # step 4: bare suffixes (condition m > 1; -ion also needs s/t stem end)
    suf = _longest_match(w, _STEP4)
    if suf is not None:
        stem = w[: -len(suf)]
        if _measure(stem) > 1 and (suf != "ion" or stem.endswith(("s", "t"))):
            w = stem

    # step 5a: terminal e
    if w.endswith("e"):
        stem = w[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            w = stem

    # step 5b: -ll reduction
    if _measure(w) > 1 and _ends_double_consonant(w) and w.endswith("l"):
        w = w[:-1]

    return w


# ---------------------------------------------------------------------------
# Index
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TextParams:
    """Weighting knobs: title boost, tf saturation, length normalization."""

    title_weight: float = 2.0
    k1: float = 1.2
    b_len: float = 0.75

    def __post_init__(self) -> None:
        if self.title_weight <= 0 or self.k1 <= 0 or not 0 <= self.b_len <= 1:
            raise ValueError(f"invalid text weighting parameters: {self}")


class TermIndex:
    """Immutable term/document index with precomputed per-posting weights.

    Holds both orientations of the postings: term-major (for seed-outward
    scoring of the whole corpus) and document-major (for single pair
    scores). Term ids are assigned in first-encounter order; every scoring
    path iterates shared terms in ascending term id so results are
    bit-identical regardless of path.
    """

    def __init__(
        self,
        vocabulary: dict[str, int],
        doc_freq: np.ndarray,
        doc_len: np.ndarray,
        params: TextParams,
        post_ptr: np.ndarray,
        post_doc: np.ndarray,
        post_title_tf: np.ndarray,
        post_body_tf: np.ndarray,
        post_weight: np.ndarray,
        doc_ptr: np.ndarray,
        doc_term: np.ndarray,
        doc_weight: np.ndarray,
    ) -> None:
        self.vocabulary = vocabulary
        self.doc_freq = doc_freq
        self.doc_len = doc_len
        self.params = params
        self.post_ptr = post_ptr
        self.post_doc = post_doc
        self.post_title_tf = post_title_tf
        self.post_body_tf = post_body_tf
        self.post_weight = post_weight
        self.doc_ptr = doc_ptr
        self.doc_term = doc_term
        self.doc_weight = doc_weight

    @property
    def term_count(self) -> int:
        return len(self.doc_freq)

    @property
    def doc_total(self) -> int:
        return len(self.doc_len)

    @property
    def avg_doc_len(self) -> float:
        total = int(self.doc_len.sum())
        return total / self.doc_total if total else 1.0

    def _check_doc(self, doc: int) -> int:
        if not 0 <= doc < self.doc_total:
            raise UnknownSeedError(f"document {doc} not indexed")
        return int(doc)

    def doc_terms(self, doc: int) -> tuple[np.ndarray, np.ndarray]:
        """(term ids ascending, weights) for one document."""
        d = self._check_doc(doc)
        sl = slice(int(self.doc_ptr[d]), int(self.doc_ptr[d + 1]))
        return self.doc_term[sl], self.doc_weight[sl]

    def postings(self, term_id: int) -> tuple[np.ndarray, np.ndarray]:
        """(doc indices ascending, weights) for one term."""
        sl = slice(int(self.post_ptr[term_id]), int(self.post_ptr[term_id + 1]))
        return self.post_doc[sl], self.post_weight[sl]

    def weight(self, term_id: int, doc: int) -> float:
        """w(term, doc), 0.0 when the document lacks the term."""
        terms, weights = self.doc_terms(doc)
        pos = int(np.searchsorted(terms, term_id))
        if pos < len(terms) and int(terms[pos]) == term_id:
            return float(weights[pos])
        return 0.0


def build_index(
    records: Iterable[PublicationRecord], params: TextParams = TextParams()
) -> TermIndex:
    """Index titles, abstracts, and headings; precompute posting weights.

    Title tokens count into title_tf, abstract and heading tokens into
    body_tf. Records with no usable text index as empty documents.
    """
    vocabulary: dict[str, int] = {}
    per_doc: list[dict[int, list[int]]] = []
    doc_len_list: list[int] = []

    for rec in records:
        counts: dict[int, list[int]] = {}
        n_tokens = 0
        title_terms = tokenize(rec.title, "title")
        body_terms = tokenize(rec.abstract, "body")
        for heading in rec.headings:
            body_terms.extend(tokenize(heading, "body"))
        for slot, terms in ((0, title_terms), (1, body_terms)):
            for term in terms:
                tid = vocabulary.setdefault(term, len(vocabulary))
                counts.setdefault(tid, [0, 0])[slot] += 1
                n_tokens += 1
        per_doc.append(counts)
        doc_len_list.append(n_tokens)

    n_docs = len(per_doc)
    n_terms = len(vocabulary)
    doc_len = np.array(doc_len_list, dtype=np.int64)
    total_len = int(doc_len.sum())
    avg_len = total_len / n_docs if total_len else 1.0

    doc_freq = np.zeros(n_terms, dtype=np.int64)
    for counts in per_doc:
        for tid in counts:
            doc_freq[tid] += 1

    tw, k1, b_len = params.title_weight, params.k1, params.b_len

    # term-major postings, docs ascending within each term
    post_ptr = np.concatenate(([0], np.cumsum(doc_freq))).astype(np.int64)
    post_doc = np.zeros(int(post_ptr[-1]), dtype=np.int64)
    post_title_tf = np.zeros_like(post_doc)
    post_body_tf = np.zeros_like(post_doc)
    post_weight = np.zeros(len(post_doc), dtype=np.float64)
    cursor = post_ptr[:-1].copy()

    # doc-major view, term ids ascending within each doc
    doc_ptr = np.concatenate(
        ([0], np.cumsum([len(c) for c in per_doc]))
    ).astype(np.int64)
    doc_term = np.zeros(int(doc_ptr[-1]), dtype=np.int64)
    doc_weight = np.zeros(len(doc_term), dtype=np.float64)

    for d, counts in enumerate(per_doc):
        base = int(doc_ptr[d])
        length_norm = k1 * ((1.0 - b_len) + b_len * int(doc_len[d]) / avg_len)
        for slot_in_doc, tid in enumerate(sorted(counts)):
            title_tf, body_tf = counts[tid]
            tf_part = title_tf * tw + body_tf
            idf = math.log((n_docs + 1) / (int(doc_freq[tid]) + 0.5))
            w = tf_part / (length_norm + tf_part) * idf
            pos = int(cursor[tid])
            post_doc[pos] = d
            post_title_tf[pos] = title_tf
            post_body_tf[pos] = body_tf
            post_weight[pos] = w
            cursor[tid] += 1
            doc_term[base + slot_in_doc] = tid
            doc_weight[base + slot_in_doc] = w

    return TermIndex(
        vocabulary=vocabulary,
        doc_freq=doc_freq,
        doc_len=doc_len,
        params=params,
        post_ptr=post_ptr,
        post_doc=post_doc,
        post_title_tf=post_title_tf,
        post_body_tf=post_body_tf,
        post_weight=post_weight,
        doc_ptr=doc_ptr,
        doc_term=doc_term,
        doc_weight=doc_weight,
    )


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------


def ra_pair_score(index: TermIndex, a: int, b: int) -> float:
    """Sum of w(t,a)·w(t,b) over shared terms, ascending term id."""
    terms_a, weights_a = index.doc_terms(a)
    terms_b, weights_b = index.doc_terms(b)
    total = 0.0
    i = j = 0
    while i < len(terms_a) and j < len(terms_b):
        ta, tb = int(terms_a[i]), int(terms_b[j])
        if ta == tb:
            total += float(weights_a[i]) * float(weights_b[j])
            i += 1
            j += 1
        elif ta < tb:
            i += 1
        else:
            j += 1
    return total


def _top_pool(scores: np.ndarray, limit: int) -> np.ndarray:
    """Indices of the top ``limit`` positive scores (ties: lower doc first)."""
    positive = np.nonzero(scores > 0.0)[0]
    if len(positive) <= limit:
        return positive
    order = np.lexsort((positive, -scores[positive]))
    return positive[order[:limit]]


def ra_scores(
    index: TermIndex,
    seeds: Iterable[int],
    excluded: frozenset[int],
    pool_per_seed: int = 2000,
) -> ScoreMap:
    """Summed pairwise lexical score between each pooled candidate and seeds.

    The candidate pool is the union, over the seeds, of each seed's top
    ``pool_per_seed`` non-excluded documents by pair score; pooled entries
    carry the full sum over all seeds. Candidates the pool misses are
    "not retrieved" — the bound keeps cost predictable on large corpora.
    """
    if pool_per_seed < 1:
        raise ValueError("pool_per_seed must be >= 1")
    seed_list = sorted(set(int(s) for s in seeds))
    for s in seed_list:
        index._check_doc(s)
    excluded = frozenset(int(e) for e in excluded)
    missing = [s for s in seed_list if s not in excluded]
    if missing:
        raise ValueError(f"excluded set must cover the seeds; missing {missing}")

    n = index.doc_total
    totals = np.zeros(n, dtype=np.float64)
    pool_mask = np.zeros(n, dtype=bool)
    excluded_arr = (
        np.fromiter(excluded, dtype=np.int64, count=len(excluded))
        if excluded
        else np.empty(0, dtype=np.int64)
    )

    for s in seed_list:
        acc = np.zeros(n, dtype=np.float64)
        terms, seed_weights = index.doc_terms(s)
        # ascending term order keeps accumulation order identical to
        # ra_pair_score's merge join
        for t, ws in zip(terms, seed_weights):
            sl = slice(int(index.post_ptr[t]), int(index.post_ptr[t + 1]))
            acc[index.post_doc[sl]] += float(ws) * index.post_weight[sl]
        acc[excluded_arr] = 0.0
        pool_mask[_top_pool(acc, pool_per_seed)] = True
        totals += acc

    entries = np.nonzero(pool_mask & (totals > 0.0))[0].astype(np.int64)
    return ScoreMap(
        approach=Approach.RA,
        indices=entries,
        scores=totals[entries],
        excluded=excluded,
    )
