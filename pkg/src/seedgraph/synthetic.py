"""Synthetic corpora for tests, demos, and scale exercises.

The article generator plants topic structure (shared vocabulary and
within-topic citations) plus review publications whose reference lists
qualify under the default selection criteria, so a generated corpus can
drive the full harness end to end. The plain graph generator skips
metadata entirely and exists for timing the citation kernels at scale.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from seedgraph.corpus import CorpusGraph, PublicationRecord, build_graph

_TOPIC_NOUNS = (
    "influenza melanoma asthma dementia osteoporosis sepsis glaucoma epilepsy "
    "psoriasis anemia hepatitis malaria tuberculosis arthritis migraine eczema "
    "scoliosis cirrhosis pneumonia endometriosis"
).split()

_BASE_VOCAB = (
    "acute chronic clinical cohort randomized controlled trial outcome "
    "mortality morbidity incidence prevalence diagnosis prognosis screening "
    "biomarker genomic protein receptor inhibitor antibody antigen immune "
    "inflammation infection viral bacterial vaccine vaccination efficacy "
    "safety adverse dosage therapy treatment intervention placebo surgery "
    "rehabilitation recovery relapse remission metastasis tumor carcinoma "
    "cardiovascular hypertension diabetes obesity metabolic renal hepatic "
    "pulmonary respiratory neurological cognitive depression anxiety "
    "pediatric geriatric maternal neonatal pregnancy fertility hormonal "
    "thyroid insulin glucose lipid cholesterol statin anticoagulant "
    "thrombosis stroke ischemia infarction arrhythmia catheter stent imaging "
    "radiography tomography ultrasound endoscopy biopsy pathology histology "
    "microbiome antibiotic resistance susceptibility epidemiology "
    "surveillance transmission outbreak adherence compliance guideline "
    "consensus evidence quality bias confounding stratified regression "
    "survival hazard ratio odds risk protective exposure dose response "
    "longitudinal prospective retrospective observational followup baseline "
    "severity comorbidity readmission hospitalization discharge triage "
    "biochemical serum plasma urinary genetic familial hereditary sporadic "
    "benign malignant invasive localized systemic topical oral intravenous"
).split()


@dataclass
class SyntheticCorpus:
    """A generated corpus plus the ids of its planted qualifying reviews."""

    records: list[PublicationRecord]
    pairs: list[tuple[int, int]]
    review_pub_ids: list[int]

    def build(self) -> CorpusGraph:
        return build_graph(self.pairs, self.records)


def _pick_words(rng: np.random.Generator, vocab: list[str], count: int) -> list[str]:
    return [vocab[i] for i in rng.integers(0, len(vocab), size=count)]


def generate_corpus(
    n_pubs: int = 5000,
    n_reviews: int = 20,
    seed: int = 0,
    review_year: int = 2022,
    ref_window: tuple[int, int] = (2010, 2021),
) -> SyntheticCorpus:
    """Generate topic-structured articles and qualifying review cases.

    Articles get years spread over 2008..2021, topic-flavored text, and
    mostly within-topic citations of earlier work (which creates shared
    references and co-citations for the citation kernels to find).
    Planted reviews cite 30–60 within-window same-topic articles; a few
    decoys (reviews with thin reference lists, same-titled articles from
    the wrong year, plain articles from the review year) exercise the
    selection filters.
    """
    if n_pubs < 400:
        raise ValueError("generator needs at least 400 publications")
    rng = np.random.default_rng(seed)
    n_topics = max(2, min(len(_TOPIC_NOUNS), n_pubs // 200))
    topic_vocab: list[list[str]] = []
    for t in range(n_topics):
        extra = [
            _BASE_VOCAB[i]
            for i in rng.choice(len(_BASE_VOCAB), size=30, replace=False)
        ]
        topic_vocab.append([_TOPIC_NOUNS[t]] + extra)

    records: list[PublicationRecord] = []
    pairs: list[tuple[int, int]] = []

    def pub_id_of(i: int) -> int:
        # sparse external ids keep the id mapping honest
        return 1_000_003 + 7 * i

    topics = rng.integers(0, n_topics, size=n_pubs)
    years = rng.integers(2008, 2022, size=n_pubs)
    by_topic: dict[int, list[int]] = {t: [] for t in range(n_topics)}

    for i in range(n_pubs):
        t = int(topics[i])
        vocab = topic_vocab[t]
        title = " ".join(_pick_words(rng, vocab, int(rng.integers(5, 9))))
        abstract = " ".join(_pick_words(rng, vocab, int(rng.integers(25, 41))))
        headings = tuple(
            sorted(set(_pick_words(rng, vocab, int(rng.integers(2, 5)))))
        )
        records.append(
            PublicationRecord(
                pub_id=pub_id_of(i),
                year=int(years[i]),
                title=title.capitalize(),
                abstract=abstract,
                headings=headings,
            )
        )
        by_topic[t].append(i)

    # within-topic citations of earlier work, with a cross-topic trickle
    for i in range(n_pubs):
        t = int(topics[i])
        same = [j for j in by_topic[t] if years[j] < years[i]]
        if not same:
            continue
        n_refs = int(rng.integers(5, 18))
        chosen = set(
            int(same[k]) for k in rng.integers(0, len(same), size=n_refs)
        )
        if rng.random() < 0.4:
            chosen.add(int(rng.integers(0, n_pubs)))
        for j in sorted(chosen):
            if j != i:
                pairs.append((pub_id_of(i), pub_id_of(j)))

    next_id = n_pubs
    review_pub_ids: list[int] = []

    def add_record(year: int, title: str, vocab: list[str]) -> int:
        nonlocal next_id
        i = next_id
        next_id += 1
        records.append(
            PublicationRecord(
                pub_id=pub_id_of(i),
                year=year,
                title=title,
                abstract=" ".join(_pick_words(rng, vocab, 30)),
                headings=tuple(sorted(set(_pick_words(rng, vocab, 3)))),
            )
        )
        return i

    review_titles = (
        "{noun} management in adults: a systematic review",
        "A Systematic Review of {noun} interventions",
        "Efficacy of {noun} treatment: systematic review and meta-analysis",
        "{noun} outcomes in primary care: a SYSTEMATIC REVIEW",
    )

    lo, hi = ref_window
    for r in range(n_reviews):
        t = r % n_topics
        vocab = topic_vocab[t]
        in_window = [j for j in by_topic[t] if lo <= years[j] <= hi]
        n_eligible = int(rng.integers(30, 61))
        if len(in_window) < n_eligible:
            raise ValueError(
                f"topic {t} has only {len(in_window)} in-window publications; "
                "raise n_pubs or lower n_reviews"
            )
        noun = _TOPIC_NOUNS[t].capitalize()
        title = review_titles[r % len(review_titles)].format(noun=noun)
        i = add_record(review_year, title, vocab)
        review_pub_ids.append(pub_id_of(i))
        picked = rng.choice(len(in_window), size=n_eligible, replace=False)
        refs = [in_window[int(k)] for k in picked]
        out_window = [j for j in by_topic[t] if years[j] < lo]
        refs += [out_window[int(k)] for k in rng.integers(0, len(out_window), size=3)] if out_window else []
        for j in sorted(set(refs)):
            pairs.append((pub_id_of(i), pub_id_of(j)))

    # decoys: thin review, wrong-year review, plain review-year articles
    for t in range(min(3, n_topics)):
        vocab = topic_vocab[t]
        thin = add_record(
            review_year,
            f"{_TOPIC_NOUNS[t].capitalize()} therapy: a systematic review protocol",
            vocab,
        )
        in_window = [j for j in by_topic[t] if lo <= years[j] <= hi]
        for j in sorted(
            set(int(in_window[k]) for k in rng.integers(0, len(in_window), size=10))
        ):
            pairs.append((pub_id_of(thin), pub_id_of(j)))
        add_record(
            hi,
            f"{_TOPIC_NOUNS[t].capitalize()} care: a systematic review",
            vocab,
        )
        add_record(
            review_year,
            f"{_TOPIC_NOUNS[t].capitalize()} registry report",
            vocab,
        )

    return SyntheticCorpus(
        records=records, pairs=pairs, review_pub_ids=review_pub_ids
    )


def generate_citation_graph(
    n_nodes: int = 100_000, n_edges: int = 1_000_000, seed: int = 0
) -> CorpusGraph:
    """Metadata-free random citation graph for kernel timing runs."""
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n_nodes, size=n_edges, dtype=np.int64)
    dst = rng.integers(0, n_nodes, size=n_edges, dtype=np.int64)
    pairs = np.stack([src, dst], axis=1)
    records = [PublicationRecord(pub_id=i) for i in range(0, n_nodes)]
    return build_graph(pairs, records)


# ---------------------------------------------------------------------------
# Writers (round-trip the external file formats)
# ---------------------------------------------------------------------------


def write_citations_csv(pairs: list[tuple[int, int]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("citing,referenced\n")
        for citing, referenced in pairs:
            fh.write(f"{citing},{referenced}\n")


def write_metadata_tsv(
    records: list[PublicationRecord], path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(["pub_id", "year", "title", "abstract", "headings"])
        for rec in records:
            writer.writerow(
                [
                    rec.pub_id,
                    rec.year if rec.year is not None else "",
                    rec.title,
                    rec.abstract,
                    "|".join(rec.headings),
                ]
            )


def write_metadata_jsonl(
    records: list[PublicationRecord], path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "pub_id": rec.pub_id,
                        "year": rec.year,
                        "title": rec.title,
                        "abstract": rec.abstract,
                        "headings": list(rec.headings),
                    }
                )
                + "\n"
            )
