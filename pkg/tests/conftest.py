from __future__ import annotations

import numpy as np
import pytest

from seedgraph.corpus import PublicationRecord, build_graph
from seedgraph.synthetic import generate_corpus
from seedgraph.textsim import TextParams, build_index


@pytest.fixture(scope="session")
def cyclic_records():
    """50 documents on a cyclic vocabulary with uniform statistics.

    Document d carries terms w((d+i) mod 50) for i in 0..9 — the first two
    in the title, the remaining eight in the abstract, every raw frequency 1.
    Consequences used by the tests:

    * every term appears in exactly 10 documents (uniform doc_freq),
    * every document has the same length and the same weight multiset,
      so self-similarity is maximal by Cauchy-Schwarz,
    * documents 25 apart share no terms at all.

    Tokens like "w07" pass through tokenisation and stemming unchanged.
    """
    records = []
    for d in range(50):
        terms = [f"w{(d + i) % 50:02d}" for i in range(10)]
        records.append(
            PublicationRecord(
                pub_id=1000 + d,
                year=2015,
                title=" ".join(terms[:2]),
                abstract=" ".join(terms[2:]),
            )
        )
    return records


@pytest.fixture(scope="session")
def cyclic_index(cyclic_records):
    return build_index(cyclic_records, TextParams())


@pytest.fixture(scope="session")
def small_synthetic():
    return generate_corpus(n_pubs=900, n_reviews=6, seed=11)


@pytest.fixture(scope="session")
def small_synthetic_graph(small_synthetic):
    return small_synthetic.build()


@pytest.fixture()
def chain_graph():
    """0 -> 1 -> 2 -> 3 plus 4 -> 1, on spread-out external ids."""
    ids = [100, 205, 310, 415, 520]
    pairs = [
        (ids[0], ids[1]),
        (ids[1], ids[2]),
        (ids[2], ids[3]),
        (ids[4], ids[1]),
    ]
    records = [PublicationRecord(pub_id=p, year=2016) for p in ids]
    return build_graph(pairs, records)
