#!/usr/bin/env python3
"""Generate a small synthetic corpus, pick a few seed papers, retrieve.

The five-minute tour: build a citation graph, hand the engine a handful
of publications you already trust, and see what it suggests next.
"""

from seedgraph.citescore import Approach
from seedgraph.service import RetrievalEngine
from seedgraph.synthetic import generate_corpus


def main() -> None:
    corpus = generate_corpus(n_pubs=2000, n_reviews=8, seed=42)
    graph = corpus.build()
    print(f"corpus: {graph.node_count} publications, {graph.edge_count} citation links")

    # borrow the reference list of the first planted review as "papers we know"
    review_pub = corpus.review_pub_ids[0]
    review = graph.internal_index(review_pub)
    refs = [graph.pub_id_of(int(i)) for i in graph.references(review)]
    seeds = refs[:4]
    print(f"seeds: {seeds} (4 of the {len(refs)} references of review {review_pub})")

    engine = RetrievalEngine(graph)
    for approach in (Approach.DC, Approach.DC_BC_CC, Approach.DC_BC_CC_RA):
        result = engine.retrieve(seeds, approach=approach, k=5, tie_seed=1)
        print(f"\ntop 5 by {approach.value}  ({result.total_candidates} candidates)")
        for item in result.items:
            year = item.year if item.year is not None else "????"
            print(
                f"  {item.rank}. [{item.pub_id}] ({year})"
                f"  score={item.score:<8.3f} {item.title[:56]}"
            )

    # how many of the suggestions are actually the review's other references?
    result = engine.retrieve(seeds, approach=Approach.DC_BC_CC_RA, k=30, tie_seed=1)
    rest = set(refs) - set(seeds)
    found = sum(1 for item in result.items if item.pub_id in rest)
    print(f"\n{found} of the top 30 suggestions are among the review's")
    print(f"remaining {len(rest)} references (papers the seeds should lead to).")


if __name__ == "__main__":
    main()
