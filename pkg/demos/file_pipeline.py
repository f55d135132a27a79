#!/usr/bin/env python3
"""The whole file-based workflow: raw dumps -> snapshot -> evaluation run.

Everything here shells through the same entry points as the installed
``seedgraph`` command, just called in-process. Run it twice and diff the
output directory: the bytes are identical, by design.
"""

import json
import tempfile
from pathlib import Path

from seedgraph.cli import main
from seedgraph.synthetic import generate_corpus, write_citations_csv, write_metadata_tsv


def run(argv) -> None:
    print(f"\n$ seedgraph {' '.join(argv)}")
    rc = main(argv)
    assert rc == 0, f"exit code {rc}"


def main_demo() -> None:
    work = Path(tempfile.mkdtemp(prefix="seedgraph_demo_"))
    print(f"working in {work}")

    corpus = generate_corpus(n_pubs=2500, n_reviews=8, seed=99)
    citations = work / "citations.csv"
    metadata = work / "metadata.tsv"
    write_citations_csv(corpus.pairs, citations)
    write_metadata_tsv(corpus.records, metadata)
    print(f"raw dumps: {citations.stat().st_size} + {metadata.stat().st_size} bytes")

    snapshot = work / "graph.bin"
    run(
        [
            "ingest",
            "--citations", str(citations),
            "--metadata", str(metadata),
            "--out", str(snapshot),
        ]
    )

    manifest = work / "experiment.json"
    manifest.write_text(
        json.dumps(
            {
                "corpus": {"snapshot_path": str(snapshot)},
                "eval": {"k_max": 500, "n_seeds": 5},
            },
            indent=2,
        )
    )
    out = work / "results"
    run(["evaluate", "--manifest", str(manifest), "--out", str(out)])

    print("\nresult files:")
    for path in sorted(out.iterdir()):
        print(f"  {path.name:20s} {path.stat().st_size:8d} bytes")

    head = (out / "curves.csv").read_text().splitlines()
    print("\ncurves.csv, first rows:")
    for line in head[:4]:
        print(f"  {line}")

    # one-off interactive retrieval against the cached snapshot
    review = corpus.review_pub_ids[0]
    graph = corpus.build()
    refs = graph.references(graph.internal_index(review))[:3]
    seeds = ",".join(str(graph.pub_id_of(int(r))) for r in refs)
    run(["retrieve", "--corpus", str(snapshot), "--seeds", seeds, "--k", "5"])


if __name__ == "__main__":
    main_demo()
