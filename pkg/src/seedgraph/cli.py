"""Command-line entry points: ingest, evaluate, retrieve, audit, serve."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from seedgraph.citescore import Approach
from seedgraph.config import (
    CorpusConfig,
    ExperimentConfig,
    load_manifest,
)
from seedgraph.corpus import CorpusGraph, build_graph, parse_citations, parse_metadata
from seedgraph.evalharness import export_audit, export_outputs, run_experiment
from seedgraph.service import RetrievalEngine, create_app

logger = logging.getLogger(__name__)


def _ingest_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.manifest:
        return load_manifest(args.manifest)
    if not args.citations:
        raise SystemExit("ingest needs --manifest or --citations")
    return ExperimentConfig(
        corpus=CorpusConfig(
            citations_path=args.citations,
            citations_format=args.citations_format,
            metadata_path=args.metadata,
            metadata_format=args.metadata_format,
        )
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    config = _ingest_config(args)
    corpus = config.corpus
    with open(corpus.citations_path, encoding="utf-8") as fh:
        parsed = parse_citations(fh, corpus.citations_format)
    records = []
    if corpus.metadata_path:
        with open(corpus.metadata_path, encoding="utf-8") as fh:
            records, bad = parse_metadata(fh, corpus.metadata_format)
        if bad:
            print(f"metadata: {bad} malformed rows skipped", file=sys.stderr)
    graph = build_graph(parsed.pairs, records)
    out = args.out or corpus.snapshot_path
    if not out:
        raise SystemExit("ingest needs --out or a snapshot_path in the manifest")
    graph.save(out)
    print(
        f"ingested {graph.node_count} publications, {graph.edge_count} citations "
        f"({parsed.malformed} malformed rows, {graph.dropped_duplicates} duplicate "
        f"edges, {graph.dropped_self_loops} self-loops dropped)"
    )
    print(f"snapshot {out} fingerprint {graph.fingerprint()}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = load_manifest(args.manifest)
    run = run_experiment(config)
    out_dir = Path(args.out)
    paths = export_outputs(run, out_dir)
    if config.eval.keep_rankings:
        paths["audit"] = export_audit(
            run, run.graph, m=config.eval.audit_m, path=out_dir / "audit.tsv"
        )
    print(
        f"evaluated {len(run.evaluated)} review cases "
        f"({len(run.skipped)} skipped) over "
        f"{len(config.eval.approaches)} approaches"
    )
    if run.diagnostic:
        print(
            f"score scale: max dc {run.diagnostic.max_dc:g}, "
            f"bc/dc {run.diagnostic.bc_dc_ratio:.3g}, "
            f"cc/dc {run.diagnostic.cc_dc_ratio:.3g}"
        )
    for name in sorted(paths):
        print(f"wrote {paths[name]}")
    return 0


def cmd_retrieve(args: argparse.Namespace) -> int:
    engine = RetrievalEngine(CorpusGraph.load(args.corpus))
    try:
        seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    except ValueError:
        raise SystemExit(f"--seeds must be comma-separated integers: {args.seeds!r}")
    result = engine.retrieve(
        seeds,
        approach=Approach.parse(args.approach),
        k=args.k,
        tie_seed=args.tie_seed,
    )
    print(
        f"# approach={result.approach.value} k={result.k} "
        f"tie_seed={result.tie_seed} candidates={result.total_candidates}"
    )
    print("rank\tpub_id\tscore\tdc\tbc\tcc\tra\tyear\ttitle")
    for item in result.items:
        c = item.components
        print(
            f"{item.rank}\t{item.pub_id}\t{item.score:.6g}\t{c['dc']:g}\t"
            f"{c['bc']:g}\t{c['cc']:g}\t{c['ra']:.6g}\t"
            f"{item.year if item.year is not None else '-'}\t{item.title}"
        )
    return 0


def cmd_audit(args: argparse.Namespace) -> int:
    config = load_manifest(args.manifest)
    run = run_experiment(config)
    path = export_audit(run, run.graph, m=config.eval.audit_m, path=args.out)
    print(f"wrote {path}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    engine = RetrievalEngine.from_snapshot(args.corpus)
    app = create_app(engine)
    print(
        f"serving {engine.graph.node_count} publications on "
        f"http://{args.host}:{args.port}"
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seedgraph",
        description="Seed-based retrieval over a citation network",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse inputs and cache a graph snapshot")
    p.add_argument("--manifest", help="experiment manifest (JSON or YAML)")
    p.add_argument("--citations", help="citation edge file")
    p.add_argument(
        "--citations-format", default="occ_csv", choices=["occ_csv", "generic_tsv"]
    )
    p.add_argument("--metadata", help="publication metadata file")
    p.add_argument("--metadata-format", default="tsv", choices=["tsv", "jsonl"])
    p.add_argument("--out", help="snapshot path to write")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("evaluate", help="run the evaluation harness")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("retrieve", help="rank the corpus against given seeds")
    p.add_argument("--corpus", required=True, help="graph snapshot")
    p.add_argument("--seeds", required=True, help="comma-separated seed pub ids")
    p.add_argument(
        "--approach",
        default=Approach.DC_BC_CC_RA.value,
        help="dc|bc|cc|ra|dc_bc_cc|dc_bc_cc_ra",
    )
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--tie-seed", type=int, default=0)
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("audit", help="export the manual-assessment sheet")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="audit TSV path")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--corpus", required=True, help="graph snapshot")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except SystemExit:
        raise
    except Exception as exc:  # surface a clean one-liner, not a traceback
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
