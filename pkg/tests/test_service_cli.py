import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from seedgraph.citescore import Approach
from seedgraph.cli import main
from seedgraph.corpus import CorpusGraph, UnknownSeedError, build_graph
from seedgraph.service import Overrides, RetrievalEngine, attach_engine, create_app
from seedgraph.synthetic import write_citations_csv, write_metadata_tsv


@pytest.fixture(scope="module")
def engine(small_synthetic_graph):
    return RetrievalEngine(small_synthetic_graph)


@pytest.fixture(scope="module")
def client(engine):
    return TestClient(create_app(engine))


@pytest.fixture(scope="module")
def seed_pub_ids(small_synthetic, small_synthetic_graph):
    graph = small_synthetic_graph
    review = graph.internal_index(small_synthetic.review_pub_ids[0])
    refs = graph.references(review)[:3]
    return [graph.pub_id_of(int(r)) for r in refs]


@pytest.fixture(scope="module")
def corpus_files(tmp_path_factory, small_synthetic):
    root = tmp_path_factory.mktemp("corpus")
    citations = root / "citations.csv"
    metadata = root / "metadata.tsv"
    write_citations_csv(small_synthetic.pairs, citations)
    write_metadata_tsv(small_synthetic.records, metadata)
    return citations, metadata


@pytest.fixture(scope="module")
def snapshot_path(tmp_path_factory, small_synthetic_graph):
    path = tmp_path_factory.mktemp("snap") / "graph.bin"
    small_synthetic_graph.save(path)
    return path


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


class TestEngine:
    def test_ranked_output_shape(self, engine, seed_pub_ids):
        result = engine.retrieve(seed_pub_ids, k=10)
        assert result.approach is Approach.DC_BC_CC_RA
        assert [item.rank for item in result.items] == list(
            range(1, len(result.items) + 1)
        )
        scores = [item.score for item in result.items]
        assert scores == sorted(scores, reverse=True)
        assert len(result.items) <= 10
        assert result.total_candidates >= len(result.items)

    def test_direct_citation_items_touch_a_seed(
        self, engine, seed_pub_ids, small_synthetic_graph
    ):
        graph = small_synthetic_graph
        seeds = {graph.internal_index(p) for p in seed_pub_ids}
        result = engine.retrieve(seed_pub_ids, approach=Approach.DC, k=100)
        assert result.items
        for item in result.items:
            idx = graph.internal_index(item.pub_id)
            neighbors = set(graph.references(idx)) | set(graph.citers(idx))
            assert neighbors & seeds

    def test_seeds_never_returned(self, engine, seed_pub_ids):
        for approach in Approach:
            result = engine.retrieve(seed_pub_ids, approach=approach, k=2000)
            returned = {item.pub_id for item in result.items}
            assert not returned & set(seed_pub_ids)

    def test_component_scores_attached(self, engine, seed_pub_ids):
        result = engine.retrieve(seed_pub_ids, approach=Approach.DC, k=5)
        for item in result.items:
            assert set(item.components) == {"dc", "bc", "cc", "ra"}
            assert item.components["dc"] == item.score

    def test_lexical_score_is_raw_in_components(self, engine, seed_pub_ids):
        result = engine.retrieve(seed_pub_ids, approach=Approach.RA, k=5)
        for item in result.items:
            assert item.components["ra"] == item.score

    def test_same_tie_seed_reproduces(self, engine, seed_pub_ids):
        a = engine.retrieve(seed_pub_ids, k=50, tie_seed=77)
        b = engine.retrieve(seed_pub_ids, k=50, tie_seed=77)
        assert [i.pub_id for i in a.items] == [i.pub_id for i in b.items]

    def test_unknown_seed_lists_offenders(self, engine, seed_pub_ids):
        with pytest.raises(UnknownSeedError) as excinfo:
            engine.retrieve(seed_pub_ids + [1, 2])
        assert excinfo.value.offenders == [1, 2]

    def test_input_validation(self, engine, seed_pub_ids):
        with pytest.raises(ValueError, match="at least one seed"):
            engine.retrieve([])
        with pytest.raises(ValueError, match="k must be"):
            engine.retrieve(seed_pub_ids, k=0)

    def test_overrides_loosen_the_coupling_cutoff(self, engine, seed_pub_ids):
        strict = engine.retrieve(seed_pub_ids, approach=Approach.BC, k=1)
        loose = engine.retrieve(
            seed_pub_ids,
            approach=Approach.BC,
            k=1,
            overrides=Overrides(bc_min_score=1),
        )
        assert loose.total_candidates >= strict.total_candidates

    def test_overrides_shrink_the_lexical_pool(self, engine, seed_pub_ids):
        full = engine.retrieve(seed_pub_ids, approach=Approach.RA, k=1)
        tiny = engine.retrieve(
            seed_pub_ids,
            approach=Approach.RA,
            k=1,
            overrides=Overrides(pool_per_seed=1),
        )
        assert tiny.total_candidates <= len(seed_pub_ids)
        assert tiny.total_candidates <= full.total_candidates

    def test_index_built_once(self, engine):
        assert engine.index() is engine.index()

    def test_from_snapshot(self, snapshot_path, small_synthetic_graph):
        layered = RetrievalEngine.from_snapshot(str(snapshot_path))
        assert layered.graph == small_synthetic_graph


# ---------------------------------------------------------------------------
# HTTP API
# ---------------------------------------------------------------------------


class TestHttpApi:
    def test_health(self, client, small_synthetic_graph):
        body = client.get("/v1/health").json()
        assert body["status"] == "ok"
        assert body["corpus_loaded"] is True
        assert body["nodes"] == small_synthetic_graph.node_count
        assert body["edges"] == small_synthetic_graph.edge_count

    def test_approaches_listing(self, client):
        body = client.get("/v1/approaches").json()
        assert [a["name"] for a in body["approaches"]] == [a.value for a in Approach]
        assert body["default"] == "dc_bc_cc_ra"
        assert all(a["description"] for a in body["approaches"])

    def test_retrieve_matches_engine(self, client, engine, seed_pub_ids):
        response = client.post(
            "/v1/retrieve",
            json={"seeds": seed_pub_ids, "k": 20, "tie_seed": 123},
        )
        assert response.status_code == 200
        body = response.json()
        direct = engine.retrieve(seed_pub_ids, k=20, tie_seed=123)
        assert body["approach"] == "dc_bc_cc_ra"
        assert body["total_candidates"] == direct.total_candidates
        assert [r["pub_id"] for r in body["results"]] == [
            i.pub_id for i in direct.items
        ]
        assert [r["rank"] for r in body["results"]] == [i.rank for i in direct.items]
        first = body["results"][0]
        assert set(first["components"]) == {"dc", "bc", "cc", "ra"}

    def test_approach_parse_is_case_insensitive(self, client, seed_pub_ids):
        response = client.post(
            "/v1/retrieve", json={"seeds": seed_pub_ids, "approach": "DC"}
        )
        assert response.status_code == 200
        assert response.json()["approach"] == "dc"

    def test_unknown_seed_is_400_with_offenders(self, client, seed_pub_ids):
        response = client.post(
            "/v1/retrieve", json={"seeds": seed_pub_ids + [99999999]}
        )
        assert response.status_code == 400
        detail = response.json()["detail"]
        assert detail["unknown_seeds"] == [99999999]
        assert "99999999" in detail["message"]

    def test_empty_seed_list_is_422(self, client):
        assert client.post("/v1/retrieve", json={"seeds": []}).status_code == 422

    def test_bad_k_is_422(self, client, seed_pub_ids):
        response = client.post(
            "/v1/retrieve", json={"seeds": seed_pub_ids, "k": 0}
        )
        assert response.status_code == 422

    def test_bad_approach_is_422(self, client, seed_pub_ids):
        response = client.post(
            "/v1/retrieve", json={"seeds": seed_pub_ids, "approach": "pagerank"}
        )
        assert response.status_code == 422

    def test_seed_cap_enforced(self, engine, seed_pub_ids):
        capped = TestClient(create_app(engine, max_seeds=2))
        response = capped.post(
            "/v1/retrieve", json={"seeds": seed_pub_ids[:3]}
        )
        assert response.status_code == 422
        assert "at most 2 seeds" in response.json()["detail"]

    def test_publication_lookup(self, client, seed_pub_ids, small_synthetic_graph):
        pid = seed_pub_ids[0]
        body = client.get(f"/v1/publications/{pid}").json()
        assert body["pub_id"] == pid
        idx = small_synthetic_graph.internal_index(pid)
        assert body["reference_count"] == small_synthetic_graph.out_degree(idx)
        assert body["citer_count"] == small_synthetic_graph.in_degree(idx)

    def test_unknown_publication_is_404(self, client):
        assert client.get("/v1/publications/3").status_code == 404

    def test_endpoints_before_corpus_load(self):
        bare = TestClient(create_app())
        assert bare.get("/v1/health").json() == {
            "status": "loading",
            "corpus_loaded": False,
        }
        assert bare.get("/v1/approaches").status_code == 200
        assert bare.post("/v1/retrieve", json={"seeds": [1]}).status_code == 503
        assert bare.get("/v1/publications/1").status_code == 503

    def test_attach_engine_flips_the_switch(self, engine):
        app = create_app()
        late = TestClient(app)
        assert late.get("/v1/health").json()["status"] == "loading"
        attach_engine(app, engine)
        assert late.get("/v1/health").json()["status"] == "ok"

    def test_overrides_accepted_over_http(self, client, seed_pub_ids):
        response = client.post(
            "/v1/retrieve",
            json={
                "seeds": seed_pub_ids,
                "approach": "ra",
                "overrides": {"pool_per_seed": 1},
            },
        )
        assert response.status_code == 200
        assert response.json()["total_candidates"] <= len(seed_pub_ids)

    def test_invalid_override_is_422(self, client, seed_pub_ids):
        response = client.post(
            "/v1/retrieve",
            json={"seeds": seed_pub_ids, "overrides": {"bc_min_score": 0}},
        )
        assert response.status_code == 422


# ---------------------------------------------------------------------------
# Command line
# ---------------------------------------------------------------------------


class TestCliIngest:
    def test_ingest_writes_a_loadable_snapshot(
        self, corpus_files, tmp_path, small_synthetic_graph, capsys
    ):
        citations, metadata = corpus_files
        out = tmp_path / "graph.bin"
        rc = main(
            [
                "ingest",
                "--citations",
                str(citations),
                "--metadata",
                str(metadata),
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        stdout = capsys.readouterr().out
        assert "ingested" in stdout
        assert small_synthetic_graph.fingerprint() in stdout
        assert CorpusGraph.load(out) == small_synthetic_graph

    def test_ingest_requires_a_source(self, capsys):
        with pytest.raises(SystemExit):
            main(["ingest", "--out", "x.bin"])

    def test_ingest_requires_a_destination(self, corpus_files):
        citations, _ = corpus_files
        with pytest.raises(SystemExit):
            main(["ingest", "--citations", str(citations)])


class TestCliRetrieve:
    def test_table_output(self, snapshot_path, seed_pub_ids, capsys):
        rc = main(
            [
                "retrieve",
                "--corpus",
                str(snapshot_path),
                "--seeds",
                ",".join(str(s) for s in seed_pub_ids),
                "--k",
                "5",
            ]
        )
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("# approach=dc_bc_cc_ra")
        assert lines[1] == "rank\tpub_id\tscore\tdc\tbc\tcc\tra\tyear\ttitle"
        rows = [line.split("\t") for line in lines[2:]]
        assert 0 < len(rows) <= 5
        assert [r[0] for r in rows] == [str(i) for i in range(1, len(rows) + 1)]

    def test_same_ranking_as_http(
        self, snapshot_path, seed_pub_ids, client, capsys
    ):
        args = {"seeds": seed_pub_ids, "approach": "dc_bc_cc", "k": 10, "tie_seed": 9}
        rc = main(
            [
                "retrieve",
                "--corpus",
                str(snapshot_path),
                "--seeds",
                ",".join(str(s) for s in seed_pub_ids),
                "--approach",
                "dc_bc_cc",
                "--k",
                "10",
                "--tie-seed",
                "9",
            ]
        )
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        cli_pub_ids = [int(line.split("\t")[1]) for line in lines[2:]]
        body = client.post("/v1/retrieve", json=args).json()
        assert cli_pub_ids == [r["pub_id"] for r in body["results"]]

    def test_non_numeric_seeds_rejected(self, snapshot_path):
        with pytest.raises(SystemExit, match="comma-separated integers"):
            main(["retrieve", "--corpus", str(snapshot_path), "--seeds", "a,b"])

    def test_unknown_seed_reports_error(self, snapshot_path, capsys):
        rc = main(["retrieve", "--corpus", str(snapshot_path), "--seeds", "1"])
        assert rc == 2
        assert "error:" in capsys.readouterr().err


@pytest.fixture(scope="module")
def manifest_path(tmp_path_factory, corpus_files):
    citations, metadata = corpus_files
    root = tmp_path_factory.mktemp("manifest")
    manifest = {
        "corpus": {
            "citations_path": str(citations),
            "metadata_path": str(metadata),
            "snapshot_path": str(root / "graph.bin"),
        },
        "eval": {"k_max": 40, "n_seeds": 5},
    }
    path = root / "experiment.json"
    path.write_text(json.dumps(manifest, indent=2))
    return path


class TestCliEvaluate:
    def test_full_run_writes_everything(self, manifest_path, tmp_path, capsys):
        out = tmp_path / "results"
        rc = main(["evaluate", "--manifest", str(manifest_path), "--out", str(out)])
        assert rc == 0
        stdout = capsys.readouterr().out
        assert "evaluated" in stdout
        assert "score scale" in stdout
        for name in (
            "per_review.csv",
            "curves.csv",
            "distributions.csv",
            "run_manifest.json",
            "audit.tsv",
        ):
            target = out / name
            assert target.exists()
            assert target.stat().st_size > 0

    def test_reruns_are_byte_identical(self, manifest_path, tmp_path):
        first = tmp_path / "run1"
        second = tmp_path / "run2"
        assert main(["evaluate", "--manifest", str(manifest_path), "--out", str(first)]) == 0
        assert main(["evaluate", "--manifest", str(manifest_path), "--out", str(second)]) == 0
        for name in (
            "per_review.csv",
            "curves.csv",
            "distributions.csv",
            "run_manifest.json",
            "audit.tsv",
        ):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_missing_manifest_is_a_clean_error(self, tmp_path, capsys):
        rc = main(
            ["evaluate", "--manifest", str(tmp_path / "nope.json"), "--out", str(tmp_path)]
        )
        assert rc == 2
        assert "error:" in capsys.readouterr().err


class TestCliAudit:
    def test_audit_subcommand(self, manifest_path, tmp_path, capsys):
        out = tmp_path / "audit.tsv"
        rc = main(["audit", "--manifest", str(manifest_path), "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("review_pub_id\t")
        assert len(lines) > 1
