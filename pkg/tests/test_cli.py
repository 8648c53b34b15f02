"""End-to-end command-line tests.

Commands run in-process through main() for speed; one test drives the
installed console script. Network-facing commands talk to a local
HTTP server started per test module.
"""

import json
import socket
import subprocess
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from importlib import resources
from urllib.parse import parse_qs, urlparse

import jsonschema
import pytest

from brownjobs import dataio
from brownjobs.cli import main
from brownjobs.datagen import make_corpus
from brownjobs.ingest.store import ProjectStore

from support import job


def run_cli(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def load_schema(name):
    path = resources.files("brownjobs.schemas").joinpath(f"{name}.json")
    return json.loads(path.read_text(encoding="utf-8"))


def check_schema(payload, name):
    jsonschema.validate(payload, load_schema(name))


# fixtures


def build_store(root, n_commits=40):
    """Store with 40 failures: 20 rerun-to-success, 20 terminal."""
    store = ProjectStore(root)
    records = []
    jid = 0
    for k in range(n_commits):
        jid += 1
        failed = job(
            jid,
            name="unit",
            commit_sha=f"c{k}",
            status="failed",
            created_at=f"2024-01-01T00:{k:02d}:00+00:00",
        )
        records.append(failed)
        if k < 20:
            text = f"connection reset by peer retrying request attempt token{k}\n"
            jid += 1
            records.append(
                job(
                    jid,
                    name="unit",
                    commit_sha=f"c{k}",
                    status="success",
                    created_at=f"2024-01-01T00:{k:02d}:30+00:00",
                )
            )
        else:
            text = f"compilation failed missing symbol in module token{k}\n"
        store.write_log(failed.job_id, text)
    store.append_records(records)
    return store


@pytest.fixture()
def store_dir(tmp_path):
    build_store(tmp_path / "store")
    return str(tmp_path / "store")


@pytest.fixture(scope="module")
def samples_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("samples") / "mixed.jsonl"
    dataio.write_samples_jsonl(make_corpus(80, seed=23), path)
    return str(path)


@pytest.fixture(scope="module")
def family_paths(tmp_path_factory):
    root = tmp_path_factory.mktemp("cross")
    a = root / "a.jsonl"
    b = root / "b.jsonl"
    dataio.write_samples_jsonl(
        make_corpus(60, seed=1, families=["net_flake", "compile_error"]), a
    )
    dataio.write_samples_jsonl(
        make_corpus(60, seed=2, families=["net_flake", "compile_error"]), b
    )
    return str(a), str(b)


class CiHandler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def do_GET(self):
        server = self.server
        server.requests.append(
            {"path": self.path, "token": self.headers.get("PRIVATE-TOKEN")}
        )
        if server.auth_status:
            self.send_response(server.auth_status)
            self.send_header("Content-Length", "0")
            self.end_headers()
            return
        parsed = urlparse(self.path)
        if parsed.path.endswith("/trace"):
            job_id = int(parsed.path.split("/")[-2])
            body = server.traces.get(job_id)
            if body is None:
                self.send_response(404)
                self.send_header("Content-Length", "0")
                self.end_headers()
                return
            self.send_response(200)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
            return
        qs = parse_qs(parsed.query)
        page = int(qs.get("page", ["1"])[0])
        per = int(qs.get("per_page", ["100"])[0])
        chunk = server.jobs[(page - 1) * per : page * per]
        body = json.dumps(chunk).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        more = page * per < len(server.jobs)
        self.send_header("X-Next-Page", str(page + 1) if more else "")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture()
def ci_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), CiHandler)
    server.jobs = []
    server.traces = {}
    server.requests = []
    server.auth_status = None
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        thread.join(timeout=5)


def server_url(server):
    return f"http://127.0.0.1:{server.server_address[1]}"


def api_payload(job_id, status, name="unit", sha="c1"):
    return {
        "id": job_id,
        "name": name,
        "commit": {"id": sha},
        "status": status,
        "created_at": "2024-01-01T00:00:00Z",
        "finished_at": "2024-01-01T01:00:00Z",
        "ref": "main",
    }


class TestExitCodes:
    def test_unknown_subcommand_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "frobnicate")
        assert code == 1
        assert err.startswith("brownjobs: usage:")

    def test_missing_seed_is_usage_error(self, capsys, samples_path):
        code, _, err = run_cli(capsys, "mccv", "--samples", samples_path)
        assert code == 1
        assert "--seed is required" in err
        assert "--nondeterministic" in err

    def test_data_error_exits_two(self, capsys, tmp_path):
        empty = tmp_path / "empty-store"
        ProjectStore(empty)
        code, _, err = run_cli(capsys, "label", "--store", str(empty))
        assert code == 2
        assert err.startswith("brownjobs: data:")
        assert "no job records" in err

    def test_environment_failure_exits_three(self, capsys, tmp_path):
        with socket.socket() as sock:
            sock.bind(("127.0.0.1", 0))
            port = sock.getsockname()[1]
        code, _, err = run_cli(
            capsys,
            "fetch",
            "--base-url",
            f"http://127.0.0.1:{port}",
            "--project",
            "p1",
            "--store",
            str(tmp_path / "s"),
        )
        assert code == 3
        assert err.startswith("brownjobs: environment:")
        assert "failed after 4 attempts" in err

    def test_auth_rejection_exits_three(self, capsys, tmp_path, ci_server):
        ci_server.auth_status = 401
        code, _, err = run_cli(
            capsys,
            "fetch",
            "--base-url",
            server_url(ci_server),
            "--project",
            "p1",
            "--store",
            str(tmp_path / "s"),
        )
        assert code == 3
        assert "401" in err

    def test_console_script_is_installed(self):
        proc = subprocess.run(
            ["brownjobs", "--help"], capture_output=True, text=True, timeout=60
        )
        assert proc.returncode == 0
        assert "intermittent CI job failures" in proc.stdout


class TestFetchCommand:
    def test_fetch_sends_token_and_stores_jobs(self, capsys, tmp_path, ci_server, monkeypatch):
        ci_server.jobs = [
            api_payload(1, "failed"),
            api_payload(2, "success"),
            api_payload(3, "running"),
        ]
        ci_server.traces = {1: b"infra glitch, retrying\n"}
        monkeypatch.setenv("CI_INGEST_TOKEN", "sekrit")
        store_path = tmp_path / "store"
        code, out, err = run_cli(
            capsys,
            "fetch",
            "--base-url",
            server_url(ci_server),
            "--project",
            "grp/proj",
            "--store",
            str(store_path),
            "--json",
        )
        assert code == 0, err
        payload = json.loads(out)
        check_schema(payload, "fetch")
        assert payload["new_records"] == 2
        assert payload["logs_fetched"] == 1
        assert payload["pages"] == 1
        assert all(r["token"] == "sekrit" for r in ci_server.requests)
        assert any("grp%2Fproj" in r["path"] for r in ci_server.requests)
        store = ProjectStore(store_path)
        assert store.job_ids() == {1, 2}
        assert store.read_log(1) == "infra glitch, retrying\n"

    def test_fetch_human_output_reports_warnings(self, capsys, tmp_path, ci_server):
        ci_server.jobs = [api_payload(1, "failed")]  # no trace -> 404
        code, out, _ = run_cli(
            capsys,
            "fetch",
            "--base-url",
            server_url(ci_server),
            "--project",
            "p1",
            "--store",
            str(tmp_path / "s"),
        )
        assert code == 0
        assert "fetched 1 new records" in out
        assert "warning: job 1: trace missing (404), excluded" in out


class TestLabelCommand:
    def test_label_writes_samples_and_stats(self, capsys, store_dir, tmp_path):
        out_path = tmp_path / "samples.jsonl"
        code, out, err = run_cli(
            capsys,
            "label",
            "--store",
            store_dir,
            "--out",
            str(out_path),
            "--json",
        )
        assert code == 0, err
        payload = json.loads(out)
        check_schema(payload, "label")
        assert payload["n_failed"] == 40
        assert payload["n_brown"] == 20
        assert payload["bfr"] == pytest.approx(0.5)
        assert payload["error_rate"] is None
        samples = dataio.read_samples_jsonl(out_path)
        assert len(samples) == 40
        assert all(s.metrics is not None for s in samples)
        assert sum(s.auto_label for s in samples) == 20

    def test_label_human_stats(self, capsys, store_dir):
        code, out, _ = run_cli(capsys, "label", "--store", store_dir, "--stats")
        assert code == 0
        assert "n_failed 40" in out
        assert "bfr 0.5" in out
        assert "sample_size" in out

    def test_label_with_overlay_merges_manual_labels(self, capsys, store_dir, tmp_path):
        overlay = tmp_path / "overlay.csv"
        # two flips, two confirmations: the audited error rate is 2/4
        overlay.write_text(
            "job_id,manual_label\n1,0\n41,1\n3,1\n43,0\n", encoding="utf-8"
        )
        out_path = tmp_path / "samples.jsonl"
        code, out, _ = run_cli(
            capsys,
            "label",
            "--store",
            store_dir,
            "--overlay",
            str(overlay),
            "--out",
            str(out_path),
            "--json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["error_rate"] == pytest.approx(0.5)
        by_id = {s.job_id: s for s in dataio.read_samples_jsonl(out_path)}
        assert by_id[1].manual_label == 0 and by_id[1].auto_label == 1
        assert by_id[41].manual_label == 1 and by_id[41].auto_label == 0

    def test_label_bad_overlay_exits_two(self, capsys, store_dir, tmp_path):
        overlay = tmp_path / "overlay.csv"
        overlay.write_text("job_id,manual_label\n999999,1\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys, "label", "--store", store_dir, "--overlay", str(overlay)
        )
        assert code == 2
        assert "unknown job_id" in err


class TestSampleCommand:
    def test_stratified_subset_is_deterministic(self, capsys, store_dir, tmp_path):
        labeled = tmp_path / "all.jsonl"
        run_cli(capsys, "label", "--store", store_dir, "--out", str(labeled))
        out_a = tmp_path / "a.jsonl"
        out_b = tmp_path / "b.jsonl"
        code, out, _ = run_cli(
            capsys,
            "sample",
            "--in",
            str(labeled),
            "--out",
            str(out_a),
            "--size",
            "10",
            "--seed",
            "3",
            "--json",
        )
        assert code == 0
        payload = json.loads(out)
        check_schema(payload, "sample")
        assert payload["size"] == 10
        assert payload["n_intermittent"] == 5  # preserves the 0.5 failure ratio
        run_cli(
            capsys,
            "sample", "--in", str(labeled), "--out", str(out_b),
            "--size", "10", "--seed", "3",
        )
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_sample_requires_seed(self, capsys, store_dir, tmp_path):
        labeled = tmp_path / "all.jsonl"
        run_cli(capsys, "label", "--store", store_dir, "--out", str(labeled))
        code, _, err = run_cli(
            capsys,
            "sample", "--in", str(labeled), "--out", str(tmp_path / "x.jsonl"),
            "--size", "10",
        )
        assert code == 1
        assert "--seed" in err

    def test_nondeterministic_draws_a_seed(self, capsys, store_dir, tmp_path):
        labeled = tmp_path / "all.jsonl"
        run_cli(capsys, "label", "--store", store_dir, "--out", str(labeled))
        code, out, _ = run_cli(
            capsys,
            "sample", "--in", str(labeled), "--out", str(tmp_path / "x.jsonl"),
            "--size", "10", "--nondeterministic", "--json",
        )
        assert code == 0
        assert isinstance(json.loads(out)["seed"], int)


class TestPrepCommand:
    def test_prep_directory_emits_stats_json(self, capsys, tmp_path):
        logs = tmp_path / "logs"
        logs.mkdir()
        (logs / "1.log").write_text(
            "section_start:123:step\nFetching https://host/a from cache\n"
            "Fetching https://host/b from cache\n",
            encoding="utf-8",
        )
        (logs / "2.log").write_text("error at 2024-01-01 12:00:00 code 17\n", encoding="utf-8")
        out_dir = tmp_path / "prepped"
        code, out, err = run_cli(
            capsys, "prep", "--in", str(logs), "--out", str(out_dir)
        )
        assert code == 0, err
        payload = json.loads(out)
        check_schema(payload, "prep")
        assert payload["n_logs"] == 2
        assert (out_dir / "1.prep.txt").exists()
        assert "<URL>" in (out_dir / "1.prep.txt").read_text(encoding="utf-8")
        assert 0 < payload["reduction"]["mean"] <= 1

    def test_prep_disable_rule_seven_keeps_duplicates(self, capsys, tmp_path):
        logs = tmp_path / "logs"
        logs.mkdir()
        (logs / "1.log").write_text("same line\nsame line\n", encoding="utf-8")
        out_dir = tmp_path / "prepped"
        code, _, _ = run_cli(
            capsys,
            "prep", "--in", str(logs), "--out", str(out_dir), "--disable-rule", "7",
        )
        assert code == 0
        assert (out_dir / "1.prep.txt").read_text(encoding="utf-8").count("same line") == 2

    def test_prep_empty_directory_exits_two(self, capsys, tmp_path):
        logs = tmp_path / "logs"
        logs.mkdir()
        code, _, err = run_cli(
            capsys, "prep", "--in", str(logs), "--out", str(tmp_path / "o")
        )
        assert code == 2
        assert "no .log files" in err


class TestTrainPredict:
    def test_train_then_predict_roundtrip(self, capsys, samples_path, tmp_path):
        bundle_dir = tmp_path / "bundle"
        code, out, err = run_cli(
            capsys,
            "train",
            "--samples", samples_path,
            "--shots", "4",
            "--seed", "9",
            "--out", str(bundle_dir),
            "--json",
        )
        assert code == 0, err
        payload = json.loads(out)
        check_schema(payload, "train")
        assert payload["n_train"] == 8
        assert payload["provider"] == "test"

        raw_log = tmp_path / "probe.log"
        raw_log.write_text(
            "connection reset by peer, retrying request\n", encoding="utf-8"
        )
        code, out, err = run_cli(
            capsys,
            "predict", "--bundle", str(bundle_dir), "--log", str(raw_log), "--json",
        )
        assert code == 0, err
        result = json.loads(out)
        check_schema(result, "predict")
        assert result["label"] in (0, 1)
        assert 0.0 <= result["probability"] <= 1.0

        code, human, _ = run_cli(
            capsys, "predict", "--bundle", str(bundle_dir), "--log", str(raw_log)
        )
        assert code == 0
        assert ("intermittent" in human) or ("regular" in human)
        assert f"{result['probability']:.4f}" in human

    def test_retrain_same_seed_predicts_identically(self, capsys, samples_path, tmp_path):
        raw_log = tmp_path / "probe.log"
        raw_log.write_text("build cache miss, fetching dependencies\n", encoding="utf-8")
        outputs = []
        for name in ("one", "two"):
            bundle_dir = tmp_path / name
            run_cli(
                capsys,
                "train", "--samples", samples_path, "--shots", "4",
                "--seed", "11", "--out", str(bundle_dir),
            )
            code, out, _ = run_cli(
                capsys,
                "predict", "--bundle", str(bundle_dir), "--log", str(raw_log), "--json",
            )
            assert code == 0
            outputs.append(out)
        assert outputs[0] == outputs[1]


class TestBaselineCommands:
    def test_train_and_predict(self, capsys, store_dir, tmp_path):
        model_dir = tmp_path / "model"
        code, out, err = run_cli(
            capsys,
            "baseline", "train",
            "--project", store_dir,
            "--out", str(model_dir),
            "--seed", "3",
            "--no-hpo",
            "--k-features", "30",
            "--json",
        )
        assert code == 0, err
        payload = json.loads(out)
        check_schema(payload, "baseline_train")
        assert payload["n_train"] == 40
        assert sum(payload["vote_weights"]) == pytest.approx(1.0)

        code, out, err = run_cli(
            capsys,
            "baseline", "predict",
            "--model", str(model_dir),
            "--project", store_dir,
            "--job", "1",
            "--job", "41",
            "--json",
        )
        assert code == 0, err
        result = json.loads(out)
        check_schema(result, "baseline_predict")
        got = {r["job_id"]: r for r in result["results"]}
        assert set(got) == {1, 41}
        # job 1 is a rerun-to-success net failure, job 41 a terminal compile error
        assert got[1]["label"] == 1
        assert got[41]["label"] == 0

    def test_exclusion_file_shrinks_training_set(self, capsys, store_dir, tmp_path):
        exclude = tmp_path / "holdout.txt"
        exclude.write_text("1\n41 # compile failure\n", encoding="utf-8")
        code, out, _ = run_cli(
            capsys,
            "baseline", "train",
            "--project", store_dir,
            "--out", str(tmp_path / "m"),
            "--seed", "3",
            "--no-hpo",
            "--k-features", "30",
            "--exclude", str(exclude),
            "--json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["n_train"] == 38
        assert payload["excluded"] == 2

    def test_bad_exclusion_row_exits_two(self, capsys, store_dir, tmp_path):
        exclude = tmp_path / "holdout.txt"
        exclude.write_text("not-a-number\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys,
            "baseline", "train",
            "--project", store_dir,
            "--out", str(tmp_path / "m"),
            "--seed", "3",
            "--exclude", str(exclude),
        )
        assert code == 2
        assert "job ids must be integers" in err

    def test_predict_unknown_job_exits_two(self, capsys, store_dir, tmp_path):
        model_dir = tmp_path / "model"
        run_cli(
            capsys,
            "baseline", "train", "--project", store_dir, "--out", str(model_dir),
            "--seed", "3", "--no-hpo", "--k-features", "30",
        )
        code, _, err = run_cli(
            capsys,
            "baseline", "predict",
            "--model", str(model_dir),
            "--project", store_dir,
            "--job", "999999",
        )
        assert code == 2
        assert "not failed jobs" in err


class TestHarnessCommands:
    def test_mccv_json_schema_and_determinism(self, capsys, samples_path, tmp_path):
        args = (
            "mccv",
            "--samples", samples_path,
            "--seed", "7",
            "--repeats", "3",
            "--trials", "2",
            "--shots", "4",
            "--json",
        )
        code, first, err = run_cli(capsys, *args)
        assert code == 0, err
        payload = json.loads(first)
        check_schema(payload, "mccv")
        assert payload["config"]["repeats"] == 3
        assert payload["config"]["trainer"] == "fewshot"
        assert "jobs" not in payload["config"]

        code, second, _ = run_cli(capsys, *args)
        assert first == second

        code, parallel, _ = run_cli(capsys, *args, "--jobs", "4")
        assert first == parallel

        out_path = tmp_path / "report.json"
        code, human, _ = run_cli(capsys, *args[:-1], "--out", str(out_path))
        assert code == 0
        assert out_path.read_text(encoding="utf-8") == first
        assert "fewshot over 3 repeats" in human

    def test_mccv_baseline_trainer(self, capsys, samples_path):
        code, out, err = run_cli(
            capsys,
            "mccv",
            "--samples", samples_path,
            "--seed", "7",
            "--repeats", "2",
            "--trials", "1",
            "--shots", "2",
            "--trainer", "baseline",
            "--no-baseline-hpo",
            "--json",
        )
        assert code == 0, err
        payload = json.loads(out)
        check_schema(payload, "mccv")
        assert payload["config"]["trainer"] == "baseline"
        assert all(r["hp"] is None for r in payload["per_repeat"])

    def test_sweep_schema_and_human_output(self, capsys, samples_path):
        args = (
            "sweep",
            "--samples", samples_path,
            "--seed", "5",
            "--repeats", "2",
            "--trials", "1",
            "--shot-counts", "2,4",
        )
        code, out, err = run_cli(capsys, *args, "--json")
        assert code == 0, err
        payload = json.loads(out)
        check_schema(payload, "sweep")
        assert payload["reference_n"] == 4
        assert set(payload["per_n"]) == {"2", "4"}
        assert set(payload["p_values"]) == {"2"}

        code, human, _ = run_cli(capsys, *args)
        assert code == 0
        assert "reference" in human
        assert "p=" in human

    def test_sweep_count_spec_parsing(self, capsys, samples_path):
        for bad in ("abc", "5-2", "0"):
            code, _, err = run_cli(
                capsys,
                "sweep", "--samples", samples_path, "--seed", "5",
                "--repeats", "2", "--trials", "1", "--shot-counts", bad,
            )
            assert code == 1, bad
            assert "shot count" in err

    def test_cross_schema_and_trainer_guard(self, capsys, family_paths, tmp_path):
        a, b = family_paths
        code, out, err = run_cli(
            capsys,
            "cross",
            "--samples", a,  # satisfies the shared option; datasets drive the run
            "--dataset", f"alpha={a}",
            "--dataset", f"beta={b}",
            "--seed", "3",
            "--repeats", "1",
            "--trials", "1",
            "--shots", "4",
            "--json",
        )
        assert code == 0, err
        payload = json.loads(out)
        check_schema(payload, "cross")
        assert payload["projects"] == ["alpha", "beta"]
        assert "beta" in payload["matrix"]["alpha"]

        code, _, err = run_cli(
            capsys,
            "cross",
            "--samples", a,
            "--dataset", f"alpha={a}",
            "--seed", "3",
            "--trainer", "baseline",
        )
        assert code == 1
        assert "fewshot trainer" in err

        code, _, err = run_cli(
            capsys,
            "cross", "--samples", a, "--dataset", "missing-equals-sign", "--seed", "3",
        )
        assert code == 1
        assert "name=path" in err


class TestReportCommand:
    def make_mccv_file(self, capsys, samples_path, tmp_path):
        out_path = tmp_path / "mccv.json"
        run_cli(
            capsys,
            "mccv", "--samples", samples_path, "--seed", "7",
            "--repeats", "2", "--trials", "1", "--shots", "4",
            "--out", str(out_path),
        )
        return out_path

    def test_markdown_and_canonical_json(self, capsys, samples_path, tmp_path):
        src = self.make_mccv_file(capsys, samples_path, tmp_path)
        code, md, err = run_cli(
            capsys, "report", "--in", str(src), "--name", "demo"
        )
        assert code == 0, err
        assert md.startswith("## MCCV results: demo")
        assert "<sub>" in md

        code, canonical, _ = run_cli(
            capsys, "report", "--in", str(src), "--format", "json"
        )
        assert code == 0
        assert canonical == src.read_text(encoding="utf-8")

        out_path = tmp_path / "report.md"
        code, note, _ = run_cli(
            capsys, "report", "--in", str(src), "--out", str(out_path)
        )
        assert code == 0
        assert "wrote markdown report" in note
        assert out_path.read_text(encoding="utf-8").startswith("## MCCV results")

    def test_sweep_and_cross_shapes_recognized(self, capsys, samples_path, family_paths, tmp_path):
        sweep_path = tmp_path / "sweep.json"
        run_cli(
            capsys,
            "sweep", "--samples", samples_path, "--seed", "5",
            "--repeats", "2", "--trials", "1", "--shot-counts", "2,4",
            "--out", str(sweep_path),
        )
        code, md, _ = run_cli(capsys, "report", "--in", str(sweep_path))
        assert code == 0
        assert md.startswith("## Shots sweep")

        a, b = family_paths
        cross_path = tmp_path / "cross.json"
        run_cli(
            capsys,
            "cross", "--samples", a, "--dataset", f"alpha={a}", "--dataset", f"beta={b}",
            "--seed", "3", "--repeats", "1", "--trials", "1", "--shots", "4",
            "--out", str(cross_path),
        )
        code, md, _ = run_cli(capsys, "report", "--in", str(cross_path))
        assert code == 0
        assert md.startswith("## Cross-project F1")

    def test_unrecognized_shape_exits_two(self, capsys, tmp_path):
        bogus = tmp_path / "bogus.json"
        bogus.write_text('{"foo": 1}', encoding="utf-8")
        code, _, err = run_cli(capsys, "report", "--in", str(bogus))
        assert code == 2
        assert "unrecognized result shape" in err

    def test_non_json_input_exits_two(self, capsys, tmp_path):
        bogus = tmp_path / "bogus.json"
        bogus.write_text("not json at all", encoding="utf-8")
        code, _, err = run_cli(capsys, "report", "--in", str(bogus))
        assert code == 2
        assert "not JSON" in err


class TestTomlConfig:
    def test_config_supplies_defaults_flags_win(self, capsys, samples_path, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text(
            "[mccv]\nrepeats = 2\ntrials = 1\nshots = 4\n", encoding="utf-8"
        )
        code, out, err = run_cli(
            capsys,
            "--config", str(cfg),
            "mccv", "--samples", samples_path, "--seed", "7", "--json",
        )
        assert code == 0, err
        assert json.loads(out)["config"]["repeats"] == 2

        code, out, _ = run_cli(
            capsys,
            "--config", str(cfg),
            "mccv", "--samples", samples_path, "--seed", "7",
            "--repeats", "3", "--json",
        )
        assert json.loads(out)["config"]["repeats"] == 3
        assert json.loads(out)["config"]["shots"] == 4  # untouched key still applies

    def test_nested_section_for_group_subcommand(self, capsys, store_dir, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text(
            "[baseline.train]\nk_features = 30\nhpo = false\n", encoding="utf-8"
        )
        code, out, err = run_cli(
            capsys,
            "--config", str(cfg),
            "baseline", "train",
            "--project", store_dir,
            "--out", str(tmp_path / "m"),
            "--seed", "3",
            "--json",
        )
        assert code == 0, err
        assert json.loads(out)["n_train"] == 40

    def test_unknown_section_and_key_rejected(self, capsys, samples_path, tmp_path):
        bad_section = tmp_path / "bad1.toml"
        bad_section.write_text("[nonsense]\nx = 1\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys, "--config", str(bad_section), "mccv",
            "--samples", samples_path, "--seed", "1",
        )
        assert code == 1
        assert "unknown section" in err

        bad_key = tmp_path / "bad2.toml"
        bad_key.write_text("[mccv]\nbogus = 1\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys, "--config", str(bad_key), "mccv",
            "--samples", samples_path, "--seed", "1",
        )
        assert code == 1
        assert "unknown key" in err

    def test_malformed_toml_rejected(self, capsys, samples_path, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text("[mccv\nrepeats = ", encoding="utf-8")
        code, _, err = run_cli(
            capsys, "--config", str(cfg), "mccv",
            "--samples", samples_path, "--seed", "1",
        )
        assert code == 1
        assert err.startswith("brownjobs: usage:")
