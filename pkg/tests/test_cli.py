import json
import subprocess
import sys
from pathlib import Path

import pytest

from simplikit.cli import main
from simplikit.corpus import read_records


def run_cli(*args, env=None) -> subprocess.CompletedProcess:
    import os

    merged = dict(os.environ)
    merged.update(env or {})
    return subprocess.run(
        [sys.executable, "-m", "simplikit.cli", *args],
        capture_output=True,
        text=True,
        env=merged,
    )


def test_rules_listing():
    result = run_cli("rules")
    assert result.returncode == 0
    lines = [json.loads(l) for l in result.stdout.splitlines()]
    assert len(lines) == 26
    assert sum(1 for l in lines if l["executable"]) == 13


def test_metrics_pair(fixtures_dir):
    original = str(fixtures_dir / "methods" / "audit_logs_original.java")
    simplified = str(fixtures_dir / "methods" / "audit_logs_simplified.java")
    result = run_cli("metrics", original, simplified)
    assert result.returncode == 0
    rows = [json.loads(l) for l in result.stdout.splitlines()]
    assert rows[0]["sloc"] == 4 and rows[1]["sloc"] == 3
    assert rows[2]["delta"]["sloc_before"] == 4


def test_metrics_bad_input_exits_2(tmp_path):
    bad = tmp_path / "bad.java"
    bad.write_text("void f() { int x = ; }")
    result = run_cli("metrics", str(bad))
    assert result.returncode == 2


def test_simplify_writes_machine_output_first(fixtures_dir, tmp_path):
    method = str(fixtures_dir / "methods" / "uuid_create_original.java")
    result = run_cli("simplify", "--backend", "catalog", "--beam", "10", method)
    assert result.returncode == 0
    payload = json.loads(result.stdout.strip())
    assert payload["candidates"]
    assert "simplify:" in result.stderr


def test_simplify_deterministic_outputs(fixtures_dir):
    method = str(fixtures_dir / "methods" / "pair_sum_original.java")
    first = run_cli("simplify", "--backend", "catalog", "--beam", "10", method)
    second = run_cli("simplify", "--backend", "catalog", "--beam", "10", method)
    assert first.stdout == second.stdout  # byte-identical for builtin backends


def test_simplify_unknown_backend_exits_3(fixtures_dir):
    method = str(fixtures_dir / "methods" / "uuid_create_original.java")
    result = run_cli("simplify", "--backend", "missing", method)
    assert result.returncode == 3


def test_simplify_no_input_exits_2():
    result = run_cli("simplify")
    assert result.returncode == 2


def test_env_variable_overrides_beam(fixtures_dir):
    method = str(fixtures_dir / "methods" / "uuid_create_original.java")
    result = run_cli("simplify", method, env={"SIMPLIKIT_BEAM": "1", "SIMPLIKIT_BACKEND": "catalog"})
    payload = json.loads(result.stdout.strip())
    assert payload["beam"] == 1
    # explicit flag beats the environment
    result = run_cli(
        "simplify", "--beam", "3", method,
        env={"SIMPLIKIT_BEAM": "1", "SIMPLIKIT_BACKEND": "catalog"},
    )
    assert json.loads(result.stdout.strip())["beam"] == 3


def test_config_file_lowest_precedence(fixtures_dir, tmp_path):
    method = str(fixtures_dir / "methods" / "uuid_create_original.java")
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"beam": 2, "backend": "catalog"}))
    result = run_cli("simplify", "--config", str(config), method)
    assert json.loads(result.stdout.strip())["beam"] == 2
    result = run_cli("simplify", "--config", str(config), method, env={"SIMPLIKIT_BEAM": "4"})
    assert json.loads(result.stdout.strip())["beam"] == 4


def test_mine_and_split_pipeline(fixture_repo, tmp_path):
    dataset = tmp_path / "ds.jsonl"
    result = run_cli(
        "mine", "--git", str(fixture_repo), "--project-name", "fixture/project",
        "--out", str(dataset),
    )
    assert result.returncode == 0, result.stderr
    records = read_records(dataset)
    assert records, "mining the fixture repo must produce records"
    assert all(r.split == "" for r in records)

    result = run_cli("split", str(dataset), "--seed", "7", "--out", str(dataset))
    assert result.returncode == 0
    assigned = read_records(dataset)
    assert all(r.split in ("train", "valid-split", "test") for r in assigned)


def test_validate_dataset_against_project(tmp_path, corpus_project):
    config_path, cases = corpus_project
    from simplikit.corpus import DatasetRecord, write_records

    chosen = [c for c in cases if c.rule == "T1.1"][:2]
    records = [
        DatasetRecord(
            project="fixture/minilib",
            commit="f" * 40,
            file_path="src/Library.java",
            method_name=f"Library.{c.name}",
            original=c.original,
            simplified=c.simplified,
            localized_original="",
            hunks=(),
        )
        for c in chosen
    ]
    dataset = tmp_path / "mini.jsonl"
    write_records(dataset, records)
    out = tmp_path / "reports.jsonl"
    result = run_cli(
        "validate", "--dataset", str(dataset), "--project", str(config_path),
        "--mark-valid", "--out", str(out),
    )
    assert result.returncode == 0, result.stderr
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(rows) == 2
    assert all(row["accepted"] for row in rows)


def test_simplify_reducer_backend_with_project(tmp_path, corpus_project):
    config_path, _ = corpus_project
    out = tmp_path / "red.jsonl"
    result = run_cli(
        "simplify", "--backend", "reducer", "--project", str(config_path),
        "--project-file", "src/Library.java", "--method", "passThrough1",
        "--out", str(out),
    )
    assert result.returncode == 0, result.stderr
    payload = json.loads(out.read_text())
    assert [c["provenance"] for c in payload["candidates"]] == ["deletion"]
    assert payload["accepted"] is not None and "spare" not in payload["accepted"]
    trace = payload["reduction_trace"][0]
    assert trace["oracle_calls"] <= trace["attempts"]
    assert trace["unit_count"] == 3


def test_eval_command(tmp_path, fixtures_dir):
    from simplikit.corpus import DatasetRecord, write_records

    original = (fixtures_dir / "methods" / "uuid_create_original.java").read_text()
    simplified = (fixtures_dir / "methods" / "uuid_create_simplified.java").read_text()
    record = DatasetRecord(
        project="p", commit="a" * 40, file_path="A.java", method_name="A.create",
        original=original, simplified=simplified, localized_original="", hunks=(),
    )
    gold = tmp_path / "gold.jsonl"
    write_records(gold, [record])
    pred = tmp_path / "pred.jsonl"
    pred.write_text(
        json.dumps({"id": record.record_id, "backend": "catalog", "candidates": [simplified]})
        + "\n"
    )
    out = tmp_path / "report.jsonl"
    result = run_cli("eval", "--pred", str(pred), "--gold", str(gold), "--out", str(out))
    assert result.returncode == 0, result.stderr
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert lines[0]["perfect"] is True
    assert lines[0]["rules"] == ["T1.1"]
    assert lines[-1]["type"] == "aggregate"
    assert "PP %" in result.stderr


def test_main_callable_directly(fixtures_dir, capsys):
    method = str(fixtures_dir / "methods" / "uuid_create_original.java")
    code = main(["simplify", "--backend", "catalog", method])
    assert code == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out.strip())["candidates"]
