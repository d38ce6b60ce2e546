"""Command-line entry point.

Subcommands: simplify, mine, split, validate, eval, metrics, rules.
Machine-readable JSONL always goes to --out (stdout by default) before the
human-readable summary, which goes to stderr. Flags can be supplied through
SIMPLIKIT_* environment variables and a --config JSON file; precedence is
config file < environment < explicit flag.

Exit codes: 0 success, 2 bad configuration, 3 backend failure,
4 validation-infrastructure failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import catalog, corpus, evalharness, gateway, metrics as metrics_mod
from .javafile import parse_java_file
from .lexer import sloc, token_count
from .localization import localize, strip_markers
from .syntax import JavaParseError, parse_method
from .validator import (
    ProjectConfig,
    ValidationTimeout,
    WorkspaceError,
    load_project_config,
    validate_candidates,
)

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_BACKEND_FAILURE = 3
EXIT_VALIDATION_INFRA = 4

_UNSET = object()


class _Output:
    """Writes JSONL lines to a file or stdout; summary text goes to stderr."""

    def __init__(self, out: str):
        self.path = None if out in ("-", "") else Path(out)
        self._lines: list[str] = []

    def emit(self, obj) -> None:
        self._lines.append(json.dumps(obj, ensure_ascii=False, sort_keys=True))

    def flush(self) -> None:
        payload = "\n".join(self._lines) + ("\n" if self._lines else "")
        if self.path is None:
            sys.stdout.write(payload)
            sys.stdout.flush()
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text(payload, encoding="utf-8")

    def summary(self, text: str) -> None:
        print(text, file=sys.stderr)


def _resolve(args: argparse.Namespace, name: str, config: dict, default, cast=lambda v: v):
    """config file < environment < explicit flag."""
    flag = getattr(args, name, _UNSET)
    if flag is not _UNSET and flag is not None:
        return flag
    env = os.environ.get(f"SIMPLIKIT_{name.upper()}")
    if env is not None:
        return cast(env)
    if name in config:
        return cast(config[name])
    return default


def _load_cli_config(args: argparse.Namespace) -> dict:
    path = getattr(args, "config", None)
    if not path:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _registry(args: argparse.Namespace, config: dict) -> gateway.BackendRegistry:
    registry_path = _resolve(args, "registry", config, None)
    if registry_path:
        return gateway.BackendRegistry.from_config(registry_path)
    return gateway.BackendRegistry()


def _read_seed_candidates(path: Optional[str]) -> list[gateway.Candidate]:
    if not path:
        return []
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        raw = json.loads(line)
        out.append(
            gateway.Candidate(
                text=raw["text"],
                score=raw.get("score"),
                provenance=raw.get("provenance", "seeded"),
            )
        )
    return out


# ---------------------------------------------------------------------------
# simplify


def _simplify_one(
    identifier: str,
    input_text: str,
    original_text: str,
    args,
    config: dict,
    registry: gateway.BackendRegistry,
    project: Optional[ProjectConfig],
    project_file: Optional[str],
    method_span: Optional[tuple[int, int]],
) -> dict:
    beam = int(_resolve(args, "beam", config, 10, int))
    max_len = int(_resolve(args, "max_len", config, 512, int))
    backend = _resolve(args, "backend", config, "catalog")
    request = gateway.GeneratorRequest(
        input_text=input_text, beam_size=beam, max_len=max_len, backend=backend
    )
    traces: list = []
    if backend == "reducer" and project is not None and project_file and method_span:
        # drive deletion by the project's test suite instead of parse-only
        from .validator import as_oracle

        def oracle_factory(unit):
            return as_oracle(
                project, file=project_file, method_span=method_span,
                expected_original=original_text,
            )

        registry.register("reducer", gateway.make_reducer_backend(oracle_factory, traces))
    elif backend == "reducer":
        registry.register("reducer", gateway.make_reducer_backend(trace_sink=traces))
    candidate_set = gateway.generate(request, registry)
    seeded = _read_seed_candidates(getattr(args, "seed_candidates", None))
    if seeded:
        candidate_set = gateway.CandidateSet(tuple(seeded) + candidate_set.candidates)
    candidate_set = gateway.filter_unaltered(candidate_set, original_text)
    candidate_set = gateway.rank(candidate_set, original_text)

    result = {
        "id": identifier,
        "backend": backend,
        "beam": beam,
        "candidates": [
            {"text": c.text, "score": c.score, "provenance": c.provenance}
            for c in candidate_set
        ],
        "accepted": None,
        "reports": [],
    }
    if traces:
        result["reduction_trace"] = [
            {
                "attempts": len(t.attempts),
                "oracle_calls": t.oracle_calls,
                "final_units": list(t.final_indices),
                "unit_count": len(t.units),
            }
            for t in traces
        ]
    if project is not None and project_file is not None and method_span is not None:
        original_unit = parse_method(original_text)
        accepted, reports = validate_candidates(
            original_unit,
            list(candidate_set),
            project,
            file=project_file,
            method_span=method_span,
        )
        result["accepted"] = accepted.text if accepted is not None else None
        result["reports"] = [r.to_dict() for r in reports]
    return result


def cmd_simplify(args: argparse.Namespace) -> int:
    config = _load_cli_config(args)
    registry = _registry(args, config)
    out = _Output(_resolve(args, "out", config, "-"))

    project: Optional[ProjectConfig] = None
    if args.project:
        project = load_project_config(args.project)

    jobs: list[tuple[str, str, str, Optional[str], Optional[tuple[int, int]]]] = []
    if args.method and project is not None and args.project_file:
        file_text = (project.root / args.project_file).read_text(encoding="utf-8")
        found = parse_java_file(file_text).method_named(args.method)
        if found is None:
            out.summary(f"method not found: {args.method} in {args.project_file}")
            return EXIT_BAD_CONFIG
        jobs.append(
            (f"{args.project_file}#{found.qualified_name}", found.unit.text,
             found.unit.text, args.project_file, found.span)
        )
    elif args.input and args.input.endswith(".jsonl"):
        for record in corpus.read_records(args.input):
            input_text = record.localized_original if args.localized else record.original
            jobs.append((record.record_id, input_text, record.original, None, None))
    elif args.input:
        text = Path(args.input).read_text(encoding="utf-8")
        original = strip_markers(text) if gateway.ORIGINAL_OPEN in text else text
        jobs.append((args.input, text, original, None, None))
    else:
        out.summary("nothing to simplify: give an input file or --project-file/--method")
        return EXIT_BAD_CONFIG

    accepted_count = 0
    for identifier, input_text, original_text, project_file, span in jobs:
        result = _simplify_one(
            identifier, input_text, original_text, args, config, registry,
            project, project_file, span,
        )
        out.emit(result)
        if result["accepted"]:
            accepted_count += 1
    out.flush()
    validated = project is not None and any(j[3] for j in jobs)
    out.summary(
        f"simplify: {len(jobs)} input(s), "
        + (f"{accepted_count} accepted" if validated else "validation skipped (no --project)")
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# mine / split


def cmd_mine(args: argparse.Namespace) -> int:
    config = _load_cli_config(args)
    out_path = _resolve(args, "out", config, "dataset.jsonl")
    if args.git:
        commits = corpus.read_git_commits(args.git, project=args.project_name)
    elif args.dump:
        commits = corpus.read_commit_dump(args.dump)
    else:
        print("mine: need --git or --dump", file=sys.stderr)
        return EXIT_BAD_CONFIG
    kept = corpus.filter_commits(commits)
    records = []
    totals = corpus.ExtractionStats()
    for commit in kept:
        extracted, stats = corpus.extract_pairs(commit, max_tokens=args.max_tokens)
        records.extend(extracted)
        totals = totals.merged(stats)
    corpus.write_records(out_path, records)
    print(
        f"mine: {len(commits)} commits seen, {len(kept)} kept by keywords, "
        f"{len(records)} records -> {out_path}\n"
        f"      skips: parse={totals.parse_failures} outside-method={totals.hunks_outside_methods} "
        f"unaltered={totals.pairs_unaltered} over-cap={totals.pairs_over_token_cap}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_split(args: argparse.Namespace) -> int:
    config = _load_cli_config(args)
    seed = int(_resolve(args, "seed", config, 0, int))
    records = corpus.read_records(args.dataset)
    assigned = corpus.split(records, seed)
    out_path = _resolve(args, "out", config, args.dataset)
    corpus.write_records(out_path, assigned)
    counts: dict[str, set] = {}
    for record in assigned:
        counts.setdefault(record.split, set()).add(record.project)
    summary = ", ".join(f"{name}: {len(projects)} projects" for name, projects in sorted(counts.items()))
    print(f"split: seed={seed} -> {summary}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate


def _validate_record(record: corpus.DatasetRecord, project, candidates_by_id) -> dict:
    file_text = (project.root / record.file_path).read_text(encoding="utf-8")
    found = parse_java_file(file_text).method_named(record.method_name)
    if found is None:
        return {"record_id": record.record_id, "error": "method-not-found"}
    texts = candidates_by_id.get(record.record_id, [record.simplified])
    accepted, reports = validate_candidates(
        found.unit, texts, project, file=record.file_path, method_span=found.span
    )
    return {
        "record_id": record.record_id,
        "accepted": accepted.text if accepted is not None else None,
        "reports": [r.to_dict() for r in reports],
    }


def cmd_validate(args: argparse.Namespace) -> int:
    config = _load_cli_config(args)
    out = _Output(_resolve(args, "out", config, "-"))
    workers = int(_resolve(args, "workers", config, 1, int))
    project = load_project_config(args.project)
    records = corpus.read_records(args.dataset)

    candidates_by_id: dict[str, list[str]] = {}
    if args.candidates:
        for line in Path(args.candidates).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            raw = json.loads(line)
            candidates_by_id[raw["id"]] = raw["candidates"]

    if args.mark_valid:
        records = corpus.mark_valid_all(records, project)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda r: _validate_record(r, project, candidates_by_id), records)
            )
    else:
        results = [_validate_record(r, project, candidates_by_id) for r in records]

    accepted = sum(1 for r in results if r.get("accepted"))
    for result in results:
        out.emit(result)
    out.flush()
    out.summary(f"validate: {len(results)} records, {accepted} accepted")
    return EXIT_OK


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args: argparse.Namespace) -> int:
    config = _load_cli_config(args)
    out = _Output(_resolve(args, "out", config, "-"))
    gold = {r.record_id: r for r in corpus.read_records(args.gold)}
    rows = []
    for line in Path(args.pred).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        raw = json.loads(line)
        record = gold.get(raw["id"])
        if record is None:
            continue
        candidates = raw.get("candidates") or ([raw["text"]] if "text" in raw else [])
        if not candidates:
            continue
        candidate = candidates[0]["text"] if isinstance(candidates[0], dict) else candidates[0]
        delta = None
        try:
            delta = metrics_mod.quality_delta(
                parse_method(record.original), parse_method(candidate)
            ).to_dict()
        except JavaParseError:
            pass
        rules = [r.code for r in catalog.classify(record.original, candidate)]
        rows.append(
            evalharness.evaluate_pair(
                raw["id"],
                raw.get("backend", "unknown"),
                candidate,
                record.simplified,
                compiled=raw.get("compiled"),
                test_equivalent=raw.get("test_equivalent"),
                rules=rules,
                delta=delta,
            )
        )
    report = evalharness.aggregate(rows)
    for row in rows:
        out.emit(row.to_dict())
    out.emit({"type": "aggregate", "report": report})
    out.flush()
    out.summary(evalharness.render_table(report))
    return EXIT_OK


# ---------------------------------------------------------------------------
# metrics / rules


def cmd_metrics(args: argparse.Namespace) -> int:
    out = _Output(args.out if args.out is not None else "-")
    units = []
    for path in args.files:
        text = Path(path).read_text(encoding="utf-8")
        try:
            unit = parse_method(text)
        except JavaParseError as exc:
            out.summary(f"metrics: cannot parse {path}: {exc}")
            return EXIT_BAD_CONFIG
        units.append((path, unit))
        out.emit(
            {
                "file": path,
                "sloc": unit.sloc,
                "tokens": unit.token_count,
                "cyclomatic": metrics_mod.cyclomatic(unit),
                "cognitive": metrics_mod.cognitive(unit),
            }
        )
    if len(units) == 2:
        delta = metrics_mod.quality_delta(units[0][1], units[1][1])
        out.emit({"delta": delta.to_dict()})
    out.flush()
    for path, unit in units:
        out.summary(
            f"{path}: sloc={unit.sloc} tokens={unit.token_count} "
            f"cyclomatic={metrics_mod.cyclomatic(unit)} cognitive={metrics_mod.cognitive(unit)}"
        )
    return EXIT_OK


def cmd_rules(args: argparse.Namespace) -> int:
    out = _Output(args.out if args.out is not None else "-")
    for row in catalog.rule_table():
        out.emit(row)
    out.flush()
    executable = sum(1 for r in catalog.rule_table() if r["executable"])
    out.summary(f"rules: {len(catalog.rule_table())} taxonomy codes, {executable} executable")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="simplikit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None, help="JSON file with flag defaults")
        p.add_argument("--out", default=None, help="JSONL output path ('-' = stdout)")

    p = sub.add_parser("simplify", help="generate, filter, rank, optionally validate")
    p.add_argument("input", nargs="?", default=None, help="method .java file or dataset .jsonl")
    p.add_argument("--backend", default=None)
    p.add_argument("--beam", type=int, default=None)
    p.add_argument("--max-len", dest="max_len", type=int, default=None)
    p.add_argument("--registry", default=None, help="backend registry JSON")
    p.add_argument("--project", default=None, help="project config for validation")
    p.add_argument("--project-file", default=None, help="file inside the project")
    p.add_argument("--method", default=None, help="qualified method name inside --project-file")
    p.add_argument("--localized", action="store_true", help="feed localized text from the dataset")
    p.add_argument("--seed-candidates", default=None, help="JSONL of extra candidates to include")
    common(p)
    p.set_defaults(fn=cmd_simplify)

    p = sub.add_parser("mine", help="build dataset records from git history or a commit dump")
    p.add_argument("--git", default=None, help="path to a local git checkout")
    p.add_argument("--project-name", default=None)
    p.add_argument("--dump", default=None, help="JSONL commit dump")
    p.add_argument("--max-tokens", type=int, default=corpus.MAX_TOKENS)
    common(p)
    p.set_defaults(fn=cmd_mine)

    p = sub.add_parser("split", help="assign 8:1:1 project-level splits")
    p.add_argument("dataset")
    p.add_argument("--seed", type=int, default=None)
    common(p)
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("validate", help="validate candidates against a project")
    p.add_argument("--dataset", required=True)
    p.add_argument("--project", required=True)
    p.add_argument("--candidates", default=None, help="JSONL {id, candidates:[...]}")
    p.add_argument("--mark-valid", action="store_true", help="set validity flags first")
    p.add_argument("--workers", type=int, default=None)
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    common(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("metrics", help="size/complexity metrics for method files")
    p.add_argument("files", nargs="+")
    common(p)
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("rules", help="machine-readable taxonomy rule listing")
    common(p)
    p.set_defaults(fn=cmd_rules)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except gateway.BackendError as exc:
        print(f"backend failure: {exc}", file=sys.stderr)
        return EXIT_BACKEND_FAILURE
    except (ValidationTimeout, WorkspaceError) as exc:
        print(f"validation infrastructure failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION_INFRA
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"bad configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
