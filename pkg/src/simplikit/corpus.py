"""Dataset construction from local git history or exported commit dumps.

Commits are kept when their message pairs a simplification keyword
(simplify / simplification / simplified) with "code" or "program" and they
touch at least one .java file. Qualifying diff hunks map to the enclosing
method before/after; records carry perfect-localization markers, split
assignment is deterministic per project, and validity is established by
building and testing the unmodified project.
"""

from __future__ import annotations

import hashlib
import json
import re
import subprocess
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .javafile import parse_java_file
from .lexer import significant_texts, sloc, token_count
from .localization import DiffHunk, diff, localize, qualifies_as_simplification
from .syntax import JavaParseError
from .validator import ProjectConfig, ValidationTimeout, WorkspaceError, run_project

MAX_TOKENS = 512

_KEYWORD = re.compile(r"\b(simplify|simplification|simplified)\b", re.IGNORECASE)
_SUBJECT = re.compile(r"\b(code|program)\b", re.IGNORECASE)


@dataclass(frozen=True)
class ChangedFile:
    path: str
    before: str
    after: str


@dataclass(frozen=True)
class CommitRecord:
    project: str
    commit: str
    message: str
    files: tuple[ChangedFile, ...]

    def __post_init__(self) -> None:
        if not self.files:
            raise ValueError("a commit record needs at least one changed file")


@dataclass(frozen=True)
class DatasetRecord:
    project: str
    commit: str
    file_path: str
    method_name: str
    original: str
    simplified: str
    localized_original: str
    hunks: tuple[dict, ...]
    split: str = ""  # train | valid-split | test
    validity: str = "whole"  # whole | valid
    validity_reason: str = ""
    tokens_original: int = 0
    tokens_simplified: int = 0
    sloc_original: int = 0
    sloc_simplified: int = 0

    @property
    def record_id(self) -> str:
        return f"{self.project}:{self.commit[:12]}:{self.method_name}"

    def to_dict(self) -> dict:
        return {
            "project": self.project,
            "commit": self.commit,
            "file_path": self.file_path,
            "method_name": self.method_name,
            "original": self.original,
            "simplified": self.simplified,
            "localized_original": self.localized_original,
            "hunks": list(self.hunks),
            "split": self.split,
            "validity": self.validity,
            "validity_reason": self.validity_reason,
            "tokens_original": self.tokens_original,
            "tokens_simplified": self.tokens_simplified,
            "sloc_original": self.sloc_original,
            "sloc_simplified": self.sloc_simplified,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "DatasetRecord":
        return cls(
            project=raw["project"],
            commit=raw["commit"],
            file_path=raw["file_path"],
            method_name=raw["method_name"],
            original=raw["original"],
            simplified=raw["simplified"],
            localized_original=raw["localized_original"],
            hunks=tuple(raw.get("hunks", ())),
            split=raw.get("split", ""),
            validity=raw.get("validity", "whole"),
            validity_reason=raw.get("validity_reason", ""),
            tokens_original=raw.get("tokens_original", 0),
            tokens_simplified=raw.get("tokens_simplified", 0),
            sloc_original=raw.get("sloc_original", 0),
            sloc_simplified=raw.get("sloc_simplified", 0),
        )


def message_matches(message: str) -> bool:
    return bool(_KEYWORD.search(message)) and bool(_SUBJECT.search(message))


def filter_commits(records: Iterable[CommitRecord]) -> list[CommitRecord]:
    """Keep commits whose message matches the keyword conjunction and that
    touch at least one .java file."""
    kept = []
    for record in records:
        if not message_matches(record.message):
            continue
        if not any(f.path.endswith(".java") for f in record.files):
            continue
        kept.append(record)
    return kept


def _hunk_summary(hunk: DiffHunk) -> dict:
    return {
        "deleted_lines": [n for n, _ in hunk.deleted],
        "added_lines": [n for n, _ in hunk.added],
        "significant_deleted": hunk.significant_deleted,
        "significant_added": hunk.significant_added,
        "qualifies": qualifies_as_simplification(hunk),
    }


def _line_of(text: str, offset: int) -> int:
    return text.count("\n", 0, offset) + 1


@dataclass
class ExtractionStats:
    files_seen: int = 0
    parse_failures: int = 0
    hunks_seen: int = 0
    hunks_qualifying: int = 0
    hunks_outside_methods: int = 0
    pairs_unaltered: int = 0
    pairs_over_token_cap: int = 0
    pairs_not_smaller: int = 0
    records: int = 0

    def merged(self, other: "ExtractionStats") -> "ExtractionStats":
        merged = ExtractionStats()
        for name in vars(self):
            setattr(merged, name, getattr(self, name) + getattr(other, name))
        return merged


def extract_pairs(
    commit: CommitRecord, *, max_tokens: int = MAX_TOKENS
) -> tuple[list[DatasetRecord], ExtractionStats]:
    """One record per (method, commit) whose file diff contains a qualifying
    hunk inside the method. Unparseable files and oversized or unaltered
    pairs are counted and skipped, never fatal."""
    stats = ExtractionStats()
    records: dict[str, DatasetRecord] = {}
    for changed in commit.files:
        if not changed.path.endswith(".java"):
            continue
        stats.files_seen += 1
        if not changed.before or not changed.after:
            continue  # added or deleted file: no method pair exists
        try:
            before = parse_java_file(changed.before)
            after = parse_java_file(changed.after)
        except JavaParseError:
            stats.parse_failures += 1
            continue

        method_ranges = []
        for m in before.methods:
            start_line = _line_of(changed.before, m.span[0])
            end_line = _line_of(changed.before, m.span[1] - 1)
            method_ranges.append((start_line, end_line, m))

        for hunk in diff(changed.before, changed.after):
            stats.hunks_seen += 1
            if not qualifies_as_simplification(hunk):
                continue
            stats.hunks_qualifying += 1
            touched = None
            for start_line, end_line, m in method_ranges:
                if any(start_line <= n <= end_line for n in hunk.deleted_line_numbers):
                    touched = m
                    break
            if touched is None:
                stats.hunks_outside_methods += 1
                continue
            counterpart = after.method_named(touched.qualified_name)
            if counterpart is None:
                stats.hunks_outside_methods += 1
                continue
            key = f"{changed.path}::{touched.qualified_name}"
            if key in records:
                continue  # one record per (method, commit)
            original_text = touched.unit.text
            simplified_text = counterpart.unit.text
            if significant_texts(original_text) == significant_texts(simplified_text):
                stats.pairs_unaltered += 1
                continue
            t_orig, t_simp = token_count(original_text), token_count(simplified_text)
            if t_orig > max_tokens or t_simp > max_tokens:
                stats.pairs_over_token_cap += 1
                continue
            s_orig, s_simp = sloc(original_text), sloc(simplified_text)
            if not (s_simp < s_orig or (s_simp == s_orig and t_simp < t_orig)):
                stats.pairs_not_smaller += 1
                continue
            pair = localize(original_text, simplified_text)
            records[key] = DatasetRecord(
                project=commit.project,
                commit=commit.commit,
                file_path=changed.path,
                method_name=touched.qualified_name,
                original=original_text,
                simplified=simplified_text,
                localized_original=pair.localized_original,
                hunks=tuple(_hunk_summary(h) for h in pair.hunks),
                tokens_original=t_orig,
                tokens_simplified=t_simp,
                sloc_original=s_orig,
                sloc_simplified=s_simp,
            )
            stats.records += 1
    return list(records.values()), stats


# ---------------------------------------------------------------------------
# splits


def _project_order_key(seed: int, project: str) -> str:
    return hashlib.sha256(f"{seed}:{project}".encode("utf-8")).hexdigest()


def split(records: Sequence[DatasetRecord], seed: int) -> list[DatasetRecord]:
    """Assign train/valid-split/test at the project level, 8:1:1 by project
    count (within one project), deterministically from the seed."""
    projects = sorted({r.project for r in records})
    ordered = sorted(projects, key=lambda p: _project_order_key(seed, p))
    n = len(ordered)
    n_test = int(n / 10 + 0.5)
    n_valid = int(n / 10 + 0.5)
    if n >= 3:
        n_test = max(1, n_test)
        n_valid = max(1, n_valid)
    n_train = n - n_valid - n_test
    assignment: dict[str, str] = {}
    for i, project in enumerate(ordered):
        if i < n_train:
            assignment[project] = "train"
        elif i < n_train + n_valid:
            assignment[project] = "valid-split"
        else:
            assignment[project] = "test"
    return [replace(r, split=assignment[r.project]) for r in records]


# ---------------------------------------------------------------------------
# validity


def project_validity(project_config: Optional[ProjectConfig]) -> tuple[str, str]:
    """(validity, reason) for the unmodified project: `valid` iff it builds,
    has at least one test, and every test passes."""
    if project_config is None or not Path(project_config.root).exists():
        return ("whole", "checkout-missing")
    try:
        compiled, outcome = run_project(project_config)
    except ValidationTimeout:
        return ("whole", "build-timeout")
    except WorkspaceError as exc:
        return ("whole", f"harness-error: {exc}")
    if not compiled:
        return ("whole", "build-failure")
    if outcome is None or outcome.total == 0:
        return ("whole", "no-tests")
    if not outcome.all_passed:
        return ("whole", "test-failure")
    return ("valid", "")


def mark_valid(record: DatasetRecord, project_config: Optional[ProjectConfig]) -> DatasetRecord:
    """Flag one record from a fresh run of its project."""
    validity, reason = project_validity(project_config)
    return replace(record, validity=validity, validity_reason=reason)


def mark_valid_all(
    records: Sequence[DatasetRecord], project_config: Optional[ProjectConfig]
) -> list[DatasetRecord]:
    """Flag every record of one shared project, running the project once."""
    validity, reason = project_validity(project_config)
    return [replace(r, validity=validity, validity_reason=reason) for r in records]


# ---------------------------------------------------------------------------
# JSONL codec


def write_records(path: Union[str, Path], records: Iterable[DatasetRecord]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_records(path: Union[str, Path]) -> list[DatasetRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(DatasetRecord.from_dict(json.loads(line)))
    return records


# ---------------------------------------------------------------------------
# ingestion: local git history and pre-crawled dumps


def _git(repo: Path, *args: str) -> str:
    result = subprocess.run(
        ["git", "-C", str(repo), *args], capture_output=True, text=True
    )
    if result.returncode != 0:
        raise RuntimeError(f"git {' '.join(args)} failed: {result.stderr.strip()}")
    return result.stdout


def _git_show(repo: Path, ref: str, path: str) -> str:
    result = subprocess.run(
        ["git", "-C", str(repo), "show", f"{ref}:{path}"], capture_output=True, text=True
    )
    return result.stdout if result.returncode == 0 else ""


def read_git_commits(
    repo: Union[str, Path], *, project: Optional[str] = None, max_commits: Optional[int] = None
) -> list[CommitRecord]:
    """Walk a local git checkout into commit records with full before/after
    file texts."""
    repo = Path(repo)
    project_id = project or repo.name
    log = _git(repo, "log", "--format=%H%x1f%B%x1e")
    commits: list[CommitRecord] = []
    for chunk in log.split("\x1e"):
        chunk = chunk.strip("\n")
        if not chunk.strip():
            continue
        sha, _, message = chunk.partition("\x1f")
        sha = sha.strip()
        if max_commits is not None and len(commits) >= max_commits:
            break
        name_status = _git(
            repo, "diff-tree", "--no-commit-id", "--name-status", "-r", "--root", sha
        )
        files: list[ChangedFile] = []
        for line in name_status.splitlines():
            parts = line.split("\t")
            if len(parts) < 2:
                continue
            status, path = parts[0], parts[-1]
            if status.startswith("D"):
                continue
            before = _git_show(repo, f"{sha}^", path) if status[0] in "MR" else ""
            after = _git_show(repo, sha, path)
            files.append(ChangedFile(path=path, before=before, after=after))
        if files:
            commits.append(
                CommitRecord(project=project_id, commit=sha, message=message.strip(), files=tuple(files))
            )
    return commits


def read_commit_dump(path: Union[str, Path]) -> list[CommitRecord]:
    """Import adapter for pre-crawled commit dumps: one JSON object per line
    with project, commit, message, files [{path, before, after}]."""
    commits = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            commits.append(
                CommitRecord(
                    project=raw["project"],
                    commit=raw["commit"],
                    message=raw["message"],
                    files=tuple(
                        ChangedFile(f["path"], f.get("before", ""), f.get("after", ""))
                        for f in raw["files"]
                    ),
                )
            )
    return commits
