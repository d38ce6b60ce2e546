"""Test-equivalence validation: splice a candidate into its project, build,
run the suite, and enforce the acceptance invariant.

A candidate is accepted only when the project compiles, every test passes,
and the candidate is strictly smaller (fewer SLOC, or equal SLOC with fewer
significant tokens). Each candidate gets its own workspace copy, so
validations never share mutable state.
"""

from __future__ import annotations

import glob
import hashlib
import json
import shlex
import shutil
import subprocess
import sys
import tempfile
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from .lexer import significant_texts, sloc, token_count
from .metrics import quality_delta
from .syntax import JavaParseError, MethodUnit, parse_method


class SpanMismatchError(ValueError):
    """The target span does not contain the expected original method."""


class WorkspaceError(RuntimeError):
    """Filesystem or configuration failure while preparing/running a run."""


class ValidationTimeout(RuntimeError):
    """A build or test run exceeded the configured timeout."""


@dataclass(frozen=True)
class ProjectConfig:
    root: Path
    build_cmd: tuple[str, ...]
    test_cmd: tuple[str, ...]
    timeout: float = 300.0
    result_mode: str = "exit-code"  # exit-code | report-files
    report_glob: str = "reports/*.xml"
    reruns: int = 1

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if not self.build_cmd or not self.test_cmd:
            raise ValueError("build and test commands must be non-empty")
        if self.result_mode not in ("exit-code", "report-files"):
            raise ValueError(f"unknown result mode: {self.result_mode}")
        if self.reruns < 1:
            raise ValueError("reruns must be >= 1")


def _coerce_cmd(value: Union[str, Sequence[str]]) -> tuple[str, ...]:
    if isinstance(value, str):
        return tuple(shlex.split(value))
    return tuple(str(part) for part in value)


def load_project_config(path: Union[str, Path]) -> ProjectConfig:
    """Read a project config from JSON or flat TOML.

    The TOML reader covers flat `key = value` files with JSON-compatible
    values (strings, numbers, arrays); nested tables are not supported.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        raw = json.loads(text)
    else:
        raw = _parse_flat_toml(text)
    root = Path(raw.get("root", "."))
    if not root.is_absolute():
        root = (path.parent / root).resolve()
    return ProjectConfig(
        root=root,
        build_cmd=_coerce_cmd(raw["build_cmd"]),
        test_cmd=_coerce_cmd(raw["test_cmd"]),
        timeout=float(raw.get("timeout", 300.0)),
        result_mode=raw.get("result_mode", "exit-code"),
        report_glob=raw.get("report_glob", "reports/*.xml"),
        reruns=int(raw.get("reruns", 1)),
    )


def _parse_flat_toml(text: str) -> dict:
    out: dict = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("["):
            continue
        if "=" not in line:
            raise ValueError(f"cannot parse config line: {line!r}")
        key, _, value = line.partition("=")
        value = value.strip()
        try:
            out[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            out[key.strip()] = value.strip('"')
    return out


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # keep pytest collection away

    total: int
    passed: int
    failed: int
    errored: int
    skipped: int
    test_names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.passed + self.failed + self.errored + self.skipped != self.total:
            raise ValueError("test outcome counts do not sum to total")

    @property
    def all_passed(self) -> bool:
        return self.failed == 0 and self.errored == 0

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "passed": self.passed,
            "failed": self.failed,
            "errored": self.errored,
            "skipped": self.skipped,
            "test_names": list(self.test_names),
        }


@dataclass
class ValidationReport:
    candidate_id: str
    compiled: Optional[bool]
    outcome: Optional[TestOutcome]
    sloc_original: int
    sloc_candidate: int
    tokens_original: int
    tokens_candidate: int
    metrics: Optional[dict]
    verdict: str  # accepted | rejected
    reason: Optional[str]  # compile-failure | test-failure | not-smaller | unaltered | timeout

    def to_dict(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "compiled": self.compiled,
            "outcome": self.outcome.to_dict() if self.outcome else None,
            "sloc_original": self.sloc_original,
            "sloc_candidate": self.sloc_candidate,
            "tokens_original": self.tokens_original,
            "tokens_candidate": self.tokens_candidate,
            "metrics": self.metrics,
            "verdict": self.verdict,
            "reason": self.reason,
        }


@dataclass
class Workspace:
    path: Path
    file: Path  # spliced file inside the workspace
    _owned: bool = True

    def cleanup(self) -> None:
        if self._owned and self.path.exists():
            shutil.rmtree(self.path, ignore_errors=True)

    def __enter__(self) -> "Workspace":
        return self

    def __exit__(self, *exc) -> None:
        self.cleanup()


def splice(
    config: ProjectConfig,
    file: Union[str, Path],
    method_span: tuple[int, int],
    candidate_text: str,
    *,
    expected_original: Optional[str] = None,
) -> Workspace:
    """Copy the project into an isolated workspace and replace the method at
    ``method_span`` of ``file`` with ``candidate_text``. The original
    checkout is never touched."""
    rel = Path(file)
    source_file = (config.root / rel) if not rel.is_absolute() else rel
    if not source_file.exists():
        raise WorkspaceError(f"file not found under project root: {source_file}")
    original_text = source_file.read_text(encoding="utf-8")
    lo, hi = method_span
    if lo < 0 or hi > len(original_text) or lo > hi:
        raise SpanMismatchError(f"span {method_span} out of range for {source_file}")
    current = original_text[lo:hi]
    if expected_original is not None and significant_texts(current) != significant_texts(
        expected_original
    ):
        raise SpanMismatchError(
            f"span {method_span} of {rel} does not hold the expected method"
        )

    try:
        workdir = Path(tempfile.mkdtemp(prefix="simplikit-ws-"))
        dest_root = workdir / "project"
        shutil.copytree(config.root, dest_root, ignore=shutil.ignore_patterns(".git"))
        target = dest_root / rel if not rel.is_absolute() else dest_root / rel.name
        new_text = original_text[:lo] + candidate_text + original_text[hi:]
        target.write_text(new_text, encoding="utf-8")
    except OSError as exc:
        raise WorkspaceError(f"io failure preparing workspace: {exc}") from exc
    return Workspace(path=dest_root, file=target)


def _substitute(cmd: Sequence[str]) -> list[str]:
    return [part.replace("{python}", sys.executable) for part in cmd]


def _run(cmd: Sequence[str], cwd: Path, timeout: float) -> subprocess.CompletedProcess:
    try:
        return subprocess.run(
            _substitute(cmd),
            cwd=cwd,
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    except subprocess.TimeoutExpired as exc:
        raise ValidationTimeout(f"command timed out after {timeout}s: {cmd}") from exc
    except OSError as exc:
        raise WorkspaceError(f"cannot run {cmd}: {exc}") from exc


def _parse_reports(workdir: Path, pattern: str) -> Optional[TestOutcome]:
    paths = sorted(glob.glob(str(workdir / pattern)))
    if not paths:
        return None
    total = passed = failed = errored = skipped = 0
    names: list[str] = []
    for report in paths:
        try:
            tree = ET.parse(report)
        except ET.ParseError:
            continue
        root = tree.getroot()
        suites = [root] if root.tag == "testsuite" else list(root)
        for suite in suites:
            for case in suite.iter("testcase"):
                total += 1
                name = case.get("name", f"case-{total}")
                classname = case.get("classname", "")
                names.append(f"{classname}.{name}" if classname else name)
                if case.find("failure") is not None:
                    failed += 1
                elif case.find("error") is not None:
                    errored += 1
                elif case.find("skipped") is not None:
                    skipped += 1
                else:
                    passed += 1
    return TestOutcome(total, passed, failed, errored, skipped, tuple(names))


def check_equivalence(
    workspace: Workspace, config: ProjectConfig
) -> tuple[bool, Optional[TestOutcome]]:
    """Build the workspace, then run the suite. Returns (compiled, outcome);
    outcome is None when the build already failed. Timeouts raise
    :class:`ValidationTimeout` rather than masquerading as test failures."""
    build = _run(config.build_cmd, workspace.path, config.timeout)
    if build.returncode != 0:
        return (False, None)

    for stale in glob.glob(str(workspace.path / config.report_glob)):
        Path(stale).unlink(missing_ok=True)

    outcome: Optional[TestOutcome] = None
    for _ in range(config.reruns):
        run = _run(config.test_cmd, workspace.path, config.timeout)
        if config.result_mode == "report-files":
            outcome = _parse_reports(workspace.path, config.report_glob)
            if outcome is None:
                if run.returncode != 0:
                    outcome = TestOutcome(1, 0, 0, 1, 0, ("suite",))
                else:
                    raise WorkspaceError(
                        f"no test reports matched {config.report_glob!r} "
                        "but the test command succeeded"
                    )
        else:
            ok = run.returncode == 0
            outcome = TestOutcome(1, 1 if ok else 0, 0 if ok else 1, 0, 0, ("suite",))
        if not outcome.all_passed:
            break  # a failing rerun settles it
    return (True, outcome)


def run_project(config: ProjectConfig) -> tuple[bool, Optional[TestOutcome]]:
    """Build and test the unmodified project in an isolated copy."""
    workdir = Path(tempfile.mkdtemp(prefix="simplikit-base-"))
    dest = workdir / "project"
    try:
        shutil.copytree(config.root, dest, ignore=shutil.ignore_patterns(".git"))
        ws = Workspace(path=dest, file=dest)
        return check_equivalence(ws, config)
    finally:
        shutil.rmtree(workdir, ignore_errors=True)


def _is_smaller(
    sloc_orig: int, tok_orig: int, sloc_cand: int, tok_cand: int
) -> bool:
    return sloc_cand < sloc_orig or (sloc_cand == sloc_orig and tok_cand < tok_orig)


def validate_candidates(
    original: MethodUnit,
    candidates: Sequence,
    config: ProjectConfig,
    *,
    file: Union[str, Path],
    method_span: Optional[tuple[int, int]] = None,
) -> tuple[Optional[MethodUnit], list[ValidationReport]]:
    """Validate ranked candidates in order; return the first accepted one.

    ``candidates`` holds strings or objects with a ``text`` attribute, already
    unaltered-filtered and ranked. Cheap checks (unaltered, size) run before
    any build is spawned; per-candidate failures are recorded, never raised.
    """
    span = method_span if method_span is not None else original.file_span
    reports: list[ValidationReport] = []
    accepted: Optional[MethodUnit] = None
    original_tokens = significant_texts(original.text)

    for index, candidate in enumerate(candidates):
        text = candidate if isinstance(candidate, str) else candidate.text
        candidate_id = f"cand-{index:03d}"
        s_orig, t_orig = original.sloc, original.token_count
        s_cand, t_cand = sloc(text), token_count(text)
        metrics = None
        try:
            parsed = parse_method(text)
            metrics = quality_delta(original, parsed).to_dict()
        except JavaParseError:
            parsed = None

        def reject(reason: str, compiled=None, outcome=None) -> ValidationReport:
            return ValidationReport(
                candidate_id, compiled, outcome, s_orig, s_cand, t_orig, t_cand,
                metrics, "rejected", reason,
            )

        if significant_texts(text) == original_tokens:
            reports.append(reject("unaltered"))
            continue
        if not _is_smaller(s_orig, t_orig, s_cand, t_cand):
            reports.append(reject("not-smaller"))
            continue

        try:
            with splice(config, file, span, text, expected_original=original.text) as ws:
                compiled, outcome = check_equivalence(ws, config)
        except ValidationTimeout:
            reports.append(reject("timeout"))
            continue
        except SpanMismatchError:
            raise
        except WorkspaceError as exc:
            reports.append(reject(f"workspace-error: {exc}"))
            continue

        if not compiled:
            reports.append(reject("compile-failure", compiled=False))
            continue
        if outcome is None or not outcome.all_passed:
            reports.append(reject("test-failure", compiled=True, outcome=outcome))
            continue

        reports.append(
            ValidationReport(
                candidate_id, True, outcome, s_orig, s_cand, t_orig, t_cand,
                metrics, "accepted", None,
            )
        )
        accepted = parsed if parsed is not None else parse_method(text)
        break
    return accepted, reports


def as_oracle(
    config: ProjectConfig,
    *,
    file: Union[str, Path],
    method_span: tuple[int, int],
    expected_original: Optional[str] = None,
) -> Callable[[MethodUnit], bool]:
    """Test-equivalence predicate for the reducer: splice + build + test,
    memoized by significant-token hash. Each evaluation gets its own
    workspace, so the predicate is isolation-safe."""
    memo: dict[str, bool] = {}

    def oracle(unit: MethodUnit) -> bool:
        key = hashlib.sha256(
            "\x1f".join(significant_texts(unit.text)).encode("utf-8")
        ).hexdigest()
        if key in memo:
            return memo[key]
        with splice(config, file, method_span, unit.text, expected_original=expected_original) as ws:
            compiled, outcome = check_equivalence(ws, config)
        verdict = bool(compiled and outcome is not None and outcome.all_passed)
        memo[key] = verdict
        return verdict

    oracle.isolation_safe = True  # type: ignore[attr-defined]
    oracle.memo = memo  # type: ignore[attr-defined]
    return oracle
