import json
import time
from pathlib import Path

import pytest

from simplikit.javafile import parse_java_file
from simplikit.lexer import significant_texts
from simplikit.syntax import parse_method
from simplikit.validator import (
    ProjectConfig,
    SpanMismatchError,
    TestOutcome,
    ValidationTimeout,
    WorkspaceError,
    as_oracle,
    check_equivalence,
    load_project_config,
    run_project,
    splice,
    validate_candidates,
)


@pytest.fixture(scope="module")
def mini(mini_project_config):
    config = load_project_config(mini_project_config)
    source = (config.root / "src/Calc.java").read_text()
    method = parse_java_file(source).method_named("Calc.scale")
    return config, method


GOOD = "public static int scale(int a) {\n        return a * FACTOR;\n    }"
BREAKING = "public static int scale(int a) {\n        return a * 6;\n    }"
BROKEN = "public static int scale(int a) {\n        return a * ;\n    }"
NOT_SMALLER = (
    "public static int scale(int a) {\n        int result = a * FACTOR;\n"
    "        return result + 0;\n    }"
)


def test_load_config_json(mini_project_config):
    config = load_project_config(mini_project_config)
    assert config.result_mode == "report-files"
    assert config.timeout == 120


def test_load_config_flat_toml(tmp_path, mini_project_config):
    source = json.loads(Path(mini_project_config).read_text())
    toml = tmp_path / "project.toml"
    toml.write_text(
        'root = "{}"\n'
        "# comment line\n"
        'build_cmd = ["{{python}}", "-m", "simplikit.interp", "build", "src"]\n'
        'test_cmd = ["{{python}}", "-m", "simplikit.interp", "test", "src", "--report", "reports/tests.xml"]\n'
        "timeout = 120\n"
        'result_mode = "report-files"\n'
        'report_glob = "reports/*.xml"\n'.format(Path(mini_project_config).parent)
    )
    config = load_project_config(toml)
    assert config.result_mode == "report-files"
    assert config.build_cmd[1:] == ("-m", "simplikit.interp", "build", "src")


def test_config_validation_errors(tmp_path):
    with pytest.raises(ValueError):
        ProjectConfig(root=tmp_path, build_cmd=("x",), test_cmd=("y",), timeout=0)
    with pytest.raises(ValueError):
        ProjectConfig(root=tmp_path, build_cmd=(), test_cmd=("y",))
    with pytest.raises(ValueError):
        ProjectConfig(root=tmp_path, build_cmd=("x",), test_cmd=("y",), result_mode="nope")


def test_outcome_counts_must_sum():
    with pytest.raises(ValueError):
        TestOutcome(total=3, passed=1, failed=1, errored=0, skipped=0)


def test_baseline_project_passes(mini):
    config, _ = mini
    compiled, outcome = run_project(config)
    assert compiled and outcome.all_passed and outcome.total == 7
    assert "CalcTests.testScaleBasic" in outcome.test_names


def test_splice_leaves_original_untouched(mini):
    config, method = mini
    original = (config.root / "src/Calc.java").read_text()
    with splice(config, "src/Calc.java", method.span, GOOD, expected_original=method.unit.text) as ws:
        spliced = ws.file.read_text()
        assert "a * FACTOR" in spliced and "int result" not in spliced.split("clamp")[0]
        assert ws.path != config.root
    assert (config.root / "src/Calc.java").read_text() == original
    assert not ws.path.exists()  # cleaned up


def test_splice_span_mismatch(mini):
    config, method = mini
    wrong = (method.span[0] + 4, method.span[1])
    with pytest.raises(SpanMismatchError):
        splice(config, "src/Calc.java", wrong, GOOD, expected_original=method.unit.text)
    with pytest.raises(SpanMismatchError):
        splice(config, "src/Calc.java", (0, 10**9), GOOD)


def test_splice_missing_file(mini):
    config, method = mini
    with pytest.raises(WorkspaceError):
        splice(config, "src/Nope.java", method.span, GOOD)


def test_check_equivalence_on_good_candidate(mini):
    config, method = mini
    with splice(config, "src/Calc.java", method.span, GOOD) as ws:
        compiled, outcome = check_equivalence(ws, config)
    assert compiled and outcome.all_passed


def test_check_equivalence_detects_behavior_change(mini):
    config, method = mini
    with splice(config, "src/Calc.java", method.span, BREAKING) as ws:
        compiled, outcome = check_equivalence(ws, config)
    assert compiled
    assert not outcome.all_passed
    assert outcome.failed >= 1


def test_timeout_raises_validation_timeout(mini, tmp_path):
    config, method = mini
    slow = ProjectConfig(
        root=config.root,
        build_cmd=("{python}", "-c", "import time; time.sleep(5)"),
        test_cmd=config.test_cmd,
        timeout=0.4,
        result_mode=config.result_mode,
        report_glob=config.report_glob,
    )
    with splice(slow, "src/Calc.java", method.span, GOOD) as ws:
        with pytest.raises(ValidationTimeout):
            check_equivalence(ws, slow)


def test_validate_candidates_order_and_reasons(mini):
    config, method = mini
    accepted, reports = validate_candidates(
        method.unit,
        [BREAKING, BROKEN, NOT_SMALLER, method.unit.text, GOOD],
        config,
        file="src/Calc.java",
        method_span=method.span,
    )
    assert [r.reason for r in reports] == [
        "test-failure",
        "compile-failure",
        "not-smaller",
        "unaltered",
        None,
    ]
    assert reports[-1].verdict == "accepted"
    assert accepted is not None
    assert significant_texts(accepted.text) == significant_texts(GOOD)


def test_validate_stops_at_first_accept(mini):
    config, method = mini
    second_good = "public static int scale(int a) {\n        return FACTOR * a;\n    }"
    accepted, reports = validate_candidates(
        method.unit, [GOOD, second_good], config,
        file="src/Calc.java", method_span=method.span,
    )
    assert len(reports) == 1
    assert significant_texts(accepted.text) == significant_texts(GOOD)


def test_validate_empty_set(mini):
    config, method = mini
    accepted, reports = validate_candidates(
        method.unit, [], config, file="src/Calc.java", method_span=method.span
    )
    assert accepted is None and reports == []


def test_acceptance_invariant_on_reports(mini):
    config, method = mini
    _, reports = validate_candidates(
        method.unit,
        [BREAKING, NOT_SMALLER, GOOD],
        config,
        file="src/Calc.java",
        method_span=method.span,
    )
    for report in reports:
        if report.verdict == "accepted":
            assert report.compiled is True
            assert report.outcome is not None and report.outcome.all_passed
            assert report.sloc_candidate < report.sloc_original or (
                report.sloc_candidate == report.sloc_original
                and report.tokens_candidate < report.tokens_original
            )


def test_tie_break_acceptance_equal_sloc_fewer_tokens(mini):
    config, _ = mini
    source = (config.root / "src/Calc.java").read_text()
    method = parse_java_file(source).method_named("Calc.uniqueCount")
    candidate = method.unit.text.replace("new HashSet<String>()", "new HashSet<>()")
    from simplikit.lexer import sloc, token_count

    assert sloc(candidate) == method.unit.sloc
    assert token_count(candidate) < method.unit.token_count
    accepted, reports = validate_candidates(
        method.unit, [candidate], config, file="src/Calc.java", method_span=method.span
    )
    assert accepted is not None
    assert reports[0].verdict == "accepted"


def test_oracle_memoizes_and_isolates(mini):
    config, method = mini
    oracle = as_oracle(
        config, file="src/Calc.java", method_span=method.span,
        expected_original=method.unit.text,
    )
    assert oracle.isolation_safe
    assert oracle(method.unit) is True
    assert oracle(parse_method(BREAKING)) is False
    before = len(oracle.memo)
    start = time.monotonic()
    assert oracle(parse_method(BREAKING)) is False  # memo hit
    assert len(oracle.memo) == before
    assert time.monotonic() - start < 0.05


def test_report_file_mode_populates_test_names(mini):
    config, method = mini
    with splice(config, "src/Calc.java", method.span, GOOD) as ws:
        _, outcome = check_equivalence(ws, config)
    assert outcome.total == 7
    assert all(name.startswith("CalcTests.") for name in outcome.test_names)
