from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fixture_corpus import PairCase, all_cases, build_project  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def method_pair():
    """Loader for the worked-example method pairs."""

    def load(stem: str) -> tuple[str, str]:
        original = (FIXTURES / "methods" / f"{stem}_original.java").read_text()
        simplified = (FIXTURES / "methods" / f"{stem}_simplified.java").read_text()
        return original, simplified

    return load


@pytest.fixture(scope="session")
def corpus_project(tmp_path_factory) -> tuple[Path, list[PairCase]]:
    """The 50+-pair corpus with its runnable mini project."""
    target = tmp_path_factory.mktemp("corpus-project")
    config_path, cases = build_project(target)
    return config_path, cases


@pytest.fixture(scope="session")
def corpus_cases() -> list[PairCase]:
    return all_cases()


@pytest.fixture(scope="session")
def mini_project_config() -> Path:
    return FIXTURES / "miniproject" / "project.json"


def _git(repo: Path, *args: str) -> None:
    subprocess.run(["git", "-C", str(repo), *args], check=True, capture_output=True)


def _commit(repo: Path, message: str, files: dict[str, str]) -> None:
    for rel, content in files.items():
        path = repo / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8")
    _git(repo, "add", "-A")
    _git(repo, "commit", "-q", "--allow-empty", "-m", message)


WIDGET_V1 = """public class Widget {
    public int twice(int a) {
        int result = a * 2;
        return result;
    }

    public int half(int a) {
        return a / 2;
    }
}
"""

WIDGET_V2 = """public class Widget {
    public int twice(int a) {
        return a * 2;
    }

    public int half(int a) {
        return a / 2;
    }
}
"""

WIDGET_V3 = WIDGET_V2.replace("a / 2", "a / 2 ")  # whitespace-only edit

PARSER_V1 = """public class Parser {
    int countDigits(String s) {
        int n = 0;
        int probe = 0;
        for (int i = 0; i < s.length(); i++) {
            n = n + 1;
        }
        return n;
    }
}
"""

PARSER_V2 = PARSER_V1.replace("        int probe = 0;\n", "")

TOOL_V1 = """public class Tool {
    boolean ready(boolean flag) {
        if (false == flag) {
            return false;
        }
        return true;
    }
}
"""

TOOL_V2 = TOOL_V1.replace("false == flag", "!flag")

BOOT_V1 = """public class Boot {
    static int start(int mode) {
        int unusedProbe = 42;
        return mode + 1;
    }
}
"""

BOOT_V2 = BOOT_V1.replace("        int unusedProbe = 42;\n", "")

# (message, files) for the 12-commit fixture history; `kept` lists the
# messages filter_commits must keep, exactly.
FIXTURE_COMMITS: list[tuple[str, dict[str, str]]] = [
    ("initial import", {"src/Widget.java": WIDGET_V1, "src/Parser.java": PARSER_V1,
                        "src/Tool.java": TOOL_V1, "src/Boot.java": BOOT_V1}),
    ("Simplify code in Widget.twice", {"src/Widget.java": WIDGET_V2}),
    ("simplified program flow in Parser", {"src/Parser.java": PARSER_V2}),
    ("Simplification of code handling notes", {"notes/handling.txt": "notes", "src/Tool.java": TOOL_V1 + "\n"}),
    ("simplify readme wording", {"README.md": "# tool\n"}),
    ("fix NPE in Widget", {"src/Widget.java": WIDGET_V2 + "\n"}),
    ("Simplify program startup", {"src/Boot.java": BOOT_V2}),
    ("refactor code paths", {"src/Parser.java": PARSER_V2 + "\n"}),
    ("SIMPLIFIED CODE everywhere", {"src/Tool.java": TOOL_V2}),
    ("simplify the code comments", {"docs/notes.txt": "x", "src/Widget.java": WIDGET_V3}),
    ("make simpler code", {"src/Widget.java": WIDGET_V3 + "\n"}),
    ("simplifying code cleanups", {"src/Widget.java": WIDGET_V3 + "\n\n"}),
]

KEPT_MESSAGES = {
    "Simplify code in Widget.twice",
    "simplified program flow in Parser",
    "Simplification of code handling notes",
    "Simplify program startup",
    "SIMPLIFIED CODE everywhere",
    "simplify the code comments",
}


@pytest.fixture(scope="session")
def fixture_repo(tmp_path_factory) -> Path:
    """A 12-commit git history with a known keyword-filter outcome."""
    repo = tmp_path_factory.mktemp("fixture-repo") / "repo"
    repo.mkdir()
    _git(repo, "init", "-q")
    _git(repo, "config", "user.email", "fixture@example.invalid")
    _git(repo, "config", "user.name", "Fixture")
    for message, files in FIXTURE_COMMITS:
        _commit(repo, message, files)
    return repo
