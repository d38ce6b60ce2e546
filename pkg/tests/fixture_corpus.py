"""Deterministic fixture corpus: 50+ method pairs embedded in a runnable
mini project.

Each pair family instantiates one rewrite pattern with varying constants and
carries ground truth, a pure-deletion flag, and the expected validation
verdict. The generated project (Library.java + LibraryTests.java) is
interpretable by the bundled micro-runner, so validation outcomes are real:
test-breaking candidates genuinely fail tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class PairCase:
    name: str  # method simple name
    original: str
    simplified: str
    pure_deletion: bool
    expect_accept: bool
    expect_reason: str | None  # rejection reason when not accepted
    rule: str | None  # taxonomy code the pair embodies, if single
    test_method: str | None  # test source covering this method


def _m(body: str) -> str:
    return body.strip("\n")


def _family_inline_return() -> list[PairCase]:
    cases = []
    for k in (2, 3, 4, 5, 8, 9):
        name = f"retTimes{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(int a) {{
        int r = a * {k};
        return r;
    }}"""),
                simplified=_m(f"""
    public static int {name}(int a) {{
        return a * {k};
    }}"""),
                pure_deletion=False,
                expect_accept=True,
                expect_reason=None,
                rule="T1.1",
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(3) == {3 * k} && Library.{name}(0) == 0;
    }}"""),
            )
        )
    return cases


def _family_unused_decl() -> list[PairCase]:
    cases = []
    for k in (1, 2, 3, 6, 7, 11):
        name = f"addConst{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(int a) {{
        int unused = {k * 10};
        return a + {k};
    }}"""),
                simplified=_m(f"""
    public static int {name}(int a) {{
        return a + {k};
    }}"""),
                pure_deletion=True,
                expect_accept=True,
                expect_reason=None,
                rule="T3.1",
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(5) == {5 + k};
    }}"""),
            )
        )
    return cases


def _family_dead_code() -> list[PairCase]:
    cases = []
    for k in (1, 2, 4, 5, 6):
        name = f"subConst{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(int a) {{
        return a - {k};
        int dead = {k};
    }}"""),
                simplified=_m(f"""
    public static int {name}(int a) {{
        return a - {k};
    }}"""),
                pure_deletion=True,
                expect_accept=True,
                expect_reason=None,
                rule="T3.3",
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(10) == {10 - k};
    }}"""),
            )
        )
    return cases


def _family_bool_simplify() -> list[PairCase]:
    cases = []
    specs = [
        ("negCheck1", "if (false == b) {\n            return true;\n        }\n        return false;",
         "if (!b) {\n            return true;\n        }\n        return false;"),
        ("negCheck2", "return b == true;", "return b;"),
        ("negCheck3", "return b ? true : false;", "return b;"),
        ("negCheck4", "return !!b;", "return b;"),
        ("negCheck5", "return b ? false : true;", "return !b;"),
    ]
    for name, orig_body, simp_body in specs:
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static boolean {name}(boolean b) {{
        {orig_body}
    }}"""),
                simplified=_m(f"""
    public static boolean {name}(boolean b) {{
        {simp_body}
    }}"""),
                pure_deletion=False,
                expect_accept=True,
                expect_reason=None,
                rule="T1.2",
                test_method=_m(f"""
    static boolean test_{name}() {{
        boolean t = Library.{name}(true);
        boolean f = Library.{name}(false);
        return {"t == false && f == true" if name in ("negCheck1", "negCheck5") else "t == true && f == false"};
    }}"""),
            )
        )
    return cases


def _family_ternary() -> list[PairCase]:
    cases = []
    for k in (3, 5, 7, 9):
        name = f"pickSign{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(boolean c) {{
        if (c) return {k}; else return -{k};
    }}"""),
                simplified=_m(f"""
    public static int {name}(boolean c) {{
        return c ? {k} : -{k};
    }}"""),
                pure_deletion=False,
                expect_accept=True,
                expect_reason=None,
                rule="T1.5",
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(true) == {k} && Library.{name}(false) == -{k};
    }}"""),
            )
        )
    return cases


def _family_merge_if() -> list[PairCase]:
    cases = []
    for k in (10, 20, 30, 40):
        name = f"gateBelow{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(int v) {{
        if (v > 0) {{
            if (v < {k}) {{
                return v;
            }}
        }}
        return 0;
    }}"""),
                simplified=_m(f"""
    public static int {name}(int v) {{
        if (v > 0 && v < {k}) {{
            return v;
        }}
        return 0;
    }}"""),
                pure_deletion=False,
                expect_accept=True,
                expect_reason=None,
                rule="T1.4",
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(1) == 1 && Library.{name}({k}) == 0 && Library.{name}(-5) == 0;
    }}"""),
            )
        )
    return cases


def _family_foreach() -> list[PairCase]:
    cases = []
    for k in (0, 1, 2, 5):
        name = f"sumPlus{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(List<Integer> xs) {{
        int total = 0;
        for (int i = 0; i < xs.size(); i++) {{
            Integer v = xs.get(i);
            total += v + {k};
        }}
        return total;
    }}"""),
                simplified=_m(f"""
    public static int {name}(List<Integer> xs) {{
        int total = 0;
        for (Integer v : xs) {{
            total += v + {k};
        }}
        return total;
    }}"""),
                pure_deletion=False,
                expect_accept=True,
                expect_reason=None,
                rule="T1.3",
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(Arrays.asList(1, 2, 3)) == {6 + 3 * k};
    }}"""),
            )
        )
    return cases


def _family_diamond() -> list[PairCase]:
    cases = []
    for k in (1, 2, 3):
        name = f"setSize{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}() {{
        Set<String> seen = new HashSet<String>();
        seen.add("x{k}");
        return seen.size() + {k};
    }}"""),
                simplified=_m(f"""
    public static int {name}() {{
        Set<String> seen = new HashSet<>();
        seen.add("x{k}");
        return seen.size() + {k};
    }}"""),
                pure_deletion=False,
                expect_accept=True,  # equal SLOC, fewer tokens: tie-break accept
                expect_reason=None,
                rule="T7.1",
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}() == {1 + k};
    }}"""),
            )
        )
    return cases


def _family_inline_variable() -> list[PairCase]:
    cases = []
    for k in (100, 200, 300, 400):
        name = f"scaleBy{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(int a) {{
        int factor = {k};
        return a * factor;
    }}"""),
                simplified=_m(f"""
    public static int {name}(int a) {{
        return a * {k};
    }}"""),
                pure_deletion=False,
                expect_accept=True,
                expect_reason=None,
                rule="T5.1",
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(2) == {2 * k};
    }}"""),
            )
        )
    return cases


def _family_merge_catch() -> list[PairCase]:
    cases = []
    for k in (1, 2):
        name = f"safeDiv{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(int a, int b) {{
        try {{
            return a / b;
        }} catch (ArithmeticException e) {{
            return -{k};
        }} catch (NumberFormatException e) {{
            return -{k};
        }}
    }}"""),
                simplified=_m(f"""
    public static int {name}(int a, int b) {{
        try {{
            return a / b;
        }} catch (ArithmeticException | NumberFormatException e) {{
            return -{k};
        }}
    }}"""),
                pure_deletion=False,
                expect_accept=True,
                expect_reason=None,
                rule="T1.9",
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(6, 2) == 3 && Library.{name}(1, 0) == -{k};
    }}"""),
            )
        )
    return cases


def _family_double_deletion() -> list[PairCase]:
    cases = []
    for k in (1, 2):
        name = f"passThrough{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(int a) {{
        int spareOne = {k};
        int spareTwo = {k + 1};
        return a;
    }}"""),
                simplified=_m(f"""
    public static int {name}(int a) {{
        return a;
    }}"""),
                pure_deletion=True,
                expect_accept=True,
                expect_reason=None,
                rule="T3.1",
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}({k}) == {k};
    }}"""),
            )
        )
    return cases


def _family_rejects() -> list[PairCase]:
    cases = []
    # candidates that are not smaller: extra parentheses add tokens
    for k in (1, 2, 3):
        name = f"echoPlus{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(int a) {{
        return a + {k};
    }}"""),
                simplified=_m(f"""
    public static int {name}(int a) {{
        return (a) + ({k});
    }}"""),
                pure_deletion=False,
                expect_accept=False,
                expect_reason="not-smaller",
                rule=None,
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(1) == {1 + k};
    }}"""),
            )
        )
    # candidates that drop covered behavior: tests catch them
    for k in (2, 3, 4):
        name = f"bumpBy{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(int a) {{
        int bumped = a + {k};
        return bumped;
    }}"""),
                simplified=_m(f"""
    public static int {name}(int a) {{
        return a;
    }}"""),
                pure_deletion=False,
                expect_accept=False,
                expect_reason="test-failure",
                rule=None,
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(1) == {1 + k};
    }}"""),
            )
        )
    # candidates that do not compile
    for k in (1, 2):
        name = f"halve{k}"
        cases.append(
            PairCase(
                name=name,
                original=_m(f"""
    public static int {name}(int a) {{
        int half = a / 2;
        return half + {k};
    }}"""),
                simplified=_m(f"""
    public static int {name}(int a) {{
        return a / ;
    }}"""),  # deliberate syntax error
                pure_deletion=False,
                expect_accept=False,
                expect_reason="compile-failure",
                rule=None,
                test_method=_m(f"""
    static boolean test_{name}() {{
        return Library.{name}(4) == {2 + k};
    }}"""),
            )
        )
    return cases


def all_cases() -> list[PairCase]:
    cases = (
        _family_inline_return()
        + _family_unused_decl()
        + _family_dead_code()
        + _family_bool_simplify()
        + _family_ternary()
        + _family_merge_if()
        + _family_foreach()
        + _family_diamond()
        + _family_inline_variable()
        + _family_merge_catch()
        + _family_double_deletion()
        + _family_rejects()
    )
    names = [c.name for c in cases]
    assert len(names) == len(set(names)), "duplicate fixture method names"
    return cases


def build_project(target: Path) -> tuple[Path, list[PairCase]]:
    """Write the mini-library project under ``target`` and return its config
    path plus the pair list."""
    cases = all_cases()
    src = target / "src"
    src.mkdir(parents=True, exist_ok=True)

    methods = "\n\n".join(c.original for c in cases)
    src.joinpath("Library.java").write_text(
        "public class Library {\n" + methods + "\n}\n", encoding="utf-8"
    )
    tests = "\n\n".join(c.test_method for c in cases if c.test_method)
    src.joinpath("LibraryTests.java").write_text(
        "public class LibraryTests {\n" + tests + "\n}\n", encoding="utf-8"
    )
    config = {
        "root": ".",
        "build_cmd": ["{python}", "-m", "simplikit.interp", "build", "src"],
        "test_cmd": ["{python}", "-m", "simplikit.interp", "test", "src", "--report", "reports/tests.xml"],
        "timeout": 120,
        "result_mode": "report-files",
        "report_glob": "reports/*.xml",
    }
    config_path = target / "project.json"
    config_path.write_text(json.dumps(config, indent=2), encoding="utf-8")
    return config_path, cases
