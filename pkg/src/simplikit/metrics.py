"""Complexity and size metrics over parsed methods.

Cyclomatic complexity counts decision points. The readability score follows
a fixed, documented subset of the cognitive-complexity rules:

* +1 for each ``if``, ``else``/``else if``, ternary, ``switch``, loop
  (``for``/foreach/``while``/``do``) and catch clause;
* structures in the nesting set (if, switch, loops, catch, ternary) add
  their current nesting depth on top, except an ``else if`` continuation
  which costs a flat +1 and keeps the chain's nesting level;
* +1 per run of like logical operators (``a && b && c`` is one run,
  ``a && b || c`` is two); a ``!`` resets the run;
* labelled ``break``/``continue`` add +1.

Lambdas neither increment the score nor the nesting level. Both metrics
ignore comments and whitespace entirely because they work on the tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .syntax import MethodUnit, Node

_LOOPS = ("for", "foreach", "while", "do")


def cyclomatic(unit: MethodUnit) -> int:
    """1 + decision points: branches, loops, case labels, catches, ternaries,
    and short-circuit operators."""
    count = 1
    for node in unit.tree.walk():
        kind = node.kind
        if kind in ("if", "ternary") or kind in _LOOPS or kind == "catch-clause":
            count += 1
        elif kind == "case" and not node.attrs.get("default", False):
            count += 1
        elif kind == "binary" and node.attrs.get("op") in ("&&", "||"):
            count += 1
    return count


def cognitive(unit: MethodUnit) -> int:
    total = 0

    def visit_expr(node: Node, nesting: int, parent_logical: Optional[str]) -> None:
        nonlocal total
        kind = node.kind
        if kind == "binary" and node.attrs.get("op") in ("&&", "||"):
            op = node.attrs["op"]
            if op != parent_logical:
                total += 1
            for child in node.children:
                visit_expr(child, nesting, op)
            return
        if kind == "paren":
            visit_expr(node.children[0], nesting, parent_logical)
            return
        if kind == "unary":
            visit_expr(node.children[0], nesting, None)
            return
        if kind == "ternary":
            total += 1 + nesting
            for child in node.children:
                visit_expr(child, nesting + 1, None)
            return
        for child in node.children:
            visit_stmt(child, nesting) if _is_statement(child) else visit_expr(
                child, nesting, None
            )

    def visit_stmt(node: Node, nesting: int, *, else_if: bool = False) -> None:
        nonlocal total
        kind = node.kind
        if kind == "if":
            total += 1 if else_if else 1 + nesting
            inner = nesting + 1  # else-if keeps the chain's nesting level
            visit_expr(node.attrs["cond"], nesting, None)
            visit_stmt(node.attrs["then"], inner)
            else_branch = node.attrs.get("else")
            if else_branch is not None:
                if else_branch.kind == "if":
                    visit_stmt(else_branch, nesting, else_if=True)
                else:
                    total += 1
                    visit_stmt(else_branch, inner)
            return
        if kind in _LOOPS:
            total += 1 + nesting
            for child in node.children:
                if _is_statement(child):
                    visit_stmt(child, nesting + 1)
                else:
                    visit_expr(child, nesting + 1, None)
            return
        if kind == "switch":
            total += 1 + nesting
            visit_expr(node.attrs["selector"], nesting, None)
            for case in node.attrs["cases"]:
                for stmt in case.attrs["statements"]:
                    visit_stmt(stmt, nesting + 1)
            return
        if kind == "try":
            for res in node.attrs["resources"]:
                visit_expr(res, nesting, None)
            visit_stmt(node.attrs["block"], nesting)
            for catch in node.attrs["catches"]:
                total += 1 + nesting
                visit_stmt(catch.attrs["block"], nesting + 1)
            fin = node.attrs.get("finally")
            if fin is not None:
                visit_stmt(fin.children[0], nesting)
            return
        if kind in ("break", "continue"):
            if node.attrs.get("label"):
                total += 1
            return
        for child in node.children:
            if _is_statement(child):
                visit_stmt(child, nesting)
            else:
                visit_expr(child, nesting, None)

    body = unit.tree.attrs.get("body")
    if body is not None:
        visit_stmt(body, 0)
    return total


_STATEMENT_KINDS = frozenset(
    [
        "block",
        "local-var-decl",
        "expr-stmt",
        "if",
        "for",
        "foreach",
        "while",
        "do",
        "switch",
        "try",
        "catch-clause",
        "finally",
        "return",
        "throw",
        "break",
        "continue",
        "empty",
        "labeled",
        "case",
    ]
)


def _is_statement(node: Node) -> bool:
    return node.kind in _STATEMENT_KINDS


@dataclass(frozen=True)
class MetricsDelta:
    """Signed before/after metric pairs. ``after <= before`` is not assumed."""

    sloc_before: int
    sloc_after: int
    tokens_before: int
    tokens_after: int
    cyclomatic_before: int
    cyclomatic_after: int
    cognitive_before: int
    cognitive_after: int

    @staticmethod
    def _ratio(before: int, after: int) -> Optional[float]:
        if before <= 0:
            return None
        return (before - after) / before

    @property
    def sloc_reduction(self) -> Optional[float]:
        return self._ratio(self.sloc_before, self.sloc_after)

    @property
    def token_reduction(self) -> Optional[float]:
        return self._ratio(self.tokens_before, self.tokens_after)

    @property
    def cyclomatic_reduction(self) -> Optional[float]:
        return self._ratio(self.cyclomatic_before, self.cyclomatic_after)

    @property
    def cognitive_reduction(self) -> Optional[float]:
        return self._ratio(self.cognitive_before, self.cognitive_after)

    def to_dict(self) -> dict:
        return {
            "sloc_before": self.sloc_before,
            "sloc_after": self.sloc_after,
            "tokens_before": self.tokens_before,
            "tokens_after": self.tokens_after,
            "cyclomatic_before": self.cyclomatic_before,
            "cyclomatic_after": self.cyclomatic_after,
            "cognitive_before": self.cognitive_before,
            "cognitive_after": self.cognitive_after,
            "sloc_reduction": self.sloc_reduction,
            "token_reduction": self.token_reduction,
            "cyclomatic_reduction": self.cyclomatic_reduction,
            "cognitive_reduction": self.cognitive_reduction,
        }


def quality_delta(original: MethodUnit, simplified: MethodUnit) -> MetricsDelta:
    """Before/after size, complexity, and readability for a method pair."""
    return MetricsDelta(
        sloc_before=original.sloc,
        sloc_after=simplified.sloc,
        tokens_before=original.token_count,
        tokens_after=simplified.token_count,
        cyclomatic_before=cyclomatic(original),
        cyclomatic_after=cyclomatic(simplified),
        cognitive_before=cognitive(original),
        cognitive_after=cognitive(simplified),
    )
