"""Taxonomy-typed, semantics-preserving rewrites and diff classification.

The taxonomy has 26 sub-category codes. Thirteen of them are executable
rewrite rules implemented here; the rest are classification labels only
(their automation is delegated to a neural backend). Every produced
Rewrite is validated by applying and re-parsing before it is returned, so
applying one always yields a parseable method.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

from .javafile import JavaFile, parse_java_file
from .lexer import significant_texts, token_count, tokenize
from .localization import diff
from .syntax import (
    JavaParseError,
    MethodUnit,
    Node,
    _Parser,
    identifier_occurrences,
    parse_method,
    reparse,
    splice_text,
)


@dataclass(frozen=True, order=True)
class RuleId:
    """One taxonomy code; executable codes have a rewrite implementation."""

    code: str
    executable: bool = False
    description: str = ""

    def __str__(self) -> str:
        return self.code


_TAXONOMY_ROWS: tuple[tuple[str, bool, str], ...] = (
    ("T1.1", True, "Simplify program logic related to method return value"),
    ("T1.2", True, "Simplify boolean and algebraic expression by rules"),
    ("T1.3", True, "Use foreach in loop iteration"),
    ("T1.4", True, "Merge if statements that resulting action is the same"),
    ("T1.5", True, "Simplify conditional statements via ternary conditional operator"),
    ("T1.6", False, "Replace complex conditional branches by using enum, polymorphism, and etc."),
    ("T1.7", False, "Chain operations together by stream pipelining"),
    ("T1.8", False, "Replace variables in method with attributes"),
    ("T1.9", True, "Merge multiple catch together if they contain duplicated code"),
    ("T1.10", False, "Change method return to void and delete statements"),
    ("T2.1", False, "Extract code blocks as methods to improve reusability"),
    ("T2.2", False, "Extract common variables"),
    ("T2.3", False, "Pull up common head or pull down common tail of conditional to reduce duplication"),
    ("T3.1", True, "Remove duplicated or unneeded code"),
    ("T3.2", True, "Remove unused imports"),
    ("T3.3", True, "Remove dead code blocks that can not be visited"),
    ("T4.1", False, "Replace code block with semantically-equivalent APIs"),
    ("T5.1", True, "Inline temporary variables that are only used once"),
    ("T5.2", False, "Inline simple small method that are only used once"),
    ("T6.1", False, "Simplify using lambda expression"),
    ("T7.1", True, "Simplify instantiation of generic class"),
    ("T7.2", False, "Use concise code style"),
    ("T7.3", False, "Use class constructor to initialize the class properties"),
    ("T7.4", True, "Merge multiple imports from the same package"),
    ("T7.5", False, "Replace code fragments with annotations which achieve the same functionality"),
    ("T7.6", True, "Use try-with-resources statement instead of finally block"),
)

TAXONOMY: dict[str, RuleId] = {
    code: RuleId(code, executable, desc) for code, executable, desc in _TAXONOMY_ROWS
}
EXECUTABLE_CODES = frozenset(code for code, ex, _ in _TAXONOMY_ROWS if ex)


def rule_table() -> list[dict]:
    """Machine-readable rule listing (code, executable flag, description)."""
    return [
        {"code": code, "executable": ex, "description": desc}
        for code, ex, desc in _TAXONOMY_ROWS
    ]


class StaleRewriteError(ValueError):
    """The rewrite's target span no longer matches the unit's text."""


@dataclass(frozen=True)
class Rewrite:
    """One applicable transformation: replace ``span`` with ``replacement``."""

    rule: RuleId
    span: tuple[int, int]
    replacement: str
    evidence: str
    expected: str  # text currently at span, for staleness detection

    def line_range(self, text: str) -> tuple[int, int]:
        """1-based inclusive line range the target span touches."""
        start_line = text.count("\n", 0, self.span[0]) + 1
        end_line = text.count("\n", 0, max(self.span[0], self.span[1] - 1)) + 1
        return (start_line, end_line)


# ---------------------------------------------------------------------------
# shared helpers


def _statement_sequences(tree: Node) -> Iterator[tuple[Node, ...]]:
    for node in tree.walk():
        if node.kind == "block":
            yield node.children
        elif node.kind == "case":
            yield node.attrs["statements"]


def _peel_paren(node: Node) -> Node:
    while node.kind == "paren":
        node = node.attrs["inner"]
    return node


def _is_pure_initializer(node: Node) -> bool:
    """Conservative side-effect-free whitelist: literal, name, field access,
    or a cast of one of those."""
    kind = node.kind
    if kind in ("literal", "name"):
        return True
    if kind == "field-access":
        return _is_pure_initializer(node.attrs["receiver"])
    if kind == "cast":
        return _is_pure_initializer(node.attrs["operand"])
    return False


def _single_declarator(stmt: Node) -> Optional[dict]:
    if stmt.kind != "local-var-decl":
        return None
    decls = stmt.attrs["declarators"]
    if len(decls) != 1:
        return None
    return decls[0]


def _needs_parens_for_not(node: Node) -> bool:
    return _peel_paren(node).kind in ("binary", "ternary", "assign", "lambda")


def _wrap(text: str) -> str:
    return f"({text})"


def _cond_text(unit_text: str, node: Node) -> str:
    """Condition text, parenthesised when embedding it under && or ?: could
    change precedence."""
    text = node.text(unit_text)
    if node.kind in ("assign", "ternary") or (
        node.kind == "binary" and node.attrs["op"] == "||"
    ):
        return _wrap(text)
    return text


def _is_literal(node: Node, value: str) -> bool:
    return node.kind == "literal" and node.attrs["value"] == value


def _validated(unit: MethodUnit, rewrite: Rewrite) -> Optional[Rewrite]:
    """Keep only rewrites whose application re-parses."""
    try:
        candidate = splice_text(unit.text, rewrite.span, rewrite.replacement)
        parse_method(candidate)
    except JavaParseError:
        return None
    return rewrite


def _parse_expr(text: str) -> Optional[Node]:
    try:
        parser = _Parser(text)
        node = parser.parse_expression()
        if parser.peek() is not None:
            return None
        return node
    except JavaParseError:
        return None


# ---------------------------------------------------------------------------
# method-level rules


def _rule_simplify_return(unit: MethodUnit) -> Iterator[Rewrite]:
    """T1.1: `T x = E; return x;` with x otherwise unused -> `return E;`."""
    for stmts in _statement_sequences(unit.tree):
        for first, second in zip(stmts, stmts[1:]):
            decl = _single_declarator(first)
            if decl is None or decl["init"] is None:
                continue
            if decl["init"].kind == "array-init":
                continue
            if second.kind != "return" or second.attrs["value"] is None:
                continue
            ret_value = _peel_paren(second.attrs["value"])
            if ret_value.kind != "name" or ret_value.attrs["name"] != decl["name"]:
                continue
            if identifier_occurrences(unit, decl["name"]) != 2:
                continue
            init_text = decl["init"].text(unit.text)
            yield Rewrite(
                rule=TAXONOMY["T1.1"],
                span=(first.span[0], second.span[1]),
                replacement=f"return {init_text};",
                evidence=f"variable '{decl['name']}' is declared and immediately returned",
                expected=unit.text[first.span[0] : second.span[1]],
            )


_BOOL_STEP_LIMIT = 20


def _bool_match(node: Node) -> bool:
    kind = node.kind
    if kind == "binary" and node.attrs["op"] == "==":
        left = _peel_paren(node.attrs["left"])
        right = _peel_paren(node.attrs["right"])
        return any(_is_literal(n, v) for n in (left, right) for v in ("true", "false"))
    if kind == "unary" and node.attrs["op"] == "!" and node.attrs["prefix"]:
        return _peel_paren(node.attrs["operand"]).kind == "unary" and _peel_paren(
            node.attrs["operand"]
        ).attrs.get("op") == "!"
    if kind == "ternary":
        then = _peel_paren(node.attrs["then"])
        other = _peel_paren(node.attrs["else"])
        return (_is_literal(then, "true") and _is_literal(other, "false")) or (
            _is_literal(then, "false") and _is_literal(other, "true")
        )
    return False


def _bool_step(text: str, node: Node) -> Optional[str]:
    """One rewrite step at ``node`` (expression within ``text``)."""
    kind = node.kind
    if kind == "binary" and node.attrs["op"] == "==":
        left = _peel_paren(node.attrs["left"])
        right = _peel_paren(node.attrs["right"])
        for lit, other in ((left, right), (right, left)):
            if _is_literal(lit, "true"):
                other_text = other.text(text)
                if other.kind in ("binary", "ternary", "assign"):
                    other_text = _wrap(other_text)
                return other_text
            if _is_literal(lit, "false"):
                other_text = other.text(text)
                if _needs_parens_for_not(other):
                    other_text = _wrap(other_text)
                return f"!{other_text}"
    if kind == "unary" and node.attrs["op"] == "!":
        inner = _peel_paren(node.attrs["operand"])
        if inner.kind == "unary" and inner.attrs.get("op") == "!":
            out = _peel_paren(inner.attrs["operand"])
            return out.text(text)
    if kind == "ternary":
        then = _peel_paren(node.attrs["then"])
        other = _peel_paren(node.attrs["else"])
        cond = node.attrs["cond"]
        if _is_literal(then, "true") and _is_literal(other, "false"):
            return cond.text(text)
        if _is_literal(then, "false") and _is_literal(other, "true"):
            cond_peeled = _peel_paren(cond)
            cond_text = cond_peeled.text(text)
            if _needs_parens_for_not(cond_peeled):
                cond_text = _wrap(cond_text)
            return f"!{cond_text}"
    return None


def _bool_fixpoint(expr_text: str) -> str:
    """Apply the boolean rewrite set anywhere in the expression until no
    pattern matches."""
    current = expr_text
    for _ in range(_BOOL_STEP_LIMIT):
        node = _parse_expr(current)
        if node is None:
            return current
        match = next((n for n in node.walk() if _bool_match(n)), None)
        if match is None:
            return current
        replacement = _bool_step(current, match)
        if replacement is None:
            return current
        current = splice_text(current, match.span, replacement)
    return current


def _rule_bool_simplify(unit: MethodUnit) -> Iterator[Rewrite]:
    """T1.2: boolean-literal comparisons, double negation, and
    literal-armed ternaries, applied to fixpoint."""
    matched_spans: list[tuple[int, int]] = []
    for node in unit.tree.walk():
        if not _bool_match(node):
            continue
        if any(lo <= node.span[0] and node.span[1] <= hi for lo, hi in matched_spans):
            continue  # nested inside an outer match; folded into its fixpoint
        matched_spans.append(node.span)
        original = node.text(unit.text)
        simplified = _bool_fixpoint(original)
        if significant_texts(simplified) == significant_texts(original):
            continue
        yield Rewrite(
            rule=TAXONOMY["T1.2"],
            span=node.span,
            replacement=simplified,
            evidence="boolean expression simplifies by rewrite rules",
            expected=original,
        )


def _rule_foreach(unit: MethodUnit) -> Iterator[Rewrite]:
    """T1.3: index loop whose index only fetches the current element ->
    enhanced for."""
    for node in unit.tree.walk():
        if node.kind != "for":
            continue
        init, cond, update, body = (
            node.attrs["init"],
            node.attrs["cond"],
            node.attrs["update"],
            node.attrs["body"],
        )
        if init is None or cond is None or update is None or body is None:
            continue
        decl = _single_declarator(init)
        if decl is None or init.attrs["type"] != "int":
            continue
        index = decl["name"]
        if decl["init"] is None or not _is_literal(_peel_paren(decl["init"]), "0"):
            continue
        if cond.kind != "binary" or cond.attrs["op"] != "<":
            continue
        left = _peel_paren(cond.attrs["left"])
        if left.kind != "name" or left.attrs["name"] != index:
            continue
        bound = _peel_paren(cond.attrs["right"])
        if bound.kind == "call" and bound.attrs["name"] == "size" and not bound.attrs["args"]:
            source_node = bound.attrs["receiver"]
            indexed = "get"
        elif bound.kind == "field-access" and bound.attrs["name"] == "length":
            source_node = bound.attrs["receiver"]
            indexed = "array"
        else:
            continue
        if source_node is None:
            continue
        source_tokens = significant_texts(source_node.text(unit.text))
        if not _is_increment_of(update, index):
            continue
        if body.kind != "block" or not body.children:
            continue
        first = body.children[0]
        elem = _single_declarator(first)
        if elem is None or elem["init"] is None:
            continue
        fetch = _peel_paren(elem["init"])
        if indexed == "get":
            ok = (
                fetch.kind == "call"
                and fetch.attrs["name"] == "get"
                and fetch.attrs["receiver"] is not None
                and significant_texts(fetch.attrs["receiver"].text(unit.text)) == source_tokens
                and len(fetch.attrs["args"]) == 1
                and _peel_paren(fetch.attrs["args"][0]).kind == "name"
                and _peel_paren(fetch.attrs["args"][0]).attrs["name"] == index
            )
        else:
            fetch_index = fetch.attrs.get("index")
            ok = (
                fetch.kind == "array-access"
                and significant_texts(fetch.attrs["array"].text(unit.text)) == source_tokens
                and _peel_paren(fetch_index).kind == "name"
                and _peel_paren(fetch_index).attrs["name"] == index
            )
        if not ok:
            continue
        rest_of_body = unit.text[first.span[1] : body.span[1]]
        uses_after = sum(
            1
            for t in tokenize(rest_of_body)
            if t.significant and t.kind == "identifier" and t.text == index
        )
        if uses_after:
            continue
        source_text = source_node.text(unit.text)
        elem_type = first.attrs["type"] + elem["dims"]
        yield Rewrite(
            rule=TAXONOMY["T1.3"],
            span=(node.span[0], first.span[1]),
            replacement=f"for ({elem_type} {elem['name']} : {source_text}) {{",
            evidence=f"index '{index}' only reads '{source_text}' elements in order",
            expected=unit.text[node.span[0] : first.span[1]],
        )


def _is_increment_of(update: Node, index: str) -> bool:
    update = _peel_paren(update)
    if update.kind == "unary" and update.attrs["op"] == "++":
        operand = _peel_paren(update.attrs["operand"])
        return operand.kind == "name" and operand.attrs["name"] == index
    if update.kind == "assign":
        target = _peel_paren(update.attrs["target"])
        if target.kind != "name" or target.attrs["name"] != index:
            return False
        if update.attrs["op"] == "+=":
            return _is_literal(_peel_paren(update.attrs["value"]), "1")
        if update.attrs["op"] == "=":
            value = _peel_paren(update.attrs["value"])
            if value.kind == "binary" and value.attrs["op"] == "+":
                left = _peel_paren(value.attrs["left"])
                right = _peel_paren(value.attrs["right"])
                return (
                    left.kind == "name"
                    and left.attrs["name"] == index
                    and _is_literal(right, "1")
                ) or (
                    right.kind == "name"
                    and right.attrs["name"] == index
                    and _is_literal(left, "1")
                )
    return False


def _only_statement(node: Node) -> Optional[Node]:
    """The sole statement of a block, or the statement itself."""
    if node.kind == "block":
        if len(node.children) != 1:
            return None
        return node.children[0]
    return node


def _rule_merge_if(unit: MethodUnit) -> Iterator[Rewrite]:
    """T1.4: `if (C1) { if (C2) body }` with no else branches ->
    `if (C1 && C2) body`."""
    for node in unit.tree.walk():
        if node.kind != "if" or node.attrs["else"] is not None:
            continue
        inner = _only_statement(node.attrs["then"])
        if inner is None or inner.kind != "if" or inner.attrs["else"] is not None:
            continue
        c1 = _cond_text(unit.text, node.attrs["cond"])
        c2 = _cond_text(unit.text, inner.attrs["cond"])
        body_text = inner.attrs["then"].text(unit.text)
        yield Rewrite(
            rule=TAXONOMY["T1.4"],
            span=node.span,
            replacement=f"if ({c1} && {c2}) {body_text}",
            evidence="nested ifs guard the same action",
            expected=node.text(unit.text),
        )


def _rule_ternary(unit: MethodUnit) -> Iterator[Rewrite]:
    """T1.5: if/else assigning the same target, or returning, -> ternary."""
    for node in unit.tree.walk():
        if node.kind != "if" or node.attrs["else"] is None:
            continue
        then_stmt = _only_statement(node.attrs["then"])
        else_stmt = _only_statement(node.attrs["else"])
        if then_stmt is None or else_stmt is None:
            continue
        cond = node.attrs["cond"]
        cond_text = cond.text(unit.text)
        if cond.kind in ("assign", "ternary"):
            cond_text = _wrap(cond_text)

        if (
            then_stmt.kind == "return"
            and else_stmt.kind == "return"
            and then_stmt.attrs["value"] is not None
            and else_stmt.attrs["value"] is not None
        ):
            a = then_stmt.attrs["value"].text(unit.text)
            b_node = else_stmt.attrs["value"]
            b = b_node.text(unit.text)
            if b_node.kind == "assign":
                b = _wrap(b)
            yield Rewrite(
                rule=TAXONOMY["T1.5"],
                span=node.span,
                replacement=f"return {cond_text} ? {a} : {b};",
                evidence="both branches return a value",
                expected=node.text(unit.text),
            )
            continue

        then_assign = _plain_assignment(then_stmt)
        else_assign = _plain_assignment(else_stmt)
        if then_assign is None or else_assign is None:
            continue
        target_a = significant_texts(then_assign.attrs["target"].text(unit.text))
        target_b = significant_texts(else_assign.attrs["target"].text(unit.text))
        if target_a != target_b:
            continue
        a = then_assign.attrs["value"].text(unit.text)
        b_node = else_assign.attrs["value"]
        b = b_node.text(unit.text)
        if b_node.kind == "assign":
            b = _wrap(b)
        target_text = then_assign.attrs["target"].text(unit.text)
        yield Rewrite(
            rule=TAXONOMY["T1.5"],
            span=node.span,
            replacement=f"{target_text} = {cond_text} ? {a} : {b};",
            evidence=f"both branches assign '{target_text}'",
            expected=node.text(unit.text),
        )


def _plain_assignment(stmt: Node) -> Optional[Node]:
    if stmt.kind != "expr-stmt":
        return None
    expr = stmt.children[0]
    if expr.kind != "assign" or expr.attrs["op"] != "=":
        return None
    target = _peel_paren(expr.attrs["target"])
    if target.kind not in ("name", "field-access", "array-access"):
        return None
    return expr


def _rule_merge_catch(unit: MethodUnit) -> Iterator[Rewrite]:
    """T1.9: adjacent catch clauses with token-identical bodies ->
    multi-catch."""
    for node in unit.tree.walk():
        if node.kind != "try":
            continue
        catches = node.attrs["catches"]
        i = 0
        while i < len(catches):
            run = [catches[i]]
            while (
                i + len(run) < len(catches)
                and catches[i + len(run)].attrs["name"] == run[0].attrs["name"]
                and significant_texts(catches[i + len(run)].attrs["block"].text(unit.text))
                == significant_texts(run[0].attrs["block"].text(unit.text))
            ):
                run.append(catches[i + len(run)])
            if len(run) > 1:
                types: list[str] = []
                for clause in run:
                    for t in clause.attrs["types"]:
                        if t not in types:
                            types.append(t)
                name = run[0].attrs["name"]
                body_text = run[0].attrs["block"].text(unit.text)
                span = (run[0].span[0], run[-1].span[1])
                yield Rewrite(
                    rule=TAXONOMY["T1.9"],
                    span=span,
                    replacement=f"catch ({' | '.join(types)} {name}) {body_text}",
                    evidence=f"{len(run)} adjacent catch clauses share one body",
                    expected=unit.text[span[0] : span[1]],
                )
            i += len(run)


def _rule_remove_unneeded(unit: MethodUnit) -> Iterator[Rewrite]:
    """T3.1: local declarations never read, with side-effect-free
    initializers, are deleted."""
    for stmts in _statement_sequences(unit.tree):
        for stmt in stmts:
            if stmt.kind != "local-var-decl":
                continue
            decls = stmt.attrs["declarators"]
            removable = all(
                (d["init"] is None or _is_pure_initializer(_peel_paren(d["init"])))
                and identifier_occurrences(unit, d["name"]) == 1
                for d in decls
            )
            if not removable:
                continue
            names = ", ".join(d["name"] for d in decls)
            yield Rewrite(
                rule=TAXONOMY["T3.1"],
                span=stmt.span,
                replacement="",
                evidence=f"'{names}' never read; initializer side-effect-free",
                expected=stmt.text(unit.text),
            )


def _rule_dead_code(unit: MethodUnit) -> Iterator[Rewrite]:
    """T3.3: statements after a jump in the same block, and `if (false)`
    branches."""
    for stmts in _statement_sequences(unit.tree):
        for i, stmt in enumerate(stmts[:-1]):
            if stmt.kind in ("return", "throw", "break", "continue"):
                span = (stmts[i + 1].span[0], stmts[-1].span[1])
                yield Rewrite(
                    rule=TAXONOMY["T3.3"],
                    span=span,
                    replacement="",
                    evidence=f"statements after '{stmt.kind}' are unreachable",
                    expected=unit.text[span[0] : span[1]],
                )
                break
    for node in unit.tree.walk():
        if node.kind != "if":
            continue
        if not _is_literal(_peel_paren(node.attrs["cond"]), "false"):
            continue
        else_branch = node.attrs["else"]
        replacement = "" if else_branch is None else else_branch.text(unit.text)
        yield Rewrite(
            rule=TAXONOMY["T3.3"],
            span=node.span,
            replacement=replacement,
            evidence="condition is the literal 'false'",
            expected=node.text(unit.text),
        )


def _rule_inline_variable(unit: MethodUnit) -> Iterator[Rewrite]:
    """T5.1: single-use local with a side-effect-free initializer is
    substituted at its one use."""
    for stmts in _statement_sequences(unit.tree):
        for stmt in stmts:
            decl = _single_declarator(stmt)
            if decl is None or decl["init"] is None:
                continue
            init = _peel_paren(decl["init"])
            if not _is_pure_initializer(init):
                continue
            name = decl["name"]
            if identifier_occurrences(unit, name) != 2:
                continue
            uses = [
                t
                for t in tokenize(unit.text)
                if t.significant
                and t.kind == "identifier"
                and t.text == name
                and t.start >= stmt.span[1]
            ]
            if len(uses) != 1:
                continue
            use = uses[0]
            init_text = decl["init"].text(unit.text)
            if init.kind == "cast":
                init_text = _wrap(init_text)
            middle = unit.text[stmt.span[1] : use.start]
            yield Rewrite(
                rule=TAXONOMY["T5.1"],
                span=(stmt.span[0], use.end),
                replacement=middle + init_text,
                evidence=f"'{name}' used exactly once",
                expected=unit.text[stmt.span[0] : use.end],
            )


def _rule_diamond(unit: MethodUnit) -> Iterator[Rewrite]:
    """T7.1: creation type arguments repeated from the declared type become
    the diamond."""
    for node in unit.tree.walk():
        if node.kind != "local-var-decl":
            continue
        decl_type = node.attrs["type"]
        if "<" not in decl_type or not decl_type.rstrip().endswith(">"):
            continue
        decl_args = decl_type[decl_type.index("<") :]
        for d in node.attrs["declarators"]:
            if d["init"] is None:
                continue
            init = _peel_paren(d["init"])
            if init.kind != "object-creation":
                continue
            args_span = init.attrs["type_args_span"]
            if args_span is None:
                continue
            creation_args = unit.text[args_span[0] : args_span[1]]
            if significant_texts(creation_args) in ((), ("<", ">")):
                continue  # already diamond
            if significant_texts(creation_args) != significant_texts(decl_args):
                continue
            yield Rewrite(
                rule=TAXONOMY["T7.1"],
                span=args_span,
                replacement="<>",
                evidence=f"declared type '{decl_type}' already names the arguments",
                expected=creation_args,
            )


def _rule_try_with_resources(unit: MethodUnit) -> Iterator[Rewrite]:
    """T7.6: `T r = E; try { B } finally { r.close(); }` ->
    `try (T r = E) { B }`."""
    for stmts in _statement_sequences(unit.tree):
        for first, second in zip(stmts, stmts[1:]):
            decl = _single_declarator(first)
            if decl is None or decl["init"] is None:
                continue
            if second.kind != "try" or second.attrs["resources"] or second.attrs["catches"]:
                continue
            fin = second.attrs["finally"]
            if fin is None:
                continue
            fin_block = fin.children[0]
            if len(fin_block.children) != 1:
                continue
            only = fin_block.children[0]
            if only.kind != "expr-stmt":
                continue
            call = only.children[0]
            if (
                call.kind != "call"
                or call.attrs["name"] != "close"
                or call.attrs["args"]
                or call.attrs["receiver"] is None
            ):
                continue
            receiver = _peel_paren(call.attrs["receiver"])
            if receiver.kind != "name" or receiver.attrs["name"] != decl["name"]:
                continue
            after = unit.text[second.span[1] :]
            used_after = any(
                t.significant and t.kind == "identifier" and t.text == decl["name"]
                for t in tokenize(after)
            )
            if used_after:
                continue
            decl_text = first.text(unit.text).rstrip()
            if decl_text.endswith(";"):
                decl_text = decl_text[:-1].rstrip()
            block_text = second.attrs["block"].text(unit.text)
            span = (first.span[0], second.span[1])
            yield Rewrite(
                rule=TAXONOMY["T7.6"],
                span=span,
                replacement=f"try ({decl_text}) {block_text}",
                evidence=f"finally block only closes '{decl['name']}'",
                expected=unit.text[span[0] : span[1]],
            )


_METHOD_RULES = (
    _rule_simplify_return,
    _rule_bool_simplify,
    _rule_foreach,
    _rule_merge_if,
    _rule_ternary,
    _rule_merge_catch,
    _rule_remove_unneeded,
    _rule_dead_code,
    _rule_inline_variable,
    _rule_diamond,
    _rule_try_with_resources,
)


def applicable_rules(
    unit: MethodUnit, *, marked_lines: Optional[set[int]] = None
) -> list[Rewrite]:
    """All rewrites whose preconditions hold on ``unit``, validated by
    re-parsing. With ``marked_lines``, only rewrites overlapping those
    1-based lines are kept (localized generation)."""
    rewrites: list[Rewrite] = []
    for rule_fn in _METHOD_RULES:
        for rewrite in rule_fn(unit):
            checked = _validated(unit, rewrite)
            if checked is not None:
                rewrites.append(checked)
    rewrites.sort(key=lambda r: (r.rule.code, r.span))
    if marked_lines is not None:
        kept = []
        for r in rewrites:
            lo, hi = r.line_range(unit.text)
            if any(lo <= line <= hi for line in marked_lines):
                kept.append(r)
        rewrites = kept
    return rewrites


def apply(unit: MethodUnit, rewrite: Rewrite) -> MethodUnit:
    """Apply a rewrite produced from this unit; significant tokens outside
    the target span are untouched."""
    actual = unit.text[rewrite.span[0] : rewrite.span[1]]
    if actual != rewrite.expected:
        raise StaleRewriteError(
            f"rewrite target for {rewrite.rule.code} no longer matches: "
            f"expected {rewrite.expected!r}, found {actual!r}"
        )
    new_text = splice_text(unit.text, rewrite.span, rewrite.replacement)
    return reparse(unit, new_text)


# ---------------------------------------------------------------------------
# file-level rules (imports)


def applicable_file_rules(
    source: Union[str, JavaFile], *, wildcard_threshold: int = 5
) -> list[Rewrite]:
    """Import rules (T3.2 unused imports, T7.4 merge to wildcard) over a
    whole file."""
    jfile = parse_java_file(source) if isinstance(source, str) else source
    text = jfile.text
    rewrites: list[Rewrite] = []
    uses = jfile.identifier_uses_outside_imports()

    for imp in jfile.imports:
        if imp.is_wildcard:
            continue
        if uses.get(imp.simple_name, 0) == 0:
            rewrites.append(
                Rewrite(
                    rule=TAXONOMY["T3.2"],
                    span=imp.span,
                    replacement="",
                    evidence=f"'{imp.simple_name}' never used in file",
                    expected=text[imp.span[0] : imp.span[1]],
                )
            )

    by_package: dict[str, list] = {}
    for imp in jfile.imports:
        if imp.is_wildcard or imp.is_static or not imp.package:
            continue
        by_package.setdefault(imp.package, []).append(imp)
    for package, group in sorted(by_package.items()):
        if len(group) < wildcard_threshold:
            continue
        span = (group[0].span[0], group[-1].span[1])
        lines: list[str] = [f"import {package}.*;"]
        for imp in jfile.imports:
            if imp in group:
                continue
            if span[0] <= imp.span[0] and imp.span[1] <= span[1]:
                lines.append(text[imp.span[0] : imp.span[1]])
        rewrites.append(
            Rewrite(
                rule=TAXONOMY["T7.4"],
                span=span,
                replacement="\n".join(lines),
                evidence=f"{len(group)} imports from '{package}'",
                expected=text[span[0] : span[1]],
            )
        )
    rewrites.sort(key=lambda r: (r.rule.code, r.span))
    return rewrites


def apply_file(text: str, rewrite: Rewrite) -> str:
    actual = text[rewrite.span[0] : rewrite.span[1]]
    if actual != rewrite.expected:
        raise StaleRewriteError(
            f"rewrite target for {rewrite.rule.code} no longer matches"
        )
    return splice_text(text, rewrite.span, rewrite.replacement)


# ---------------------------------------------------------------------------
# enumeration and classification


def _def2_smaller(candidate: MethodUnit, parent: MethodUnit) -> bool:
    """Strictly fewer SLOC, or equal SLOC with strictly fewer tokens."""
    return candidate.sloc < parent.sloc or (
        candidate.sloc == parent.sloc and candidate.token_count < parent.token_count
    )


def enumerate_candidates(unit: MethodUnit, budget: int) -> list[MethodUnit]:
    """Breadth-first closure of rule applications, up to ``budget`` distinct
    candidates, deduplicated by significant-token sequence. Every candidate
    is strictly smaller than the unit it was derived from."""
    return [u for u, _ in enumerate_with_provenance(unit, budget)]


def enumerate_with_provenance(
    unit: MethodUnit, budget: int, *, marked_lines: Optional[set[int]] = None
) -> list[tuple[MethodUnit, tuple[RuleId, ...]]]:
    """Like :func:`enumerate_candidates` but each candidate carries the rule
    chain that produced it. ``marked_lines`` restricts the first rewrite to
    the marked 1-based lines (localized generation)."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    seen = {unit.significant}
    queue: list[tuple[MethodUnit, tuple[RuleId, ...]]] = [(unit, ())]
    out: list[tuple[MethodUnit, tuple[RuleId, ...]]] = []
    while queue and len(out) < budget:
        parent, path = queue.pop(0)
        restrict = marked_lines if not path else None
        for rewrite in applicable_rules(parent, marked_lines=restrict):
            try:
                candidate = apply(parent, rewrite)
            except JavaParseError:
                continue
            key = candidate.significant
            if key in seen or not _def2_smaller(candidate, parent):
                continue
            seen.add(key)
            entry = (candidate, path + (rewrite.rule,))
            out.append(entry)
            queue.append(entry)
            if len(out) >= budget:
                break
    return out


def classify(
    original: Union[str, MethodUnit], simplified: Union[str, MethodUnit]
) -> list[RuleId]:
    labels, _ = classify_detailed(original, simplified)
    return labels


def classify_detailed(
    original: Union[str, MethodUnit], simplified: Union[str, MethodUnit]
) -> tuple[list[RuleId], int]:
    """Best-effort taxonomy labels for an observed (original, simplified)
    pair, plus the number of diff hunks left unexplained.

    Greedy: repeatedly apply whichever executable rewrite moves the text
    strictly closer to the ground truth; leftover deletion-only hunks fall
    back to T3.1, anything else counts as unclassified.
    """
    orig_unit = _as_unit(original)
    simp_text = simplified.text if isinstance(simplified, MethodUnit) else simplified

    if orig_unit is None:
        return _classify_file_level(
            original if isinstance(original, str) else original.text, simp_text
        )

    target = significant_texts(simp_text)
    labels: set[RuleId] = set()
    current = orig_unit
    for _ in range(16):
        if current.significant == target:
            return (sorted(labels), 0)
        distance = _distance(current.text, simp_text)
        attempts: list[tuple[int, Rewrite, MethodUnit]] = []
        for rewrite in applicable_rules(current):
            try:
                candidate = apply(current, rewrite)
            except JavaParseError:
                continue
            d = _distance(candidate.text, simp_text)
            if d < distance:
                attempts.append((d, rewrite, candidate))
        if not attempts:
            break
        best_d = min(d for d, _, _ in attempts)
        _, chosen_rewrite, chosen = next(a for a in attempts if a[0] == best_d)
        # every rule whose application lands on the same text explains this
        # step equally well (overlapping patterns, e.g. dead stores)
        for d, rewrite, candidate in attempts:
            if d == best_d and candidate.significant == chosen.significant:
                labels.add(rewrite.rule)
        current = chosen

    unexplained = 0
    for hunk in diff(current.text, simp_text):
        if hunk.significant_added == 0 and hunk.significant_deleted > 0:
            labels.add(TAXONOMY["T3.1"])
        else:
            unexplained += 1
    return (sorted(labels), unexplained)


def _as_unit(value: Union[str, MethodUnit]) -> Optional[MethodUnit]:
    if isinstance(value, MethodUnit):
        return value
    try:
        return parse_method(value)
    except JavaParseError:
        return None


def _distance(a: str, b: str) -> int:
    return sum(h.significant_deleted + h.significant_added for h in diff(a, b))


def _classify_file_level(original: str, simplified: str) -> tuple[list[RuleId], int]:
    labels: set[RuleId] = set()
    current = original
    target = significant_texts(simplified)
    for _ in range(8):
        if significant_texts(current) == target:
            return (sorted(labels), 0)
        distance = _distance(current, simplified)
        best: Optional[tuple[int, Rewrite, str]] = None
        for rewrite in applicable_file_rules(current):
            candidate = apply_file(current, rewrite)
            d = _distance(candidate, simplified)
            if d < distance and (best is None or d < best[0]):
                best = (d, rewrite, candidate)
        if best is None:
            break
        labels.add(best[1].rule)
        current = best[2]
    unexplained = 0
    for hunk in diff(current, simplified):
        if hunk.significant_added == 0 and hunk.significant_deleted > 0:
            labels.add(TAXONOMY["T3.1"])
        else:
            unexplained += 1
    return (sorted(labels), unexplained)
