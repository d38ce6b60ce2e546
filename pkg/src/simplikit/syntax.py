"""Recursive-descent parser and printer for a Java method subset.

Covers the constructs the rewrite catalog and the fixture corpus need:
method declarations with annotations, the usual statement forms (including
enhanced for, switch, try/catch/finally and try-with-resources), and an
expression grammar with generics, lambdas, casts and array creation.
Anything outside the subset raises :class:`UnsupportedConstructError`
instead of being silently mangled.

Trees are immutable after construction. Every node carries its byte span in
the original source; sibling spans are disjoint and ordered, and a child
span is always contained in its parent's.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Optional

from .lexer import Token, significant_texts, sloc, token_count, tokenize


class JavaParseError(Exception):
    """Syntax error with 1-based line/column of the offending token."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class UnsupportedConstructError(JavaParseError):
    """A real Java construct that lies outside the supported subset."""

    def __init__(self, construct: str, line: int, column: int):
        super().__init__(f"unsupported construct: {construct}", line, column)
        self.construct = construct


@dataclass(frozen=True)
class Node:
    """Generic syntax-tree node.

    ``attrs`` holds per-kind details (operator text, declared names, type
    texts). Entries may alias nodes that also appear in ``children``;
    ``children`` is the authority for the span invariants.
    """

    kind: str
    span: tuple[int, int]
    children: tuple["Node", ...] = ()
    attrs: dict[str, Any] = field(default_factory=dict)

    def text(self, source: str) -> str:
        return source[self.span[0] : self.span[1]]

    def walk(self) -> Iterator["Node"]:
        yield self
        for child in self.children:
            yield from child.walk()

    def find_all(self, kind: str) -> list["Node"]:
        return [n for n in self.walk() if n.kind == kind]


@dataclass(frozen=True)
class MethodUnit:
    """A parsed method: the unit every generator and checker operates on."""

    name: str
    text: str
    tree: Node
    file_span: tuple[int, int]
    sloc: int
    token_count: int

    @property
    def significant(self) -> tuple[str, ...]:
        return significant_texts(self.text)

    def node_text(self, node: Node) -> str:
        return node.text(self.text)


_PRIMITIVES = frozenset(
    ["boolean", "byte", "short", "int", "long", "char", "float", "double", "void"]
)
_MODIFIERS = frozenset(
    [
        "public",
        "protected",
        "private",
        "static",
        "final",
        "abstract",
        "synchronized",
        "native",
        "strictfp",
        "default",
        "transient",
        "volatile",
    ]
)
_ASSIGN_OPS = frozenset(["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="])

# Binary precedence levels, weakest first. Shift is handled separately
# because '>>' arrives as two adjacent '>' tokens.
_BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", ">", "<=", ">=", "instanceof"),
    ("<<", ">>", ">>>"),
    ("+", "-"),
    ("*", "/", "%"),
)
_SHIFT_LEVEL = 7


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.all_tokens = tokenize(text)
        self.tokens = [t for t in self.all_tokens if t.significant]
        self.pos = 0

    # ---- token plumbing -------------------------------------------------

    def peek(self, offset: int = 0) -> Optional[Token]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, *texts: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text in texts

    def at_kind(self, kind: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.pos += 1
        return tok

    def accept(self, text: str) -> Optional[Token]:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text:
            self.error(f"expected '{text}'" + (f", found '{tok.text}'" if tok else ""))
        return self.advance()

    def error(self, message: str) -> None:
        tok = self.peek() or (self.tokens[-1] if self.tokens else None)
        if tok is None:
            raise JavaParseError(message, 1, 1)
        raise JavaParseError(message, tok.line, tok.column)

    def unsupported(self, construct: str) -> None:
        tok = self.peek() or self.tokens[-1]
        raise UnsupportedConstructError(construct, tok.line, tok.column)

    def span_from(self, start_tok_index: int) -> tuple[int, int]:
        first = self.tokens[start_tok_index]
        last = self.tokens[self.pos - 1]
        return (first.start, last.end)

    def _adjacent(self, a: Token, b: Token) -> bool:
        return a.end == b.start

    # ---- types ----------------------------------------------------------

    def try_parse_type(self) -> Optional[str]:
        """Speculatively parse a type; return its text or roll back."""
        saved = self.pos
        try:
            return self.parse_type()
        except JavaParseError:
            self.pos = saved
            return None

    def parse_type(self) -> str:
        start = self.pos
        tok = self.peek()
        if tok is None:
            self.error("expected type")
        if tok.text in _PRIMITIVES:
            self.advance()
        elif tok.kind == "identifier":
            self.advance()
            if self.at("<"):
                self.parse_type_arguments()
            while self.at(".") and self.peek(1) is not None and self.peek(1).kind == "identifier":
                self.advance()
                self.advance()
                if self.at("<"):
                    self.parse_type_arguments()
        else:
            self.error(f"expected type, found '{tok.text}'")
        while self.at("[") and self.peek(1) is not None and self.peek(1).text == "]":
            self.advance()
            self.advance()
        lo, hi = self.span_from(start)
        return self.text[lo:hi]

    def parse_type_arguments(self) -> str:
        start = self.pos
        self.expect("<")
        if self.accept(">"):  # diamond
            lo, hi = self.span_from(start)
            return self.text[lo:hi]
        while True:
            if self.at("?"):
                self.advance()
                if self.at("extends", "super"):
                    self.advance()
                    self.parse_type()
            else:
                self.parse_type()
            if self.accept(","):
                continue
            self.expect(">")
            break
        lo, hi = self.span_from(start)
        return self.text[lo:hi]

    # ---- method declaration ---------------------------------------------

    def parse_method_decl(self) -> Node:
        start = self.pos
        annotations = []
        modifiers = []
        while True:
            if self.at("@"):
                annotations.append(self.parse_annotation())
            elif self.at_kind("keyword") and self.peek().text in _MODIFIERS:
                modifiers.append(self.advance().text)
            else:
                break
        type_params = None
        if self.at("<"):
            type_params = self.parse_type_parameters()
        return_type = self.parse_type()
        name_tok = self.peek()
        if name_tok is None or name_tok.kind != "identifier":
            self.error("expected method name")
        self.advance()
        self.expect("(")
        params = self.parse_parameters()
        throws: list[str] = []
        if self.accept("throws"):
            throws.append(self.parse_type())
            while self.accept(","):
                throws.append(self.parse_type())
        children: list[Node] = list(annotations)
        if self.at("{"):
            body = self.parse_block()
            children.append(body)
        else:
            self.expect(";")
            body = None
        return Node(
            "method-decl",
            self.span_from(start),
            tuple(children),
            {
                "name": name_tok.text,
                "return_type": return_type,
                "modifiers": tuple(modifiers),
                "params": tuple(params),
                "type_params": type_params,
                "throws": tuple(throws),
                "body": body,
            },
        )

    def parse_annotation(self) -> Node:
        start = self.pos
        self.expect("@")
        name_tok = self.advance()
        if name_tok.kind not in ("identifier", "keyword"):
            self.error("expected annotation name")
        name = name_tok.text
        while self.at(".") and self.peek(1) is not None and self.peek(1).kind == "identifier":
            self.advance()
            name += "." + self.advance().text
        if self.at("("):
            depth = 0
            while True:
                tok = self.peek()
                if tok is None:
                    self.error("unterminated annotation arguments")
                self.advance()
                if tok.text == "(":
                    depth += 1
                elif tok.text == ")":
                    depth -= 1
                    if depth == 0:
                        break
        span = self.span_from(start)
        return Node("annotation", span, (), {"name": name, "text": self.text[span[0] : span[1]]})

    def parse_type_parameters(self) -> str:
        start = self.pos
        self.expect("<")
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "identifier":
                self.error("expected type parameter")
            self.advance()
            if self.accept("extends"):
                self.parse_type()
                while self.accept("&"):
                    self.parse_type()
            if self.accept(","):
                continue
            self.expect(">")
            break
        lo, hi = self.span_from(start)
        return self.text[lo:hi]

    def parse_parameters(self) -> list[tuple[str, str]]:
        params: list[tuple[str, str]] = []
        if self.accept(")"):
            return params
        while True:
            while self.at("@"):
                self.parse_annotation()
            self.accept("final")
            ptype = self.parse_type()
            if self.accept("..."):
                ptype += "..."
            name_tok = self.peek()
            if name_tok is None or name_tok.kind != "identifier":
                self.error("expected parameter name")
            self.advance()
            while self.at("[") and self.peek(1) is not None and self.peek(1).text == "]":
                self.advance()
                self.advance()
                ptype += "[]"
            params.append((ptype, name_tok.text))
            if self.accept(","):
                continue
            self.expect(")")
            break
        return params

    # ---- statements -------------------------------------------------------

    def parse_block(self) -> Node:
        start = self.pos
        self.expect("{")
        stmts: list[Node] = []
        while not self.at("}"):
            if self.peek() is None:
                self.error("unterminated block")
            stmts.append(self.parse_statement())
        self.expect("}")
        return Node("block", self.span_from(start), tuple(stmts))

    def parse_statement(self) -> Node:
        tok = self.peek()
        if tok is None:
            self.error("expected statement")
        text = tok.text

        if text == "{":
            return self.parse_block()
        if text == ";":
            start = self.pos
            self.advance()
            return Node("empty", self.span_from(start))
        if text == "if":
            return self.parse_if()
        if text == "for":
            return self.parse_for()
        if text == "while":
            return self.parse_while()
        if text == "do":
            return self.parse_do()
        if text == "switch":
            return self.parse_switch()
        if text == "try":
            return self.parse_try()
        if text == "return":
            return self.parse_return()
        if text == "throw":
            return self.parse_throw()
        if text in ("break", "continue"):
            return self.parse_jump()
        if text in ("synchronized", "assert"):
            self.unsupported(f"'{text}' statement")
        if text in ("class", "interface", "enum"):
            self.unsupported("local type declaration")

        # label?
        if tok.kind == "identifier" and self.peek(1) is not None and self.peek(1).text == ":":
            start = self.pos
            label = self.advance().text
            self.advance()
            inner = self.parse_statement()
            return Node("labeled", self.span_from(start), (inner,), {"label": label})

        decl = self.try_parse_local_var_decl()
        if decl is not None:
            return decl
        return self.parse_expr_statement()

    def try_parse_local_var_decl(self) -> Optional[Node]:
        if not self._looks_like_local_var_decl():
            return None
        # Committed: parse errors inside the declaration are real errors.
        return self.parse_local_var_decl()

    def _looks_like_local_var_decl(self) -> bool:
        """Lookahead: `[final] Type Identifier` opens a declaration."""
        if self.at("final"):
            return True
        saved = self.pos
        parsed = self.try_parse_type()
        nxt = self.peek()
        self.pos = saved
        return parsed is not None and nxt is not None and nxt.kind == "identifier"

    def parse_local_var_decl(self, *, terminated: bool = True) -> Node:
        start = self.pos
        is_final = bool(self.accept("final"))
        var_type = self.parse_type()
        name_tok = self.peek()
        if name_tok is None or name_tok.kind != "identifier":
            self.error("expected variable name")
        declarators: list[dict[str, Any]] = []
        children: list[Node] = []
        while True:
            name_tok = self.peek()
            if name_tok is None or name_tok.kind != "identifier":
                self.error("expected variable name")
            self.advance()
            dims = ""
            while self.at("[") and self.peek(1) is not None and self.peek(1).text == "]":
                self.advance()
                self.advance()
                dims += "[]"
            init = None
            if self.accept("="):
                init = self.parse_variable_init()
                children.append(init)
            declarators.append(
                {
                    "name": name_tok.text,
                    "dims": dims,
                    "init": init,
                    "name_span": (name_tok.start, name_tok.end),
                }
            )
            if self.accept(","):
                continue
            break
        if terminated:
            self.expect(";")
        return Node(
            "local-var-decl",
            self.span_from(start),
            tuple(children),
            {"type": var_type, "final": is_final, "declarators": tuple(declarators)},
        )

    def parse_variable_init(self) -> Node:
        if self.at("{"):
            return self.parse_array_initializer()
        return self.parse_expression()

    def parse_array_initializer(self) -> Node:
        start = self.pos
        self.expect("{")
        elems: list[Node] = []
        while not self.at("}"):
            elems.append(self.parse_variable_init())
            if not self.accept(","):
                break
        self.expect("}")
        return Node("array-init", self.span_from(start), tuple(elems))

    def parse_expr_statement(self) -> Node:
        start = self.pos
        expr = self.parse_expression()
        self.expect(";")
        return Node("expr-stmt", self.span_from(start), (expr,))

    def parse_if(self) -> Node:
        start = self.pos
        self.expect("if")
        self.expect("(")
        cond = self.parse_expression()
        self.expect(")")
        then = self.parse_statement()
        children = [cond, then]
        else_branch = None
        if self.accept("else"):
            else_branch = self.parse_statement()
            children.append(else_branch)
        return Node(
            "if",
            self.span_from(start),
            tuple(children),
            {"cond": cond, "then": then, "else": else_branch},
        )

    def parse_for(self) -> Node:
        start = self.pos
        self.expect("for")
        self.expect("(")

        saved = self.pos
        foreach = self._try_parse_foreach_header()
        if foreach is not None:
            var_type, var_name, iterable = foreach
            self.expect(")")
            body = self.parse_statement()
            return Node(
                "foreach",
                self.span_from(start),
                (iterable, body),
                {"var_type": var_type, "var_name": var_name, "iterable": iterable, "body": body},
            )
        self.pos = saved

        init: Optional[Node] = None
        children: list[Node] = []
        if not self.at(";"):
            init = self.try_parse_local_var_decl_unterminated()
            if init is None:
                init = self.parse_expression_list_node()
            children.append(init)
        self.expect(";")
        cond = None
        if not self.at(";"):
            cond = self.parse_expression()
            children.append(cond)
        self.expect(";")
        update = None
        if not self.at(")"):
            update = self.parse_expression_list_node()
            children.append(update)
        self.expect(")")
        body = self.parse_statement()
        children.append(body)
        return Node(
            "for",
            self.span_from(start),
            tuple(children),
            {"init": init, "cond": cond, "update": update, "body": body},
        )

    def try_parse_local_var_decl_unterminated(self) -> Optional[Node]:
        if not self._looks_like_local_var_decl():
            return None
        return self.parse_local_var_decl(terminated=False)

    def _try_parse_foreach_header(self) -> Optional[tuple[str, str, Node]]:
        saved = self.pos
        try:
            self.accept("final")
            var_type = self.parse_type()
            name_tok = self.peek()
            if name_tok is None or name_tok.kind != "identifier":
                raise JavaParseError("not a foreach", 0, 0)
            self.advance()
            if not self.accept(":"):
                raise JavaParseError("not a foreach", 0, 0)
            iterable = self.parse_expression()
            return (var_type, name_tok.text, iterable)
        except UnsupportedConstructError:
            raise
        except JavaParseError:
            self.pos = saved
            return None

    def parse_expression_list_node(self) -> Node:
        start = self.pos
        exprs = [self.parse_expression()]
        while self.accept(","):
            exprs.append(self.parse_expression())
        if len(exprs) == 1:
            return exprs[0]
        return Node("expr-list", self.span_from(start), tuple(exprs))

    def parse_while(self) -> Node:
        start = self.pos
        self.expect("while")
        self.expect("(")
        cond = self.parse_expression()
        self.expect(")")
        body = self.parse_statement()
        return Node("while", self.span_from(start), (cond, body), {"cond": cond, "body": body})

    def parse_do(self) -> Node:
        start = self.pos
        self.expect("do")
        body = self.parse_statement()
        self.expect("while")
        self.expect("(")
        cond = self.parse_expression()
        self.expect(")")
        self.expect(";")
        return Node("do", self.span_from(start), (body, cond), {"cond": cond, "body": body})

    def parse_switch(self) -> Node:
        start = self.pos
        self.expect("switch")
        self.expect("(")
        selector = self.parse_expression()
        self.expect(")")
        self.expect("{")
        cases: list[Node] = []
        while not self.at("}"):
            case_start = self.pos
            if self.accept("case"):
                label = self.parse_expression()
                is_default = False
                label_children: tuple[Node, ...] = (label,)
            elif self.accept("default"):
                is_default = True
                label_children = ()
            else:
                self.error("expected 'case' or 'default'")
            if self.at("->"):
                self.unsupported("switch arrow rule")
            self.expect(":")
            stmts: list[Node] = []
            while not self.at("case", "default", "}"):
                stmts.append(self.parse_statement())
            cases.append(
                Node(
                    "case",
                    self.span_from(case_start),
                    label_children + tuple(stmts),
                    {"default": is_default, "statements": tuple(stmts)},
                )
            )
        self.expect("}")
        return Node(
            "switch",
            self.span_from(start),
            (selector,) + tuple(cases),
            {"selector": selector, "cases": tuple(cases)},
        )

    def parse_try(self) -> Node:
        start = self.pos
        self.expect("try")
        resources: list[Node] = []
        if self.accept("("):
            while True:
                resources.append(self.parse_local_var_decl(terminated=False))
                if self.accept(";"):
                    if self.at(")"):
                        break
                    continue
                break
            self.expect(")")
        block = self.parse_block()
        catches: list[Node] = []
        while self.at("catch"):
            catches.append(self.parse_catch_clause())
        finally_node = None
        if self.at("finally"):
            fin_start = self.pos
            self.advance()
            fin_block = self.parse_block()
            finally_node = Node("finally", self.span_from(fin_start), (fin_block,))
        if not resources and not catches and finally_node is None:
            self.error("try statement requires catch, finally, or resources")
        children = tuple(resources) + (block,) + tuple(catches)
        if finally_node is not None:
            children += (finally_node,)
        return Node(
            "try",
            self.span_from(start),
            children,
            {
                "resources": tuple(resources),
                "block": block,
                "catches": tuple(catches),
                "finally": finally_node,
            },
        )

    def parse_catch_clause(self) -> Node:
        start = self.pos
        self.expect("catch")
        self.expect("(")
        self.accept("final")
        types = [self.parse_type()]
        while self.accept("|"):
            types.append(self.parse_type())
        name_tok = self.peek()
        if name_tok is None or name_tok.kind != "identifier":
            self.error("expected exception variable name")
        self.advance()
        self.expect(")")
        block = self.parse_block()
        return Node(
            "catch-clause",
            self.span_from(start),
            (block,),
            {"types": tuple(types), "name": name_tok.text, "block": block},
        )

    def parse_return(self) -> Node:
        start = self.pos
        self.expect("return")
        expr = None
        children: tuple[Node, ...] = ()
        if not self.at(";"):
            expr = self.parse_expression()
            children = (expr,)
        self.expect(";")
        return Node("return", self.span_from(start), children, {"value": expr})

    def parse_throw(self) -> Node:
        start = self.pos
        self.expect("throw")
        expr = self.parse_expression()
        self.expect(";")
        return Node("throw", self.span_from(start), (expr,), {"value": expr})

    def parse_jump(self) -> Node:
        start = self.pos
        kind = self.advance().text
        label = None
        tok = self.peek()
        if tok is not None and tok.kind == "identifier":
            label = self.advance().text
        self.expect(";")
        return Node(kind, self.span_from(start), (), {"label": label})

    # ---- expressions ------------------------------------------------------

    def parse_expression(self) -> Node:
        return self.parse_assignment()

    def parse_assignment(self) -> Node:
        start = self.pos
        lambda_node = self.try_parse_lambda()
        if lambda_node is not None:
            return lambda_node
        target = self.parse_ternary()
        tok = self.peek()
        if tok is not None and tok.text in _ASSIGN_OPS:
            op = self.advance().text
            value = self.parse_assignment()
            return Node(
                "assign",
                self.span_from(start),
                (target, value),
                {"op": op, "target": target, "value": value},
            )
        return target

    def parse_ternary(self) -> Node:
        start = self.pos
        cond = self.parse_binary(0)
        if self.accept("?"):
            then = self.parse_expression()
            self.expect(":")
            otherwise = self.parse_assignment()
            return Node(
                "ternary",
                self.span_from(start),
                (cond, then, otherwise),
                {"cond": cond, "then": then, "else": otherwise},
            )
        return cond

    def _peek_binary_op(self, level: int) -> Optional[tuple[str, int]]:
        """Return (op text, token count) if the next token(s) form an operator
        of this precedence level. Adjacent '>' tokens fuse into shifts."""
        tok = self.peek()
        if tok is None:
            return None
        ops = _BINARY_LEVELS[level]
        if level == _SHIFT_LEVEL and tok.text == ">":
            nxt = self.peek(1)
            if nxt is not None and nxt.text == ">" and self._adjacent(tok, nxt):
                third = self.peek(2)
                if third is not None and third.text == ">" and self._adjacent(nxt, third):
                    return (">>>", 3)
                return (">>", 2)
            return None
        if tok.text == ">" and level != _SHIFT_LEVEL:
            nxt = self.peek(1)
            if nxt is not None and nxt.text in (">", "=", ">=") and self._adjacent(tok, nxt):
                return None  # let the shift level (or an error) handle it
        if tok.text in ops:
            return (tok.text, 1)
        return None

    def parse_binary(self, level: int) -> Node:
        if level >= len(_BINARY_LEVELS):
            return self.parse_unary()
        start = self.pos
        left = self.parse_binary(level + 1)
        while True:
            found = self._peek_binary_op(level)
            if found is None:
                return left
            op, ntoks = found
            if op == "instanceof":
                self.advance()
                type_start = self.pos
                self.parse_type()
                tspan = self.span_from(type_start)
                right = Node("name", tspan, (), {"name": self.text[tspan[0] : tspan[1]]})
            else:
                for _ in range(ntoks):
                    self.advance()
                right = self.parse_binary(level + 1)
            left = Node(
                "binary",
                self.span_from(start),
                (left, right),
                {"op": op, "left": left, "right": right},
            )

    def parse_unary(self) -> Node:
        start = self.pos
        tok = self.peek()
        if tok is None:
            self.error("expected expression")
        if tok.text in ("+", "-", "!", "~", "++", "--"):
            op = self.advance().text
            operand = self.parse_unary()
            return Node(
                "unary",
                self.span_from(start),
                (operand,),
                {"op": op, "prefix": True, "operand": operand},
            )
        cast = self.try_parse_cast()
        if cast is not None:
            return cast
        return self.parse_postfix()

    def try_parse_cast(self) -> Optional[Node]:
        if not self.at("("):
            return None
        saved = self.pos
        start = self.pos
        self.advance()
        cast_type = self.try_parse_type()
        if cast_type is None or not self.at(")"):
            self.pos = saved
            return None
        closing = self.advance()
        nxt = self.peek()
        if nxt is None:
            self.pos = saved
            return None
        is_primitive = cast_type.rstrip("[] ") in _PRIMITIVES
        starts_operand = (
            nxt.kind in ("identifier", "literal")
            or nxt.text in ("(", "!", "~", "new", "this")
            or (is_primitive and nxt.text in ("+", "-"))
        )
        if not starts_operand:
            self.pos = saved
            return None
        try:
            operand = self.parse_unary()
        except JavaParseError:
            self.pos = saved
            return None
        return Node(
            "cast",
            self.span_from(start),
            (operand,),
            {"type": cast_type, "operand": operand},
        )

    def try_parse_lambda(self) -> Optional[Node]:
        tok = self.peek()
        if tok is None:
            return None
        start = self.pos
        params: list[str] = []
        if tok.kind == "identifier" and self.peek(1) is not None and self.peek(1).text == "->":
            params = [tok.text]
            self.advance()
            self.advance()
        elif tok.text == "(":
            close = self._find_matching_paren(self.pos)
            if close is None:
                return None
            after = self.tokens[close + 1] if close + 1 < len(self.tokens) else None
            if after is None or after.text != "->":
                return None
            self.advance()  # (
            while not self.at(")"):
                self.accept("final")
                first = self.peek()
                if first is None or first.kind not in ("identifier", "keyword"):
                    self.error("expected lambda parameter")
                maybe_type = self.try_parse_type()
                nxt = self.peek()
                if maybe_type is not None and nxt is not None and nxt.kind == "identifier":
                    params.append(self.advance().text)
                elif first.kind == "identifier" and maybe_type is not None:
                    # bare name parameter; the type parse consumed the name itself
                    params.append(maybe_type)
                else:
                    self.error("expected lambda parameter")
                if not self.accept(","):
                    break
            self.expect(")")
            self.expect("->")
        else:
            return None
        if self.at("{"):
            body: Node = self.parse_block()
        else:
            body = self.parse_expression()
        return Node(
            "lambda",
            self.span_from(start),
            (body,),
            {"params": tuple(params), "body": body},
        )

    def _find_matching_paren(self, open_index: int) -> Optional[int]:
        depth = 0
        for i in range(open_index, len(self.tokens)):
            t = self.tokens[i].text
            if t == "(":
                depth += 1
            elif t == ")":
                depth -= 1
                if depth == 0:
                    return i
        return None

    def parse_postfix(self) -> Node:
        start = self.pos
        node = self.parse_primary()
        while True:
            tok = self.peek()
            if tok is None:
                return node
            if tok.text == ".":
                nxt = self.peek(1)
                if nxt is None or nxt.kind not in ("identifier", "keyword"):
                    self.error("expected member name after '.'")
                if nxt.text == "new":
                    self.unsupported("qualified class instance creation")
                self.advance()
                name = self.advance().text
                if self.at("("):
                    args = self.parse_arguments()
                    node = Node(
                        "call",
                        self.span_from(start),
                        (node,) + tuple(args),
                        {"name": name, "receiver": node, "args": tuple(args)},
                    )
                else:
                    node = Node(
                        "field-access",
                        self.span_from(start),
                        (node,),
                        {"name": name, "receiver": node},
                    )
            elif tok.text == "(" and node.kind == "name":
                args = self.parse_arguments()
                node = Node(
                    "call",
                    self.span_from(start),
                    tuple(args),
                    {"name": node.attrs["name"], "receiver": None, "args": tuple(args)},
                )
            elif tok.text == "[":
                self.advance()
                index = self.parse_expression()
                self.expect("]")
                node = Node(
                    "array-access",
                    self.span_from(start),
                    (node, index),
                    {"array": node, "index": index},
                )
            elif tok.text in ("++", "--"):
                op = self.advance().text
                node = Node(
                    "unary",
                    self.span_from(start),
                    (node,),
                    {"op": op, "prefix": False, "operand": node},
                )
            elif tok.text == "::":
                self.unsupported("method reference")
            else:
                return node

    def parse_arguments(self) -> list[Node]:
        self.expect("(")
        args: list[Node] = []
        if self.accept(")"):
            return args
        while True:
            args.append(self.parse_expression())
            if self.accept(","):
                continue
            self.expect(")")
            break
        return args

    def parse_primary(self) -> Node:
        start = self.pos
        tok = self.peek()
        if tok is None:
            self.error("expected expression")

        if tok.kind == "literal":
            self.advance()
            return Node("literal", self.span_from(start), (), {"value": tok.text})
        if tok.text == "this":
            self.advance()
            return Node("name", self.span_from(start), (), {"name": "this"})
        if tok.text == "super":
            self.unsupported("'super' expression")
        if tok.text == "new":
            return self.parse_creation()
        if tok.text == "(":
            self.advance()
            inner = self.parse_expression()
            self.expect(")")
            return Node("paren", self.span_from(start), (inner,), {"inner": inner})
        if tok.kind == "identifier":
            self.advance()
            return Node("name", self.span_from(start), (), {"name": tok.text})
        if tok.kind == "keyword" and tok.text in _PRIMITIVES:
            # e.g. int.class is unsupported; a primitive alone is an error
            self.unsupported(f"primitive '{tok.text}' in expression position")
        self.error(f"unexpected token '{tok.text}'")

    def parse_creation(self) -> Node:
        start = self.pos
        self.expect("new")
        tok = self.peek()
        if tok is None:
            self.error("expected type after 'new'")

        if tok.text in _PRIMITIVES:
            self.advance()
            type_name = tok.text
        else:
            if tok.kind != "identifier":
                self.error("expected type after 'new'")
            self.advance()
            type_name = tok.text
            while self.at(".") and self.peek(1) is not None and self.peek(1).kind == "identifier":
                self.advance()
                type_name += "." + self.advance().text

        type_args_span: Optional[tuple[int, int]] = None
        if self.at("<"):
            ta_start = self.pos
            self.parse_type_arguments()
            type_args_span = self.span_from(ta_start)

        if self.at("["):
            dim_exprs: list[Node] = []
            dims = 0
            while self.accept("["):
                dims += 1
                if not self.at("]"):
                    dim_exprs.append(self.parse_expression())
                self.expect("]")
            init = None
            children: tuple[Node, ...] = tuple(dim_exprs)
            if self.at("{"):
                init = self.parse_array_initializer()
                children += (init,)
            return Node(
                "array-creation",
                self.span_from(start),
                children,
                {"type_name": type_name, "dims": dims, "init": init},
            )

        args = self.parse_arguments()
        if self.at("{"):
            self.unsupported("anonymous class body")
        return Node(
            "object-creation",
            self.span_from(start),
            tuple(args),
            {
                "type_name": type_name,
                "type_args_span": type_args_span,
                "args": tuple(args),
            },
        )


def parse_method(text: str) -> MethodUnit:
    """Parse a single Java method declaration into a :class:`MethodUnit`.

    Raises :class:`JavaParseError` (with line/column) for malformed input and
    :class:`UnsupportedConstructError` for Java features outside the subset.
    """
    parser = _Parser(text)
    tree = parser.parse_method_decl()
    if parser.peek() is not None:
        parser.error("trailing input after method declaration")
    return MethodUnit(
        name=tree.attrs["name"],
        text=text,
        tree=tree,
        file_span=(0, len(text)),
        sloc=sloc(text),
        token_count=token_count(text),
    )


def print_method(unit: MethodUnit) -> str:
    """Deterministic text form of a method.

    Trees never mutate; rewrites splice replacement text into the original
    source, so the printed form of a unit is exactly its backing text. The
    round trip ``print_method(parse_method(t))`` is token-equal to ``t`` by
    construction (byte-equal, in fact).
    """
    return unit.text


def splice_text(text: str, span: tuple[int, int], replacement: str) -> str:
    """Replace ``span`` in ``text``, leaving all other bytes untouched."""
    return text[: span[0]] + replacement + text[span[1] :]


def reparse(unit: MethodUnit, new_text: str) -> MethodUnit:
    new = parse_method(new_text)
    return MethodUnit(
        name=new.name,
        text=new_text,
        tree=new.tree,
        file_span=unit.file_span,
        sloc=new.sloc,
        token_count=new.token_count,
    )


def identifier_occurrences(unit: MethodUnit, name: str) -> int:
    """Occurrences of ``name`` as a significant identifier token."""
    return sum(
        1
        for t in tokenize(unit.text)
        if t.significant and t.kind == "identifier" and t.text == name
    )
