"""File-granularity view of a .java source: imports, fields, and methods.

This is a token-level scanner, not a full Java front end. It locates class
bodies, splits them into member spans, and parses each member with the
method parser; members that are neither methods nor simple fields
(constructors, enum constants, nested machinery we don't model) are counted
as skipped rather than failing the whole file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .lexer import Token, tokenize
from .syntax import JavaParseError, MethodUnit, _Parser, parse_method


@dataclass(frozen=True)
class ImportDecl:
    span: tuple[int, int]
    line: int
    module: str  # dotted path, '*' last segment for wildcards
    is_static: bool

    @property
    def is_wildcard(self) -> bool:
        return self.module.endswith(".*")

    @property
    def simple_name(self) -> str:
        return self.module.rsplit(".", 1)[-1]

    @property
    def package(self) -> str:
        return self.module.rsplit(".", 1)[0] if "." in self.module else ""


@dataclass(frozen=True)
class FileMethod:
    qualified_name: str  # Class.method, nested classes dotted
    class_name: str
    span: tuple[int, int]
    unit: MethodUnit


@dataclass(frozen=True)
class FileField:
    class_name: str
    name: str
    type_text: str
    init_text: Optional[str]
    is_static: bool
    is_final: bool
    span: tuple[int, int]


@dataclass
class JavaFile:
    text: str
    package: Optional[str] = None
    imports: list[ImportDecl] = field(default_factory=list)
    methods: list[FileMethod] = field(default_factory=list)
    fields: list[FileField] = field(default_factory=list)
    classes: list[str] = field(default_factory=list)
    skipped_members: int = 0
    member_errors: list[str] = field(default_factory=list)

    def method_named(self, name: str) -> Optional[FileMethod]:
        """Find a method by qualified or simple name (first match)."""
        for m in self.methods:
            if m.qualified_name == name or m.qualified_name.split(".")[-1] == name:
                return m
        return None

    def identifier_uses_outside_imports(self) -> dict[str, int]:
        """Identifier frequency outside import declarations; feeds the
        unused-import check."""
        import_spans = [imp.span for imp in self.imports]
        uses: dict[str, int] = {}
        for tok in tokenize(self.text):
            if not tok.significant or tok.kind != "identifier":
                continue
            if any(lo <= tok.start < hi for lo, hi in import_spans):
                continue
            uses[tok.text] = uses.get(tok.text, 0) + 1
        return uses


_MEMBER_MODIFIERS = frozenset(
    ["public", "protected", "private", "static", "final", "abstract",
     "synchronized", "native", "strictfp", "transient", "volatile", "default"]
)


class _FileScanner:
    def __init__(self, text: str):
        self.text = text
        self.tokens = [t for t in tokenize(text) if t.significant]
        self.result = JavaFile(text=text)

    def scan(self) -> JavaFile:
        i = 0
        i = self._scan_package(i)
        i = self._scan_imports(i)
        n = len(self.tokens)
        while i < n:
            tok = self.tokens[i]
            if tok.text in ("class", "interface", "enum"):
                name, body_open = self._class_header(i)
                if body_open is None:
                    break
                self.result.classes.append(name)
                i = self._scan_class_body(body_open + 1, name)
            elif tok.text == "@":
                i = self._skip_annotation(i)
            else:
                i += 1
        return self.result

    def _scan_package(self, i: int) -> int:
        if i < len(self.tokens) and self.tokens[i].text == "package":
            j = i + 1
            parts = []
            while j < len(self.tokens) and self.tokens[j].text != ";":
                if self.tokens[j].kind == "identifier":
                    parts.append(self.tokens[j].text)
                j += 1
            self.result.package = ".".join(parts)
            return j + 1
        return i

    def _scan_imports(self, i: int) -> int:
        while i < len(self.tokens) and self.tokens[i].text == "import":
            start_tok = self.tokens[i]
            j = i + 1
            is_static = False
            parts: list[str] = []
            while j < len(self.tokens) and self.tokens[j].text != ";":
                t = self.tokens[j]
                if t.text == "static":
                    is_static = True
                elif t.kind == "identifier" or t.text == "*":
                    parts.append(t.text)
                j += 1
            if j >= len(self.tokens):
                break
            end_tok = self.tokens[j]
            self.result.imports.append(
                ImportDecl(
                    span=(start_tok.start, end_tok.end),
                    line=start_tok.line,
                    module=".".join(parts),
                    is_static=is_static,
                )
            )
            i = j + 1
        return i

    def _class_header(self, i: int) -> tuple[str, Optional[int]]:
        name = ""
        j = i + 1
        if j < len(self.tokens) and self.tokens[j].kind == "identifier":
            name = self.tokens[j].text
        while j < len(self.tokens) and self.tokens[j].text != "{":
            j += 1
        return name, (j if j < len(self.tokens) else None)

    def _skip_annotation(self, i: int) -> int:
        j = i + 1  # past '@'
        while j < len(self.tokens) and self.tokens[j].kind in ("identifier", "keyword"):
            j += 1
            if j < len(self.tokens) and self.tokens[j].text == ".":
                j += 1
                continue
            break
        if j < len(self.tokens) and self.tokens[j].text == "(":
            depth = 0
            while j < len(self.tokens):
                t = self.tokens[j].text
                if t == "(":
                    depth += 1
                elif t == ")":
                    depth -= 1
                    if depth == 0:
                        j += 1
                        break
                j += 1
        return j

    def _scan_class_body(self, i: int, class_prefix: str) -> int:
        n = len(self.tokens)
        while i < n:
            tok = self.tokens[i]
            if tok.text == "}":
                return i + 1
            member_start = i
            i = self._member_end(i)
            self._classify_member(member_start, i, class_prefix)
        return i

    def _member_end(self, i: int) -> int:
        """Index one past the last token of the member starting at ``i``."""
        n = len(self.tokens)
        depth = 0
        seen_brace = False
        while i < n:
            t = self.tokens[i]
            if t.text == "@" and depth == 0 and not seen_brace:
                i = self._skip_annotation(i)
                continue
            if t.text == "{":
                depth += 1
                seen_brace = True
            elif t.text == "}":
                depth -= 1
                if depth == 0 and seen_brace:
                    # anonymous-class field initializers end with '};'
                    if i + 1 < n and self.tokens[i + 1].text == ";":
                        return i + 2
                    return i + 1
                if depth < 0:
                    return i  # stray '}' belongs to the enclosing class
            elif t.text == ";" and depth == 0:
                return i + 1
            i += 1
        return i

    def _classify_member(self, start: int, end: int, class_prefix: str) -> None:
        if start >= end:
            self.result.skipped_members += 1
            return
        toks = self.tokens[start:end]
        span = (toks[0].start, toks[-1].end)
        text = self.text[span[0] : span[1]]

        head = self._strip_annotations_and_modifiers(start, end)
        if head < end and self.tokens[head].text in ("class", "interface", "enum"):
            name, body_open = self._class_header(head)
            if body_open is not None and body_open < end:
                qualified = f"{class_prefix}.{name}"
                self.result.classes.append(qualified)
                self._scan_class_body(body_open + 1, qualified)
            return

        try:
            unit = parse_method(text)
            parse_error: Optional[JavaParseError] = None
        except JavaParseError as exc:
            unit = None
            parse_error = exc
        if unit is not None:
            self.result.methods.append(
                FileMethod(
                    qualified_name=f"{class_prefix}.{unit.name}",
                    class_name=class_prefix,
                    span=span,
                    unit=MethodUnit(
                        name=f"{class_prefix}.{unit.name}",
                        text=text,
                        tree=unit.tree,
                        file_span=span,
                        sloc=unit.sloc,
                        token_count=unit.token_count,
                    ),
                )
            )
            return

        parsed_field = self._try_parse_field(head, end, class_prefix, span)
        if parsed_field:
            return
        if self._is_benign_member(head, end, class_prefix):
            self.result.skipped_members += 1
            return
        line = self.tokens[start].line
        message = str(parse_error) if parse_error is not None else "unrecognized member"
        self.result.member_errors.append(
            f"line {line}: member of {class_prefix} does not parse: {message}"
        )

    def _is_benign_member(self, head: int, end: int, class_prefix: str) -> bool:
        """Members we knowingly do not model: constructors, initializer
        blocks, and enum constant lists."""
        if head >= end:
            return True
        first = self.tokens[head]
        if first.text == "{":
            return True  # instance/static initializer block
        simple_class = class_prefix.rsplit(".", 1)[-1]
        if (
            first.kind == "identifier"
            and first.text == simple_class
            and head + 1 < end
            and self.tokens[head + 1].text == "("
        ):
            return True  # constructor
        # enum constant list: identifiers separated by commas, ';' terminated
        i = head
        while i < end:
            tok = self.tokens[i]
            if tok.kind == "identifier" or tok.text in (",", ";"):
                i += 1
                continue
            return False
        return True

    def _strip_annotations_and_modifiers(self, i: int, end: int) -> int:
        while i < end:
            t = self.tokens[i]
            if t.text == "@":
                i = self._skip_annotation(i)
            elif t.text in _MEMBER_MODIFIERS:
                i += 1
            else:
                break
        return i

    def _try_parse_field(
        self, head: int, end: int, class_prefix: str, span: tuple[int, int]
    ) -> bool:
        if head >= end:
            return False
        mod_texts = {self.tokens[k].text for k in range(0, head)}
        sub_text = self.text[self.tokens[head].start : self.tokens[end - 1].end]
        try:
            parser = _Parser(sub_text)
            decl = parser.parse_local_var_decl()
            if parser.peek() is not None:
                return False
        except JavaParseError:
            return False
        modifiers = {
            self.tokens[k].text
            for k in range(max(0, head - 4), head)
            if self.tokens[k].kind == "keyword"
        }
        for d in decl.attrs["declarators"]:
            init = d["init"]
            self.result.fields.append(
                FileField(
                    class_name=class_prefix,
                    name=d["name"],
                    type_text=decl.attrs["type"] + d["dims"],
                    init_text=init.text(sub_text) if init is not None else None,
                    is_static="static" in modifiers,
                    is_final="final" in modifiers or decl.attrs["final"],
                    span=span,
                )
            )
        return True


def parse_java_file(text: str) -> JavaFile:
    """Scan a .java source into imports, fields, and parsed methods."""
    return _FileScanner(text).scan()
