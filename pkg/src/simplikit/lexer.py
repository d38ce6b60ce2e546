"""Lossless Java lexer plus the size counters (SLOC, significant tokens).

The token stream keeps every byte of the input: concatenating the ``text``
of all tokens reproduces the source exactly. Comments and whitespace are
emitted as tokens flagged non-significant so that downstream size metrics
and token-equality checks can ignore them without losing the original text.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

# Java reserved words. true/false/null are literals, not keywords.
KEYWORDS = frozenset(
    """
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package
    private protected public return short static strictfp super switch
    synchronized this throw throws transient try void volatile while
    """.split()
)

# Multi-character operators, longest first. '>>' and friends are deliberately
# absent: '>' is always lexed alone so that nested type arguments such as
# Map<String, List<Integer>> stay unambiguous; the parser fuses adjacent '>'
# tokens back into shift operators.
_MULTI_OPS = (
    "<<=",
    "...",
    "->",
    "::",
    "==",
    "!=",
    "<=",
    ">=",
    "&&",
    "||",
    "++",
    "--",
    "+=",
    "-=",
    "*=",
    "/=",
    "%=",
    "&=",
    "|=",
    "^=",
    "<<",
)

_SINGLE_OPS = set("+-*/%=<>!~&|^?")
_PUNCT = set("(){}[];,.@:")


@dataclass(frozen=True)
class Token:
    """One lexical token with its exact source text and position."""

    kind: str  # identifier | keyword | literal | operator | punctuation | comment | whitespace
    text: str
    line: int  # 1-based
    column: int  # 1-based
    start: int  # byte offset of the first character
    end: int  # byte offset one past the last character

    @property
    def significant(self) -> bool:
        return self.kind not in ("comment", "whitespace")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int) -> str:
        chunk = self.text[self.pos : self.pos + n]
        self.pos += n
        for ch in chunk:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        return chunk

    def _make(self, kind: str, start: int, line: int, col: int) -> Token:
        return Token(kind, self.text[start : self.pos], line, col, start, self.pos)

    def tokens(self) -> Iterable[Token]:
        text = self.text
        n = len(text)
        while self.pos < n:
            start, line, col = self.pos, self.line, self.col
            ch = text[self.pos]

            if ch.isspace():
                while self.pos < n and text[self.pos].isspace():
                    self._advance(1)
                yield self._make("whitespace", start, line, col)
                continue

            if ch == "/" and self.pos + 1 < n and text[self.pos + 1] == "/":
                while self.pos < n and text[self.pos] != "\n":
                    self._advance(1)
                yield self._make("comment", start, line, col)
                continue

            if ch == "/" and self.pos + 1 < n and text[self.pos + 1] == "*":
                self._advance(2)
                while self.pos < n and not text.startswith("*/", self.pos):
                    self._advance(1)
                if self.pos < n:
                    self._advance(2)
                yield self._make("comment", start, line, col)
                continue

            if ch.isalpha() or ch == "_" or ch == "$":
                while self.pos < n and (text[self.pos].isalnum() or text[self.pos] in "_$"):
                    self._advance(1)
                word = text[start : self.pos]
                if word in KEYWORDS:
                    kind = "keyword"
                elif word in ("true", "false", "null"):
                    kind = "literal"
                else:
                    kind = "identifier"
                yield self._make(kind, start, line, col)
                continue

            if ch.isdigit() or (ch == "." and self.pos + 1 < n and text[self.pos + 1].isdigit()):
                self._scan_number()
                yield self._make("literal", start, line, col)
                continue

            if ch == '"' or ch == "'":
                self._scan_quoted(ch)
                yield self._make("literal", start, line, col)
                continue

            multi = next((op for op in _MULTI_OPS if text.startswith(op, self.pos)), None)
            if multi is not None:
                self._advance(len(multi))
                kind = "punctuation" if multi == "..." else "operator"
                yield self._make(kind, start, line, col)
                continue

            if ch in _PUNCT:
                self._advance(1)
                yield self._make("punctuation", start, line, col)
                continue

            # Unknown bytes degrade to single-character operator tokens.
            self._advance(1)
            yield self._make("operator", start, line, col)

    def _scan_number(self) -> None:
        text, n = self.text, len(self.text)
        if text.startswith(("0x", "0X", "0b", "0B"), self.pos):
            self._advance(2)
            while self.pos < n and (text[self.pos].isalnum() or text[self.pos] == "_"):
                self._advance(1)
            return
        seen_dot = False
        while self.pos < n:
            ch = text[self.pos]
            if ch.isdigit() or ch == "_":
                self._advance(1)
            elif ch == "." and not seen_dot and self.pos + 1 < n and text[self.pos + 1].isdigit():
                seen_dot = True
                self._advance(1)
            elif ch in "eE" and self.pos + 1 < n and (text[self.pos + 1].isdigit() or text[self.pos + 1] in "+-"):
                self._advance(2)
            elif ch in "fFdDlL":
                self._advance(1)
                return
            else:
                return

    def _scan_quoted(self, quote: str) -> None:
        text, n = self.text, len(self.text)
        self._advance(1)
        while self.pos < n:
            ch = text[self.pos]
            if ch == "\\" and self.pos + 1 < n:
                self._advance(2)
            elif ch == quote:
                self._advance(1)
                return
            elif ch == "\n":
                return  # unterminated literal ends at the line break
            else:
                self._advance(1)


def tokenize(text: str) -> list[Token]:
    """Lex ``text`` into a lossless token stream."""
    return list(_Scanner(text).tokens())


def significant_tokens(text_or_tokens: str | Sequence[Token]) -> list[Token]:
    tokens = tokenize(text_or_tokens) if isinstance(text_or_tokens, str) else text_or_tokens
    return [t for t in tokens if t.significant]


def significant_texts(text_or_tokens: str | Sequence[Token]) -> tuple[str, ...]:
    """The significant token texts, the unit of token-equality everywhere."""
    return tuple(t.text for t in significant_tokens(text_or_tokens))


def token_equal(a: str, b: str) -> bool:
    """True when two sources agree on every significant token."""
    return significant_texts(a) == significant_texts(b)


def token_count(text: str) -> int:
    """Number of significant (non-comment, non-whitespace) tokens."""
    return len(significant_tokens(text))


def sloc(text: str) -> int:
    """Source lines of code: lines carrying at least one significant token.

    Blank lines and comment-only lines contribute nothing; a block comment
    spanning lines contributes only where code shares the line.
    """
    lines = set()
    for tok in tokenize(text):
        if tok.significant:
            lines.add(tok.line)
    return len(lines)


def significant_lines(text: str) -> dict[int, tuple[str, ...]]:
    """Map 1-based line number -> significant token texts on that line.

    Multi-line tokens cannot occur among significant Java tokens in this
    subset (strings do not span lines), so each token lands on one line.
    """
    by_line: dict[int, list[str]] = {}
    for tok in tokenize(text):
        if tok.significant:
            by_line.setdefault(tok.line, []).append(tok.text)
    return {line: tuple(parts) for line, parts in by_line.items()}
