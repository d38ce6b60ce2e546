"""Line diffs between method pairs and changed-line marker encoding.

A hunk's significant line counts exclude blank and comment-only lines;
qualification as a simplification requires strictly more significant
deletions than additions. Marker tokens are the exact ASCII strings
``<original>``, ``</original>``, ``<simplified>``, ``</simplified>`` and
wrap whole lines.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .lexer import significant_lines
from .syntax import MethodUnit

ORIGINAL_OPEN = "<original>"
ORIGINAL_CLOSE = "</original>"
SIMPLIFIED_OPEN = "<simplified>"
SIMPLIFIED_CLOSE = "</simplified>"

_ALL_MARKERS = (ORIGINAL_OPEN, ORIGINAL_CLOSE, SIMPLIFIED_OPEN, SIMPLIFIED_CLOSE)


class MalformedMarkersError(ValueError):
    """Marker tokens are unbalanced or nested in a way we cannot decode."""


@dataclass(frozen=True)
class DiffHunk:
    """One contiguous block of deleted/added lines.

    ``deleted``/``added`` pair 1-based line numbers (in the original and the
    simplified text respectively) with the raw line content.
    """

    deleted: tuple[tuple[int, str], ...]
    added: tuple[tuple[int, str], ...]
    significant_deleted: int
    significant_added: int
    anchor: int  # 0-based original line index where added lines attach

    @property
    def deleted_line_numbers(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.deleted)


@dataclass(frozen=True)
class LocalizedPair:
    localized_original: str
    simplified_text: str
    hunks: tuple[DiffHunk, ...]


def _text_of(value: Union[str, MethodUnit]) -> str:
    return value.text if isinstance(value, MethodUnit) else value


def diff(original: Union[str, MethodUnit], simplified: Union[str, MethodUnit]) -> list[DiffHunk]:
    """Minimal line-based edit script between the two texts, one hunk per
    contiguous changed region. Deterministic for fixed inputs."""
    orig_text = _text_of(original)
    simp_text = _text_of(simplified)
    orig_lines = orig_text.split("\n")
    simp_lines = simp_text.split("\n")
    orig_sig = significant_lines(orig_text)
    simp_sig = significant_lines(simp_text)

    matcher = difflib.SequenceMatcher(a=orig_lines, b=simp_lines, autojunk=False)
    hunks: list[DiffHunk] = []
    for tag, i1, i2, j1, j2 in matcher.get_opcodes():
        if tag == "equal":
            continue
        deleted = tuple((i + 1, orig_lines[i]) for i in range(i1, i2))
        added = tuple((j + 1, simp_lines[j]) for j in range(j1, j2))
        hunks.append(
            DiffHunk(
                deleted=deleted,
                added=added,
                significant_deleted=sum(1 for n, _ in deleted if n in orig_sig),
                significant_added=sum(1 for n, _ in added if n in simp_sig),
                anchor=i2,
            )
        )
    return hunks


def qualifies_as_simplification(hunk: DiffHunk) -> bool:
    """True iff the hunk deletes strictly more significant lines than it adds."""
    return hunk.significant_deleted > hunk.significant_added


def encode_localized(
    original: Union[str, MethodUnit],
    hunks: Iterable[DiffHunk],
    *,
    include_simplified: bool = True,
) -> str:
    """Wrap each changed original line in ``<original>`` markers; in training
    mode (``include_simplified``) the replacement lines follow each hunk
    wrapped in ``<simplified>`` markers. Unchanged lines pass through."""
    text = _text_of(original)
    lines = text.split("\n")
    wrapped: dict[int, bool] = {}  # 0-based index -> True
    insertions: dict[int, list[str]] = {}  # insert before this 0-based index

    for hunk in hunks:
        for line_no, _ in hunk.deleted:
            wrapped[line_no - 1] = True
        if include_simplified and hunk.added:
            target = insertions.setdefault(hunk.anchor, [])
            for _, content in hunk.added:
                target.append(f"{SIMPLIFIED_OPEN}{content}{SIMPLIFIED_CLOSE}")

    out: list[str] = []
    for idx, line in enumerate(lines):
        if idx in wrapped:
            out.append(f"{ORIGINAL_OPEN}{line}{ORIGINAL_CLOSE}")
        else:
            out.append(line)
        if (idx + 1) in insertions:
            out.extend(insertions[idx + 1])
    if 0 in insertions:
        out = insertions[0] + out
    return "\n".join(out)


def localize(
    original: Union[str, MethodUnit],
    simplified: Union[str, MethodUnit],
    *,
    include_simplified: bool = True,
) -> LocalizedPair:
    """Perfect localization: derive hunks from the ground-truth pair and
    render the marked original."""
    hunks = tuple(diff(original, simplified))
    return LocalizedPair(
        localized_original=encode_localized(original, hunks, include_simplified=include_simplified),
        simplified_text=_text_of(simplified),
        hunks=hunks,
    )


def mark_lines(original: Union[str, MethodUnit], line_numbers: Iterable[int]) -> str:
    """Inference-mode encoding: wrap the given 1-based lines in
    ``<original>`` markers only (no ground truth available)."""
    text = _text_of(original)
    lines = text.split("\n")
    targets = {n - 1 for n in line_numbers}
    return "\n".join(
        f"{ORIGINAL_OPEN}{line}{ORIGINAL_CLOSE}" if idx in targets else line
        for idx, line in enumerate(lines)
    )


def strip_markers(text: str) -> str:
    """Reconstruct the original from marked text: unwraps ``<original>``
    lines and drops ``<simplified>`` lines. Raises
    :class:`MalformedMarkersError` on unbalanced tags."""
    out: list[str] = []
    for line in text.split("\n"):
        has = {m: line.count(m) for m in _ALL_MARKERS}
        if sum(has.values()) == 0:
            out.append(line)
            continue
        if has[SIMPLIFIED_OPEN] == 1 and has[SIMPLIFIED_CLOSE] == 1:
            if has[ORIGINAL_OPEN] or has[ORIGINAL_CLOSE]:
                raise MalformedMarkersError(f"mixed markers on one line: {line!r}")
            if not line.strip().startswith(SIMPLIFIED_OPEN) or not line.strip().endswith(
                SIMPLIFIED_CLOSE
            ):
                raise MalformedMarkersError(f"simplified markers must wrap the line: {line!r}")
            continue  # drop the replacement line entirely
        if has[ORIGINAL_OPEN] == 1 and has[ORIGINAL_CLOSE] == 1:
            if has[SIMPLIFIED_OPEN] or has[SIMPLIFIED_CLOSE]:
                raise MalformedMarkersError(f"mixed markers on one line: {line!r}")
            start = line.index(ORIGINAL_OPEN)
            end = line.index(ORIGINAL_CLOSE)
            if end < start:
                raise MalformedMarkersError(f"close before open: {line!r}")
            inner = line[start + len(ORIGINAL_OPEN) : end]
            out.append(line[:start] + inner + line[end + len(ORIGINAL_CLOSE) :])
            continue
        raise MalformedMarkersError(f"unbalanced marker tokens on line: {line!r}")
    return "\n".join(out)
