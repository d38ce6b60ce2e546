"""Deletion-only simplification: ddmin over statements and the
deletion-restricted oracle baseline.

``ddmin_reduce`` runs the classic granularity-doubling schedule (try chunks,
then complements, refine on failure) over non-overlapping deletion units and
returns a program from which no single remaining unit can be removed without
violating the oracle. Oracle results are memoized by significant-token hash
so duplicate test runs never happen.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .lexer import significant_lines, significant_texts
from .syntax import JavaParseError, MethodUnit, parse_method, reparse


@dataclass(frozen=True)
class DeletionUnit:
    kind: str  # statement | import | line
    span: tuple[int, int]
    index: int


@dataclass
class ReductionTrace:
    """Audit trail: every attempted subset with its verdict."""

    attempts: list[tuple[tuple[int, ...], bool]] = field(default_factory=list)
    final_indices: tuple[int, ...] = ()
    oracle_calls: int = 0  # unique (non-memoized) oracle evaluations
    units: tuple[DeletionUnit, ...] = ()


class OracleError(RuntimeError):
    """Oracle failure, carrying the trace accumulated so far."""

    def __init__(self, message: str, trace: ReductionTrace):
        super().__init__(message)
        self.trace = trace


def deletion_units(unit: MethodUnit, granularity: str = "statement") -> list[DeletionUnit]:
    """Non-overlapping deletable regions. Statement granularity (default)
    takes the top-level statements of the method body; line granularity takes
    significant lines strictly inside the body."""
    if granularity == "statement":
        body = unit.tree.attrs.get("body")
        if body is None:
            return []
        return [
            DeletionUnit("statement", stmt.span, i)
            for i, stmt in enumerate(body.children)
        ]
    if granularity == "line":
        sig = sorted(significant_lines(unit.text))
        inner = sig[1:-1] if len(sig) > 2 else []
        starts = _line_offsets(unit.text)
        units = []
        for i, line_no in enumerate(inner):
            lo = starts[line_no - 1]
            hi = starts[line_no] if line_no < len(starts) else len(unit.text)
            units.append(DeletionUnit("line", (lo, hi), i))
        return units
    raise ValueError(f"unknown granularity: {granularity}")


def _line_offsets(text: str) -> list[int]:
    offsets = [0]
    for i, ch in enumerate(text):
        if ch == "\n":
            offsets.append(i + 1)
    return offsets


def render_retained(
    unit: MethodUnit, units: Sequence[DeletionUnit], retained: Sequence[int]
) -> str:
    keep = set(retained)
    text = unit.text
    for du in sorted(units, key=lambda u: u.span, reverse=True):
        if du.index not in keep:
            text = text[: du.span[0]] + text[du.span[1] :]
    return text


def _token_hash(text: str) -> str:
    joined = "\x1f".join(significant_texts(text))
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()


def ddmin_reduce(
    unit: MethodUnit,
    oracle: Callable[[MethodUnit], bool],
    *,
    granularity: str = "statement",
) -> tuple[MethodUnit, ReductionTrace]:
    """Minimize ``unit`` by deletion while ``oracle`` stays satisfied.

    Requires ``oracle(unit)`` to hold. The result is 1-minimal: removing any
    single remaining deletion unit violates the oracle (or breaks the parse).
    """
    units = deletion_units(unit, granularity)
    trace = ReductionTrace(units=tuple(units))
    memo: dict[str, bool] = {}

    def test(retained: Sequence[int]) -> bool:
        text = render_retained(unit, units, retained)
        key = _token_hash(text)
        if key in memo:
            verdict = memo[key]
            trace.attempts.append((tuple(retained), verdict))
            return verdict
        try:
            candidate = reparse(unit, text)
        except JavaParseError:
            memo[key] = False
            trace.attempts.append((tuple(retained), False))
            return False
        try:
            verdict = bool(oracle(candidate))
        except Exception as exc:  # propagate with the audit trail
            raise OracleError(f"oracle failed: {exc}", trace) from exc
        memo[key] = verdict
        trace.oracle_calls += 1
        trace.attempts.append((tuple(retained), verdict))
        return verdict

    everything = [du.index for du in units]
    if not test(everything):
        raise ValueError("oracle does not hold on the unaltered program")

    current = everything
    n = 2
    while len(current) >= 2:
        chunk_size = max(1, len(current) // n)
        chunks = [current[i : i + chunk_size] for i in range(0, len(current), chunk_size)]
        progressed = False

        for chunk in chunks:
            if len(chunk) < len(current) and test(chunk):
                current = chunk
                n = 2
                progressed = True
                break
        if not progressed:
            for chunk in chunks:
                complement = [i for i in current if i not in chunk]
                if complement and test(complement):
                    current = complement
                    n = max(n - 1, 2)
                    progressed = True
                    break
        if not progressed:
            if n >= len(current):
                break
            n = min(n * 2, len(current))

    # ddmin never probes the empty configuration; when one unit is left the
    # 1-minimality claim still requires trying to drop it.
    if len(current) == 1 and test([]):
        current = []

    trace.final_indices = tuple(current)
    final = reparse(unit, render_retained(unit, units, current))
    return final, trace


def ddmin_worst_case_bound(unit_count: int) -> int:
    """Classic worst-case test count for ddmin, plus the one extra
    empty-configuration probe this implementation may add."""
    return unit_count * unit_count + 3 * unit_count + 1


def _line_token_sequence(text: str) -> list[tuple[str, ...]]:
    sig = significant_lines(text)
    return [sig[line] for line in sorted(sig)]


def idd(
    original: Union[str, MethodUnit], ground_truth: Union[str, MethodUnit]
) -> Optional[MethodUnit]:
    """Deletion-only oracle baseline.

    Returns the ground truth exactly when its significant-line sequence is a
    subsequence of the original's (the pair is reachable by pure deletion);
    otherwise returns None. Lines are compared by significant tokens, so
    reindentation does not defeat the check.
    """
    orig_text = original.text if isinstance(original, MethodUnit) else original
    truth_unit = (
        ground_truth if isinstance(ground_truth, MethodUnit) else parse_method(ground_truth)
    )
    haystack = _line_token_sequence(orig_text)
    needle = _line_token_sequence(truth_unit.text)
    pos = 0
    for line in needle:
        while pos < len(haystack) and haystack[pos] != line:
            pos += 1
        if pos >= len(haystack):
            return None
        pos += 1
    return truth_unit
