"""Uniform interface over candidate generators.

Three backend families: the builtin rule catalog, the builtin deletion
reducer, and remote generators speaking the HTTP protocol
(POST /v1/generate with {prompt, beam_size, max_len} returning
{candidates: [{text, score}]}). Builtin backends are fully deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import requests

from . import catalog
from .javafile import parse_java_file
from .lexer import significant_texts, sloc, token_count
from .localization import ORIGINAL_OPEN, strip_markers
from .reducer import ddmin_reduce
from .syntax import JavaParseError, MethodUnit, parse_method

PROMPT_PREFIX = "Simplify the following java method: "
PROMPT_SUFFIX = ", the simplified version is: "

DEFAULT_MAX_LEN = 512
DEFAULT_HTTP_TIMEOUT = 120.0


class BackendError(RuntimeError):
    pass


class BackendUnreachable(BackendError):
    pass


class BackendProtocolError(BackendError):
    pass


@dataclass(frozen=True)
class GeneratorRequest:
    """Input text may be a raw method, a whole file, or marker-localized
    text; beam size caps the candidate count."""

    input_text: str
    beam_size: int = 10
    max_len: int = DEFAULT_MAX_LEN
    backend: str = "catalog"

    def __post_init__(self) -> None:
        if not 1 <= self.beam_size <= 64:
            raise ValueError("beam size must be in 1..64")
        if self.max_len < 1:
            raise ValueError("max output length must be positive")


@dataclass(frozen=True)
class Candidate:
    text: str
    score: Optional[float] = None
    provenance: str = "neural"  # rule codes | "deletion" | "neural"


@dataclass(frozen=True)
class CandidateSet:
    candidates: tuple[Candidate, ...] = ()

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def texts(self) -> list[str]:
        return [c.text for c in self.candidates]


def build_prompt(method_text: str) -> str:
    """The generation prompt; the answer slot is left for the backend."""
    return f"{PROMPT_PREFIX}{method_text}{PROMPT_SUFFIX}"


def _marked_line_numbers(localized: str) -> set[int]:
    """1-based line numbers, counted in the reconstructed original, that are
    wrapped in <original> markers."""
    from .localization import SIMPLIFIED_CLOSE, SIMPLIFIED_OPEN

    marked: set[int] = set()
    line_no = 0
    for line in localized.split("\n"):
        if SIMPLIFIED_OPEN in line and SIMPLIFIED_CLOSE in line:
            continue  # replacement line, not part of the original
        line_no += 1
        if ORIGINAL_OPEN in line:
            marked.add(line_no)
    return marked


def _dedupe_and_cap(candidates: Sequence[Candidate], beam: int) -> CandidateSet:
    seen: set[tuple[str, ...]] = set()
    kept: list[Candidate] = []
    for cand in candidates:
        key = significant_texts(cand.text)
        if key in seen:
            continue
        seen.add(key)
        kept.append(cand)
        if len(kept) >= beam:
            break
    return CandidateSet(tuple(kept))


# ---------------------------------------------------------------------------
# builtin backends


def _catalog_generate(request: GeneratorRequest) -> list[Candidate]:
    raw = request.input_text
    marked: Optional[set[int]] = None
    if ORIGINAL_OPEN in raw:
        marked = _marked_line_numbers(raw)
        raw = strip_markers(raw)

    try:
        unit = parse_method(raw)
    except JavaParseError:
        unit = None
    if unit is not None:
        pairs = catalog.enumerate_with_provenance(
            unit, request.beam_size, marked_lines=marked
        )
        return [
            Candidate(u.text, None, "+".join(r.code for r in rules))
            for u, rules in pairs
            if u.token_count <= request.max_len
        ]

    # whole-file input: chain import rewrites breadth-first
    jfile = parse_java_file(raw)
    if not jfile.imports and not jfile.methods:
        return []
    seen = {significant_texts(raw)}
    queue: list[tuple[str, tuple[str, ...]]] = [(raw, ())]
    out: list[Candidate] = []
    while queue and len(out) < request.beam_size:
        text, path = queue.pop(0)
        for rewrite in catalog.applicable_file_rules(text):
            new_text = catalog.apply_file(text, rewrite)
            key = significant_texts(new_text)
            if key in seen:
                continue
            seen.add(key)
            entry = (new_text, path + (rewrite.rule.code,))
            out.append(Candidate(new_text, None, "+".join(entry[1])))
            queue.append(entry)
            if len(out) >= request.beam_size:
                break
    return out


def make_reducer_backend(
    oracle_factory: Optional[Callable[[MethodUnit], Callable[[MethodUnit], bool]]] = None,
    trace_sink: Optional[list] = None,
) -> Callable[[GeneratorRequest], list[Candidate]]:
    """Deletion backend. Without an oracle factory a parse-only oracle is
    used: every deletion that keeps the method parseable survives, and the
    validator is expected to weed out the rest. Reduction traces are appended
    to ``trace_sink`` when given."""

    def generate(request: GeneratorRequest) -> list[Candidate]:
        raw = request.input_text
        if ORIGINAL_OPEN in raw:
            raw = strip_markers(raw)
        try:
            unit = parse_method(raw)
        except JavaParseError:
            return []
        oracle = oracle_factory(unit) if oracle_factory is not None else (lambda _u: True)
        reduced, trace = ddmin_reduce(unit, oracle)
        if trace_sink is not None:
            trace_sink.append(trace)
        if significant_texts(reduced.text) == significant_texts(unit.text):
            return []
        return [Candidate(reduced.text, None, "deletion")]

    return generate


def _http_generate(base_url: str, timeout: float) -> Callable[[GeneratorRequest], list[Candidate]]:
    def generate(request: GeneratorRequest) -> list[Candidate]:
        payload = {
            "prompt": build_prompt(request.input_text),
            "beam_size": request.beam_size,
            "max_len": request.max_len,
        }
        try:
            response = requests.post(
                base_url.rstrip("/") + "/v1/generate", json=payload, timeout=timeout
            )
        except requests.exceptions.Timeout as exc:
            raise BackendUnreachable(f"backend timed out: {exc}") from exc
        except requests.exceptions.RequestException as exc:
            raise BackendUnreachable(f"backend unreachable: {exc}") from exc
        if response.status_code != 200:
            raise BackendProtocolError(f"backend returned HTTP {response.status_code}")
        try:
            body = response.json()
            raw = body["candidates"]
            out = [
                Candidate(str(c["text"]), None if c.get("score") is None else float(c["score"]), "neural")
                for c in raw
            ]
        except (ValueError, KeyError, TypeError) as exc:
            raise BackendProtocolError(f"malformed backend response: {exc}") from exc
        return out

    return generate


@dataclass
class BackendRegistry:
    """id -> generator function. 'catalog' and 'reducer' are always present."""

    backends: dict[str, Callable[[GeneratorRequest], list[Candidate]]] = field(
        default_factory=dict
    )

    def __post_init__(self) -> None:
        self.backends.setdefault("catalog", _catalog_generate)
        self.backends.setdefault("reducer", make_reducer_backend())

    def register_http(self, backend_id: str, base_url: str, *, timeout: float = DEFAULT_HTTP_TIMEOUT) -> None:
        self.backends[backend_id] = _http_generate(base_url, timeout)

    def register(self, backend_id: str, fn: Callable[[GeneratorRequest], list[Candidate]]) -> None:
        self.backends[backend_id] = fn

    @classmethod
    def from_config(cls, path: Union[str, Path]) -> "BackendRegistry":
        """Config file: {"backends": {"<id>": {"url": "...", "timeout": n}}}.
        Builtin names may also be aliased: {"<id>": {"builtin": "catalog"}}."""
        registry = cls()
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        for backend_id, spec in raw.get("backends", {}).items():
            if "url" in spec:
                registry.register_http(
                    backend_id, spec["url"], timeout=float(spec.get("timeout", DEFAULT_HTTP_TIMEOUT))
                )
            elif "builtin" in spec:
                builtin = spec["builtin"]
                if builtin not in ("catalog", "reducer"):
                    raise ValueError(f"unknown builtin backend: {builtin}")
                registry.backends[backend_id] = registry.backends[builtin]
            else:
                raise ValueError(f"backend {backend_id!r} needs 'url' or 'builtin'")
        return registry


def generate(request: GeneratorRequest, registry: Optional[BackendRegistry] = None) -> CandidateSet:
    """Run the named backend, deduplicate by significant tokens, truncate to
    beam size."""
    registry = registry or BackendRegistry()
    backend = registry.backends.get(request.backend)
    if backend is None:
        raise BackendError(f"backend not registered: {request.backend}")
    return _dedupe_and_cap(backend(request), request.beam_size)


def filter_unaltered(candidate_set: CandidateSet, original: Union[str, MethodUnit]) -> CandidateSet:
    """Drop candidates whose significant tokens equal the original's."""
    original_text = original.text if isinstance(original, MethodUnit) else original
    key = significant_texts(original_text)
    return CandidateSet(
        tuple(c for c in candidate_set if significant_texts(c.text) != key)
    )


def rank(candidate_set: CandidateSet, original: Union[str, MethodUnit]) -> CandidateSet:
    """Stable ordering: backend score (descending, unscored last), then SLOC
    reduction, then token reduction, then lexicographic."""

    def key(cand: Candidate):
        score_key = -cand.score if cand.score is not None else float("inf")
        return (score_key, sloc(cand.text), token_count(cand.text), cand.text)

    return CandidateSet(tuple(sorted(candidate_set, key=key)))
