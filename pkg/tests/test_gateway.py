import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
from hypothesis import given, strategies as st

from simplikit.gateway import (
    BackendError,
    BackendProtocolError,
    BackendRegistry,
    BackendUnreachable,
    Candidate,
    CandidateSet,
    GeneratorRequest,
    PROMPT_PREFIX,
    PROMPT_SUFFIX,
    build_prompt,
    filter_unaltered,
    generate,
    rank,
)
from simplikit.lexer import token_equal
from simplikit.localization import localize


def test_prompt_template(method_pair):
    original, _ = method_pair("audit_logs")
    prompt = build_prompt(original)
    assert prompt.startswith("Simplify the following java method: public Collection")
    assert prompt.endswith(", the simplified version is: ")
    assert prompt == PROMPT_PREFIX + original + PROMPT_SUFFIX


def test_prompt_with_empty_and_localized_text(method_pair):
    assert build_prompt("") == PROMPT_PREFIX + PROMPT_SUFFIX
    original, simplified = method_pair("pair_sum")
    localized = localize(original, simplified).localized_original
    prompt = build_prompt(localized)
    assert "<original>" in prompt and "</original>" in prompt


def test_request_validation():
    with pytest.raises(ValueError):
        GeneratorRequest(input_text="x", beam_size=0)
    with pytest.raises(ValueError):
        GeneratorRequest(input_text="x", beam_size=65)


def test_unknown_backend_raises():
    with pytest.raises(BackendError):
        generate(GeneratorRequest(input_text="void f() {}", backend="nope"))


def test_catalog_backend_beam_one(method_pair):
    original, simplified = method_pair("uuid_create")
    out = generate(GeneratorRequest(input_text=original, beam_size=1, backend="catalog"))
    assert len(out) <= 1
    assert token_equal(out.candidates[0].text, simplified)


def test_catalog_backend_determinism(method_pair):
    original, _ = method_pair("pair_sum")
    request = GeneratorRequest(input_text=original, beam_size=10, backend="catalog")
    first = generate(request)
    second = generate(request)
    assert first.texts() == second.texts()


def test_catalog_backend_localized_input(method_pair):
    original, simplified = method_pair("pair_sum")
    localized = localize(original, simplified).localized_original
    out = generate(GeneratorRequest(input_text=localized, beam_size=10, backend="catalog"))
    assert any(token_equal(c.text, simplified) for c in out)
    assert all("<original>" not in c.text for c in out)


def test_reducer_backend_deletion_candidate():
    source = "int f(int a) {\n    int unused = 1;\n    return a;\n}"
    out = generate(GeneratorRequest(input_text=source, beam_size=5, backend="reducer"))
    assert len(out) == 1
    assert out.candidates[0].provenance == "deletion"


def test_filter_unaltered_variants(method_pair):
    original, _ = method_pair("audit_logs")
    reformatted = original.replace("\n", " ")
    commented = "// note\n" + original
    altered = original.replace("newList", "items")
    candidate_set = CandidateSet(
        tuple(Candidate(t) for t in (reformatted, commented, altered))
    )
    kept = filter_unaltered(candidate_set, original)
    assert [c.text for c in kept] == [altered]


def test_rank_score_then_size_then_lexicographic():
    original = "int f() {\n    int a = 1;\n    int b = 2;\n    return a + b;\n}"
    c_scored_low = Candidate("int f() {\n    return 3;\n}", 0.5)
    c_scored_high = Candidate("int f() {\n    int a = 1;\n    return a + 2;\n}", 0.9)
    c_small = Candidate("int f() { return 3; }", None)
    c_big = Candidate("int f() {\n    int a = 1;\n    return a + 2;\n}\n// x", None)
    ranked = rank(CandidateSet((c_small, c_big, c_scored_low, c_scored_high)), original)
    assert ranked.candidates[0] is c_scored_high  # score desc first
    assert ranked.candidates[1] is c_scored_low
    assert ranked.candidates[2] is c_small  # fewer SLOC among unscored
    assert ranked.candidates[3] is c_big


def test_rank_is_permutation():
    candidates = tuple(Candidate(f"int f() {{ return {i}; }}", None) for i in range(5))
    ranked = rank(CandidateSet(candidates), "int f() { return 9; }")
    assert sorted(c.text for c in ranked) == sorted(c.text for c in candidates)
    again = rank(ranked, "int f() { return 9; }")
    assert again.texts() == ranked.texts()


@given(st.lists(st.integers(min_value=0, max_value=30), max_size=8))
def test_rank_permutation_property(values):
    candidates = tuple(Candidate(f"int f() {{ return {v}; }}") for v in values)
    ranked = rank(CandidateSet(candidates), "int f() { return -1; }")
    assert sorted(c.text for c in ranked) == sorted(c.text for c in candidates)


# ---- HTTP backend against a local stub --------------------------------------


class _Handler(BaseHTTPRequestHandler):
    canned: list[dict] = []
    broken = False

    def do_POST(self):  # noqa: N802 (http.server API)
        length = int(self.headers.get("Content-Length", "0"))
        body = json.loads(self.rfile.read(length))
        _Handler.last_request = body
        if _Handler.broken:
            payload = b"{not json"
        else:
            limited = _Handler.canned[: body["beam_size"]]
            payload = json.dumps({"candidates": limited}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture()
def http_stub():
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


def test_http_backend_roundtrip(http_stub, method_pair):
    original, simplified = method_pair("uuid_create")
    _Handler.broken = False
    _Handler.canned = [
        {"text": simplified, "score": 0.9},
        {"text": original, "score": 0.4},
    ]
    registry = BackendRegistry()
    registry.register_http("remote", http_stub)
    out = generate(GeneratorRequest(input_text=original, beam_size=2, backend="remote"), registry)
    assert len(out) == 2
    assert out.candidates[0].score == 0.9
    assert _Handler.last_request["prompt"].startswith(PROMPT_PREFIX)
    assert _Handler.last_request["max_len"] == 512

    beam1 = generate(GeneratorRequest(input_text=original, beam_size=1, backend="remote"), registry)
    assert len(beam1) == 1


def test_http_backend_protocol_error(http_stub):
    _Handler.broken = True
    registry = BackendRegistry()
    registry.register_http("remote", http_stub)
    with pytest.raises(BackendProtocolError):
        generate(GeneratorRequest(input_text="void f() {}", backend="remote"), registry)
    _Handler.broken = False


def test_http_backend_unreachable():
    registry = BackendRegistry()
    registry.register_http("remote", "http://127.0.0.1:1", timeout=0.5)
    with pytest.raises(BackendUnreachable):
        generate(GeneratorRequest(input_text="void f() {}", backend="remote"), registry)


def test_registry_from_config(tmp_path, http_stub):
    config = tmp_path / "backends.json"
    config.write_text(
        json.dumps(
            {
                "backends": {
                    "neural": {"url": http_stub, "timeout": 5},
                    "rules": {"builtin": "catalog"},
                }
            }
        )
    )
    registry = BackendRegistry.from_config(config)
    assert {"catalog", "reducer", "neural", "rules"} <= set(registry.backends)
