import pytest

from simplikit.lexer import significant_texts, token_equal
from simplikit.syntax import (
    JavaParseError,
    UnsupportedConstructError,
    parse_method,
    print_method,
)

GRAMMAR_CASES = [
    "void f() {}",
    "public static int add(int a, int b) { return a + b; }",
    "int pick(int k) { switch (k) { case 1: case 2: return 10; default: break; } return 0; }",
    """void copy(String p) throws IOException {
        try (Reader r = open(p); Writer w = create(p)) {
            w.write(r.read());
        } catch (IOException | RuntimeException e) {
            log(e);
        } finally {
            done();
        }
    }""",
    """List<String> names(Map<String, List<Integer>> m) {
        Function<Integer, Integer> f = x -> x + 1;
        BiFunction<Integer, Integer, Integer> g = (a, b) -> { return a * b; };
        Runnable r = () -> done();
        int z = m.isEmpty() ? f.apply(1) : g.apply(2, 3);
        return new ArrayList<>();
    }""",
    """long mix(int[] xs, Object o) {
        long acc = (long) xs[0];
        acc = acc + (xs[1] >> 2) + (xs[2] >>> 1) + (1 << 3);
        int[] ys = new int[4];
        int[] zs = new int[]{1, 2, 3};
        outer:
        for (int i = 0; i < ys.length; i++) {
            if (o instanceof String) { continue outer; }
            if (i > 3) { break outer; }
        }
        for (int v : zs) { acc += v; }
        do { acc--; } while (acc > 100);
        while (acc > 50) { acc -= 2; }
        return acc - (-xs[0]) + (xs.length % 2);
    }""",
    """@Override
    @SuppressWarnings("unchecked")
    protected final Map<String, Object> snapshot(final String key, int... extras) {
        this.counter++;
        return (Map<String, Object>) cache.get(key);
    }""",
    "abstract int pending(String name);",
]


@pytest.mark.parametrize("source", GRAMMAR_CASES)
def test_round_trip_is_token_equal(source):
    unit = parse_method(source)
    assert token_equal(print_method(unit), source)


def test_parse_worked_examples_round_trip(method_pair):
    for stem in ("expired_check", "condition_keys", "uuid_create", "csrf_token",
                 "audit_logs", "pair_sum"):
        for text in method_pair(stem):
            unit = parse_method(text)
            assert significant_texts(print_method(unit)) == significant_texts(text)


def test_perfect_prediction_example_structure(method_pair):
    original, _ = method_pair("audit_logs")
    unit = parse_method(original)
    body = unit.tree.attrs["body"]
    assert [child.kind for child in body.children] == ["local-var-decl", "return"]
    assert unit.sloc == 4


def test_minimal_method():
    unit = parse_method("void f() {}")
    assert unit.name == "f"
    assert unit.tree.attrs["body"].children == ()
    assert unit.sloc == 1


def test_syntax_error_carries_position():
    with pytest.raises(JavaParseError) as err:
        parse_method("void f() { int x = ; }")
    assert err.value.line == 1
    assert err.value.column > 0
    assert not isinstance(err.value, UnsupportedConstructError)


@pytest.mark.parametrize(
    "source, needle",
    [
        ("void f() { Runnable r = Foo::bar; }", "method reference"),
        ("void f() { new Thread() { }; }", "anonymous class"),
        ("void f() { synchronized (this) { } }", "synchronized"),
        ("void f() { class Local {} }", "local type"),
        ("void f() { assert x > 0; }", "assert"),
    ],
)
def test_unsupported_constructs_are_reported(source, needle):
    with pytest.raises(UnsupportedConstructError) as err:
        parse_method(source)
    assert needle in str(err.value)


@pytest.mark.parametrize(
    "source",
    ["void f() {", "void f() { } trailing", "int = 4;", "void f() { if (a) }"],
)
def test_malformed_inputs_raise(source):
    with pytest.raises(JavaParseError):
        parse_method(source)


def _check_spans(node, source, lo_bound, hi_bound):
    lo, hi = node.span
    assert lo_bound <= lo <= hi <= hi_bound
    prev_end = lo
    for child in node.children:
        assert child.span[0] >= prev_end, f"sibling overlap under {node.kind}"
        assert child.span[1] <= hi, f"child escapes parent {node.kind}"
        prev_end = child.span[1]
        _check_spans(child, source, lo, hi)


@pytest.mark.parametrize("source", GRAMMAR_CASES)
def test_span_invariants(source):
    unit = parse_method(source)
    _check_spans(unit.tree, source, 0, len(source))


def test_node_text_matches_span():
    source = "int f(int a) { return a + 1; }"
    unit = parse_method(source)
    ret = unit.tree.find_all("return")[0]
    assert unit.node_text(ret) == "return a + 1;"
