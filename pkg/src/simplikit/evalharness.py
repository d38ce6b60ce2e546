"""Scoring against ground truth and corpus-level report tables.

The similarity score is a documented three-component approximation of the
cited code-similarity metric: smoothed 4-gram precision over significant
tokens, a keyword-weighted variant (reserved words weighted 5x), and a
depth-limited syntax-subtree match. The dataflow component is omitted;
report headers say so. No numeric parity with any published table is
claimed.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .lexer import KEYWORDS, significant_texts
from .syntax import JavaParseError, MethodUnit, Node, parse_method

KEYWORD_WEIGHT = 5
SUBTREE_DEPTH = 3
OMISSION_NOTE = "similarity = mean(ngram, weighted-ngram, subtree); dataflow match omitted"


@dataclass(frozen=True)
class SimScore:
    ngram: float
    weighted_ngram: float
    subtree: float

    @property
    def total(self) -> float:
        return (self.ngram + self.weighted_ngram + self.subtree) / 3.0

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "ngram": self.ngram,
            "weighted_ngram": self.weighted_ngram,
            "subtree": self.subtree,
        }


@dataclass(frozen=True)
class EvalRow:
    record_id: str
    backend: str
    perfect: bool
    sim: SimScore
    compiled: Optional[bool] = None
    test_equivalent: Optional[bool] = None
    rules: tuple[str, ...] = ()
    delta: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "backend": self.backend,
            "perfect": self.perfect,
            "sim": self.sim.to_dict(),
            "compiled": self.compiled,
            "test_equivalent": self.test_equivalent,
            "rules": list(self.rules),
            "delta": self.delta,
        }


def _text_of(value: Union[str, MethodUnit]) -> str:
    return value.text if isinstance(value, MethodUnit) else value


def perfect_prediction(candidate: Union[str, MethodUnit], ground_truth: Union[str, MethodUnit]) -> bool:
    """Exact match up to comments and whitespace."""
    return significant_texts(_text_of(candidate)) == significant_texts(_text_of(ground_truth))


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _gram_weight(gram: tuple[str, ...], weighted: bool) -> int:
    if weighted and any(tok in KEYWORDS for tok in gram):
        return KEYWORD_WEIGHT
    return 1


def _ngram_precision(
    cand: Sequence[str], ref: Sequence[str], *, weighted: bool
) -> float:
    """BLEU-style smoothed 4-gram precision with brevity penalty.

    Zero unigram overlap floors the score at exactly 0. Higher-order zero
    counts are add-one smoothed (the documented smoothing floor).
    """
    if not cand or not ref:
        return 1.0 if not cand and not ref else 0.0
    unigram_matches = sum((Counter(cand) & Counter(ref)).values())
    if unigram_matches == 0:
        return 0.0
    log_sum = 0.0
    orders = 0
    for n in range(1, 5):
        cand_grams = _ngrams(cand, n)
        if not cand_grams:
            break
        ref_grams = _ngrams(ref, n)
        total = sum(_gram_weight(g, weighted) * c for g, c in cand_grams.items())
        match = sum(
            _gram_weight(g, weighted) * min(c, ref_grams.get(g, 0))
            for g, c in cand_grams.items()
        )
        if match == 0:
            precision = 1.0 / (total + 1)  # add-one smoothing floor
        else:
            precision = match / total
        log_sum += math.log(precision)
        orders += 1
    brevity = 1.0 if len(cand) >= len(ref) else math.exp(1.0 - len(ref) / len(cand))
    return brevity * math.exp(log_sum / orders)


def _subtree_signatures(tree: Node, depth: int = SUBTREE_DEPTH) -> Counter:
    def signature(node: Node, remaining: int) -> str:
        if remaining <= 1 or not node.children:
            return node.kind
        inner = ",".join(signature(c, remaining - 1) for c in node.children)
        return f"{node.kind}({inner})"

    return Counter(signature(node, depth) for node in tree.walk())


def _subtree_match(candidate: str, ground_truth: str) -> float:
    try:
        cand_tree = parse_method(candidate).tree
        truth_tree = parse_method(ground_truth).tree
    except JavaParseError:
        return 0.0
    truth_sigs = _subtree_signatures(truth_tree)
    if not truth_sigs:
        return 0.0
    cand_sigs = _subtree_signatures(cand_tree)
    present = sum((truth_sigs & cand_sigs).values())
    return present / sum(truth_sigs.values())


def simscore(candidate: Union[str, MethodUnit], ground_truth: Union[str, MethodUnit]) -> SimScore:
    cand_text = _text_of(candidate)
    truth_text = _text_of(ground_truth)
    cand_tokens = list(significant_texts(cand_text))
    truth_tokens = list(significant_texts(truth_text))
    return SimScore(
        ngram=_ngram_precision(cand_tokens, truth_tokens, weighted=False),
        weighted_ngram=_ngram_precision(cand_tokens, truth_tokens, weighted=True),
        subtree=_subtree_match(cand_text, truth_text),
    )


def evaluate_pair(
    record_id: str,
    backend: str,
    candidate: Union[str, MethodUnit],
    ground_truth: Union[str, MethodUnit],
    *,
    compiled: Optional[bool] = None,
    test_equivalent: Optional[bool] = None,
    rules: Sequence[str] = (),
    delta: Optional[dict] = None,
) -> EvalRow:
    return EvalRow(
        record_id=record_id,
        backend=backend,
        perfect=perfect_prediction(candidate, ground_truth),
        sim=simscore(candidate, ground_truth),
        compiled=compiled,
        test_equivalent=test_equivalent,
        rules=tuple(rules),
        delta=delta,
    )


# ---------------------------------------------------------------------------
# aggregation


def _stats(values: Sequence[float]) -> dict:
    if not values:
        return {"mean": None, "median": None, "stdev": None}
    return {
        "mean": statistics.fmean(values),
        "median": statistics.median(values),
        "stdev": statistics.pstdev(values),
    }


def _delta_stats(rows: Sequence[EvalRow], before_key: str, after_key: str) -> dict:
    before = [r.delta[before_key] for r in rows if r.delta is not None]
    after = [r.delta[after_key] for r in rows if r.delta is not None]
    return {"before": _stats(before), "after": _stats(after)}


def aggregate(rows: Iterable[EvalRow]) -> dict:
    """Per-backend report: perfect-prediction count/ratio, similarity stats,
    compile and test-equivalence rates, rule histogram, and metric deltas
    for the perfect and test-equivalent subsets. Permutation-invariant."""
    rows = sorted(rows, key=lambda r: (r.backend, r.record_id))
    report: dict = {"note": OMISSION_NOTE, "backends": {}}
    for backend in sorted({r.backend for r in rows}):
        subset = [r for r in rows if r.backend == backend]
        n = len(subset)
        pp = [r for r in subset if r.perfect]
        compiled_known = [r for r in subset if r.compiled is not None]
        equivalent_known = [r for r in subset if r.test_equivalent is not None]
        histogram: Counter = Counter()
        for r in subset:
            histogram.update(r.rules)
        equivalent = [r for r in subset if r.test_equivalent]
        entry = {
            "rows": n,
            "perfect": {"count": len(pp), "ratio": len(pp) / n if n else None},
            "similarity": _stats([r.sim.total for r in subset]),
            "compile_rate": (
                sum(1 for r in compiled_known if r.compiled) / len(compiled_known)
                if compiled_known
                else None
            ),
            "test_equivalent_rate": (
                sum(1 for r in equivalent_known if r.test_equivalent) / len(equivalent_known)
                if equivalent_known
                else None
            ),
            "rule_histogram": dict(sorted(histogram.items())),
            "deltas": {
                "perfect": {
                    "sloc": _delta_stats(pp, "sloc_before", "sloc_after"),
                    "cyclomatic": _delta_stats(pp, "cyclomatic_before", "cyclomatic_after"),
                    "cognitive": _delta_stats(pp, "cognitive_before", "cognitive_after"),
                },
                "test_equivalent": {
                    "sloc": _delta_stats(equivalent, "sloc_before", "sloc_after"),
                    "cyclomatic": _delta_stats(equivalent, "cyclomatic_before", "cyclomatic_after"),
                    "cognitive": _delta_stats(equivalent, "cognitive_before", "cognitive_after"),
                },
            },
        }
        report["backends"][backend] = entry
    return report


def render_table(report: dict) -> str:
    """Human-readable aligned-column summary of an aggregate() report."""
    lines = [report.get("note", ""), ""]
    header = f"{'backend':<16} {'rows':>5} {'PP #':>6} {'PP %':>7} {'sim mean':>9} {'sim med':>8} {'sim sd':>7} {'compile%':>9} {'testeq%':>8}"
    lines.append(header)
    lines.append("-" * len(header))
    for backend, entry in report.get("backends", {}).items():
        sim = entry["similarity"]
        pp = entry["perfect"]
        ratio = f"{100 * pp['ratio']:.2f}" if pp["ratio"] is not None else "-"
        compile_rate = (
            f"{100 * entry['compile_rate']:.2f}" if entry["compile_rate"] is not None else "-"
        )
        testeq = (
            f"{100 * entry['test_equivalent_rate']:.2f}"
            if entry["test_equivalent_rate"] is not None
            else "-"
        )
        fmt = lambda v: f"{v:.3f}" if v is not None else "-"
        lines.append(
            f"{backend:<16} {entry['rows']:>5} {pp['count']:>6} {ratio:>7} "
            f"{fmt(sim['mean']):>9} {fmt(sim['median']):>8} {fmt(sim['stdev']):>7} "
            f"{compile_rate:>9} {testeq:>8}"
        )
        if entry["rule_histogram"]:
            pairs = ", ".join(f"{code} ({count})" for code, count in entry["rule_histogram"].items())
            lines.append(f"{'':<16} rules: {pairs}")
    return "\n".join(lines)
