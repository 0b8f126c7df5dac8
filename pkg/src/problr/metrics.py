"""Ambiguity statistics and bracket-based evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .tokens import crosses

__all__ = [
    "SentenceStat",
    "apb",
    "expected_analyses",
    "HISTOGRAM_BUCKETS",
    "ambiguity_histogram",
    "EvalReport",
    "geig_evaluate",
]


class SentenceStat(NamedTuple):
    length: int
    analyses: int  # 0 for a failed parse
    timed_out: bool = False


def apb(stats: Iterable) -> float:
    """Analyses per branch point: exp of the mean of ln(p) / n.

    Only sentences that parsed (p >= 1, n >= 1) contribute.
    """
    vals = [math.log(s.analyses) / s.length for s in stats if s.analyses > 0 and s.length > 0 and not s.timed_out]
    if not vals:
        raise ValueError("no parsed sentences")
    return math.exp(math.fsum(vals) / len(vals))


def expected_analyses(apb_value: float, length: float) -> float:
    """Expected analysis count for a sentence of ``length`` words."""
    if apb_value <= 0 or length < 0:
        raise ValueError("apb must be positive and length non-negative")
    return apb_value ** length


HISTOGRAM_BUCKETS = ("fail", "1-9", "10-99", "100-999", "1K-9.9K", "10K-99K", "100K+", "timeout")


def _bucket(s: SentenceStat) -> str:
    if s.timed_out:
        return "timeout"
    p = s.analyses
    if p <= 0:
        return "fail"
    for bound, name in ((10, "1-9"), (100, "10-99"), (1000, "100-999"), (10_000, "1K-9.9K"), (100_000, "10K-99K")):
        if p < bound:
            return name
    return "100K+"


def ambiguity_histogram(stats: Sequence) -> dict:
    """Sentence counts and mean lengths per ambiguity class.

    Returns ``{bucket: (count, mean_length)}`` over all buckets (mean length
    is None for an empty bucket), plus ``"total"``.
    """
    groups = {b: [] for b in HISTOGRAM_BUCKETS}
    for s in stats:
        groups[_bucket(s)].append(s.length)
    out = {}
    for b, lens in groups.items():
        out[b] = (len(lens), sum(lens) / len(lens) if lens else None)
    all_lens = [s.length for s in stats]
    out["total"] = (len(all_lens), sum(all_lens) / len(all_lens) if all_lens else None)
    return out


@dataclass
class EvalReport:
    recall: float
    precision: float
    crossings: float  # mean crossing brackets per parsed sentence
    min_crossing: int  # sentences where every candidate crosses the gold
    sentences: int
    per_sentence: list = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "recall": self.recall,
            "precision": self.precision,
            "crossings": self.crossings,
            "min_crossing": self.min_crossing,
            "sentences": self.sentences,
        }


def _crossing_count(cand: frozenset, gold: frozenset) -> int:
    return sum(1 for c in cand if any(crosses(c, g) for g in gold))


def geig_evaluate(gold: Sequence, candidates: Sequence, k: int = 1) -> EvalReport:
    """Bracket recall, precision and crossings against gold bracketings.

    ``gold[i]`` is a set of spans; ``candidates[i]`` is a ranked list of span
    sets (best first).  The top ``k`` candidates of each sentence are weighted
    equally.  Recall and precision are micro-averaged over brackets (expected
    matched / expected gold or found); crossings are averaged per sentence.
    A sentence with no candidate contributes its gold brackets to the recall
    denominator and nothing else; crossings are averaged over the sentences
    that have candidates.
    """
    if len(gold) != len(candidates):
        raise ValueError("gold and candidate lists differ in length")
    if k < 1:
        raise ValueError("k must be at least 1")
    matched = found = total_gold = 0.0
    crossing_sum = 0.0
    min_c = 0
    per = []
    for g, cands in zip(gold, candidates):
        g = frozenset(map(tuple, g))
        top = [frozenset(map(tuple, c)) for c in list(cands)[:k]]
        total_gold += len(g)
        if not top:
            per.append(None)
            continue
        w = 1.0 / len(top)
        m = sum(len(c & g) for c in top) * w
        f = sum(len(c) for c in top) * w
        crossings = [_crossing_count(c, g) for c in top]
        x = sum(crossings) * w
        matched += m
        found += f
        crossing_sum += x
        if all(c > 0 for c in crossings):
            min_c += 1
        per.append((m, f, len(g), x))
    n = len(gold)
    parsed = sum(1 for p in per if p is not None)
    return EvalReport(
        recall=matched / total_gold if total_gold else 0.0,
        precision=matched / found if found else 0.0,
        crossings=crossing_sum / parsed if parsed else 0.0,
        min_crossing=min_c,
        sentences=n,
        per_sentence=per,
    )
