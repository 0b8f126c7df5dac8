"""Corpus-level parsing, training and the punctuation ablation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .glr import parse
from .lalr import LRTables
from .metrics import EvalReport, SentenceStat, apb, geig_evaluate
from .model import LRModel, extract_history, nbest, smooth, train
from .textgrammar import depunctuate, realign_brackets
from .training import TrainingError, candidate_analyses, select_tree
from .trees import format_tree, tree_brackets

__all__ = [
    "SentenceResult",
    "parse_sentence_tokens",
    "parse_corpus",
    "train_model",
    "uniform_model",
    "PunctExperiment",
    "punct_experiment",
]


@dataclass
class SentenceResult:
    index: int
    status: str
    length: int
    count: int
    analyses: list = field(default_factory=list)  # dicts: rank, logprob, tree, brackets

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "status": self.status,
            "length": self.length,
            "count": self.count,
            "analyses": self.analyses,
        }

    @property
    def stat(self) -> SentenceStat:
        return SentenceStat(self.length, self.count, self.status == "timeout")


def parse_sentence_tokens(
    tables: LRTables,
    model: Optional[LRModel],
    tokens,
    index: int = 0,
    k: int = 3,
    timeout: Optional[float] = 30.0,
    exclude_trivial: bool = True,
) -> SentenceResult:
    """Parse one sentence and rank its analyses (when a model is given)."""
    known = tables.grammar.terminals
    if any(t.label not in known for t in tokens):
        return SentenceResult(index, "unknown-label", len(tokens), 0)
    res = parse(tables, tokens, timeout)
    if not res.ok:
        return SentenceResult(index, res.status, len(tokens), 0)
    analyses = []
    if model is not None and k > 0:
        surfaces = [t.surface for t in tokens]
        for a in nbest(res.forest, model, k):
            analyses.append(
                {
                    "rank": a.rank,
                    "logprob": a.logprob,
                    "tree": format_tree(a.tree, surfaces),
                    "brackets": [list(s) for s in sorted(tree_brackets(a.tree, len(tokens), exclude_trivial))],
                }
            )
    return SentenceResult(index, "ok", len(tokens), res.count(), analyses)


def _work(args):
    return parse_sentence_tokens(*args)


def parse_corpus(
    tables: LRTables,
    model: Optional[LRModel],
    sentences: Sequence,
    k: int = 3,
    timeout: Optional[float] = 30.0,
    jobs: int = 1,
    exclude_trivial: bool = True,
) -> list:
    """Parse every sentence; results are in input order regardless of ``jobs``."""
    tasks = [(tables, model, s, i, k, timeout, exclude_trivial) for i, s in enumerate(sentences)]
    if jobs <= 1 or len(tasks) < 2:
        return [_work(t) for t in tasks]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_work, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def train_model(
    tables: LRTables,
    sentences: Sequence,
    brackets: Sequence,
    selection: Optional[Sequence] = None,
    auto: bool = False,
    timeout: Optional[float] = 30.0,
    skipped: Optional[list] = None,
) -> LRModel:
    """Count the histories of the selected training trees and smooth them.

    When ``skipped`` is a list, unusable sentences are recorded there as
    ``(index, reason)`` and left out; otherwise the first one raises
    TrainingError.
    """
    histories = []
    for i, (toks, br) in enumerate(zip(sentences, brackets)):
        pinned = selection[i] if selection is not None else None
        try:
            analyses = candidate_analyses(tables, toks, br, timeout)
            d = select_tree(tables, analyses, toks, br, index=pinned, auto=auto)
        except ValueError as exc:  # TrainingError or ill-formed brackets
            if skipped is not None:
                skipped.append((i, str(exc)))
                continue
            raise TrainingError(f"sentence {i}: {exc}") from None
        histories.append(extract_history(tables, d, toks))
    return smooth(train(histories), tables)


def uniform_model(tables: LRTables) -> LRModel:
    """An untrained model: all actions of a cell equally likely."""
    return smooth({}, tables)


@dataclass
class PunctExperiment:
    punctuated: EvalReport
    depunctuated: EvalReport
    apb_punctuated: float
    apb_depunctuated: float
    fail_punctuated: float = 0.0
    fail_depunctuated: float = 0.0

    def as_dict(self) -> dict:
        a = dict(self.punctuated.as_dict(), apb=self.apb_punctuated, fail_rate=self.fail_punctuated)
        b = dict(self.depunctuated.as_dict(), apb=self.apb_depunctuated, fail_rate=self.fail_depunctuated)
        keys = ("recall", "precision", "crossings", "min_crossing", "apb", "fail_rate")
        return {"punctuated": a, "depunctuated": b, "delta": {k: b[k] - a[k] for k in keys}}


def _fail_rate(results) -> float:
    return sum(1 for r in results if r.status != "ok") / len(results) if results else 0.0


def _brackets_of(results):
    return [[frozenset(map(tuple, a["brackets"])) for a in r.analyses] for r in results]


def punct_experiment(
    tables: LRTables,
    model: LRModel,
    sentences: Sequence,
    gold: Sequence,
    k: int = 3,
    timeout: Optional[float] = 30.0,
    jobs: int = 1,
) -> PunctExperiment:
    """Evaluate a test set with and without sentence-internal punctuation.

    Gold brackets are realigned onto the depunctuated tokens; spans that
    become trivial (single token or whole sentence) are dropped.
    """
    punct = parse_corpus(tables, model, sentences, k, timeout, jobs)
    stripped, gold2 = [], []
    for toks, g in zip(sentences, gold):
        kept, index = depunctuate(toks)
        stripped.append(kept)
        m = len(kept)
        gold2.append(frozenset(s for s in realign_brackets(g, index) if s[1] - s[0] > 1 and s != (0, m)))
    depunct = parse_corpus(tables, model, stripped, k, timeout, jobs)
    return PunctExperiment(
        geig_evaluate(gold, _brackets_of(punct), k),
        geig_evaluate(gold2, _brackets_of(depunct), k),
        apb(r.stat for r in punct),
        apb(r.stat for r in depunct),
        _fail_rate(punct),
        _fail_rate(depunct),
    )
