"""scikit-learn style wrappers around compilation, training and parsing."""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    check_bracket_sets,
    check_positive_int,
    check_selection,
    check_sentences,
    check_timeout,
    resolve_grammar,
)
from .backbone import DEFAULT_RULE_CAP, compile_backbone
from .lalr import build_tables
from .metrics import apb, geig_evaluate
from .pipeline import parse_corpus, train_model, uniform_model
from .textgrammar import depunctuate, realign_brackets

__all__ = ["ProbabilisticLRParser", "Depunctuator"]


class ProbabilisticLRParser(BaseEstimator):
    """Unification-based GLR parser with a trained LR transition model.

    ``X`` is a list of sentences (``surface_LABEL`` strings or token
    sequences); ``y`` is one set of ``(start, end)`` brackets per sentence.

    Parameters
    ----------
    grammar : Grammar, str or path
        Grammar object, source text, ``.grm`` path or packaged name.
    timeout : float or None
        Per-sentence parse time limit in seconds.
    n_best : int
        Number of ranked analyses kept per sentence.
    auto_select : bool
        When several analyses fit a training sentence's brackets, keep the
        best-matching one instead of requiring a selection.
    rule_cap : int
        Maximum number of compiled backbone rules.
    """

    def __init__(self, grammar="demo", timeout=30.0, n_best=3, auto_select=False, rule_cap=DEFAULT_RULE_CAP):
        self.grammar = grammar
        self.timeout = timeout
        self.n_best = n_best
        self.auto_select = auto_select
        self.rule_cap = rule_cap

    def _compile(self):
        g = resolve_grammar(self.grammar)
        self.backbone_ = compile_backbone(g, rule_cap=check_positive_int(self.rule_cap, "rule_cap"))
        self.tables_ = build_tables(self.backbone_)

    def fit(self, X, y=None, selection=None):
        """Compile the grammar and train on bracketed sentences.

        With ``y=None`` the model is left untrained (uniform per context).
        ``selection`` optionally pins the analysis index per sentence.
        """
        timeout = check_timeout(self.timeout)
        check_positive_int(self.n_best, "n_best")
        self._compile()
        if y is None:
            self.model_ = uniform_model(self.tables_)
            self.skipped_ = []
            return self
        X = check_sentences(X)
        y = check_bracket_sets(y, X)
        selection = check_selection(selection, len(X))
        self.skipped_ = []
        self.model_ = train_model(
            self.tables_, X, y, selection, auto=self.auto_select, timeout=timeout, skipped=self.skipped_
        )
        return self

    def parse(self, X, jobs=1):
        """Per-sentence results: status, analysis count and ranked analyses."""
        check_is_fitted(self, "model_")
        X = check_sentences(X)
        k = check_positive_int(self.n_best, "n_best")
        return parse_corpus(self.tables_, self.model_, X, k, check_timeout(self.timeout), jobs)

    def predict(self, X):
        """Brackets of the top-ranked analysis; None where parsing failed."""
        out = []
        for r in self.parse(X):
            out.append(frozenset(map(tuple, r.analyses[0]["brackets"])) if r.analyses else None)
        return out

    def count_analyses(self, X):
        return [r.count for r in self.parse(X)]

    def apb(self, X):
        return apb(r.stat for r in self.parse(X))

    def evaluate(self, X, y):
        """Bracket evaluation of the top ``n_best`` analyses, equally weighted."""
        X = check_sentences(X)
        y = check_bracket_sets(y, X)
        results = self.parse(X)
        cands = [[frozenset(map(tuple, a["brackets"])) for a in r.analyses] for r in results]
        return geig_evaluate(y, cands, check_positive_int(self.n_best, "n_best"))

    def score(self, X, y):
        """Bracket recall (higher is better)."""
        return self.evaluate(X, y).recall


class Depunctuator(TransformerMixin, BaseEstimator):
    """Remove sentence-internal punctuation, keeping a final terminator."""

    def fit(self, X, y=None):
        return self

    def transform(self, X):
        return [depunctuate(s)[0] for s in check_sentences(X)]

    def transform_brackets(self, X, y, drop_trivial=True):
        """Realign bracket sets onto the depunctuated sentences."""
        X = check_sentences(X)
        y = check_bracket_sets(y, X)
        out = []
        for s, spans in zip(X, y):
            kept, index = depunctuate(s)
            new = realign_brackets(spans, index)
            if drop_trivial:
                m = len(kept)
                new = frozenset(b for b in new if b[1] - b[0] > 1 and b != (0, m))
            out.append(new)
        return out
