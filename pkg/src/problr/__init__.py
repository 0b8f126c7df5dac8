"""Probabilistic GLR parsing with a punctuation text grammar."""

from .backbone import BackboneGrammar, compile_backbone
from .estimator import Depunctuator, ProbabilisticLRParser
from .glr import constrained_parse, count_analyses, parse, unpack
from .grammar import Grammar, GrammarError, load_grammar, parse_grammar
from .lalr import LRTables, build_tables
from .metrics import EvalReport, SentenceStat, ambiguity_histogram, apb, expected_analyses, geig_evaluate
from .model import LRModel, load_model, nbest, save_model, smooth, train
from .oracle import enumerate_analyses
from .textgrammar import demo_grammar, depunctuate, integrate, realign_brackets, text_grammar
from .tokens import Token, parse_sentence

__version__ = "0.1.0"

__all__ = [
    "BackboneGrammar",
    "compile_backbone",
    "Depunctuator",
    "ProbabilisticLRParser",
    "constrained_parse",
    "count_analyses",
    "parse",
    "unpack",
    "Grammar",
    "GrammarError",
    "load_grammar",
    "parse_grammar",
    "LRTables",
    "build_tables",
    "EvalReport",
    "SentenceStat",
    "ambiguity_histogram",
    "apb",
    "expected_analyses",
    "geig_evaluate",
    "LRModel",
    "load_model",
    "nbest",
    "save_model",
    "smooth",
    "train",
    "enumerate_analyses",
    "demo_grammar",
    "depunctuate",
    "integrate",
    "realign_brackets",
    "text_grammar",
    "Token",
    "parse_sentence",
]
