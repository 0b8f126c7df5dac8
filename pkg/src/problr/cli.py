"""Command line: compile, parse, train, eval and punct-experiment.

Exit status is 0 on success, 1 when some sentences failed or were skipped,
and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from ._validation import resolve_grammar
from .backbone import BackboneGrammar, compile_backbone
from .grammar import GrammarError
from .io import read_brackets, read_selection, read_sentences
from .lalr import LRTables, build_tables
from .metrics import ambiguity_histogram, apb, geig_evaluate
from .model import ModelFormatError, load_model, save_model
from .pipeline import parse_corpus, punct_experiment, train_model, uniform_model
from .textgrammar import depunctuate

__all__ = ["main", "load_compiled"]

ARTIFACT = "problr-compiled"
OK, PARTIAL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- grammar artifacts ----------------------------------------------------------


def compiled_artifact(bb: BackboneGrammar, tables: LRTables) -> dict:
    return {
        "format": ARTIFACT,
        "version": 1,
        "grammar_hash": bb.hash,
        "tables_hash": tables.hash,
        "backbone": bb.to_dict(),
        "tables": tables.to_dict(),
    }


def load_compiled(spec) -> LRTables:
    """Tables from a compiled ``.json`` artifact or from any grammar argument."""
    p = Path(str(spec))
    if p.suffix == ".json" and p.is_file():
        d = json.loads(p.read_text(encoding="utf-8"))
        if d.get("format") != ARTIFACT:
            raise UsageError(f"{p} is not a compiled grammar")
        bb = BackboneGrammar.from_dict(d["backbone"])
        tables = LRTables.from_dict(d["tables"], bb)
        if bb.hash != d["grammar_hash"] or tables.hash != d["tables_hash"]:
            raise UsageError(f"{p}: content hash mismatch")
        return tables
    return build_tables(compile_backbone(resolve_grammar(spec)))


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout
    return open(path, "w", encoding="utf-8")


# --- commands -------------------------------------------------------------------


def cmd_compile(args) -> int:
    bb = compile_backbone(resolve_grammar(args.grammar))
    tables = build_tables(bb)
    out = _open_out(args.output)
    try:
        if args.format == "json":
            out.write(_dump_json(compiled_artifact(bb, tables)) + "\n")
        else:
            out.write(bb.dump())
            out.write(tables.dump())
    finally:
        if out is not sys.stdout:
            out.close()
    print(
        f"{len(bb.rules)} rules, {tables.n_states} states, {tables.conflicts} conflicts,"
        f" grammar {bb.hash[:12]}, tables {tables.hash[:12]}",
        file=sys.stderr,
    )
    return OK


def _model_for(args, tables):
    if args.model:
        return load_model(args.model, tables)
    return uniform_model(tables)


def _sentences(args):
    sents = read_sentences(args.input)
    if getattr(args, "depunct", False):
        sents = [depunctuate(s)[0] for s in sents]
    return sents


def cmd_parse(args) -> int:
    tables = load_compiled(args.grammar)
    model = _model_for(args, tables)
    sents = _sentences(args)
    results = parse_corpus(
        tables, model, sents, args.nbest, args.timeout, args.jobs, exclude_trivial=not args.keep_trivial
    )
    out = _open_out(args.output)
    try:
        for r in results:
            if args.format == "json":
                out.write(_dump_json(r.to_json()) + "\n")
            else:
                out.write(f"# {r.index}\t{r.status}\t{r.count} analyses\n")
                for a in r.analyses:
                    out.write(f"{a['rank']}\t{a['logprob']:.6f}\t{a['tree']}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    stats = [r.stat for r in results]
    hist = ambiguity_histogram(stats)
    summary = " ".join(f"{b}={c}" for b, (c, _) in hist.items() if b != "total")
    parsed = [s for s in stats if s.analyses > 0]
    extra = f" apb={apb(parsed):.4f}" if parsed else ""
    print(f"{len(results)} sentences: {summary}{extra}", file=sys.stderr)
    return OK if all(r.status == "ok" for r in results) else PARTIAL


def cmd_train(args) -> int:
    tables = load_compiled(args.grammar)
    sents = read_sentences(args.input)
    brackets = read_brackets(args.brackets) if args.brackets else [frozenset()] * len(sents)
    if len(brackets) != len(sents):
        raise UsageError(f"{len(sents)} sentences but {len(brackets)} bracket lines")
    selection = read_selection(args.select) if args.select else None
    if selection is not None and len(selection) != len(sents):
        raise UsageError(f"{len(sents)} sentences but {len(selection)} selection lines")
    skipped: list = []
    model = train_model(tables, sents, brackets, selection, auto=args.auto, timeout=args.timeout, skipped=skipped)
    totals: dict = {}
    for e in model.logprobs:
        totals.setdefault((e.state, e.lookahead), []).append(model.prob(e))
    for cell, probs in totals.items():
        if abs(math.fsum(probs) - 1.0) > 1e-9:
            raise RuntimeError(f"context {cell} does not sum to one")
    save_model(model, args.model)
    for i, reason in skipped:
        print(f"skipped sentence {i}: {reason}", file=sys.stderr)
    print(f"trained on {len(sents) - len(skipped)} sentences, skipped {len(skipped)}", file=sys.stderr)
    return PARTIAL if skipped else OK


def _render_report(name, rep, k, shortfall=0) -> str:
    lines = [
        f"# {name}: top {k} analyses weighted equally; recall/precision micro-averaged,"
        " crossings averaged over parsed sentences",
        f"{'':14}{'minC':>6}{'Crossings':>11}{'Recall (%)':>12}{'Precision (%)':>15}",
        f"{'':14}{rep.min_crossing:>6}{rep.crossings:>11.2f}{100 * rep.recall:>12.2f}{100 * rep.precision:>15.2f}",
    ]
    if shortfall:
        lines.append(f"# {shortfall} sentences had fewer than {k} candidates")
    return "\n".join(lines)


def cmd_eval(args) -> int:
    gold = read_brackets(args.gold)
    with open(args.input, encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    if len(records) != len(gold):
        raise UsageError(f"{len(records)} parse records but {len(gold)} gold lines")
    cands = [[frozenset(map(tuple, a["brackets"])) for a in r.get("analyses", [])] for r in records]
    rep = geig_evaluate(gold, cands, args.nbest)
    shortfall = sum(1 for c in cands if len(c) < args.nbest)
    if args.format == "json":
        d = dict(rep.as_dict(), k=args.nbest, weighting="equal", averaging="micro", shortfall=shortfall)
        print(_dump_json(d))
    else:
        print(_render_report("evaluation", rep, args.nbest, shortfall))
    return OK


def cmd_punct_experiment(args) -> int:
    tables = load_compiled(args.grammar)
    model = _model_for(args, tables)
    sents = read_sentences(args.input)
    gold = read_brackets(args.gold)
    if len(gold) != len(sents):
        raise UsageError(f"{len(sents)} sentences but {len(gold)} gold lines")
    ex = punct_experiment(tables, model, sents, gold, args.nbest, args.timeout, args.jobs)
    d = ex.as_dict()
    if args.format == "json":
        print(_dump_json(d))
    else:
        print(_render_report("punctuated", ex.punctuated, args.nbest))
        print(f"# apb {ex.apb_punctuated:.4f}  fail rate {ex.fail_punctuated:.3f}")
        print(_render_report("depunctuated", ex.depunctuated, args.nbest))
        print(f"# apb {ex.apb_depunctuated:.4f}  fail rate {ex.fail_depunctuated:.3f}")
        print("# delta " + "  ".join(f"{k} {v:+.4f}" for k, v in d["delta"].items()))
    return OK


# --- argument parsing -----------------------------------------------------------


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _timeout(text):
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="problr", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, model=True, inp=True):
        sp.add_argument("--grammar", default="demo", help="grammar file, compiled .json, or packaged name")
        if model:
            sp.add_argument("--model", help="trained model file (default: untrained)")
        if inp:
            sp.add_argument("input", help="sentence file, one surface_LABEL sentence per line")
        sp.add_argument("--timeout", type=_timeout, default=30.0, help="seconds per sentence")
        sp.add_argument("--nbest", type=_positive_int, default=3)
        sp.add_argument("--jobs", type=_positive_int, default=1)
        sp.add_argument("--format", choices=("text", "json"), default="text")

    c = sub.add_parser("compile", help="compile a grammar to backbone rules and LALR(1) tables")
    c.add_argument("--grammar", default="demo")
    c.add_argument("--format", choices=("text", "json"), default="json")
    c.add_argument("-o", "--output", default="-")
    c.set_defaults(func=cmd_compile)

    pa = sub.add_parser("parse", help="parse sentences and rank analyses")
    common(pa)
    pa.add_argument("--depunct", action="store_true", help="drop sentence-internal punctuation first")
    pa.add_argument("--keep-trivial", action="store_true", help="keep single-token and whole-sentence spans")
    pa.add_argument("-o", "--output", default="-")
    pa.set_defaults(func=cmd_parse, format="json")

    t = sub.add_parser("train", help="train a model from bracketed sentences")
    common(t, model=False)
    t.add_argument("--model", required=True, help="output model file")
    t.add_argument("--brackets", help="bracket file, one line per sentence")
    t.add_argument("--select", help="selection file pinning analysis indices")
    t.add_argument("--auto", action="store_true", help="resolve remaining ambiguity by bracket overlap")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="score parse output against gold brackets")
    e.add_argument("input", help="JSON lines written by 'problr parse'")
    e.add_argument("gold", help="gold bracket file")
    e.add_argument("--nbest", type=_positive_int, default=3)
    e.add_argument("--format", choices=("text", "json"), default="text")
    e.set_defaults(func=cmd_eval)

    x = sub.add_parser("punct-experiment", help="compare results with and without internal punctuation")
    common(x)
    x.add_argument("gold", help="gold bracket file for the punctuated sentences")
    x.set_defaults(func=cmd_punct_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except BrokenPipeError:
        sys.stderr.close()
        return OK
    except GrammarError as exc:
        print(f"grammar error: {exc}", file=sys.stderr)
        return USAGE
    except (UsageError, ModelFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
