import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from problr.backbone import compile_backbone  # noqa: E402
from problr.io import read_brackets, read_selection, read_sentences  # noqa: E402
from problr.lalr import build_tables  # noqa: E402
from problr.pipeline import train_model  # noqa: E402
from problr.textgrammar import demo_grammar, text_grammar  # noqa: E402

DEMO = Path(__file__).resolve().parent.parent / "src" / "problr" / "data" / "demo"


def words(spec):
    """Whitespace-separated labels as a tuple."""
    return tuple(spec.split())


@pytest.fixture(scope="session")
def text_tables():
    return build_tables(compile_backbone(text_grammar()))


@pytest.fixture(scope="session")
def demo_tables():
    return build_tables(compile_backbone(demo_grammar()))


@pytest.fixture(scope="session")
def demo_corpus():
    return {
        "train": read_sentences(DEMO / "train.txt"),
        "train_brackets": read_brackets(DEMO / "train.brackets"),
        "train_select": read_selection(DEMO / "train.select"),
        "test": read_sentences(DEMO / "test.txt"),
        "test_gold": read_brackets(DEMO / "test.gold"),
    }


@pytest.fixture(scope="session")
def demo_model(demo_tables, demo_corpus):
    c = demo_corpus
    return train_model(demo_tables, c["train"], c["train_brackets"], c["train_select"])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
