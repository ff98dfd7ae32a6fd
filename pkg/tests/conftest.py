import json
import sys

import pytest

from gramtree import Grammar, parse_tracery
from gramtree.template import Slot, Template, Token


def pytest_runtest_logreport(report):
    """One PASS/FAIL line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else "FAIL"
    print(f"ACCEPTANCE {name}: {outcome}", file=sys.stderr)


FIG1_JSON = json.dumps(
    {
        "origin": "I like putting #T# on my #F#",
        "T": ["cheese", "pineapple", "soy sauce"],
        "F": ["pizza", "salad", "muesli", "sushi"],
    }
)

# The 12 sentences of the dish-topping grammar, written out by hand.
FIG1_SENTENCES = frozenset(
    f"I like putting {t} on my {f}"
    for t in ("cheese", "pineapple", "soy sauce")
    for f in ("pizza", "salad", "muesli", "sushi")
)

TWO_BY_TWO = ["hello world", "hello people", "hi world", "hi people"]


@pytest.fixture
def fig1_grammar() -> Grammar:
    return parse_tracery(FIG1_JSON)


def template(*parts) -> Template:
    """Build a template from strings (tokens) and ints (slot ids)."""
    elements = []
    for part in parts:
        if isinstance(part, int):
            elements.append(Slot(part))
        else:
            elements.extend(Token(word) for word in part.split())
    return Template(tuple(elements))
