"""Non-recursive context-free grammars with Tracery-style JSON I/O.

Rule bodies reference other rules as ``#name#``; the start symbol is the
rule named ``origin``. Modifier suffixes (``#name.capitalize#``) are
stripped down to the bare name. Sentences are compared in whitespace-
normalised form throughout.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Union

from .errors import GrammarFormatError, RecursiveGrammarError, UnsupportedGrammarError
from .template import normalize_sentence

DEFAULT_CAP = 1_000_000

_REFERENCE = re.compile(r"#([^#]*)#")
_ACTION = re.compile(r"\[[^\]]*:[^\]]*\]")


@dataclass(frozen=True)
class Terminal:
    text: str


@dataclass(frozen=True)
class NonTerminal:
    name: str


Symbol = Union[Terminal, NonTerminal]
Production = tuple[Symbol, ...]


@dataclass(frozen=True, eq=True)
class Grammar:
    """start symbol plus a map of rule name -> alternative productions."""

    start: str
    rules: Mapping[str, tuple[Production, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", dict(self.rules))
        if self.start not in self.rules:
            raise GrammarFormatError(f"start symbol {self.start!r} has no rule")
        for name, productions in self.rules.items():
            for production in productions:
                for symbol in production:
                    if isinstance(symbol, NonTerminal) and symbol.name not in self.rules:
                        raise GrammarFormatError(
                            f"rule {name!r} references undefined rule {symbol.name!r}"
                        )


@dataclass(frozen=True)
class LanguageSet:
    """Enumerated sentences; exact iff ``truncated`` is False."""

    sentences: frozenset[str]
    truncated: bool


@dataclass(frozen=True)
class NonrecursionCheck:
    """Result of the acyclicity check: a usable order or a cycle."""

    order: tuple[str, ...] | None
    cycle: tuple[str, ...] | None

    @property
    def ok(self) -> bool:
        return self.cycle is None


def parse_tracery(json_text: str) -> Grammar:
    """Parse a Tracery-style JSON object into a Grammar.

    Values may be a string or a list of strings. Inside ``#name.mod#``
    everything from the first ``.`` is dropped. Text abutting a reference
    becomes its own terminals (bodies are whitespace-tokenised).

    Raises:
        GrammarFormatError: malformed JSON, missing ``origin``, unbalanced
            ``#``, or a reference to an undefined rule.
        UnsupportedGrammarError: Tracery actions like ``[var:...]``.
    """
    try:
        data = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise GrammarFormatError(f"grammar is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise GrammarFormatError("grammar JSON must be an object of rules")
    if "origin" not in data:
        raise GrammarFormatError("grammar has no 'origin' rule")

    rules: dict[str, tuple[Production, ...]] = {}
    for name, body in data.items():
        alternatives = body if isinstance(body, list) else [body]
        productions = []
        for alternative in alternatives:
            if not isinstance(alternative, str):
                raise GrammarFormatError(
                    f"rule {name!r} has a non-string alternative: {alternative!r}"
                )
            productions.append(_parse_body(name, alternative))
        rules[name] = tuple(productions)

    for name, productions in rules.items():
        for production in productions:
            for symbol in production:
                if isinstance(symbol, NonTerminal) and symbol.name not in rules:
                    raise GrammarFormatError(
                        f"rule {name!r} references undefined rule {symbol.name!r}"
                    )
    return Grammar("origin", rules)


def _parse_body(rule_name: str, body: str) -> Production:
    if _ACTION.search(body):
        raise UnsupportedGrammarError(
            f"rule {rule_name!r} uses unsupported Tracery action syntax: {body!r}"
        )
    if body.count("#") % 2 != 0:
        raise GrammarFormatError(f"rule {rule_name!r} has an unbalanced '#': {body!r}")
    symbols: list[Symbol] = []
    pos = 0
    for match in _REFERENCE.finditer(body):
        for word in body[pos : match.start()].split():
            symbols.append(Terminal(word))
        name = match.group(1).split(".", 1)[0]
        if not name:
            raise GrammarFormatError(f"rule {rule_name!r} has an empty reference: {body!r}")
        symbols.append(NonTerminal(name))
        pos = match.end()
    for word in body[pos:].split():
        symbols.append(Terminal(word))
    return tuple(symbols)


def to_tracery(grammar: Grammar) -> str:
    """Serialise to the Tracery JSON dialect (inverse of parse_tracery).

    The start rule is emitted as ``origin`` first, the rest in sorted
    order; single-alternative rules are written as plain strings.
    """
    def body(production: Production) -> str:
        return " ".join(
            s.text if isinstance(s, Terminal) else f"#{s.name}#" for s in production
        )

    ordered = [grammar.start] + sorted(n for n in grammar.rules if n != grammar.start)
    payload: dict[str, object] = {}
    for name in ordered:
        key = "origin" if name == grammar.start else name
        bodies = [body(p) for p in grammar.rules[name]]
        payload[key] = bodies[0] if len(bodies) == 1 else bodies
    return json.dumps(payload, ensure_ascii=False, indent=2)


def check_nonrecursive(grammar: Grammar) -> NonrecursionCheck:
    """Topologically order the rule reference graph, or report a cycle.

    In the returned order every rule precedes the rules that reference it.
    """
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {name: WHITE for name in grammar.rules}
    order: list[str] = []
    path: list[str] = []

    def refs(name: str) -> list[str]:
        seen: list[str] = []
        for production in grammar.rules[name]:
            for symbol in production:
                if isinstance(symbol, NonTerminal) and symbol.name not in seen:
                    seen.append(symbol.name)
        return seen

    def visit(name: str) -> tuple[str, ...] | None:
        colour[name] = GREY
        path.append(name)
        for ref in refs(name):
            if colour[ref] == GREY:
                start = path.index(ref)
                return tuple(path[start:] + [ref])
            if colour[ref] == WHITE:
                cycle = visit(ref)
                if cycle is not None:
                    return cycle
        path.pop()
        colour[name] = BLACK
        order.append(name)
        return None

    for name in sorted(grammar.rules):
        if colour[name] == WHITE:
            cycle = visit(name)
            if cycle is not None:
                return NonrecursionCheck(None, cycle)
    return NonrecursionCheck(tuple(order), None)


def enumerate_language(grammar: Grammar, cap: int = DEFAULT_CAP) -> LanguageSet:
    """Enumerate the full language bottom-up over the topological order.

    Every rule's expansion set is capped at ``cap`` distinct sentences;
    hitting the cap sets ``truncated`` (the result is then an incomplete
    subset of the language, not an error).

    Raises:
        RecursiveGrammarError: the grammar has a reference cycle.
    """
    check = check_nonrecursive(grammar)
    if not check.ok:
        raise RecursiveGrammarError(check.cycle)
    expansions: dict[str, list[str]] = {}
    truncated = False
    for name in check.order:
        seen: set[str] = set()
        rule_truncated = False
        for production in grammar.rules[name]:
            parts = [
                [symbol.text] if isinstance(symbol, Terminal) else expansions[symbol.name]
                for symbol in production
            ]
            for combo in product(*parts):
                sentence = normalize_sentence(" ".join(combo))
                if len(seen) >= cap and sentence not in seen:
                    truncated = True
                    rule_truncated = True
                    break
                seen.add(sentence)
            if rule_truncated:
                break
        expansions[name] = sorted(seen)
    return LanguageSet(frozenset(expansions[grammar.start]), truncated)


def generate_random(grammar: Grammar, seed: int) -> str:
    """One random sentence, uniform over alternatives at every expansion."""
    return generate_sentences(grammar, seed, 1)[0]


def generate_sentences(grammar: Grammar, seed: int, n: int) -> list[str]:
    """``n`` seeded random sentences (one generator stream)."""
    check = check_nonrecursive(grammar)
    if not check.ok:
        raise RecursiveGrammarError(check.cycle)
    rng = random.Random(seed)

    def expand(name: str) -> list[str]:
        alternatives = grammar.rules[name]
        production = alternatives[rng.randrange(len(alternatives))]
        words: list[str] = []
        for symbol in production:
            if isinstance(symbol, Terminal):
                words.append(symbol.text)
            else:
                words.extend(expand(symbol.name))
        return words

    return [normalize_sentence(" ".join(expand(grammar.start))) for _ in range(n)]


def rule_count(grammar: Grammar) -> int:
    """Number of productions after disjunction normalisation."""
    return sum(len(productions) for productions in grammar.rules.values())
