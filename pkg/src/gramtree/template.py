"""Templates: ordered sequences of word tokens and slots.

A slot stands for zero or more elements. Slot ids are plain integers while
learning; they are turned into uppercase letter names (A, B, ..., AA, ...)
only when a template is printed or serialised.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence, Union


@dataclass(frozen=True)
class Token:
    """A literal word token. Never empty, never contains whitespace."""

    text: str

    def __post_init__(self) -> None:
        if not self.text or any(c.isspace() for c in self.text):
            raise ValueError(f"invalid token text: {self.text!r}")


@dataclass(frozen=True)
class Slot:
    """A named hole that expands to zero or more elements."""

    uid: int


Element = Union[Token, Slot]


@dataclass(frozen=True)
class Template:
    """An immutable sequence of tokens and slots. May be empty."""

    elements: tuple[Element, ...] = ()

    def __len__(self) -> int:
        return len(self.elements)

    def __str__(self) -> str:
        return format_template(self)

    def __hash__(self) -> int:
        # Templates are hashed constantly by the merge caches; memoise.
        cached = self.__dict__.get("_hash")
        if cached is None:
            cached = hash(self.elements)
            object.__setattr__(self, "_hash", cached)
        return cached


def tokenize(text: str) -> Template:
    """Split ``text`` on whitespace runs into a slot-free template.

    Punctuation stays attached to its word. An empty or whitespace-only
    string yields the empty template.
    """
    return Template(tuple(Token(word) for word in text.split()))


def render(template: Template, assignment: Mapping[int, Sequence[Token]]) -> str:
    """Fill every slot of ``template`` from ``assignment`` and join with spaces.

    Each slot id must map to one (possibly empty) sequence of tokens; an
    empty sequence contributes nothing and no extra spaces.

    Raises:
        KeyError: if a slot of the template has no assigned value; the
            message names the slot.
    """
    words: list[str] = []
    for element in template.elements:
        if isinstance(element, Token):
            words.append(element.text)
        else:
            if element.uid not in assignment:
                raise KeyError(f"no value assigned to slot {slot_label(element.uid)}")
            for token in assignment[element.uid]:
                words.append(token.text)
    return " ".join(words)


@lru_cache(maxsize=1 << 16)
def token_count(template: Template) -> int:
    """Number of token (non-slot) elements."""
    return sum(1 for e in template.elements if isinstance(e, Token))


@lru_cache(maxsize=1 << 16)
def slot_count(template: Template) -> int:
    """Number of slot elements."""
    return sum(1 for e in template.elements if isinstance(e, Slot))


@lru_cache(maxsize=1 << 16)
def match_keys(template: Template) -> tuple[str | None, ...]:
    """Per-element merge-matching keys: token text, or None for any slot.

    Two elements can be aligned iff their keys compare equal (token texts
    must match; every slot matches every slot).
    """
    return tuple(e.text if isinstance(e, Token) else None for e in template.elements)


def slot_ids(template: Template) -> tuple[int, ...]:
    """Slot ids in order of occurrence (duplicates preserved)."""
    return tuple(e.uid for e in template.elements if isinstance(e, Slot))


def slot_label(uid: int) -> str:
    """Spreadsheet-style name for a slot id: 0 -> A, 25 -> Z, 26 -> AA."""
    if uid < 0:
        raise ValueError(f"slot ids are non-negative, got {uid}")
    letters = []
    n = uid
    while True:
        n, rem = divmod(n, 26)
        letters.append(chr(ord("A") + rem))
        if n == 0:
            break
        n -= 1
    return "".join(reversed(letters))


def format_template(template: Template, ascii_slots: bool = False) -> str:
    """Debug notation: tokens verbatim, slots as ``⟨A⟩`` (or ``<A>``)."""
    left, right = ("<", ">") if ascii_slots else ("⟨", "⟩")
    parts = [
        e.text if isinstance(e, Token) else f"{left}{slot_label(e.uid)}{right}"
        for e in template.elements
    ]
    return " ".join(parts)


def element_key(element: Element) -> tuple:
    """Total-order key for an element; tokens sort before slots."""
    if isinstance(element, Token):
        return (0, element.text)
    return (1, element.uid)


@lru_cache(maxsize=1 << 16)
def canonical_key(template: Template) -> tuple:
    """Structural key: slot ids normalised by order of first occurrence.

    Two templates are "the same shape" iff their canonical keys are equal;
    this is the equality used for dedup during learning and for fixpoint
    checks, where concrete slot ids are arbitrary.
    """
    order: dict[int, int] = {}
    key: list[tuple] = []
    for e in template.elements:
        if isinstance(e, Token):
            key.append(("t", e.text))
        else:
            key.append(("s", order.setdefault(e.uid, len(order))))
    return tuple(key)


def normalize_sentence(text: str) -> str:
    """Trim and collapse whitespace runs to single spaces."""
    return " ".join(text.split())
