import pytest

from gramtree.template import (
    Slot,
    Template,
    Token,
    canonical_key,
    format_template,
    normalize_sentence,
    render,
    slot_count,
    slot_label,
    token_count,
    tokenize,
)

from conftest import template


def test_tokenize_splits_on_whitespace():
    assert tokenize("hello world") == Template((Token("hello"), Token("world")))


def test_tokenize_empty_string():
    assert tokenize("") == Template(())
    assert tokenize("   \t ") == Template(())


def test_tokenize_keeps_punctuation_attached():
    assert tokenize("hello, world!") == Template((Token("hello,"), Token("world!")))


def test_tokenize_sample_sentence_has_seven_tokens():
    assert len(tokenize("I like putting cheese on my pizza")) == 7


def test_render_fills_slot():
    t = template("hello", 1)
    assert render(t, {1: (Token("world"),)}) == "hello world"


def test_render_identity_without_slots():
    t = tokenize("just some words")
    assert render(t, {}) == "just some words"


def test_render_empty_value_leaves_no_double_space():
    t = template(0, 1, 2)
    out = render(t, {0: (Token("hello"),), 1: (), 2: (Token("alice"),)})
    assert out == "hello alice"
    assert "  " not in out


def test_render_missing_slot_names_it():
    t = template("hi", 3)
    with pytest.raises(KeyError, match="D"):
        render(t, {})


def test_counts():
    t = template("hello", 1)
    assert token_count(t) == 1 and slot_count(t) == 1
    assert token_count(Template()) == 0 and slot_count(Template()) == 0
    both_slots = template(2, 1)
    assert token_count(both_slots) == 0 and slot_count(both_slots) == 2


def test_counts_sum_to_length():
    t = template("a b", 0, "c", 1)
    assert token_count(t) + slot_count(t) == len(t)


def test_tokenize_render_round_trip():
    for text in ("one", "a b c", "x  y\tz"):
        t = tokenize(text)
        assert tokenize(render(t, {})) == t


def test_slot_labels():
    assert slot_label(0) == "A"
    assert slot_label(25) == "Z"
    assert slot_label(26) == "AA"
    assert slot_label(27) == "AB"
    assert slot_label(2 * 26) == "BA"


def test_format_template_notation():
    t = template("hi", 0)
    assert format_template(t) == "hi ⟨A⟩"
    assert format_template(t, ascii_slots=True) == "hi <A>"


def test_canonical_key_ignores_slot_ids():
    assert canonical_key(template("a", 5)) == canonical_key(template("a", 9))
    assert canonical_key(template("a", 5)) != canonical_key(template("b", 5))
    # repeated slots keep their sharing pattern
    assert canonical_key(template(3, "x", 3)) != canonical_key(template(3, "x", 4))


def test_token_validation():
    with pytest.raises(ValueError):
        Token("")
    with pytest.raises(ValueError):
        Token("two words")


def test_normalize_sentence():
    assert normalize_sentence("  a   b \t c ") == "a b c"
