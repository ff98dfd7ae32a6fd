"""From template tree to grammar.

The pipeline learns a template tree, prunes redundant children, then
alternates between a slot-value fixpoint (extract values, merge similar
slots on Jaccard overlap, simplify value sets) and a tree collapse
(substitute slot replacements, delete children that are instantiations of
their parent, recalculate templates) until the tree stops changing. The
surviving root template and slot values become the grammar.
"""

from __future__ import annotations

import logging
from itertools import count
from typing import Iterable, Iterator

from .errors import InternalInvariantError
from .grammar import Grammar, NonTerminal, Production, Symbol, Terminal, check_nonrecursive
from .merge import merge_all, remap_new_slots
from .template import (
    Element,
    Slot,
    Template,
    Token,
    canonical_key,
    element_key,
    format_template,
    slot_ids,
    slot_label,
)
from .tree import (
    TemplateTreeNode,
    copy_tree,
    learn_template_tree,
    max_slot_id,
    prune_redundant_children,
    tree_equal_up_to_slot_ids,
)

log = logging.getLogger(__name__)

DEFAULT_RATIO = 0.5
MAX_PASSES = 100

Value = tuple[Element, ...]
SlotValues = dict[int, set[Value]]
SlotReplacement = dict[int, int]


def value_key(value: Value) -> tuple:
    return tuple(element_key(e) for e in value)


# ---------------------------------------------------------------------------
# slot value extraction


def extract_slot_values(tree: TemplateTreeNode) -> SlotValues:
    """Collect, per slot id, every child run the slot covers anywhere.

    Each child of a slotted node is aligned against the node's template;
    the run of child elements covered by each slot occurrence is recorded
    as one value (possibly the empty run).

    Raises:
        InternalInvariantError: a child is not derivable from its parent.
    """
    values: SlotValues = {}

    def walk(node: TemplateTreeNode) -> None:
        if not node.is_leaf and slot_ids(node.template):
            for child in node.children:
                for uid, run in _align_child(node.template, child.template):
                    values.setdefault(uid, set()).add(run)
        for child in node.children:
            walk(child)

    walk(tree)
    return values


def _align_child(parent: Template, child: Template) -> list[tuple[int, Value]]:
    """Match ``child`` against ``parent``, returning per-slot covered runs.

    Parent tokens must match child tokens literally; each parent slot
    covers zero or more child elements. Among valid alignments the number
    of slots covering a non-empty run is maximised, then earlier slots
    take longer runs.
    """
    p, c = parent.elements, child.elements
    np_, nc = len(p), len(c)
    NEG = -1

    # best[pi][ci] = max count of non-empty slot assignments matching
    # p[pi:] against c[ci:], or -1 when impossible.
    best = [[NEG] * (nc + 1) for _ in range(np_ + 1)]
    best[np_][nc] = 0
    for pi in range(np_ - 1, -1, -1):
        e = p[pi]
        row, below = best[pi], best[pi + 1]
        if isinstance(e, Token):
            for ci in range(nc - 1, -1, -1):
                if c[ci] == e and below[ci + 1] >= 0:
                    row[ci] = below[ci + 1]
        else:
            for ci in range(nc, -1, -1):
                top = NEG
                for length in range(0, nc - ci + 1):
                    rest = below[ci + length]
                    if rest >= 0:
                        score = rest + (1 if length else 0)
                        if score > top:
                            top = score
                row[ci] = top
    if best[0][0] < 0:
        raise InternalInvariantError(
            f"child {format_template(child)!r} is not derivable from "
            f"parent {format_template(parent)!r}"
        )

    assignments: list[tuple[int, Value]] = []
    pi = ci = 0
    while pi < np_:
        e = p[pi]
        if isinstance(e, Token):
            pi, ci = pi + 1, ci + 1
            continue
        target = best[pi][ci]
        for length in range(nc - ci, -1, -1):
            rest = best[pi + 1][ci + length]
            if rest >= 0 and rest + (1 if length else 0) == target:
                assignments.append((e.uid, tuple(c[ci : ci + length])))
                ci += length
                break
        pi += 1
    return assignments


# ---------------------------------------------------------------------------
# slot merging and simplification


def _rewrite_value(value: Value, mapping: SlotReplacement) -> Value:
    return tuple(
        Slot(mapping[e.uid]) if isinstance(e, Slot) and e.uid in mapping else e
        for e in value
    )


def _rewrite_all(values: SlotValues, mapping: SlotReplacement) -> None:
    for uid in list(values):
        values[uid] = {_rewrite_value(v, mapping) for v in values[uid]}


def _jaccard(a: set[Value], b: set[Value]) -> float:
    union = len(a | b)
    return len(a & b) / union if union else 1.0


def _ref_edges(vs: set[Value]) -> set[int]:
    return {e.uid for v in vs for e in v if isinstance(e, Slot)}


def _is_acyclic(graph: dict[int, set[int]]) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {uid: WHITE for uid in graph}
    for start in graph:
        if colour[start] != WHITE:
            continue
        stack: list[tuple[int, Iterator[int]]] = [(start, iter(sorted(graph[start])))]
        colour[start] = GREY
        while stack:
            node, edges = stack[-1]
            for nxt in edges:
                if nxt not in graph:
                    continue
                if colour[nxt] == GREY:
                    return False
                if colour[nxt] == WHITE:
                    colour[nxt] = GREY
                    stack.append((nxt, iter(sorted(graph[nxt]))))
                    break
            else:
                colour[node] = BLACK
                stack.pop()
    return True


def _merge_keeps_acyclic(values: SlotValues, keep: int, drop: int) -> bool:
    """Would unioning ``drop`` into ``keep`` keep slot references acyclic?

    Single-element self-references are discounted (simplification removes
    them); anything else that closes a cycle would make the grammar
    recursive, so such a merge must not happen.
    """
    merged = {_rewrite_value(v, {drop: keep}) for v in values[keep] | values[drop]}
    merged.discard((Slot(keep),))
    graph = {
        uid: {keep if ref == drop else ref for ref in _ref_edges(vs)}
        for uid, vs in values.items()
        if uid not in (keep, drop)
    }
    graph[keep] = _ref_edges(merged)
    return _is_acyclic(graph)


def merge_similar_slots(values: SlotValues, ratio: float) -> tuple[SlotValues, SlotReplacement]:
    """Greedily union slots whose value sets overlap enough.

    The pair with the highest Jaccard overlap >= ratio is merged first
    (ties on slot-id order), the union kept under the lower id, and all
    references to the removed id rewritten; overlaps are then recomputed.
    A merge that would make the slot reference graph cyclic (and hence
    the grammar recursive) is skipped.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"ratio must be within [0, 1], got {ratio}")
    values = {uid: set(vs) for uid, vs in values.items()}
    replacement: SlotReplacement = {}
    while True:
        uids = sorted(values)
        candidates = sorted(
            (
                (-overlap, a, b)
                for i, a in enumerate(uids)
                for b in uids[i + 1 :]
                if (overlap := _jaccard(values[a], values[b])) >= ratio
            ),
        )
        chosen: tuple[int, int] | None = None
        for _, a, b in candidates:
            if _merge_keeps_acyclic(values, a, b):
                chosen = (a, b)
                break
        if chosen is None:
            break
        keep, drop = chosen
        values[keep] |= values[drop]
        del values[drop]
        for old, target in list(replacement.items()):
            if target == drop:
                replacement[old] = keep
        replacement[drop] = keep
        _rewrite_all(values, {drop: keep})
    return values, replacement


def simplify_slot_values(values: SlotValues) -> SlotValues:
    """Apply the three value-set reduction rules until nothing changes.

    A single-element value ``[<k>]`` counts as slot membership: such
    self-references are dropped, values reachable through a referenced
    slot are dropped, and a slot whose value set is exactly ``{[<k>]}``
    is replaced by ``k`` everywhere.
    """
    simplified, _ = _simplify(values)
    return simplified


def _slot_ref(value: Value) -> int | None:
    if len(value) == 1 and isinstance(value[0], Slot):
        return value[0].uid
    return None


def _simplify(values: SlotValues) -> tuple[SlotValues, SlotReplacement]:
    values = {uid: set(vs) for uid, vs in values.items()}
    replacement: SlotReplacement = {}
    while True:
        changed = False

        # Self-references never contribute; an emptied set degrades to ε.
        for uid in sorted(values):
            if (Slot(uid),) in values[uid]:
                values[uid].discard((Slot(uid),))
                changed = True
                if not values[uid]:
                    log.warning("slot %s only referenced itself; keeping ε", slot_label(uid))
                    values[uid].add(())

        # Drop values already reachable through a referenced slot, but
        # never empty a value set outright.
        for uid in sorted(values):
            referenced = {
                ref for v in values[uid]
                if (ref := _slot_ref(v)) is not None and ref != uid and ref in values
            }
            if not referenced:
                continue
            removable = {
                v for v in values[uid]
                if any(v in values[ref] for ref in referenced)
            }
            if removable:
                if removable == values[uid]:
                    kept = max(removable, key=value_key)
                    removable = removable - {kept}
                    log.warning(
                        "all values of slot %s are covered; keeping %r",
                        slot_label(uid),
                        kept,
                    )
                if removable:
                    values[uid] -= removable
                    changed = True

        # A slot whose only value is another slot is an alias.
        for uid in sorted(values):
            if uid not in values:
                continue
            if len(values[uid]) == 1:
                ref = _slot_ref(next(iter(values[uid])))
                if ref is not None and ref != uid and ref in values:
                    del values[uid]
                    for old, target in list(replacement.items()):
                        if target == uid:
                            replacement[old] = ref
                    replacement[uid] = ref
                    _rewrite_all(values, {uid: ref})
                    changed = True

        if not changed:
            return values, replacement


def _slot_fixpoint(values: SlotValues, ratio: float) -> tuple[SlotValues, SlotReplacement]:
    """Alternate merge_similar_slots and simplification to a joint fixpoint."""
    combined: SlotReplacement = {}

    def fold(new: SlotReplacement) -> None:
        for old, target in list(combined.items()):
            combined[old] = new.get(target, target)
        for old, target in new.items():
            if old not in combined:
                combined[old] = target

    for _ in range(MAX_PASSES):
        before = {uid: frozenset(vs) for uid, vs in values.items()}
        values, merged_repl = merge_similar_slots(values, ratio)
        fold(merged_repl)
        values, simplified_repl = _simplify(values)
        fold(simplified_repl)
        unchanged = (
            not merged_repl
            and not simplified_repl
            and before == {uid: frozenset(vs) for uid, vs in values.items()}
        )
        if unchanged:
            return values, combined
    raise InternalInvariantError("slot merge/simplify fixpoint did not converge")


# ---------------------------------------------------------------------------
# tree collapsing


def collapse_tree(
    tree: TemplateTreeNode,
    values: SlotValues,
    replacement: SlotReplacement,
    max_iterations: int = MAX_PASSES,
) -> TemplateTreeNode:
    """Simplify the tree with known slot values until it stops changing.

    Each iteration (1) applies the slot replacement to every template,
    (2) deletes any child whose template is the parent's with some other
    slots filled by known values, attaching its children to the parent,
    and (3) recalculates every template bottom-up as the closest-pair
    merge of its children's templates (kept verbatim when the result is
    structurally unchanged).

    Raises:
        InternalInvariantError: no fixpoint within ``max_iterations``.
    """
    root = copy_tree(tree)
    value_ids = [uid for uid in values] + [
        e.uid for vs in values.values() for v in vs for e in v if isinstance(e, Slot)
    ]
    fresh = count(max([max_slot_id(root)] + value_ids, default=-1) + 1)
    for _ in range(max_iterations):
        changed = _apply_replacement(root, replacement)
        changed |= _collapse_pass(root, values)
        changed |= _recalculate(root, fresh)
        if not changed:
            return root
    raise InternalInvariantError("collapse did not reach a fixpoint")


def _apply_replacement(node: TemplateTreeNode, replacement: SlotReplacement) -> bool:
    changed = False
    rewritten = Template(tuple(_rewrite_value(node.template.elements, replacement)))
    if rewritten != node.template:
        node.template = rewritten
        changed = True
    for child in node.children:
        changed |= _apply_replacement(child, replacement)
    return changed


def _collapse_pass(node: TemplateTreeNode, values: SlotValues) -> bool:
    changed = False
    i = 0
    while i < len(node.children):
        child = node.children[i]
        if not child.is_leaf and _is_instantiation(node.template, child.template, values):
            node.children[i : i + 1] = child.children
            changed = True
            continue
        i += 1
    for child in node.children:
        changed |= _collapse_pass(child, values)
    return changed


def _is_instantiation(parent: Template, child: Template, values: SlotValues) -> bool:
    """True when ``child`` keeps at least one of ``parent``'s slots and is
    obtainable from ``parent`` by filling other slots with known values."""
    shared = set(slot_ids(parent)) & set(slot_ids(child))
    if not shared:
        return False
    p, c = parent.elements, child.elements

    seen: set[tuple[int, int]] = set()

    def match(pi: int, ci: int) -> bool:
        if (pi, ci) in seen:
            return False
        if pi == len(p):
            return ci == len(c)
        e = p[pi]
        if isinstance(e, Token):
            ok = ci < len(c) and c[ci] == e and match(pi + 1, ci + 1)
        else:
            ok = False
            if ci < len(c) and c[ci] == e and match(pi + 1, ci + 1):
                ok = True  # slot kept verbatim
            if not ok:
                for value in sorted(values.get(e.uid, ()), key=value_key):
                    if c[ci : ci + len(value)] == value and match(pi + 1, ci + len(value)):
                        ok = True
                        break
        if not ok:
            seen.add((pi, ci))
        return ok

    return match(0, 0)


def _recalculate(node: TemplateTreeNode, fresh: Iterator[int]) -> bool:
    changed = False
    for child in node.children:
        changed |= _recalculate(child, fresh)
    if not node.is_leaf:
        child_templates = tuple(c.template for c in node.children)
        candidate = merge_all(child_templates)
        if canonical_key(candidate) != canonical_key(node.template):
            node.template = remap_new_slots(candidate, child_templates, fresh)
            changed = True
    return changed


# ---------------------------------------------------------------------------
# grammar induction


def induce_grammar(
    texts: Iterable[str],
    ratio: float = DEFAULT_RATIO,
    max_height: int | None = None,
) -> Grammar:
    """Induce a non-recursive grammar from example sentences.

    Args:
        texts: input sentences (deduplicated, whitespace-normalised).
        ratio: Jaccard threshold for merging similar slots, in [0, 1].
        max_height: optional template tree height bound.

    Returns:
        A grammar whose ``origin`` rule is the root template and whose
        other rules are the surviving slots' value sets.
    """
    tree = learn_template_tree(texts, max_height=max_height)
    tree = prune_redundant_children(tree)
    for _ in range(MAX_PASSES):
        values = extract_slot_values(tree)
        values, replacement = _slot_fixpoint(values, ratio)
        collapsed = collapse_tree(tree, values, replacement)
        if tree_equal_up_to_slot_ids(collapsed, tree):
            # Converged (recalculation may have re-minted ids for the same
            # shape). The value map matches this iteration's tree once the
            # replacement is applied to its root.
            root = Template(_rewrite_value(tree.template.elements, replacement))
            return _emit_grammar(root, values)
        tree = collapsed
    raise InternalInvariantError("induction pipeline did not reach a fixpoint")


def _emit_grammar(root_template: Template, values: SlotValues) -> Grammar:
    reachable: set[int] = set()
    frontier = list(dict.fromkeys(slot_ids(root_template)))
    while frontier:
        uid = frontier.pop()
        if uid in reachable:
            continue
        reachable.add(uid)
        if uid not in values:
            raise InternalInvariantError(f"slot {slot_label(uid)} has no extracted values")
        for value in values[uid]:
            for element in value:
                if isinstance(element, Slot) and element.uid not in reachable:
                    frontier.append(element.uid)

    names = {uid: slot_label(rank) for rank, uid in enumerate(sorted(reachable))}

    def symbols(elements: Iterable[Element]) -> Production:
        out: list[Symbol] = []
        for element in elements:
            if isinstance(element, Token):
                out.append(Terminal(element.text))
            else:
                out.append(NonTerminal(names[element.uid]))
        return tuple(out)

    def production_text(production: Production) -> str:
        return " ".join(
            s.text if isinstance(s, Terminal) else f"#{s.name}#" for s in production
        )

    rules: dict[str, tuple[Production, ...]] = {
        "origin": (symbols(root_template.elements),)
    }
    for uid in sorted(reachable):
        productions = [symbols(value) for value in values[uid]]
        rules[names[uid]] = tuple(sorted(productions, key=production_text))

    grammar = Grammar("origin", rules)
    check = check_nonrecursive(grammar)
    if not check.ok:
        raise InternalInvariantError(
            "induced grammar is recursive: " + " -> ".join(check.cycle)
        )
    return grammar
