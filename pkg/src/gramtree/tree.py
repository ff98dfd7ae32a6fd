"""Template tree learning.

A template tree is learned bottom-up: all distinct input sentences start as
leaves, and the closest pair of parentless templates is repeatedly merged
until a single root remains. Every merge records the merged nodes as
children of the node holding the merge result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from heapq import heappop, heappush
from itertools import count
from typing import Iterable

from .merge import distance, merge_templates, remap_new_slots
from .template import Template, canonical_key, format_template, normalize_sentence, slot_ids, tokenize


@dataclass(eq=False)
class TemplateTreeNode:
    """A node of a template tree.

    Leaves carry the original (whitespace-normalised) input sentence in
    ``leaf_text`` and a slot-free template; internal nodes carry templates
    that generalise every descendant. Node equality is identity; use
    :func:`tree_equal` for structural comparison.
    """

    template: Template
    children: list[TemplateTreeNode] = field(default_factory=list)
    leaf_text: str | None = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


def leaf_texts(node: TemplateTreeNode) -> frozenset[str]:
    """The set of leaf sentences reachable from ``node``."""
    if node.is_leaf:
        return frozenset(() if node.leaf_text is None else (node.leaf_text,))
    return frozenset().union(*(leaf_texts(c) for c in node.children))


def tree_height(node: TemplateTreeNode) -> int:
    """Height in edges; a lone leaf has height 0."""
    if node.is_leaf:
        return 0
    return 1 + max(tree_height(c) for c in node.children)


def copy_tree(node: TemplateTreeNode) -> TemplateTreeNode:
    return TemplateTreeNode(
        node.template, [copy_tree(c) for c in node.children], node.leaf_text
    )


def tree_equal(a: TemplateTreeNode, b: TemplateTreeNode) -> bool:
    return (
        a.template == b.template
        and a.leaf_text == b.leaf_text
        and len(a.children) == len(b.children)
        and all(tree_equal(x, y) for x, y in zip(a.children, b.children))
    )


def tree_equal_up_to_slot_ids(a: TemplateTreeNode, b: TemplateTreeNode) -> bool:
    """Structural equality under one consistent slot-id bijection.

    Recalculation mints fresh ids for unchanged shapes; this is the
    equality that detects such a fixpoint.
    """
    forward: dict[int, int] = {}
    backward: dict[int, int] = {}

    def walk(x: TemplateTreeNode, y: TemplateTreeNode) -> bool:
        if x.leaf_text != y.leaf_text or len(x.children) != len(y.children):
            return False
        if len(x.template) != len(y.template):
            return False
        for p, q in zip(x.template.elements, y.template.elements):
            if type(p) is not type(q):
                return False
            if hasattr(p, "text"):
                if p.text != q.text:
                    return False
            else:
                if forward.setdefault(p.uid, q.uid) != q.uid:
                    return False
                if backward.setdefault(q.uid, p.uid) != p.uid:
                    return False
        return all(walk(cx, cy) for cx, cy in zip(x.children, y.children))

    return walk(a, b)


def max_slot_id(node: TemplateTreeNode) -> int:
    """Largest slot id used anywhere in the tree, or -1."""
    own = max(slot_ids(node.template), default=-1)
    return max([own] + [max_slot_id(c) for c in node.children])


def format_tree(node: TemplateTreeNode, ascii_slots: bool = False) -> str:
    """Indented dump, one node per line, leaves suffixed with ``*``."""
    lines: list[str] = []

    def walk(n: TemplateTreeNode, depth: int) -> None:
        text = format_template(n.template, ascii_slots=ascii_slots)
        lines.append("  " * depth + text + (" *" if n.is_leaf else ""))
        for c in n.children:
            walk(c, depth + 1)

    walk(node, 0)
    return "\n".join(lines)


def learn_template_tree(
    texts: Iterable[str],
    max_height: int | None = None,
) -> TemplateTreeNode:
    """Learn a template tree from input sentences.

    Duplicates (after whitespace normalisation) are dropped. Each round
    takes every minimally distant pair of active templates, in lexicographic
    order, merges those whose members were not already consumed this round,
    and enqueues the merge results against the remaining active templates.
    Merge results that come out syntactically identical share one node.

    Args:
        texts: input sentences, at least one.
        max_height: optional bound applied with :func:`limit_height`.

    Raises:
        ValueError: on an empty input set.
    """
    distinct = sorted({normalize_sentence(t) for t in texts})
    if not distinct:
        raise ValueError("cannot learn a template tree from an empty input set")
    if max_height is not None and max_height < 1:
        raise ValueError(f"max_height must be >= 1, got {max_height}")

    fresh_ids = count()
    active: dict[tuple, TemplateTreeNode] = {}
    for text in distinct:
        leaf = TemplateTreeNode(tokenize(text), leaf_text=text)
        active[canonical_key(leaf.template)] = leaf

    heap: list[tuple[int, tuple[tuple, tuple]]] = []

    def enqueue(k1: tuple, k2: tuple) -> None:
        pair = (k1, k2) if k1 <= k2 else (k2, k1)
        heappush(heap, (distance(active[k1].template, active[k2].template), pair))

    keys = sorted(active)
    for i, k1 in enumerate(keys):
        for k2 in keys[i + 1 :]:
            enqueue(k1, k2)

    while len(active) > 1:
        # Pop the whole band of minimally distant still-valid pairs.
        batch: list[tuple[tuple, tuple]] = []
        d_min: int | None = None
        while heap:
            d, pair = heap[0]
            if d_min is not None and d > d_min:
                break
            heappop(heap)
            if pair[0] in active and pair[1] in active:
                if d_min is None:
                    d_min = d
                batch.append(pair)
        if not batch:
            raise AssertionError("active templates left but no valid pair queued")

        fresh: dict[tuple, TemplateTreeNode] = {}
        for k1, k2 in batch:
            if k1 not in active or k2 not in active:
                continue  # a member was merged away earlier this round
            n1 = active.pop(k1)
            n2 = active.pop(k2)
            result = merge_templates(n1.template, n2.template)
            merged = remap_new_slots(result.merged, (n1.template, n2.template), fresh_ids)
            key = canonical_key(merged)
            if key in active:
                active[key].children.extend((n1, n2))
            elif key in fresh:
                fresh[key].children.extend((n1, n2))
            else:
                fresh[key] = TemplateTreeNode(merged, [n1, n2])

        for key in sorted(fresh):
            node = fresh[key]
            existing = list(active)
            active[key] = node
            for other in existing:
                enqueue(key, other)

    root = next(iter(active.values()))
    if max_height is not None:
        root = limit_height(root, max_height)
    return root


def prune_redundant_children(node: TemplateTreeNode) -> TemplateTreeNode:
    """Drop children whose descendant leaves are all covered by their siblings.

    Children are examined in ascending number of descendant leaves (least
    general first), top-down, until nothing changes.
    """
    root = copy_tree(node)
    _prune(root)
    return root


def _prune(node: TemplateTreeNode) -> None:
    while True:
        changed = False
        indexed = sorted(enumerate(node.children), key=lambda ic: (len(leaf_texts(ic[1])), ic[0]))
        for _, child in indexed:
            if child not in node.children:
                continue
            others = [c for c in node.children if c is not child]
            if not others:
                continue
            covered = frozenset().union(*(leaf_texts(c) for c in others))
            if leaf_texts(child) <= covered:
                node.children.remove(child)
                changed = True
        if not changed:
            break
    for child in node.children:
        _prune(child)


def limit_height(root: TemplateTreeNode, max_height: int) -> TemplateTreeNode:
    """Contract deepest internal nodes until the tree height fits.

    The deepest (then leftmost) internal non-root node is replaced by its
    children, in place, until height(root) <= max_height. Leaves are never
    touched, so the leaf set is preserved.
    """
    if max_height < 1:
        raise ValueError(f"max_height must be >= 1, got {max_height}")
    root = copy_tree(root)
    while tree_height(root) > max_height:
        parent, target = _deepest_internal(root)
        idx = parent.children.index(target)
        parent.children[idx : idx + 1] = target.children
    return root


def _deepest_internal(
    root: TemplateTreeNode,
) -> tuple[TemplateTreeNode, TemplateTreeNode]:
    """The deepest, leftmost internal non-root node and its parent."""
    best: tuple[int, int, TemplateTreeNode, TemplateTreeNode] | None = None
    counter = count()

    def walk(node: TemplateTreeNode, depth: int) -> None:
        nonlocal best
        for child in node.children:
            if child.is_leaf:
                continue
            order = next(counter)
            key = (-(depth + 1), order)
            if best is None or key < (best[0], best[1]):
                best = (key[0], key[1], node, child)
            walk(child, depth + 1)

    walk(root, 0)
    if best is None:
        raise AssertionError("no contractible internal node in an over-tall tree")
    return best[2], best[3]
