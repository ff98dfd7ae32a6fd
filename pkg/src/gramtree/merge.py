"""Most specific common generalisation of two templates.

The merge aligns two templates with a longest-common-subsequence pass over
their elements (tokens match on text, slots match slots) and turns every
maximal run of unmatched elements into a single inserted slot. Among the
optimal alignments, candidates longer than both inputs are discarded, the
one with the fewest slots wins, and remaining ties go to the leftmost
alignment. When every candidate is discarded (or nothing matches at all)
the result degrades to a single slot covering both inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from heapq import heappop, heappush
from itertools import count
from typing import Iterator, Sequence

from .template import (
    Element,
    Slot,
    Template,
    Token,
    canonical_key,
    match_keys,
    slot_count,
    slot_ids,
    token_count,
)

# Bounded enumeration of optimal alignments keeps worst-case cost polynomial.
ALIGNMENT_CAP = 64

Coverage = dict[int, tuple[Element, ...]]


@dataclass(frozen=True, eq=False)
class MergeResult:
    """A merged template plus, per input, what each of its slots covers."""

    merged: Template
    alignments: tuple[Coverage, Coverage]


def merge_templates(t1: Template, t2: Template) -> MergeResult:
    """Merge two templates into their most specific common generalisation.

    Both inputs are recoverable from the result by substituting each slot
    with the element run recorded for it in ``alignments``.
    """
    if canonical_key(t2) < canonical_key(t1):
        flipped = _merge_ordered(t2, t1)
        return MergeResult(flipped.merged, (flipped.alignments[1], flipped.alignments[0]))
    return _merge_ordered(t1, t2)


@lru_cache(maxsize=1 << 15)
def distance(t1: Template, t2: Template) -> int:
    """Merge-based distance: max(l1, l2) - l_m + s_m - min(s1, s2)."""
    merged = merge_templates(t1, t2).merged
    return (
        max(token_count(t1), token_count(t2))
        - token_count(merged)
        + slot_count(merged)
        - min(slot_count(t1), slot_count(t2))
    )


@lru_cache(maxsize=1 << 15)
def _merge_ordered(t1: Template, t2: Template) -> MergeResult:
    a, b = t1.elements, t2.elements
    ka, kb = match_keys(t1), match_keys(t2)
    n, m = len(a), len(b)

    # Identical ends never hurt an optimal alignment; trimming them keeps the
    # DP quadratic only in the differing core.
    lo = 0
    while lo < n and lo < m and a[lo] == b[lo]:
        lo += 1
    hi = 0
    while hi < n - lo and hi < m - lo and a[n - 1 - hi] == b[m - 1 - hi]:
        hi += 1

    core_a, core_b = ka[lo : n - hi], kb[lo : m - hi]
    dp = _lcs_table(core_a, core_b)
    lcs = dp[0][0] if core_a and core_b else 0

    # Candidates come from the longest common subsequences; when every one
    # of them is longer than both inputs (overgeneral interleavings), the
    # next smaller matching size is tried, ending at the single-slot merge.
    best: tuple[tuple[int, int], list[Element], Coverage, Coverage] | None = None
    for size in range(lcs, -1, -1):
        for core_matches in _matchings_of_size(dp, core_a, core_b, size):
            pairs = (
                [(i, i) for i in range(lo)]
                + [(i + lo, j + lo) for i, j in core_matches]
                + [(n - hi + k, m - hi + k) for k in range(hi)]
            )
            elements, cov1, cov2 = _build(a, b, pairs)
            if len(elements) > max(n, m):
                continue
            slots = sum(1 for e in elements if isinstance(e, Slot))
            # Minimising the distance formula over candidates means
            # minimising s_m - l_m; among equals fewer slots win, then
            # leftmost.
            key = (2 * slots - len(elements), slots)
            if best is None or key < best[0]:
                best = (key, elements, cov1, cov2)
        if best is not None:
            break

    assert best is not None  # size 0 always yields the single-slot merge
    _, elements, cov1, cov2 = best
    return MergeResult(Template(tuple(elements)), (cov1, cov2))


def _fresh_base(a: tuple[Element, ...], b: tuple[Element, ...]) -> int:
    ids = [e.uid for e in a if isinstance(e, Slot)]
    ids += [e.uid for e in b if isinstance(e, Slot)]
    return max(ids, default=-1) + 1


def _build(
    a: tuple[Element, ...],
    b: tuple[Element, ...],
    pairs: list[tuple[int, int]],
) -> tuple[list[Element], Coverage, Coverage]:
    """Turn one alignment into a merged element list plus slot coverages."""
    fresh = count(_fresh_base(a, b))
    elements: list[Element] = []
    cov1: Coverage = {}
    cov2: Coverage = {}

    def emit_gap(run1: tuple[Element, ...], run2: tuple[Element, ...]) -> None:
        if run1 or run2:
            uid = next(fresh)
            elements.append(Slot(uid))
            cov1[uid] = run1
            cov2[uid] = run2

    i = j = 0
    for mi, mj in pairs:
        emit_gap(a[i:mi], b[j:mj])
        x, y = a[mi], b[mj]
        if isinstance(x, Token):
            elements.append(x)
        else:
            assert isinstance(y, Slot)
            uid = x.uid if x.uid == y.uid and x.uid not in cov1 else next(fresh)
            elements.append(Slot(uid))
            cov1[uid] = (x,)
            cov2[uid] = (y,)
        i, j = mi + 1, mj + 1
    emit_gap(a[i:], b[j:])
    return elements, cov1, cov2


def _lcs_table(
    ka: tuple[str | None, ...],
    kb: tuple[str | None, ...],
) -> list[list[int]]:
    """dp[i][j] = longest common subsequence length of ka[i:], kb[j:].

    Inputs are per-element match keys (token text, or None for a slot);
    elements align iff their keys are equal.
    """
    n, m = len(ka), len(kb)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = dp[i], dp[i + 1]
        x = ka[i]
        for j in range(m - 1, -1, -1):
            here = below[j] if below[j] >= row[j + 1] else row[j + 1]
            if x == kb[j] and below[j + 1] + 1 > here:
                here = below[j + 1] + 1
            row[j] = here
    return dp


def _matchings_of_size(
    dp: list[list[int]],
    ka: tuple[str | None, ...],
    kb: tuple[str | None, ...],
    size: int,
    cap: int = ALIGNMENT_CAP,
) -> list[tuple[tuple[int, int], ...]]:
    """All alignments of exactly ``size`` matches, leftmost first, capped."""
    if size == 0:
        return [()]
    n, m = len(ka), len(kb)
    results: list[tuple[tuple[int, int], ...]] = []
    acc: list[tuple[int, int]] = []

    def walk(i: int, j: int, need: int) -> None:
        if len(results) >= cap:
            return
        if need == 0:
            results.append(tuple(acc))
            return
        for i2 in range(i, n):
            if dp[i2][j] < need:
                break
            x = ka[i2]
            row_next = dp[i2 + 1]
            for j2 in range(j, m):
                if dp[i2][j2] < need:
                    break
                if x == kb[j2] and row_next[j2 + 1] >= need - 1:
                    acc.append((i2, j2))
                    walk(i2 + 1, j2 + 1, need - 1)
                    acc.pop()
                    if len(results) >= cap:
                        return

    walk(0, 0, size)
    return results


def remap_new_slots(
    merged: Template,
    sources: Sequence[Template],
    fresh_ids: Iterator[int],
) -> Template:
    """Re-id the slots of ``merged`` that were not inherited from ``sources``.

    Merging assigns locally fresh ids; callers that maintain a pool of
    templates use this to keep slot ids unique across the whole pool.
    """
    inherited = {uid for t in sources for uid in slot_ids(t)}
    mapping: dict[int, int] = {}
    elements: list[Element] = []
    for e in merged.elements:
        if isinstance(e, Slot) and e.uid not in inherited:
            if e.uid not in mapping:
                mapping[e.uid] = next(fresh_ids)
            elements.append(Slot(mapping[e.uid]))
        else:
            elements.append(e)
    return Template(tuple(elements))


@lru_cache(maxsize=1 << 12)
def merge_all(templates: tuple[Template, ...]) -> Template:
    """Fold templates into one by repeatedly merging the closest pair.

    Ties break on canonical template order, then insertion order. Slot ids
    inherited from the inputs survive; inserted slots get ids above every
    input id, assigned deterministically, so the result is a pure function
    of the input tuple.
    """
    if not templates:
        raise ValueError("merge_all requires at least one template")
    fresh = count(max((uid for t in templates for uid in slot_ids(t)), default=-1) + 1)
    alive: dict[int, Template] = dict(enumerate(templates))
    heap: list[tuple[int, tuple, tuple, int, int]] = []

    def push_pairs(seq: int, others: Sequence[int]) -> None:
        t = alive[seq]
        k = canonical_key(t)
        for other in others:
            u = alive[other]
            ku = canonical_key(u)
            kmin, kmax = (k, ku) if k <= ku else (ku, k)
            heappush(heap, (distance(t, u), kmin, kmax, min(seq, other), max(seq, other)))

    seqs = list(alive)
    for pos, seq in enumerate(seqs):
        push_pairs(seq, seqs[pos + 1 :])

    next_seq = len(templates)
    while len(alive) > 1:
        _, _, _, s1, s2 = heappop(heap)
        if s1 not in alive or s2 not in alive:
            continue
        merged = merge_templates(alive[s1], alive[s2]).merged
        merged = remap_new_slots(merged, (alive[s1], alive[s2]), fresh)
        del alive[s1], alive[s2]
        alive[next_seq] = merged
        push_pairs(next_seq, [s for s in alive if s != next_seq])
        next_seq += 1
    return next(iter(alive.values()))
