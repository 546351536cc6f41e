"""Classify finite graphs as low (no large homogeneous disjoint pair) or high.

A graph H with n nodes is 1-high when two disjoint vertex sets A, B exist,
each of size at least n**h(n), with every cross pair an edge (t = "edge")
or every cross pair a non-edge (t = "non-edge"); otherwise 1-low.  High
verdicts always carry a witness and are re-verified before being returned;
an unresolved search is an error, never a silent "low".

The 2-variant looks for a color-coherent pattern: a sequence of m =
floor(ln ln n) anchor nodes, m(m+1)/2 pair nodes, and colorings such that
the cross-edge pattern depends only on the colors.  At every reachable size
the color palette has a single color, which makes the pattern exactly a
homogeneous (m(m+1)/2) x m disjoint pair; with two or more colors (sizes far
beyond desk scale) coloring by the edge indicator satisfies coherence
outright.  This classifier is experimental: the reading above is a
documented reconstruction, see README.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .growth import GrowthFunctions, eval_growth
from .structures import Structure


class BudgetExhausted(RuntimeError):
    pass


class OracleTooLarge(RuntimeError):
    pass


@dataclass(frozen=True)
class PairWitness:
    side_a: Tuple[int, ...]
    side_b: Tuple[int, ...]
    t: str  # "edge" or "non-edge"


@dataclass(frozen=True)
class PatternWitness:
    anchors: Tuple[int, ...]                      # a_j, j < m
    pairs: Tuple[Tuple[int, int, int], ...]       # (l, k, node) for l < k <= m
    c1: Tuple[Tuple[Tuple[int, int, int], int], ...]
    c2: Tuple[Tuple[Tuple[int, int], int], ...]
    colors: int


@dataclass(frozen=True)
class LownessVerdict:
    iota: int
    verdict: str  # "low" or "high"
    witness: Optional[object]
    method: str   # "exhaustive", "branch-and-bound", "heuristic-verified"
    threshold: float
    n: int
    note: str = ""

    @property
    def is_high(self) -> bool:
        return self.verdict == "high"


def side_size(gf: GrowthFunctions, n: int) -> Tuple[float, int]:
    """(real threshold n**h(n), minimal integer side size).

    Integral thresholds are used as-is; fractional ones round up, and a side
    always needs at least one vertex.
    """
    _, threshold = eval_growth(gf, n)
    if math.isclose(threshold, round(threshold), rel_tol=1e-12, abs_tol=1e-12):
        s = int(round(threshold))
    else:
        s = math.ceil(threshold)
    return threshold, max(1, s)


def _graph_masks(h: Structure) -> List[int]:
    masks = [0] * h.n
    for a, b in h.edges():
        masks[a - 1] |= 1 << (b - 1)
        masks[b - 1] |= 1 << (a - 1)
    return masks


def _complement_masks(masks: List[int], n: int) -> List[int]:
    full = (1 << n) - 1
    return [full & ~masks[v] & ~(1 << v) for v in range(n)]


def _bits_to_nodes(mask: int, count: int) -> Tuple[int, ...]:
    out = []
    v = 0
    while mask and len(out) < count:
        if mask & 1:
            out.append(v + 1)
        mask >>= 1
        v += 1
    return tuple(out)


class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit: int):
        self.left = limit

    def spend(self):
        self.left -= 1
        if self.left < 0:
            raise _BudgetHit()


class _BudgetHit(Exception):
    pass


def _greedy_pair(masks: List[int], n: int, size_a: int, size_b: int) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Cheap witness attempt: grow A by the vertex keeping the B pool largest."""
    pool = (1 << n) - 1
    chosen: List[int] = []
    avail = list(range(n))
    for _ in range(size_a):
        best_v, best_count = None, -1
        for v in avail:
            c = (pool & masks[v]).bit_count()
            if c > best_count:
                best_v, best_count = v, c
        if best_v is None or best_count < size_b:
            return None
        chosen.append(best_v)
        avail.remove(best_v)
        pool &= masks[best_v]
    side_b = _bits_to_nodes(pool, size_b)
    if len(side_b) < size_b:
        return None
    return tuple(sorted(v + 1 for v in chosen)), side_b


def _search_pair(
    masks: List[int], n: int, size_a: int, size_b: int, budget: _Budget
) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Exact search for disjoint A (|A|=size_a) with >= size_b common neighbors.

    Vertices are irreflexive, so the common-neighbor pool never contains A;
    the pool only shrinks as A grows, which justifies both prunings.
    """
    order = sorted(range(n), key=lambda v: (-masks[v].bit_count(), v))

    def rec(start: int, picked: List[int], pool: int) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        if len(picked) == size_a:
            if pool.bit_count() >= size_b:
                return (
                    tuple(sorted(v + 1 for v in picked)),
                    _bits_to_nodes(pool, size_b),
                )
            return None
        for idx in range(start, n):
            if n - idx < size_a - len(picked):
                break
            v = order[idx]
            new_pool = pool & masks[v]
            if new_pool.bit_count() < size_b:
                continue
            budget.spend()
            found = rec(idx + 1, picked + [v], new_pool)
            if found:
                return found
        return None

    return rec(0, [], (1 << n) - 1)


def classify_low_1(h: Structure, gf: GrowthFunctions, budget: int = 10_000_000) -> LownessVerdict:
    """Exact within budget; high verdicts carry a verified witness."""
    n = h.n
    if n == 0:
        return LownessVerdict(1, "low", None, "branch-and-bound", 0.0, 0, "empty graph")
    threshold, s = side_size(gf, n)
    if 2 * s > n:
        return LownessVerdict(
            1, "low", None, "branch-and-bound", threshold, n, "sides cannot fit"
        )
    masks = _graph_masks(h)
    variants = (("edge", masks), ("non-edge", _complement_masks(masks, n)))
    for t_name, m in variants:
        found = _greedy_pair(m, n, s, s)
        if found:
            verdict = LownessVerdict(
                1, "high", PairWitness(found[0], found[1], t_name), "heuristic-verified", threshold, n
            )
            assert verify_witness(h, verdict)
            return verdict
    bud = _Budget(budget)
    try:
        for t_name, m in variants:
            found = _search_pair(m, n, s, s, bud)
            if found:
                verdict = LownessVerdict(
                    1, "high", PairWitness(found[0], found[1], t_name), "branch-and-bound", threshold, n
                )
                assert verify_witness(h, verdict)
                return verdict
        return LownessVerdict(1, "low", None, "branch-and-bound", threshold, n)
    except _BudgetHit:
        raise BudgetExhausted(
            f"lowness search on {n} nodes exceeded budget {budget} with no witness"
        )


def classify_low_1_exhaustive(
    h: Structure, gf: GrowthFunctions, node_cap: int = 20, pair_limit: int = 10**8
) -> LownessVerdict:
    """Independent oracle: plain subset enumeration, no pruning tricks."""
    n = h.n
    if n == 0:
        return LownessVerdict(1, "low", None, "exhaustive", 0.0, 0, "empty graph")
    threshold, s = side_size(gf, n)
    if 2 * s > n:
        return LownessVerdict(1, "low", None, "exhaustive", threshold, n, "sides cannot fit")
    if n > node_cap:
        raise OracleTooLarge(f"oracle capped at {node_cap} nodes, got {n}")
    if math.comb(n, s) * n > pair_limit:
        raise OracleTooLarge("oracle subset enumeration too large")
    masks = _graph_masks(h)
    for t_name, m in (("edge", masks), ("non-edge", _complement_masks(masks, n))):
        for combo in itertools.combinations(range(n), s):
            pool = (1 << n) - 1
            for v in combo:
                pool &= m[v]
            if pool.bit_count() >= s:
                verdict = LownessVerdict(
                    1,
                    "high",
                    PairWitness(tuple(v + 1 for v in combo), _bits_to_nodes(pool, s), t_name),
                    "exhaustive",
                    threshold,
                    n,
                )
                assert verify_witness(h, verdict)
                return verdict
    return LownessVerdict(1, "low", None, "exhaustive", threshold, n)


def pattern_length(n: int) -> int:
    """m = floor(ln ln n), or 0 when that is undefined or negative."""
    if n < 3:
        return 0
    inner = math.log(math.log(n))
    return max(0, math.floor(inner))


def pattern_colors(m: int) -> int:
    if m < 2:
        return 1
    return max(0, math.floor(math.log(math.log(m)))) + 1


def _pair_index(m: int) -> List[Tuple[int, int]]:
    return [(l, k) for k in range(1, m + 1) for l in range(k)]


def classify_low_2(h: Structure, gf: GrowthFunctions, budget: int = 10_000_000) -> LownessVerdict:
    """Experimental: pattern search under the documented reading (see README)."""
    n = h.n
    threshold = eval_growth(gf, n)[1] if n >= 1 else 0.0
    m = pattern_length(n)
    if m < 1:
        return LownessVerdict(
            2, "low", None, "branch-and-bound", threshold, n, "pattern length is zero"
        )
    pair_idx = _pair_index(m)
    b_count = len(pair_idx)
    if n < b_count + m:
        return LownessVerdict(
            2, "low", None, "branch-and-bound", threshold, n, "not enough distinct nodes"
        )
    colors = pattern_colors(m)
    masks = _graph_masks(h)
    if colors >= 2:
        # Color each triple by its own cross-edge bit: coherence is immediate.
        anchors = tuple(range(1, m + 1))
        pair_nodes = tuple(
            (l, k, m + 1 + i) for i, (l, k) in enumerate(pair_idx)
        )
        c1 = tuple(
            (
                (l, k, j),
                1 if (masks[node - 1] >> (anchors[j] - 1)) & 1 else 0,
            )
            for (l, k, node) in pair_nodes
            for j in range(m)
        )
        c2 = tuple(((l, j), 0) for l in range(m + 1) for j in range(m))
        witness = PatternWitness(anchors, pair_nodes, c1, c2, colors)
        verdict = LownessVerdict(2, "high", witness, "branch-and-bound", threshold, n, "multi-color")
        assert verify_witness(h, verdict)
        return verdict
    # Single color: the pattern is exactly a homogeneous (b_count x m) pair.
    bud = _Budget(budget)
    try:
        for t_name, mm in (("edge", masks), ("non-edge", _complement_masks(masks, n))):
            found = _greedy_pair(mm, n, m, b_count)
            if found is None:
                found = _search_pair(mm, n, m, b_count, bud)
            if found:
                anchors, b_nodes = found
                pair_nodes = tuple(
                    (l, k, node) for (l, k), node in zip(pair_idx, b_nodes)
                )
                c1 = tuple(((l, k, j), 0) for (l, k) in pair_idx for j in range(m))
                c2 = tuple(((l, j), 0) for l in range(m + 1) for j in range(m))
                witness = PatternWitness(tuple(anchors), pair_nodes, c1, c2, 1)
                verdict = LownessVerdict(
                    2, "high", witness, "branch-and-bound", threshold, n, f"homogeneous {t_name}"
                )
                assert verify_witness(h, verdict)
                return verdict
        return LownessVerdict(2, "low", None, "branch-and-bound", threshold, n)
    except _BudgetHit:
        raise BudgetExhausted(
            f"pattern search on {n} nodes exceeded budget {budget} with no witness"
        )


def _verify_pair(h: Structure, verdict: LownessVerdict) -> bool:
    w = verdict.witness
    if not isinstance(w, PairWitness):
        return False
    _, s = side_size_from_threshold(verdict.threshold)
    a, b = set(w.side_a), set(w.side_b)
    if len(a) != len(w.side_a) or len(b) != len(w.side_b):
        return False
    if len(a) < s or len(b) < s:
        return False
    if a & b:
        return False
    if any(not (1 <= v <= h.n) for v in a | b):
        return False
    want = w.t == "edge"
    for x in a:
        for y in b:
            if h.has_edge(x, y) != want:
                return False
    return True


def side_size_from_threshold(threshold: float) -> Tuple[float, int]:
    if math.isclose(threshold, round(threshold), rel_tol=1e-12, abs_tol=1e-12):
        s = int(round(threshold))
    else:
        s = math.ceil(threshold)
    return threshold, max(1, s)


def _verify_pattern(h: Structure, verdict: LownessVerdict) -> bool:
    w = verdict.witness
    if not isinstance(w, PatternWitness):
        return False
    m = pattern_length(h.n)
    if m < 1 or len(w.anchors) != m:
        return False
    if [((l, k)) for (l, k, _) in w.pairs] != _pair_index(m):
        return False
    nodes = list(w.anchors) + [node for (_, _, node) in w.pairs]
    if len(set(nodes)) != len(nodes):
        return False
    if any(not (1 <= v <= h.n) for v in nodes):
        return False
    colors = pattern_colors(m)
    if w.colors != colors:
        return False
    c1 = dict(w.c1)
    c2 = dict(w.c2)
    if any(not (0 <= c < colors) for c in list(c1.values()) + list(c2.values())):
        return False
    by_index = {(l, k): node for (l, k, node) in w.pairs}
    triples = [(l, k, j) for (l, k) in _pair_index(m) for j in range(m)]
    for t1 in triples:
        for t2 in triples:
            l1, k1, j1 = t1
            l2, k2, j2 = t2
            if (
                c1.get(t1) == c1.get(t2)
                and c2.get((l1, j1)) == c2.get((l2, j2))
                and c2.get((k1, j1)) == c2.get((k2, j2))
            ):
                e1 = h.has_edge(by_index[(l1, k1)], w.anchors[j1])
                e2 = h.has_edge(by_index[(l2, k2)], w.anchors[j2])
                if e1 != e2:
                    return False
    return True


def verify_witness(h: Structure, verdict: LownessVerdict) -> bool:
    """Pure recheck of a high witness; never consults the search."""
    if verdict.verdict != "high" or verdict.witness is None:
        return False
    if verdict.iota == 1:
        return _verify_pair(h, verdict)
    if verdict.iota == 2:
        return _verify_pattern(h, verdict)
    return False


def classify_low(h: Structure, iota: int, gf: GrowthFunctions, budget: int = 10_000_000) -> LownessVerdict:
    if iota == 1:
        return classify_low_1(h, gf, budget)
    if iota == 2:
        return classify_low_2(h, gf, budget)
    raise ValueError(f"iota must be 1 or 2, got {iota}")
