"""Canonical forms for finite graphs and enumeration up to isomorphism.

The exact form is the lexicographically minimal upper-triangle adjacency
bitstring over all vertex orderings compatible with the stable refinement
partition (classes in canonical order, free within a class).  That set of
orderings is relabeling-invariant, so equal forms mean isomorphic graphs
and vice versa.  Three paths compute it:

  * the refinement partition is discrete: one ordering, read the bits off;
  * small graphs: branch-and-bound string minimization, with interchangeable
    twin vertices collapsed so edgeless and complete regions do not explode;
  * large graphs with symmetric refinement: a digest of refinement plus
    one-vertex individualization signatures.  This last form is still
    relabeling-invariant but may identify non-isomorphic graphs, so it is
    flagged as non-exact.

Enumeration builds representatives size by size: every graph on n nodes
extends a graph on n-1 nodes, so extending each (n-1)-representative by one
vertex in all 2**(n-1) ways and deduplicating by canonical form is complete.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .structures import Structure

DEFAULT_EXACT_CAP = 10


@dataclass(frozen=True, order=True)
class CanonicalForm:
    n: int
    bits: bytes
    exact: bool = True

    @property
    def hex(self) -> str:
        return self.bits.hex()


def _masks(g: Structure) -> List[int]:
    masks = [0] * g.n
    for a, b in g.edges():
        masks[a - 1] |= 1 << (b - 1)
        masks[b - 1] |= 1 << (a - 1)
    return masks


def _refine(masks: List[int], n: int, init: Optional[List[int]] = None) -> List[int]:
    """Stable color refinement with canonical integer ranks."""
    colors = list(init) if init is not None else [0] * n
    adj = [[u for u in range(n) if (masks[v] >> u) & 1] for v in range(n)]
    while True:
        keys = [
            (colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(n)
        ]
        ranking = {key: i for i, key in enumerate(sorted(set(keys)))}
        new = [ranking[k] for k in keys]
        if len(set(new)) == len(set(colors)) and new == colors:
            break
        if len(set(new)) == len(set(colors)):
            colors = new
            break
        colors = new
    return colors


def _pack_bits(bits: List[int]) -> bytes:
    out = bytearray((len(bits) + 7) // 8)
    for i, b in enumerate(bits):
        if b:
            out[i >> 3] |= 0x80 >> (i & 7)
    return bytes(out)


def _order_bits(masks: List[int], order: List[int]) -> List[int]:
    bits = []
    for j in range(1, len(order)):
        mj = masks[order[j]]
        for i in range(j):
            bits.append((mj >> order[i]) & 1)
    return bits


def _twin_classes(masks: List[int], n: int) -> List[int]:
    """Union-find over open and closed twins; twins are interchangeable."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    open_key: Dict[int, int] = {}
    closed_key: Dict[int, int] = {}
    for v in range(n):
        k1 = masks[v]
        k2 = masks[v] | (1 << v)
        if k1 in open_key:
            union(open_key[k1], v)
        else:
            open_key[k1] = v
        if k2 in closed_key:
            union(closed_key[k2], v)
        else:
            closed_key[k2] = v
    return [find(v) for v in range(n)]


def _exact_min_bits(masks: List[int], n: int, colors: List[int]) -> List[int]:
    """Minimal triangle bitstring over class-compatible orderings."""
    classes: Dict[int, List[int]] = {}
    for v in range(n):
        classes.setdefault(colors[v], []).append(v)
    class_list = [sorted(classes[c]) for c in sorted(classes)]
    twin = _twin_classes(masks, n)

    best: Optional[List[int]] = None
    order: List[int] = []
    bits: List[int] = []

    def rec(ci: int, remaining: List[List[int]], better: bool):
        nonlocal best
        if ci == len(class_list):
            if better or best is None:
                best = bits.copy()
            return
        pool = remaining[ci]
        if not pool:
            rec(ci + 1, remaining, better)
            return
        pos = len(order)
        start = pos * (pos - 1) // 2
        tried_twins = set()
        for idx, v in enumerate(pool):
            if twin[v] in tried_twins:
                continue
            tried_twins.add(twin[v])
            mv = masks[v]
            col = [(mv >> u) & 1 for u in order]
            sub_better = better
            if not sub_better and best is not None:
                seg = best[start : start + pos]
                if col > seg:
                    continue
                if col < seg:
                    sub_better = True
            order.append(v)
            bits.extend(col)
            remaining[ci] = pool[:idx] + pool[idx + 1 :]
            rec(ci, remaining, sub_better)
            remaining[ci] = pool
            del bits[len(bits) - pos :]
            order.pop()

    rec(0, class_list, False)
    assert best is not None
    return best


def _signature_digest(masks: List[int], n: int, colors: List[int]) -> bytes:
    """Relabeling-invariant digest: refinement plus one-vertex individualization."""
    per_vertex = []
    for v in range(n):
        init = [(2 * c + (1 if u == v else 0)) for u, c in enumerate(colors)]
        ranks = {x: i for i, x in enumerate(sorted(set(init)))}
        refined = _refine(masks, n, [ranks[x] for x in init])
        per_vertex.append((colors[v], tuple(sorted(refined))))
    payload = repr((n, tuple(sorted(colors)), tuple(sorted(per_vertex))))
    return hashlib.blake2b(payload.encode(), digest_size=16).digest()


def canonical_form(g: Structure, exact_cap: int = DEFAULT_EXACT_CAP) -> CanonicalForm:
    if not g.is_graph():
        raise ValueError("canonical forms are defined for plain graphs")
    n = g.n
    if n <= 1:
        return CanonicalForm(n, b"", True)
    masks = _masks(g)
    colors = _refine(masks, n)
    if len(set(colors)) == n:
        order = sorted(range(n), key=lambda v: colors[v])
        return CanonicalForm(n, _pack_bits(_order_bits(masks, order)), True)
    if n <= exact_cap:
        return CanonicalForm(n, _pack_bits(_exact_min_bits(masks, n, colors)), True)
    return CanonicalForm(n, _signature_digest(masks, n, colors), False)


def graph_from_canonical(cf: CanonicalForm) -> Structure:
    """Rebuild a representative graph from an exact form."""
    if not cf.exact:
        raise ValueError("cannot rebuild a graph from a non-exact form")
    n = cf.n
    edges = []
    pos = 0
    for j in range(1, n):
        for i in range(j):
            byte = cf.bits[pos >> 3] if pos >> 3 < len(cf.bits) else 0
            if (byte >> (7 - (pos & 7))) & 1:
                edges.append((i + 1, j + 1))
            pos += 1
    return Structure.graph(n, edges)


_LEVELS: List[List[Tuple[bytes, Structure]]] = []


def _ensure_levels(max_n: int, exact_cap: int) -> None:
    if not _LEVELS:
        _LEVELS.append([(b"", Structure.graph(0))])
    while len(_LEVELS) <= max_n:
        n = len(_LEVELS)
        found: Dict[bytes, Structure] = {}
        for _, smaller in _LEVELS[n - 1]:
            base_edges = list(smaller.edges())
            for mask in range(1 << (n - 1)):
                edges = base_edges + [
                    (i + 1, n) for i in range(n - 1) if (mask >> i) & 1
                ]
                candidate = Structure.graph(n, edges)
                form = canonical_form(candidate, exact_cap)
                if not form.exact:
                    raise ValueError(
                        f"enumeration needs exact forms; raise exact_cap above {n}"
                    )
                if form.bits not in found:
                    found[form.bits] = candidate
        _LEVELS.append(sorted(found.items()))


def enumerate_graph_reps(
    max_n: int, exact_cap: int = DEFAULT_EXACT_CAP
) -> Iterator[Tuple[CanonicalForm, Structure]]:
    """(form, representative) per isomorphism class, ordered by (n, bits)."""
    if max_n > exact_cap:
        raise ValueError(f"enumeration needs max_n <= exact_cap ({exact_cap})")
    _ensure_levels(max_n, exact_cap)
    for n in range(max_n + 1):
        for bits, rep in _LEVELS[n]:
            yield CanonicalForm(n, bits, True), rep


def enumerate_graphs(max_n: int, exact_cap: int = DEFAULT_EXACT_CAP) -> Iterator[CanonicalForm]:
    """One canonical form per isomorphism class, ordered by (n, bits)."""
    for form, _ in enumerate_graph_reps(max_n, exact_cap):
        yield form
