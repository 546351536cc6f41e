"""Finite invariant structures and their seeded random drawing.

A structure lives on universe {1..n}.  Every relation is irreflexive
(tuples have no repeated entries) and invariant under its kind's group,
so membership is a property of group orbits.  Drawing flips one coin per
orbit, keyed by (seed, kind id, minimal orbit representative), which makes
results independent of enumeration order and reproducible bit for bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple

from .growth import GrowthFunctions
from .kinds import GRAPH_KIND_ID, GRAPH_SIG, Kind, KindSequence, apply_perm, min_rep, orbit_of
from .rng import bernoulli


class EmptyUniverseError(ValueError):
    pass


Relations = Tuple[Tuple[str, FrozenSet[Tuple[int, ...]]], ...]


def _freeze_relations(rels: Mapping[str, Iterable[Tuple[int, ...]]]) -> Relations:
    return tuple(
        (kind_id, frozenset(tuple(t) for t in tuples))
        for kind_id, tuples in sorted(rels.items())
    )


@dataclass(frozen=True)
class Structure:
    """Immutable finite model over a kind sequence; universe is {1..n}."""

    n: int
    sig: KindSequence
    relations: Relations

    @staticmethod
    def make(n: int, sig: KindSequence, rels: Mapping[str, Iterable[Tuple[int, ...]]]) -> "Structure":
        filled = {k.id: frozenset() for k in sig}
        for kind_id, tuples in rels.items():
            if kind_id not in filled:
                raise KeyError(f"relation for unknown kind {kind_id!r}")
            filled[kind_id] = tuples
        return Structure(n, sig, _freeze_relations(filled))

    def rel(self, kind_id: str) -> FrozenSet[Tuple[int, ...]]:
        for kid, tuples in self.relations:
            if kid == kind_id:
                return tuples
        raise KeyError(f"no relation for kind {kind_id!r}")

    def universe(self) -> range:
        return range(1, self.n + 1)

    # Graph conveniences (single kind "E", arity 2, symmetric).

    @staticmethod
    def graph(n: int, edges: Iterable[Tuple[int, int]] = ()) -> "Structure":
        closed = set()
        for a, b in edges:
            if a == b:
                raise ValueError(f"loop ({a},{b}) not allowed")
            if not (1 <= a <= n and 1 <= b <= n):
                raise ValueError(f"edge ({a},{b}) outside universe 1..{n}")
            closed.add((a, b))
            closed.add((b, a))
        return Structure.make(n, GRAPH_SIG, {GRAPH_KIND_ID: frozenset(closed)})

    def is_graph(self) -> bool:
        return self.sig == GRAPH_SIG

    def has_edge(self, a: int, b: int) -> bool:
        return (a, b) in self.rel(GRAPH_KIND_ID)

    def edges(self) -> Tuple[Tuple[int, int], ...]:
        """Sorted (a, b) pairs with a < b."""
        return tuple(sorted((a, b) for (a, b) in self.rel(GRAPH_KIND_ID) if a < b))

    def neighbors(self, v: int) -> FrozenSet[int]:
        return frozenset(b for (a, b) in self.rel(GRAPH_KIND_ID) if a == v)

    def induced_graph(self, nodes: Iterable[int]) -> "Structure":
        """Induced subgraph relabeled to 1..m following the sorted node order."""
        order = sorted(set(nodes))
        index = {v: i + 1 for i, v in enumerate(order)}
        edges = [
            (index[a], index[b])
            for (a, b) in self.rel(GRAPH_KIND_ID)
            if a in index and b in index and a < b
        ]
        return Structure.graph(len(order), edges)

    def complement_graph(self) -> "Structure":
        edges = [
            (a, b)
            for a, b in itertools.combinations(self.universe(), 2)
            if not self.has_edge(a, b)
        ]
        return Structure.graph(self.n, edges)

    def relabeled_graph(self, mapping: Mapping[int, int]) -> "Structure":
        edges = [(mapping[a], mapping[b]) for (a, b) in self.edges()]
        return Structure.graph(self.n, edges)


def iter_tuples(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """All repetition-free k-tuples over {1..n} in lexicographic order."""
    return itertools.permutations(range(1, n + 1), k)


def iter_orbit_reps(n: int, kind: Kind) -> Iterator[Tuple[int, ...]]:
    """Lexicographically minimal representative of each orbit of repetition-free tuples."""
    group = kind.group
    for tup in iter_tuples(n, kind.arity):
        if min_rep(group, tup) == tup:
            yield tup


def count_orbits(n: int, kind: Kind) -> int:
    if kind.arity == 0:
        return 1
    total = 1
    for i in range(n, n - kind.arity, -1):
        total *= i
    if total == 0:
        return 0
    # Repetition-free tuples have trivial stabilizers, so orbits all have size |K|.
    assert total % len(kind.group) == 0
    return total // len(kind.group)


def validate_structure(m: Structure) -> list:
    """All irreflexivity/invariance/range violations, as readable strings."""
    violations = []
    seen_ids = set()
    for kind_id, tuples in m.relations:
        seen_ids.add(kind_id)
        if not m.sig.has(kind_id):
            violations.append(f"relation {kind_id!r} not in signature")
            continue
        kind = m.sig.kind(kind_id)
        group = kind.group
        for tup in tuples:
            if len(tup) != kind.arity:
                violations.append(f"{kind_id}{tup}: arity {len(tup)} != {kind.arity}")
                continue
            if any(not (1 <= v <= m.n) for v in tup):
                violations.append(f"{kind_id}{tup}: entry outside universe 1..{m.n}")
                continue
            if len(set(tup)) != len(tup):
                violations.append(f"{kind_id}{tup}: repeated entry (irreflexivity)")
                continue
            for perm in group:
                image = apply_perm(perm, tup)
                if image not in tuples:
                    violations.append(
                        f"{kind_id}{tup}: missing orbit member {image} (invariance)"
                    )
                    break
    for kind in m.sig:
        if kind.id not in seen_ids:
            violations.append(f"no relation entry for kind {kind.id!r}")
    return violations


# Probability profiles.  prob(kind_id, n) must land in (0, 1]; the value 1.0
# is admitted so degenerate "always draw" profiles can be exercised in tests.


@dataclass(frozen=True)
class ConstantProfile:
    """One fixed probability per kind, independent of n."""

    q: Tuple[Tuple[str, float], ...]

    profile_class = "P0"

    @staticmethod
    def of(mapping: Mapping[str, float]) -> "ConstantProfile":
        return ConstantProfile(tuple(sorted(mapping.items())))

    def prob(self, kind_id: str, n: int) -> float:
        for kid, p in self.q:
            if kid == kind_id:
                return _check_prob(p, kind_id, n)
        raise KeyError(f"profile does not cover kind {kind_id!r}")

    def as_split(self, gf: GrowthFunctions) -> "SplitProfile":
        return SplitProfile(self.q, frozenset(), gf)


@dataclass(frozen=True)
class TableProfile:
    """Arbitrary (kind, n) -> probability map."""

    fn: Callable[[str, int], float] = field(compare=False)

    profile_class = "P1"

    def prob(self, kind_id: str, n: int) -> float:
        return _check_prob(self.fn(kind_id, n), kind_id, n)


@dataclass(frozen=True)
class SplitProfile:
    """Base probabilities, with the kinds in `slow` damped by 1/g(n)."""

    base: Tuple[Tuple[str, float], ...]
    slow: FrozenSet[str]
    gf: GrowthFunctions

    profile_class = "P2"

    @staticmethod
    def of(mapping: Mapping[str, float], slow: Iterable[str], gf: GrowthFunctions) -> "SplitProfile":
        return SplitProfile(tuple(sorted(mapping.items())), frozenset(slow), gf)

    def prob(self, kind_id: str, n: int) -> float:
        for kid, p in self.base:
            if kid == kind_id:
                if kind_id in self.slow:
                    p = p / self.gf.g(n)
                return _check_prob(p, kind_id, n)
        raise KeyError(f"profile does not cover kind {kind_id!r}")


def _check_prob(p: float, kind_id: str, n: int) -> float:
    if not (0.0 < p <= 1.0):
        raise ValueError(f"probability {p} for kind {kind_id!r} at n={n} outside (0, 1]")
    return p


Profile = object  # any of the classes above; duck-typed via .prob


def draw_structure(sig: KindSequence, profile, n: int, seed: int) -> Structure:
    """One sample: an independent coin per orbit decides the whole orbit.

    The coin for an orbit is keyed by (kind id, minimal representative), so
    the sample does not depend on iteration order and parallel drawings with
    derived seeds stay independent.
    """
    if n < 0:
        raise ValueError("universe size must be >= 0")
    if n == 0 and any(k.arity >= 1 for k in sig):
        raise EmptyUniverseError(
            "cannot draw relations of positive arity on an empty universe"
        )
    rels: Dict[str, FrozenSet[Tuple[int, ...]]] = {}
    for kind in sig:
        p = profile.prob(kind.id, n)
        group = kind.group
        chosen = set()
        for rep in iter_orbit_reps(n, kind):
            if bernoulli(seed, p, "draw", kind.id, rep):
                chosen.update(orbit_of(group, rep))
        rels[kind.id] = frozenset(chosen)
    return Structure.make(n, sig, rels)


def draw_random_graph(n: int, q: float, seed: int) -> Structure:
    """Graph on {1..n} with independent edges of probability q."""
    if not (0.0 < q <= 1.0):
        raise ValueError("edge probability must be in (0, 1]")
    return draw_structure(GRAPH_SIG, ConstantProfile.of({GRAPH_KIND_ID: q}), n, seed)
