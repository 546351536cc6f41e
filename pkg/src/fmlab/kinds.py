"""Relation kinds: arity plus a permutation group the relation is invariant under.

A kind sequence is the vocabulary descriptor for the structures in this
package.  The graph vocabulary is the single kind "E" of arity 2 with the
full symmetric group on both positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterator, Tuple

Perm = Tuple[int, ...]


def identity_perm(degree: int) -> Perm:
    return tuple(range(degree))


def compose(p: Perm, q: Perm) -> Perm:
    """Composition acting as (p . q)[i] = q[p[i]] so apply(compose(p,q), t) = apply(q, apply(p, t))."""
    return tuple(q[p[i]] for i in range(len(p)))


def apply_perm(perm: Perm, tup: Tuple[int, ...]) -> Tuple[int, ...]:
    """Permuted tuple with entries b[i] = a[perm[i]]."""
    return tuple(tup[perm[i]] for i in range(len(perm)))


def _is_perm(perm: Perm, degree: int) -> bool:
    return len(perm) == degree and sorted(perm) == list(range(degree))


@lru_cache(maxsize=None)
def close_group(generators: Tuple[Perm, ...], degree: int) -> FrozenSet[Perm]:
    """The subgroup of Sym(degree) generated by the given permutations."""
    for gen in generators:
        if not _is_perm(gen, degree):
            raise ValueError(f"{gen} is not a permutation of degree {degree}")
    elems = {identity_perm(degree)}
    frontier = list(elems)
    while frontier:
        cur = frontier.pop()
        for gen in generators:
            nxt = compose(cur, gen)
            if nxt not in elems:
                elems.add(nxt)
                frontier.append(nxt)
    return frozenset(elems)


def orbit_of(group: FrozenSet[Perm], tup: Tuple[int, ...]) -> FrozenSet[Tuple[int, ...]]:
    return frozenset(apply_perm(p, tup) for p in group)


def min_rep(group: FrozenSet[Perm], tup: Tuple[int, ...]) -> Tuple[int, ...]:
    """Lexicographically minimal member of the orbit; the canonical label."""
    return min(apply_perm(p, tup) for p in group)


@dataclass(frozen=True)
class Kind:
    id: str
    arity: int
    generators: Tuple[Perm, ...] = ()

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("kind arity must be >= 0")
        for gen in self.generators:
            if not _is_perm(tuple(gen), self.arity):
                raise ValueError(
                    f"kind {self.id!r}: generator {gen} is not a permutation of degree {self.arity}"
                )

    @property
    def group(self) -> FrozenSet[Perm]:
        return close_group(tuple(tuple(g) for g in self.generators), self.arity)


GRAPH_KIND_ID = "E"
GRAPH_KIND = Kind(GRAPH_KIND_ID, 2, ((1, 0),))


def is_graph_kind(kind: Kind) -> bool:
    return kind.arity == 2 and kind.group == close_group(((1, 0),), 2)


@dataclass(frozen=True)
class KindSequence:
    kinds: Tuple[Kind, ...]

    def __post_init__(self):
        ids = [k.id for k in self.kinds]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate kind ids in {ids}")

    def __iter__(self) -> Iterator[Kind]:
        return iter(self.kinds)

    def __len__(self) -> int:
        return len(self.kinds)

    def ids(self) -> Tuple[str, ...]:
        return tuple(k.id for k in self.kinds)

    def has(self, kind_id: str) -> bool:
        return any(k.id == kind_id for k in self.kinds)

    def kind(self, kind_id: str) -> Kind:
        for k in self.kinds:
            if k.id == kind_id:
                return k
        raise KeyError(f"no kind {kind_id!r} in signature {self.ids()}")

    @property
    def has_graph_kind(self) -> bool:
        return bool(self.kinds) and is_graph_kind(self.kinds[0])

    def extends(self, smaller: "KindSequence") -> bool:
        """True when every kind of `smaller` appears here with identical arity and group."""
        for k in smaller:
            if not self.has(k.id):
                return False
            mine = self.kind(k.id)
            if mine.arity != k.arity or mine.group != k.group:
                return False
        return True

    def extended(self, *new_kinds: Kind) -> "KindSequence":
        return KindSequence(self.kinds + tuple(new_kinds))


GRAPH_SIG = KindSequence((GRAPH_KIND,))
