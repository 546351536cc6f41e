"""Evaluation of first-order formulas extended by the graph-class quantifier,
rank-limited type partitions, and the definability checker.

The quantifier case: Q applied to a registered scheme at a parameter tuple
holds when the host admits the tuple and the derived graph's isomorphism
class belongs to the random class.  Everything else is the usual Tarskian
recursion, with universal quantification as surface sugar over not/exists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .formulas import (
    And,
    Atom,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    QApply,
    disj,
    eval_formula,
    free_vars,
)
from .lowness import BudgetExhausted
from .quantifier import QuantifierClass, membership
from .schemes import Scheme, build_interpreted_graph
from .structures import Structure
from .taxonomy import (
    _syntactically_used_params,
    decompose_to_complete_reduced,
    is_complete,
    is_degenerated,
    is_trivial,
)


class TrivialScheme(ValueError):
    pass


class DegenerateScheme(ValueError):
    pass


class EvaluationAborted(RuntimeError):
    pass


@dataclass
class SchemeRegistry:
    schemes: Dict[str, Scheme] = field(default_factory=dict)

    def register(self, s: Scheme) -> Scheme:
        self.schemes[s.name] = s
        return s

    def get(self, name: str) -> Scheme:
        if name not in self.schemes:
            raise KeyError(f"no scheme named {name!r} is registered")
        return self.schemes[name]

    def names(self) -> Tuple[str, ...]:
        return tuple(sorted(self.schemes))


def elaborate(f: Formula, registry: SchemeRegistry) -> Formula:
    """Rewrite every quantifier application onto complete reduced schemes.

    Already-canonical schemes are left alone; others are decomposed, the
    members registered, and the application replaced by the disjunction over
    members with the parameter variables restricted accordingly.  Trivial and
    degenerated schemes are rejected.
    """
    if isinstance(f, (Atom, Eq)):
        return f
    if isinstance(f, Not):
        return Not(elaborate(f.body, registry))
    if isinstance(f, And):
        return And(elaborate(f.left, registry), elaborate(f.right, registry))
    if isinstance(f, Or):
        return Or(elaborate(f.left, registry), elaborate(f.right, registry))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, elaborate(f.body, registry))
    if isinstance(f, QApply):
        s = registry.get(f.scheme)
        if is_trivial(s):
            raise TrivialScheme(f"scheme {s.name!r} has only empty blocks")
        if is_degenerated(s):
            raise DegenerateScheme(f"scheme {s.name!r} admits no parameters")
        if is_complete(s) and len(_syntactically_used_params(s)) == len(s.params):
            return f
        members = decompose_to_complete_reduced(s)
        parts = []
        for member in members:
            registry.register(member)
            args = tuple(f.params[s.params.index(p)] for p in member.params)
            parts.append(QApply(member.name, args))
        return disj(parts)
    raise TypeError(f"not a formula node: {f!r}")


def evaluate(
    m: Structure,
    f: Formula,
    asg: Dict[str, int],
    q: QuantifierClass,
    registry: SchemeRegistry,
    memo: Optional[Dict] = None,
) -> bool:
    """Truth of f in m under asg, with Q interpreted through the registry.

    Raises EvaluationAborted when the low/high status of a derived graph
    cannot be resolved within the quantifier's budget.
    """

    def handler(name: str, values: Tuple[int, ...]) -> bool:
        s = registry.get(name)
        if len(values) != len(s.params):
            raise ValueError(
                f"Q[{name}] applied to {len(values)} parameters, scheme takes {len(s.params)}"
            )
        if len(set(values)) != len(values):
            return False
        penv = dict(zip(s.params, values))
        if not eval_formula(m, s.param_formula, penv):
            return False
        derived = build_interpreted_graph(m, s, values).to_structure()
        try:
            return membership(q, derived)
        except BudgetExhausted as exc:
            raise EvaluationAborted(str(exc)) from exc

    return eval_formula(m, f, asg, qapply=handler, memo=memo)


def defined_set(
    m: Structure, f: Formula, q: QuantifierClass, registry: SchemeRegistry
) -> FrozenSet[int]:
    """The set the one-free-variable formula carves out of the universe."""
    free = free_vars(f) - {"_t"}
    if len(free) != 1:
        raise ValueError(f"defined_set needs exactly one free variable, got {sorted(free)}")
    (var,) = free
    memo: Dict = {}
    return frozenset(
        a for a in m.universe() if evaluate(m, f, {var: a}, q, registry, memo=memo)
    )


# Rank-limited types.


def atomic_signature(m: Structure, tup: Tuple[int, ...]):
    eq = tuple(tup.index(v) for v in tup)
    rels = []
    for kind in m.sig:
        rel = m.rel(kind.id)
        hits = frozenset(
            idx
            for idx in itertools.product(range(len(tup)), repeat=kind.arity)
            if tuple(tup[i] for i in idx) in rel
        )
        rels.append((kind.id, hits))
    return (eq, tuple(rels))


@dataclass(frozen=True)
class TypePartition:
    rank: int
    tuple_len: int
    classes: Tuple[FrozenSet[Tuple[int, ...]], ...]

    def element_classes(self) -> Tuple[FrozenSet[int], ...]:
        if self.tuple_len != 1:
            raise ValueError("element classes need tuple_len == 1")
        return tuple(frozenset(t[0] for t in cls) for cls in self.classes)

    def class_of(self, tup: Tuple[int, ...]) -> FrozenSet[Tuple[int, ...]]:
        for cls in self.classes:
            if tup in cls:
                return cls
        raise KeyError(f"{tup} not in any class")


def type_partition(
    m: Structure, rank: int, tuple_len: int = 1, budget: int = 1_000_000
) -> TypePartition:
    """Tuples indistinguishable by formulas of quantifier rank at most `rank`.

    The signature of a tuple is its atomic data plus, recursively, the set of
    signatures of its one-point extensions.
    """
    cost = sum(max(m.n, 1) ** (tuple_len + d) for d in range(rank + 1))
    if cost > budget:
        raise BudgetExhausted(
            f"type partition needs about {cost} signatures, budget is {budget}"
        )
    memo: Dict = {}

    def tp(tup: Tuple[int, ...], r: int):
        key = (tup, r)
        if key in memo:
            return memo[key]
        if r == 0:
            sig = ("atomic", atomic_signature(m, tup))
        else:
            sig = (
                "ext",
                atomic_signature(m, tup),
                frozenset(tp(tup + (c,), r - 1) for c in m.universe()),
            )
        memo[key] = sig
        return sig

    buckets: Dict[object, List[Tuple[int, ...]]] = {}
    for tup in itertools.product(m.universe(), repeat=tuple_len):
        buckets.setdefault(tp(tup, rank), []).append(tup)
    classes = sorted((frozenset(v) for v in buckets.values()), key=lambda c: min(c))
    return TypePartition(rank, tuple_len, tuple(classes))


def fo_definable(m: Structure, subset: Iterable[int], rank: int, budget: int = 1_000_000) -> bool:
    """Whether the node set is a union of rank-r classes (parameter-free)."""
    wanted = frozenset(subset)
    part = type_partition(m, rank, 1, budget)
    for cls in part.element_classes():
        if cls & wanted and cls - wanted:
            return False
    return True


def fo_definable_with_params(
    m: Structure,
    subset: Iterable[int],
    rank: int,
    max_params: int = 1,
    budget: int = 1_000_000,
) -> bool:
    """Definability allowing up to max_params parameters: for some tuple of
    parameters, the set is a union of rank-r classes of nodes over them."""
    wanted = frozenset(subset)
    if fo_definable(m, wanted, rank, budget):
        return True
    for p in range(1, max_params + 1):
        part = type_partition(m, rank, 1 + p, budget)
        for params in itertools.product(m.universe(), repeat=p):
            index: Dict[FrozenSet[Tuple[int, ...]], set] = {}
            ok = True
            for a in m.universe():
                cls = part.class_of((a,) + params)
                index.setdefault(cls, set()).add(a)
            for members in index.values():
                if members & wanted and members - wanted:
                    ok = False
                    break
            if ok:
                return True
    return False


def check_extension_axiom(g: Structure, k: int, l: int) -> bool:
    """Every disjoint (k, l) pair of node sets has a fresh common extension:
    some z adjacent to all of the first set and none of the second."""
    if k + l >= g.n:
        raise ValueError(f"extension axiom needs k+l < n, got k={k}, l={l}, n={g.n}")
    universe = list(g.universe())
    for xs in itertools.combinations(universe, k):
        rest = [v for v in universe if v not in xs]
        for ys in itertools.combinations(rest, l):
            taken = set(xs) | set(ys)
            for z in universe:
                if z in taken:
                    continue
                if all(g.has_edge(z, x) for x in xs) and not any(
                    g.has_edge(z, y) for y in ys
                ):
                    break
            else:
                return False
    return True
