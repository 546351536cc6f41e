"""Exhaustive enumeration of quantifier-free types of distinct elements.

A "type structure" on v elements is an invariant irreflexive structure with
universe {1..v}; evaluating a quantifier-free formula on it under the
identity assignment decides its truth for any repetition-free tuple with
that atomic type in any structure.  Because random drawings realize every
such type with probability bounded away from zero, satisfiability and
completeness questions about quantifier-free formulas over "generic"
structures reduce to this finite search.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Sequence, Tuple

from .formulas import Atom, Eq, Formula, Not, TRUE, conj, eval_formula
from .kinds import KindSequence, orbit_of
from .structures import Structure, iter_orbit_reps

DEFAULT_LIMIT = 1 << 20

_CACHE: Dict[Tuple[KindSequence, int], Tuple[Structure, ...]] = {}


def count_type_structures(sig: KindSequence, v: int) -> int:
    total = 1
    for kind in sig:
        orbits = sum(1 for _ in iter_orbit_reps(v, kind))
        total *= 1 << orbits
    return total


def type_structures(
    sig: KindSequence, v: int, limit: int = DEFAULT_LIMIT
) -> Tuple[Structure, ...]:
    """Every invariant irreflexive structure with universe {1..v}, cached."""
    key = (sig, v)
    if key in _CACHE:
        return _CACHE[key]
    total = count_type_structures(sig, v)
    if total > limit:
        raise ValueError(
            f"type enumeration over {v} elements needs {total} structures (limit {limit}); "
            "reduce the variable count or raise the limit"
        )
    per_kind = []
    for kind in sig:
        reps = list(iter_orbit_reps(v, kind))
        orbits = [frozenset(orbit_of(kind.group, rep)) for rep in reps]
        per_kind.append((kind.id, orbits))
    out: List[Structure] = []
    masks = [range(1 << len(orbits)) for _, orbits in per_kind]
    for combo in itertools.product(*masks):
        rels = {}
        for (kind_id, orbits), mask in zip(per_kind, combo):
            tuples = set()
            for pos, orb in enumerate(orbits):
                if (mask >> pos) & 1:
                    tuples.update(orb)
            rels[kind_id] = frozenset(tuples)
        out.append(Structure.make(v, sig, rels))
    result = tuple(out)
    _CACHE[key] = result
    return result


def identity_assignment(varnames: Sequence[str]) -> dict:
    return {name: i + 1 for i, name in enumerate(varnames)}


def satisfying_types(
    formula: Formula,
    varnames: Sequence[str],
    sig: KindSequence,
    limit: int = DEFAULT_LIMIT,
) -> List[Structure]:
    """Type structures on len(varnames) distinct elements satisfying the formula."""
    asg = identity_assignment(varnames)
    return [
        t for t in type_structures(sig, len(varnames), limit) if eval_formula(t, formula, asg)
    ]


def atomic_diagram(t: Structure, varnames: Sequence[str]) -> Formula:
    """The complete quantifier-free formula pinning the type of distinct elements.

    Conjunction of pairwise inequalities plus the polarity of every orbit
    representative atom; invariance makes the remaining orbit members
    redundant.
    """
    parts: List[Formula] = []
    for a, b in itertools.combinations(varnames, 2):
        parts.append(Not(Eq(a, b)))
    v = len(varnames)
    for kind in t.sig:
        rel = t.rel(kind.id)
        for rep in iter_orbit_reps(v, kind):
            atom = Atom(kind.id, tuple(varnames[i - 1] for i in rep))
            parts.append(atom if rep in rel else Not(atom))
    if not parts:
        return Eq(varnames[0], varnames[0]) if varnames else TRUE
    return conj(parts)


def distinct_guard(varnames: Sequence[str]):
    """Pairwise-distinctness conjunction, or None when fewer than two names."""
    pairs = list(itertools.combinations(varnames, 2))
    if not pairs:
        return None
    return conj([Not(Eq(a, b)) for a, b in pairs])


def entails(
    premise: Formula,
    conclusion: Formula,
    varnames: Sequence[str],
    sig: KindSequence,
    limit: int = DEFAULT_LIMIT,
) -> bool:
    """premise -> conclusion over all types of distinct elements of the given names."""
    asg = identity_assignment(varnames)
    for t in type_structures(sig, len(varnames), limit):
        if eval_formula(t, premise, asg) and not eval_formula(t, conclusion, asg):
            return False
    return True
