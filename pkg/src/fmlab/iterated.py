"""Iterated random drawing: a base random graph expanded level by level.

Each level adds relation kinds over the vocabulary drawn so far.  A tuple
enters a new relation only if it passes the kind's admission formula; the
inclusion probability is h(total count of its counting-formula satisfiers,
per symmetry orbit).  The alternative drawing replaces that probability by
1/g(m) where m is the node count of the graph a bound scheme derives at the
tuple (clamped to 1 when the derived graph is empty).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .formulas import Formula, eval_formula, free_vars, is_quantifier_free
from .growth import GrowthFunctions, PAPER_DEFAULT
from .kinds import GRAPH_KIND_ID, GRAPH_SIG, Kind, KindSequence, Perm, close_group, orbit_of
from .rng import bernoulli, derive_seed
from .schemes import build_interpreted_graph
from .structures import ConstantProfile, Structure, draw_structure, iter_orbit_reps, iter_tuples
from .typeenum import entails, identity_assignment, type_structures


@dataclass(frozen=True)
class CountingFormula:
    formula: Formula
    vars: Tuple[str, ...]
    generators: Tuple[Perm, ...] = ()


@dataclass(frozen=True)
class NewKind:
    kind: Kind
    param_vars: Tuple[str, ...]
    admission: Formula
    counters: Tuple[CountingFormula, ...] = ()
    scheme_name: Optional[str] = None  # binding for the 1/g drawing variant

    def __post_init__(self):
        if len(self.param_vars) != self.kind.arity:
            raise ValueError(
                f"kind {self.kind.id!r}: {len(self.param_vars)} parameter variables "
                f"for arity {self.kind.arity}"
            )


@dataclass(frozen=True)
class UDescriptor:
    base_q: float
    levels: Tuple[Tuple[NewKind, ...], ...] = ()

    def __post_init__(self):
        if not (0.0 < self.base_q <= 1.0):
            raise ValueError("base edge probability must be in (0, 1]")

    def level_count(self) -> int:
        return len(self.levels)

    def signature_at(self, level: int) -> KindSequence:
        sig = GRAPH_SIG
        for li in range(level):
            sig = sig.extended(*[nk.kind for nk in self.levels[li]])
        return sig

    def full_signature(self) -> KindSequence:
        return self.signature_at(len(self.levels))


def validate_u(u: UDescriptor, singleton_counters: bool = False) -> List[str]:
    """Structural and semantic problems with the descriptor, as strings.

    Checks: new kinds are fresh, formulas are quantifier-free over the prior
    vocabulary with the right free variables, counting formulas entail the
    admission formula and are invariant under their groups.  With
    singleton_counters set, counting variable blocks must have length one.
    """
    problems: List[str] = []
    sig = GRAPH_SIG
    for li, level in enumerate(u.levels):
        for nk in level:
            if sig.has(nk.kind.id):
                problems.append(f"level {li}: kind {nk.kind.id!r} already present")
                continue
            names = nk.param_vars
            if len(set(names)) != len(names):
                problems.append(f"level {li}: repeated parameter variables for {nk.kind.id!r}")
            if not is_quantifier_free(nk.admission):
                problems.append(f"level {li}: admission for {nk.kind.id!r} not quantifier free")
            extra = free_vars(nk.admission) - set(names) - {"_t"}
            if extra:
                problems.append(
                    f"level {li}: admission for {nk.kind.id!r} uses {sorted(extra)}"
                )
            for ci, counter in enumerate(nk.counters):
                if singleton_counters and len(counter.vars) != 1:
                    problems.append(
                        f"level {li}: counter {ci} of {nk.kind.id!r} must have a single variable"
                    )
                if not is_quantifier_free(counter.formula):
                    problems.append(
                        f"level {li}: counter {ci} of {nk.kind.id!r} not quantifier free"
                    )
                allowed = set(counter.vars) | set(names) | {"_t"}
                extra = free_vars(counter.formula) - allowed
                if extra:
                    problems.append(
                        f"level {li}: counter {ci} of {nk.kind.id!r} uses {sorted(extra)}"
                    )
                combined = tuple(counter.vars) + tuple(names)
                try:
                    if not entails(counter.formula, nk.admission, combined, sig):
                        problems.append(
                            f"level {li}: counter {ci} of {nk.kind.id!r} does not entail the admission"
                        )
                except ValueError as exc:
                    problems.append(f"level {li}: counter {ci}: {exc}")
                group = close_group(tuple(tuple(g) for g in counter.generators), len(counter.vars))
                asg = identity_assignment(combined)
                for t in type_structures(sig, len(combined)):
                    base = eval_formula(t, counter.formula, asg)
                    for gen in counter.generators:
                        permuted = dict(asg)
                        for pos, var in enumerate(counter.vars):
                            permuted[var] = asg[counter.vars[gen[pos]]]
                        if eval_formula(t, counter.formula, permuted) != base:
                            problems.append(
                                f"level {li}: counter {ci} of {nk.kind.id!r} not invariant under {gen}"
                            )
                            break
                    else:
                        continue
                    break
        sig = sig.extended(*[nk.kind for nk in level])
    return problems


def _count_orbit_satisfiers(m: Structure, counter: CountingFormula, penv: dict) -> int:
    group_order = len(close_group(tuple(tuple(g) for g in counter.generators), len(counter.vars)))
    count = 0
    for tup in iter_tuples(m.n, len(counter.vars)):
        env = dict(penv)
        env.update(zip(counter.vars, tup))
        if eval_formula(m, counter.formula, env):
            count += 1
    # Repetition-free tuples have trivial stabilizers, so orbits have full size.
    assert count % group_order == 0, (count, group_order)
    return count // group_order


def iterated_draw(
    u: UDescriptor, n: int, seed: int, gf: GrowthFunctions = PAPER_DEFAULT
) -> Structure:
    """Level-by-level sample; with no levels this is exactly the base graph
    drawing (bit for bit, same seed convention)."""
    m = draw_structure(GRAPH_SIG, ConstantProfile.of({GRAPH_KIND_ID: u.base_q}), n, seed)
    sig = GRAPH_SIG
    for li, level in enumerate(u.levels):
        sig = sig.extended(*[nk.kind for nk in level])
        rels = {kind_id: tuples for kind_id, tuples in m.relations}
        for nk in level:
            level_seed = derive_seed(seed, "level", li, nk.kind.id)
            chosen = set()
            for rep in iter_orbit_reps(n, nk.kind):
                penv = dict(zip(nk.param_vars, rep))
                if not eval_formula(m, nk.admission, penv):
                    continue
                total = sum(_count_orbit_satisfiers(m, c, penv) for c in nk.counters)
                p = gf.h(max(1, total))
                if bernoulli(level_seed, p, rep):
                    chosen.update(orbit_of(nk.kind.group, rep))
            rels[nk.kind.id] = frozenset(chosen)
        m = Structure.make(n, sig, rels)
    return m


def iterated_draw_b17(
    u: UDescriptor,
    n: int,
    seed: int,
    registry,
    gf: GrowthFunctions = PAPER_DEFAULT,
) -> Structure:
    """The 1/g variant: every new kind is bound to a scheme; a tuple the
    scheme admits is drawn with probability 1/g(node count of the derived
    graph), the count clamped to at least 1."""
    m = draw_structure(GRAPH_SIG, ConstantProfile.of({GRAPH_KIND_ID: u.base_q}), n, seed)
    sig = GRAPH_SIG
    for li, level in enumerate(u.levels):
        sig = sig.extended(*[nk.kind for nk in level])
        rels = {kind_id: tuples for kind_id, tuples in m.relations}
        for nk in level:
            if nk.scheme_name is None:
                raise ValueError(f"kind {nk.kind.id!r} has no scheme binding")
            scheme = registry.get(nk.scheme_name)
            if len(scheme.params) != nk.kind.arity:
                raise ValueError(
                    f"kind {nk.kind.id!r}: scheme {scheme.name!r} takes "
                    f"{len(scheme.params)} parameters, arity is {nk.kind.arity}"
                )
            level_seed = derive_seed(seed, "level", li, nk.kind.id)
            chosen = set()
            for rep in iter_orbit_reps(n, nk.kind):
                penv = dict(zip(scheme.params, rep))
                if not eval_formula(m, scheme.param_formula, penv):
                    continue
                derived = build_interpreted_graph(m, scheme, rep)
                p = 1.0 / gf.g(max(1, derived.node_count))
                if bernoulli(level_seed, p, rep):
                    chosen.update(orbit_of(nk.kind.group, rep))
            rels[nk.kind.id] = frozenset(chosen)
        m = Structure.make(n, sig, rels)
    return m
