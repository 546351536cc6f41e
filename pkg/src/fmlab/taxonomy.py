"""Scheme taxonomy: trivial, degenerated, complete, weak, reduced, isomorphic.

The syntactic properties (trivial, degenerated, complete) are decided
exactly by finite type enumeration.  The "for every random enough host"
properties are Monte Carlo: they sample hosts at the configured sizes and
return three-valued verdicts carrying evidence, with None meaning the
sampling was inconclusive at the requested confidence.  Hosts are drawn
with a constant probability profile, which is one admissible choice for
the drawings the definitions quantify over.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .formulas import Formula, eval_formula
from .kinds import Perm, apply_perm, min_rep
from .rng import derive_seed, u01
from .schemes import (
    InterpretedGraph,
    Scheme,
    build_interpreted_graph,
    make_scheme,
    primed,
    valid_params,
)
from .structures import ConstantProfile, Structure, draw_structure, iter_tuples
from .typeenum import atomic_diagram, distinct_guard, satisfying_types
from .formulas import And, conj


class DegenerateInput(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    """Three-valued outcome: True/False with a clause tag, or None (undetermined)."""

    value: Optional[bool]
    clause: str = ""
    witness: object = None
    evidence: Tuple = ()


def is_trivial(s: Scheme) -> bool:
    """Every variable block is empty, so derived graphs have bounded size."""
    return s.is_trivial()


def _guarded_params(s: Scheme) -> Formula:
    guard = distinct_guard(s.params)
    return And(s.param_formula, guard) if guard is not None else s.param_formula


def is_degenerated(s: Scheme) -> bool:
    """No repetition-free parameter tuple is admissible in any invariant host."""
    return not satisfying_types(_guarded_params(s), s.params, s.sig)


def _relabel(t: Structure, sigma: Dict[int, int]) -> Structure:
    rels = {
        kind_id: frozenset(tuple(sigma[e] for e in tup) for tup in tuples)
        for kind_id, tuples in t.relations
    }
    return Structure.make(t.n, t.sig, rels)


def node_type_orbits(s: Scheme, i: int) -> List[FrozenSet[Structure]]:
    """Satisfying types of node formula i, grouped by the block symmetry."""
    names = tuple(s.blocks[i]) + s.params
    sats = satisfying_types(s.node_formulas[i], names, s.sig)
    group = s.block_group(i)
    k = len(s.blocks[i])
    remaining = set(sats)
    orbits: List[FrozenSet[Structure]] = []
    while remaining:
        seed_type = remaining.pop()
        orbit = {seed_type}
        frontier = [seed_type]
        while frontier:
            cur = frontier.pop()
            for perm in group:
                # x_l now denotes element perm(l)+1; relabel so the identity
                # assignment describes the same situation.
                sigma = {perm[l] + 1: l + 1 for l in range(k)}
                for e in range(k + 1, len(names) + 1):
                    sigma[e] = e
                image = _relabel(cur, sigma)
                if image in remaining:
                    remaining.remove(image)
                    orbit.add(image)
                    frontier.append(image)
        orbits.append(frozenset(orbit))
    return orbits


def is_complete(s: Scheme) -> bool:
    """Each node formula pins the atomic type of its block plus parameters.

    "Pins" is taken up to the block symmetry group: the satisfying types must
    form exactly one group orbit (and be non-empty, i.e. realizable).
    """
    return all(len(node_type_orbits(s, i)) == 1 for i in range(s.i_count))


def _sample_hosts(s: Scheme, sizes: Sequence[int], trials: int, seed: int, q: float):
    profile = ConstantProfile.of({k.id: q for k in s.sig})
    for n in sizes:
        for t in range(trials):
            yield n, t, draw_structure(s.sig, profile, n, derive_seed(seed, "host", n, t))


def _node_tuples(m: Structure, s: Scheme, i: int, cbar: Tuple[int, ...]) -> List[Tuple[int, ...]]:
    penv = dict(zip(s.params, cbar))
    out = []
    for tup in iter_tuples(m.n, len(s.blocks[i])):
        env = dict(penv)
        env.update(zip(s.blocks[i], tup))
        if eval_formula(m, s.node_formulas[i], env):
            out.append(tup)
    return out


def _edge_value(m: Structure, s: Scheme, i: int, j: int, a: Tuple[int, ...], b: Tuple[int, ...], cbar: Tuple[int, ...]) -> bool:
    env = dict(zip(s.params, cbar))
    env.update(zip(s.blocks[i], a))
    env.update(zip(s.primed_block(j), b))
    return eval_formula(m, s.edge_formulas[i][j], env)


def _capped(items: List, cap: int, seed: int, tag: str) -> List:
    if len(items) <= cap:
        return items
    return sorted(items, key=lambda x: u01(seed, tag, x))[:cap]


MIN_FAMILY = 2  # a homogeneous "pair of families" needs two members a side


def _stub_scan(
    m: Structure,
    s: Scheme,
    i1: int,
    i2: int,
    v1: Tuple[int, ...],
    v2: Tuple[int, ...],
    seed: int,
    param_cap: int = 8,
    stub_cap: int = 48,
) -> Dict[bool, Optional[Tuple]]:
    """For each truth value, a witness that some (params, stubs) choice makes
    every fresh cross pair take that value, or None.

    A family is the node tuples agreeing with a stub on its pinned positions
    and fresh elsewhere (avoiding both stubs' ranges); cross pairs sharing a
    non-pinned element are unconstrained and skipped.
    """
    found: Dict[bool, Optional[Tuple]] = {True: None, False: None}
    g1, g2 = s.block_group(i1), s.block_group(i2)
    for cbar in _capped(valid_params(m, s), param_cap, seed, "params"):
        nodes1 = _node_tuples(m, s, i1, cbar)
        nodes2 = _node_tuples(m, s, i2, cbar)
        if not nodes1 or not nodes2:
            continue
        stubs = _capped(
            list(itertools.product(nodes1, nodes2)), stub_cap, seed, ("stubs", cbar)
        )
        for star1, star2 in stubs:
            excluded = set(star1) | set(star2)
            pinned = {star1[p] for p in v1} | {star2[p] for p in v2}

            def family(nodes, star, v):
                fam = []
                for tup in nodes:
                    if any(tup[p] != star[p] for p in v):
                        continue
                    loose = [tup[p] for p in range(len(tup)) if p not in v]
                    if any(x in excluded for x in loose):
                        continue
                    fam.append(tup)
                return fam

            fam1 = family(nodes1, star1, v1)
            fam2 = family(nodes2, star2, v2)
            if len(fam1) < MIN_FAMILY or len(fam2) < MIN_FAMILY:
                continue
            values = set()
            checked = 0
            for a in fam1:
                for b in fam2:
                    if i1 == i2 and min_rep(g1, a) == min_rep(g2, b):
                        continue
                    shared = set(a) & set(b)
                    if shared - pinned:
                        continue
                    values.add(_edge_value(m, s, i1, i2, a, b, cbar))
                    if len(values) == 2:
                        break
                else:
                    continue
                break
            checked = len(values) > 0
            if checked and len(values) == 1:
                val = values.pop()
                if found[val] is None:
                    found[val] = (cbar, star1, star2)
            if found[True] is not None and found[False] is not None:
                return found
    return found


def _weak_candidates_one(s: Scheme):
    for i1 in range(s.i_count):
        if not s.blocks[i1]:
            continue
        for i2 in range(s.i_count):
            if not s.blocks[i2]:
                continue
            subsets1 = _proper_subsets(len(s.blocks[i1]))
            subsets2 = _proper_subsets(len(s.blocks[i2]))
            for v1 in subsets1:
                for v2 in subsets2:
                    yield i1, i2, v1, v2


def _proper_subsets(k: int) -> List[Tuple[int, ...]]:
    positions = range(k)
    out = []
    for r in range(k):  # proper subsets only
        out.extend(itertools.combinations(positions, r))
    return out


def is_one_weak(
    s: Scheme,
    gf=None,
    trials: int = 5,
    sizes: Sequence[int] = (10, 14),
    seed: int = 0,
    q: float = 0.5,
) -> Verdict:
    """Weakness in the pair sense: empty blocks, unsatisfiable parameters, or
    a homogeneous cross pattern between two pinned-stub families on random
    hosts."""
    if is_trivial(s):
        return Verdict(True, "empty-blocks")
    if is_degenerated(s):
        return Verdict(True, "unsatisfiable-params")
    candidates = list(_weak_candidates_one(s))
    tallies = {
        (cand, tval): [] for cand in candidates for tval in (True, False)
    }
    for n, t, host in _sample_hosts(s, sizes, trials, seed, q):
        for cand in candidates:
            i1, i2, v1, v2 = cand
            scan = _stub_scan(host, s, i1, i2, v1, v2, derive_seed(seed, "scan", n, t))
            for tval in (True, False):
                tallies[(cand, tval)].append((n, scan[tval]))
    evidence = []
    any_undetermined = False
    for (cand, tval), rows in tallies.items():
        hits = sum(1 for _, w in rows if w is not None)
        evidence.append((cand, tval, hits, len(rows)))
        if hits == len(rows):
            example = next(w for _, w in rows if w is not None)
            return Verdict(
                True,
                "homogeneous",
                witness={"t": tval, "i": (cand[0], cand[1]), "v": (cand[2], cand[3]), "example": example},
                evidence=tuple(evidence),
            )
        if hits > 0:
            any_undetermined = True
    if any_undetermined:
        return Verdict(None, "mixed-evidence", evidence=tuple(evidence))
    return Verdict(False, "no-homogeneous-pattern", evidence=tuple(evidence))


def _rich_pair(
    m: Structure, s: Scheme, i1: int, i2: int, seed: int, param_cap: int = 8
) -> Dict[str, bool]:
    """Whether cross pairs between two singleton-block kinds realize each value."""
    g1, g2 = s.block_group(i1), s.block_group(i2)
    saw = {True: False, False: False}
    any_pair = False
    for cbar in _capped(valid_params(m, s), param_cap, seed, "params"):
        nodes1 = _node_tuples(m, s, i1, cbar)
        nodes2 = _node_tuples(m, s, i2, cbar)
        for a in nodes1:
            for b in nodes2:
                if i1 == i2 and min_rep(g1, a) == min_rep(g2, b):
                    continue
                any_pair = True
                saw[_edge_value(m, s, i1, i2, a, b, cbar)] = True
                if saw[True] and saw[False]:
                    return {"pairs": True, "both": True, "edge": True, "non-edge": True}
    return {
        "pairs": any_pair,
        "both": saw[True] and saw[False],
        "edge": saw[True],
        "non-edge": saw[False],
    }


def is_two_weak(
    s: Scheme,
    gf=None,
    trials: int = 5,
    sizes: Sequence[int] = (10, 14),
    seed: int = 0,
    q: float = 0.5,
) -> Verdict:
    """Weakness in the pattern sense: empty blocks, unsatisfiable parameters,
    a block of length two or more, or a cross pattern between singleton-block
    kinds that never realizes both truth values on random hosts."""
    if is_trivial(s):
        return Verdict(True, "empty-blocks")
    if is_degenerated(s):
        return Verdict(True, "unsatisfiable-params")
    for i, block in enumerate(s.blocks):
        if len(block) >= 2:
            return Verdict(True, "long-block", witness={"i": i})
    pairs = [
        (i1, i2)
        for i1 in range(s.i_count)
        for i2 in range(s.i_count)
        if len(s.blocks[i1]) == 1 and len(s.blocks[i2]) == 1
    ]
    if not pairs:
        return Verdict(None, "no-singleton-pairs")
    rows = {pair: [] for pair in pairs}
    for n, t, host in _sample_hosts(s, sizes, trials, seed, q):
        for pair in pairs:
            rows[pair].append(_rich_pair(host, s, pair[0], pair[1], derive_seed(seed, "rich", n, t)))
    evidence = []
    any_mixed = False
    for pair, scans in rows.items():
        informative = [r for r in scans if r["pairs"]]
        constant = [r for r in informative if not r["both"]]
        evidence.append((pair, len(constant), len(informative), len(scans)))
        if informative and len(constant) == len(informative):
            return Verdict(True, "constant-pattern", witness={"i": pair}, evidence=tuple(evidence))
        if constant:
            any_mixed = True
    if any_mixed or all(not r["pairs"] for scans in rows.values() for r in scans):
        return Verdict(None, "mixed-evidence", evidence=tuple(evidence))
    return Verdict(False, "both-values-realized", evidence=tuple(evidence))


def _graphs_equal(h1: InterpretedGraph, h2: InterpretedGraph) -> bool:
    return h1.nodes == h2.nodes and h1.edges == h2.edges


def _syntactically_used_params(s: Scheme) -> FrozenSet[str]:
    from .formulas import free_vars

    used = set()
    for f in s.raw_node_formulas:
        used |= free_vars(f)
    for row in s.edge_formulas:
        for f in row:
            used |= free_vars(f)
    used |= free_vars(s.param_formula)
    return frozenset(p for p in s.params if p in used)


def is_reduced(
    s: Scheme,
    gf=None,
    trials: int = 5,
    sizes: Sequence[int] = (8, 10),
    seed: int = 0,
    q: float = 0.5,
    group_cap: int = 6,
) -> Verdict:
    """No proper subset of the parameter positions already determines the
    derived graph.  Unused parameters are detected syntactically; otherwise
    hosts are sampled and parameter tuples agreeing on a candidate subset are
    compared."""
    if not s.params:
        return Verdict(True, "no-parameters")
    used = _syntactically_used_params(s)
    unused = [p for p in s.params if p not in used]
    if unused:
        return Verdict(False, "unused-parameter", witness={"dropped": tuple(unused)})
    subsets = [w for w in _proper_subsets(len(s.params))]
    stats = {w: {"groups": 0, "mismatch": False} for w in subsets}
    for n, t, host in _sample_hosts(s, sizes, trials, seed, q):
        params = valid_params(host, s, cap=40, seed=derive_seed(seed, "redu", n, t))
        for w in subsets:
            groups: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
            for cbar in params:
                groups.setdefault(tuple(cbar[p] for p in w), []).append(cbar)
            for key, members in groups.items():
                if len(members) < 2:
                    continue
                members = members[:group_cap]
                stats[w]["groups"] += 1
                base = build_interpreted_graph(host, s, members[0])
                for other in members[1:]:
                    if not _graphs_equal(base, build_interpreted_graph(host, s, other)):
                        stats[w]["mismatch"] = True
                        break
                if stats[w]["mismatch"]:
                    break
    evidence = tuple((w, stats[w]["groups"], stats[w]["mismatch"]) for w in subsets)
    for w in subsets:
        if stats[w]["groups"] > 0 and not stats[w]["mismatch"]:
            dropped = tuple(s.params[p] for p in range(len(s.params)) if p not in w)
            return Verdict(False, "parameter-ignored", witness={"dropped": dropped}, evidence=evidence)
    if any(stats[w]["groups"] == 0 for w in subsets):
        return Verdict(None, "insufficient-evidence", evidence=evidence)
    return Verdict(True, "all-positions-matter", evidence=evidence)


_FRESH = itertools.count()


def decompose_to_complete_reduced(s: Scheme) -> List[Scheme]:
    """Rewrite into a single scheme whose node formulas are complete (one
    type orbit each), over the syntactically used parameters.  The output
    defines the same graph on every host and admissible parameter tuple,
    with kinds split by atomic type.
    """
    if is_degenerated(s):
        raise DegenerateInput(f"scheme {s.name!r} admits no parameters")
    used = _syntactically_used_params(s)
    keep = [p for p in range(len(s.params)) if s.params[p] in used]
    new_params = tuple(s.params[p] for p in keep)

    blocks = []
    groups = []
    node_formulas = []
    origin = []  # original kind index per new kind
    renames = []  # variable rename map per new kind
    for i in range(s.i_count):
        k = len(s.blocks[i])
        raw = s.raw_node_formulas[i]
        guard = distinct_guard(tuple(s.blocks[i]) + new_params)
        guarded = And(raw, guard) if guard is not None else raw
        names = tuple(s.blocks[i]) + new_params
        sats = satisfying_types(guarded, names, s.sig)
        group = s.block_group(i)
        remaining = set(sats)
        while remaining:
            seed_type = remaining.pop()
            orbit = {seed_type}
            frontier = [seed_type]
            while frontier:
                cur = frontier.pop()
                for perm in group:
                    sigma = {perm[l] + 1: l + 1 for l in range(k)}
                    for e in range(k + 1, len(names) + 1):
                        sigma[e] = e
                    image = _relabel(cur, sigma)
                    if image in remaining:
                        remaining.remove(image)
                        orbit.add(image)
                        frontier.append(image)
            copy = next(_FRESH)
            fresh_block = tuple(f"{v}_{copy}" for v in s.blocks[i])
            mapping = dict(zip(s.blocks[i], fresh_block))
            mapping.update({primed(v): primed(nv) for v, nv in zip(s.blocks[i], fresh_block)})
            fresh_names = fresh_block + new_params
            from .formulas import disj

            formula = disj([atomic_diagram(t, fresh_names) for t in sorted(orbit, key=repr)])
            blocks.append(fresh_block)
            groups.append(s.groups[i])
            node_formulas.append(formula)
            origin.append(i)
            renames.append(mapping)
    if not blocks:
        raise DegenerateInput(
            f"scheme {s.name!r}: every node formula is unsatisfiable, nothing to decompose"
        )

    from .formulas import rename as rename_formula

    edge_formulas = []
    for a in range(len(blocks)):
        row = []
        for b in range(len(blocks)):
            original = s.edge_formulas[origin[a]][origin[b]]
            mapping = {}
            for v, nv in renames[a].items():
                if not v.endswith("'"):
                    mapping[v] = nv
            for v, nv in renames[b].items():
                if v.endswith("'"):
                    mapping[v] = nv
            row.append(rename_formula(original, mapping))
        edge_formulas.append(row)

    member = make_scheme(
        name=f"{s.name}.cr",
        sig=s.sig,
        blocks=blocks,
        groups=groups,
        params=new_params,
        node_formulas=node_formulas,
        edge_formulas=edge_formulas,
        param_formula=s.param_formula,
    )
    return [member]


def _kind_permutations(s1: Scheme, s2: Scheme) -> List[Perm]:
    idx = range(s1.i_count)
    out = []
    for perm in itertools.permutations(idx):
        ok = all(
            len(s1.blocks[i]) == len(s2.blocks[perm[i]])
            and s1.block_group(i) == s2.block_group(perm[i])
            for i in idx
        )
        if ok:
            out.append(tuple(perm))
    return out


def _mapped_params(cbar: Tuple[int, ...], kappa: Perm) -> Tuple[int, ...]:
    out = [0] * len(cbar)
    for p, val in enumerate(cbar):
        out[kappa[p]] = val
    return tuple(out)


def _candidate_holds(
    s1: Scheme, s2: Scheme, pi: Perm, kappa: Perm, host: Structure, cap: int, seed: int
) -> Tuple[bool, int]:
    """Check one (pi, kappa) pair on one host; returns (holds, comparisons)."""
    checks = 0
    inverse = tuple(kappa.index(p) for p in range(len(kappa)))
    for scheme_a, scheme_b, mapping, perm in (
        (s1, s2, kappa, pi),
        (s2, s1, inverse, _invert(pi)),
    ):
        for cbar in valid_params(host, scheme_a, cap=cap, seed=seed):
            mapped = _mapped_params(cbar, mapping)
            try:
                hb = build_interpreted_graph(host, scheme_b, mapped)
            except Exception:
                return False, checks
            ha = build_interpreted_graph(host, scheme_a, cbar)
            relabeled_nodes = tuple(sorted((perm[i], rep) for i, rep in ha.nodes))
            relabeled_edges = frozenset(
                tuple(sorted(((perm[i], ra), (perm[j], rb))))
                for (i, ra), (j, rb) in ha.edges
            )
            checks += 1
            if relabeled_nodes != hb.nodes or relabeled_edges != hb.edges:
                return False, checks
    return True, checks


def _invert(perm: Perm) -> Perm:
    out = [0] * len(perm)
    for i, v in enumerate(perm):
        out[v] = i
    return tuple(out)


def explicitly_isomorphic(
    s1: Scheme,
    s2: Scheme,
    gf=None,
    trials: int = 4,
    sizes: Sequence[int] = (8, 10),
    seed: int = 0,
    q: float = 0.5,
    param_cap: int = 20,
) -> Verdict:
    """Searches for a kind permutation and a parameter-position bijection
    making the two schemes define literally the same graphs on sampled hosts.

    Both schemes are expected to be complete and reduced; completeness is
    checked, reducedness is the caller's responsibility.
    """
    if not (is_complete(s1) and is_complete(s2)):
        raise ValueError("explicit isomorphism is defined for complete schemes")
    if s1.i_count != s2.i_count or len(s1.params) != len(s2.params):
        return Verdict(False, "shape-mismatch")
    kind_perms = _kind_permutations(s1, s2)
    if not kind_perms:
        return Verdict(False, "no-kind-permutation")
    hosts = list(_sample_hosts(s1, sizes, trials, seed, q))
    param_perms = list(itertools.permutations(range(len(s1.params))))
    total_checks = 0
    for pi in kind_perms:
        for kappa in param_perms:
            ok = True
            checks = 0
            for n, t, host in hosts:
                holds, c = _candidate_holds(
                    s1, s2, pi, kappa, host, param_cap, derive_seed(seed, "iso", n, t)
                )
                checks += c
                if not holds:
                    ok = False
                    break
            total_checks += checks
            if ok and checks > 0:
                return Verdict(True, "witness-found", witness={"pi": pi, "kappa": kappa})
    if total_checks == 0:
        return Verdict(None, "no-admissible-parameters")
    return Verdict(False, "no-witness", evidence=(("checks", total_checks),))


def scheme_symmetry_group(
    s: Scheme,
    gf=None,
    trials: int = 4,
    sizes: Sequence[int] = (8, 10),
    seed: int = 0,
    q: float = 0.5,
) -> List[Perm]:
    """All parameter-position permutations under which the scheme is
    explicitly isomorphic to itself; verified closed under composition."""
    if not is_complete(s):
        raise ValueError("the symmetry group is defined for complete schemes")
    hosts = list(_sample_hosts(s, sizes, trials, seed, q))
    kind_perms = _kind_permutations(s, s)
    members: List[Perm] = []
    for kappa in itertools.permutations(range(len(s.params))):
        for pi in kind_perms:
            ok = True
            informative = 0
            for n, t, host in hosts:
                holds, c = _candidate_holds(
                    s, s, pi, kappa, host, 20, derive_seed(seed, "sym", n, t)
                )
                informative += c
                if not holds:
                    ok = False
                    break
            if ok and informative > 0:
                members.append(tuple(kappa))
                break
    for k1 in members:
        for k2 in members:
            composed = tuple(k2[k1[p]] for p in range(len(k1)))
            if composed not in members:
                raise AssertionError(
                    f"symmetry candidates not closed under composition: {k1} . {k2}"
                )
    return members
