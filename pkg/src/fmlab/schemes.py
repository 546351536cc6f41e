"""Graph interpretation schemes and the graphs they define.

A scheme describes how to read a finite simple graph off a host structure:
node tuples of several kinds (each kind a variable block with a symmetry
group, selected by a node formula), edges decided by cross formulas, the
whole thing relative to a repetition-free parameter tuple admitted by a
parameter formula.  Nodes of the derived graph are group orbits of tuples,
labeled by their lexicographically minimal representative.

Well-formedness (invariance of node formulas under their block groups,
invariance plus symmetry plus anti-reflexivity of the edge formulas) is
checked semantically at ingestion: the relevant assignments are enumerated
by quantifier-free type over every way the two blocks may share elements,
which is exhaustive for the class of invariant irreflexive hosts.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .formulas import (
    And,
    Formula,
    eval_formula,
    free_vars,
    is_quantifier_free,
    parse,
    print_formula,
    rename,
)
from .kinds import KindSequence, Perm, close_group, min_rep
from .rng import derive_seed, u01
from .structures import Structure, iter_tuples
from .typeenum import distinct_guard, identity_assignment, type_structures


class SchemeError(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


class ParameterRejected(ValueError):
    pass


def primed(name: str) -> str:
    return name + "'"


@dataclass(frozen=True)
class Scheme:
    name: str
    sig: KindSequence
    blocks: Tuple[Tuple[str, ...], ...]
    groups: Tuple[Tuple[Perm, ...], ...]
    params: Tuple[str, ...]
    node_formulas: Tuple[Formula, ...]       # with distinctness guards conjoined
    edge_formulas: Tuple[Tuple[Formula, ...], ...]
    param_formula: Formula
    raw_node_formulas: Tuple[Formula, ...]   # as supplied, for serialization

    @property
    def i_count(self) -> int:
        return len(self.blocks)

    def block_group(self, i: int) -> FrozenSet[Perm]:
        return close_group(tuple(tuple(g) for g in self.groups[i]), len(self.blocks[i]))

    def primed_block(self, i: int) -> Tuple[str, ...]:
        return tuple(primed(v) for v in self.blocks[i])

    def k(self) -> int:
        """Largest block length or parameter count appearing in the scheme."""
        return max([len(b) for b in self.blocks] + [len(self.params)])

    def is_trivial(self) -> bool:
        return all(len(b) == 0 for b in self.blocks)


TYPE_LIMIT = 1 << 16


def _check_qf(formula: Formula, allowed: FrozenSet[str], sig: KindSequence, label: str):
    if not is_quantifier_free(formula):
        raise SchemeError(f"{label} must be quantifier free")
    extra = free_vars(formula) - allowed - {"_t"}
    if extra:
        raise SchemeError(f"{label} uses variables {sorted(extra)} outside its blocks")
    from .formulas import check_atoms

    check_atoms(formula, sig)


def _perm_env(env: Dict[str, int], block: Sequence[str], perm: Perm) -> Dict[str, int]:
    out = dict(env)
    for pos, var in enumerate(block):
        out[var] = env[block[perm[pos]]]
    return out


def _sharing_patterns(k_left: int, k_right: int):
    """Every way a right-block position can repeat a left-block position."""
    options = [(None,) + tuple(range(k_left))] * k_right
    for combo in itertools.product(*options):
        used = [c for c in combo if c is not None]
        if len(used) != len(set(used)):
            continue  # right blocks are repetition-free
        yield combo


def _edge_assignments(scheme: Scheme, i: int, j: int, pattern):
    """Variable list plus assignments realizing one sharing pattern.

    Returns (varnames, base environments) where each environment assigns the
    left block, the primed right block (sharing elements per the pattern),
    and the parameters to distinct type-structure elements.
    """
    left = scheme.blocks[i]
    right = scheme.primed_block(j)
    names: List[str] = list(left)
    for pos, match in enumerate(pattern):
        if match is None:
            names.append(right[pos])
    names.extend(scheme.params)
    env = identity_assignment(names)
    for pos, match in enumerate(pattern):
        if match is not None:
            env[right[pos]] = env[left[match]]
    return names, env


def _check_scheme_semantics(scheme: Scheme, limit: int = TYPE_LIMIT):
    sig = scheme.sig
    # Node formulas invariant under their block group.
    for i, block in enumerate(scheme.blocks):
        names = list(block) + list(scheme.params)
        env = identity_assignment(names)
        for t in type_structures(sig, len(names), limit):
            base = eval_formula(t, scheme.node_formulas[i], env)
            for gen in scheme.groups[i]:
                if eval_formula(t, scheme.node_formulas[i], _perm_env(env, block, gen)) != base:
                    raise SchemeError(
                        f"node formula {i} is not invariant under generator {gen}"
                    )
    # Edge formulas: invariance both sides, symmetry, anti-reflexivity.
    for i in range(scheme.i_count):
        for j in range(scheme.i_count):
            fij = scheme.edge_formulas[i][j]
            fji = scheme.edge_formulas[j][i]
            left = scheme.blocks[i]
            right = scheme.primed_block(j)
            for pattern in _sharing_patterns(len(left), len(right)):
                names, env = _edge_assignments(scheme, i, j, pattern)
                swap = {**{scheme.blocks[j][p]: env[right[p]] for p in range(len(right))},
                        **{primed(left[p]): env[left[p]] for p in range(len(left))},
                        **{z: env[z] for z in scheme.params}}
                for t in type_structures(sig, len(names), limit):
                    base = eval_formula(t, fij, env)
                    for gen in scheme.groups[i]:
                        if eval_formula(t, fij, _perm_env(env, left, gen)) != base:
                            raise SchemeError(
                                f"edge formula ({i},{j}) not invariant under left generator {gen}"
                            )
                    for gen in scheme.groups[j]:
                        if eval_formula(t, fij, _perm_env(env, right, gen)) != base:
                            raise SchemeError(
                                f"edge formula ({i},{j}) not invariant under right generator {gen}"
                            )
                    if eval_formula(t, fji, swap) != base:
                        raise SchemeError(
                            f"edge formulas ({i},{j}) and ({j},{i}) are not symmetric"
                        )
    for i, block in enumerate(scheme.blocks):
        names = list(block) + list(scheme.params)
        env = identity_assignment(names)
        refl = dict(env)
        for v in block:
            refl[primed(v)] = env[v]
        for t in type_structures(sig, len(names), limit):
            if eval_formula(t, scheme.edge_formulas[i][i], refl):
                raise SchemeError(f"edge formula ({i},{i}) admits a self-loop")


def make_scheme(
    name: str,
    sig: KindSequence,
    blocks: Sequence[Sequence[str]],
    groups: Sequence[Sequence[Perm]],
    params: Sequence[str],
    node_formulas: Sequence[Formula],
    edge_formulas: Sequence[Sequence[Formula]],
    param_formula: Formula,
    check: bool = True,
) -> Scheme:
    blocks = tuple(tuple(b) for b in blocks)
    groups = tuple(tuple(tuple(g) for g in gs) for gs in groups)
    params = tuple(params)
    if not blocks:
        raise SchemeError("a scheme needs at least one kind of node")
    if not (len(blocks) == len(groups) == len(node_formulas)):
        raise SchemeError("blocks, groups and node formulas must align")
    if len(edge_formulas) != len(blocks) or any(len(row) != len(blocks) for row in edge_formulas):
        raise SchemeError("edge formulas must form an i_count x i_count table")

    all_names: List[str] = []
    for b in blocks:
        all_names.extend(b)
        all_names.extend(primed(v) for v in b)
    all_names.extend(params)
    if len(set(all_names)) != len(all_names):
        raise SchemeError(f"variable blocks, primed copies and parameters must be disjoint: {all_names}")

    raw_nodes = tuple(node_formulas)
    guarded = []
    for i, b in enumerate(blocks):
        guard = distinct_guard(tuple(b) + params)
        guarded.append(And(raw_nodes[i], guard) if guard is not None else raw_nodes[i])

    scheme = Scheme(
        name=name,
        sig=sig,
        blocks=blocks,
        groups=groups,
        params=params,
        node_formulas=tuple(guarded),
        edge_formulas=tuple(tuple(row) for row in edge_formulas),
        param_formula=param_formula,
        raw_node_formulas=raw_nodes,
    )
    for i, b in enumerate(blocks):
        for gen in groups[i]:
            close_group((tuple(gen),), len(b))  # validates the permutation degree
        _check_qf(scheme.node_formulas[i], frozenset(b) | frozenset(params), sig, f"node formula {i}")
    for i in range(len(blocks)):
        for j in range(len(blocks)):
            allowed = frozenset(blocks[i]) | frozenset(scheme.primed_block(j)) | frozenset(params)
            _check_qf(scheme.edge_formulas[i][j], allowed, sig, f"edge formula ({i},{j})")
    _check_qf(param_formula, frozenset(params), sig, "parameter formula")
    if check:
        _check_scheme_semantics(scheme)
    return scheme


# Serialization: formulas in the documented text grammar.

def scheme_to_json(s: Scheme) -> Dict:
    return {
        "name": s.name,
        "params": list(s.params),
        "blocks": [
            {"vars": list(b), "generators": [list(g) for g in s.groups[i]]}
            for i, b in enumerate(s.blocks)
        ],
        "node_formulas": [print_formula(f) for f in s.raw_node_formulas],
        "edge_formulas": [[print_formula(f) for f in row] for row in s.edge_formulas],
        "param_formula": print_formula(s.param_formula),
    }


def scheme_from_json(data: Dict, sig: KindSequence, check: bool = True) -> Scheme:
    return make_scheme(
        name=data["name"],
        sig=sig,
        blocks=[tuple(b["vars"]) for b in data["blocks"]],
        groups=[tuple(tuple(g) for g in b.get("generators", [])) for b in data["blocks"]],
        params=tuple(data.get("params", [])),
        node_formulas=[parse(t) for t in data["node_formulas"]],
        edge_formulas=[[parse(t) for t in row] for row in data["edge_formulas"]],
        param_formula=parse(data["param_formula"]),
        check=check,
    )


def host_fingerprint(m: Structure) -> str:
    blob = json.dumps(
        {"n": m.n, "rel": {k: sorted(map(list, v)) for k, v in m.relations}},
        sort_keys=True,
    ).encode()
    return hashlib.blake2b(blob, digest_size=8).hexdigest()


NodeLabel = Tuple[int, Tuple[int, ...]]


@dataclass(frozen=True)
class InterpretedGraph:
    nodes: Tuple[NodeLabel, ...]
    edges: FrozenSet[Tuple[NodeLabel, NodeLabel]]
    provenance: Tuple[str, str, Tuple[int, ...]]

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    def to_structure(self) -> Structure:
        """Plain graph with nodes relabeled 1..m in sorted label order."""
        index = {label: pos + 1 for pos, label in enumerate(self.nodes)}
        return Structure.graph(
            len(self.nodes), [(index[a], index[b]) for a, b in self.edges]
        )


def build_interpreted_graph(
    m: Structure,
    scheme: Scheme,
    cbar: Sequence[int],
    order_seed: Optional[int] = None,
) -> InterpretedGraph:
    """The graph the scheme defines on host m at parameters cbar.

    order_seed shuffles the enumeration of candidate tuples; the output is
    representative-independent, so any order must give the same graph.
    """
    cbar = tuple(cbar)
    if len(cbar) != len(scheme.params):
        raise ArityMismatch(
            f"scheme {scheme.name!r} takes {len(scheme.params)} parameters, got {len(cbar)}"
        )
    if len(set(cbar)) != len(cbar):
        raise ParameterRejected("parameter tuple has repeated entries")
    if any(not (1 <= c <= m.n) for c in cbar):
        raise ParameterRejected("parameter outside universe")
    penv = dict(zip(scheme.params, cbar))
    if not eval_formula(m, scheme.param_formula, penv):
        raise ParameterRejected("host rejects the parameter tuple")

    nodes: List[NodeLabel] = []
    for i, block in enumerate(scheme.blocks):
        group = scheme.block_group(i)
        candidates = list(iter_tuples(m.n, len(block)))
        if order_seed is not None:
            key = derive_seed(order_seed, "order", i)
            candidates.sort(key=lambda t: u01(key, t))
        seen = set()
        for tup in candidates:
            rep = min_rep(group, tup)
            if rep in seen:
                continue
            seen.add(rep)
            env = dict(penv)
            env.update(zip(block, tup))
            if eval_formula(m, scheme.node_formulas[i], env):
                nodes.append((i, rep))
    nodes.sort()

    edges = set()
    for a in range(len(nodes)):
        i, rep_a = nodes[a]
        for b in range(a + 1, len(nodes)):
            j, rep_b = nodes[b]
            env = dict(penv)
            env.update(zip(scheme.blocks[i], rep_a))
            env.update(zip(scheme.primed_block(j), rep_b))
            if eval_formula(m, scheme.edge_formulas[i][j], env):
                edges.add((nodes[a], nodes[b]))
    return InterpretedGraph(
        nodes=tuple(nodes),
        edges=frozenset(edges),
        provenance=(scheme.name, host_fingerprint(m), cbar),
    )


def valid_params(
    m: Structure, scheme: Scheme, cap: Optional[int] = None, seed: int = 0
) -> List[Tuple[int, ...]]:
    """Repetition-free parameter tuples the host admits, optionally subsampled."""
    found = []
    for tup in iter_tuples(m.n, len(scheme.params)):
        if eval_formula(m, scheme.param_formula, dict(zip(scheme.params, tup))):
            found.append(tup)
    if cap is not None and len(found) > cap:
        keyed = sorted(found, key=lambda t: u01(seed, "params", t))
        found = keyed[:cap]
    return found
