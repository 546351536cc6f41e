"""Serialization: graph6 for graphs, JSON documents for general structures.

graph6 is the standard header-less variant: N(n) followed by the upper
triangle of the adjacency matrix in column-major order, six bits per
printable character.  Universes are 1-based internally and converted to the
0-based wire convention here.
"""

from __future__ import annotations

import json
from typing import Dict, List

from .kinds import Kind, KindSequence
from .structures import Structure, validate_structure


def _n_encode(n: int) -> str:
    if n < 0:
        raise ValueError("negative size")
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return chr(126) + "".join(chr(((n >> shift) & 63) + 63) for shift in (12, 6, 0))
    if n <= 68719476735:
        return chr(126) + chr(126) + "".join(
            chr(((n >> shift) & 63) + 63) for shift in (30, 24, 18, 12, 6, 0)
        )
    raise ValueError("graph too large for graph6")


def _n_decode(text: str) -> tuple:
    if not text:
        raise ValueError("empty graph6 string")
    if text[0] != chr(126):
        return ord(text[0]) - 63, 1
    if len(text) >= 2 and text[1] == chr(126):
        vals = [ord(c) - 63 for c in text[2:8]]
        if len(vals) != 6:
            raise ValueError("truncated graph6 size")
        n = 0
        for v in vals:
            n = (n << 6) | v
        return n, 8
    vals = [ord(c) - 63 for c in text[1:4]]
    if len(vals) != 3:
        raise ValueError("truncated graph6 size")
    n = 0
    for v in vals:
        n = (n << 6) | v
    return n, 4


def graph_to_graph6(g: Structure) -> str:
    if not g.is_graph():
        raise ValueError("graph6 output needs a plain graph structure")
    n = g.n
    bits: List[int] = []
    for j in range(1, n):
        for i in range(j):
            bits.append(1 if g.has_edge(i + 1, j + 1) else 0)
    while len(bits) % 6 != 0:
        bits.append(0)
    chars = []
    for pos in range(0, len(bits), 6):
        val = 0
        for b in bits[pos : pos + 6]:
            val = (val << 1) | b
        chars.append(chr(val + 63))
    return _n_encode(n) + "".join(chars)


def graph6_to_graph(text: str) -> Structure:
    text = text.strip()
    if text.startswith(">>graph6<<"):
        text = text[len(">>graph6<<") :]
    n, offset = _n_decode(text)
    need = (n * (n - 1) // 2 + 5) // 6
    payload = text[offset:]
    if len(payload) < need:
        raise ValueError("truncated graph6 adjacency data")
    bits: List[int] = []
    for c in payload[:need]:
        val = ord(c) - 63
        if not (0 <= val <= 63):
            raise ValueError(f"bad graph6 character {c!r}")
        bits.extend((val >> shift) & 1 for shift in (5, 4, 3, 2, 1, 0))
    edges = []
    pos = 0
    for j in range(1, n):
        for i in range(j):
            if bits[pos]:
                edges.append((i + 1, j + 1))
            pos += 1
    return Structure.graph(n, edges)


def read_graph6_file(path: str) -> List[Structure]:
    graphs = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                graphs.append(graph6_to_graph(line))
    return graphs


# JSON documents: {n, kinds: [{id, arity, generators}], relations: {id: [[...]]}}


def kind_sequence_to_json(sig: KindSequence) -> List[Dict]:
    return [
        {"id": k.id, "arity": k.arity, "generators": [list(g) for g in k.generators]}
        for k in sig
    ]


def kind_sequence_from_json(data: List[Dict]) -> KindSequence:
    return KindSequence(
        tuple(
            Kind(d["id"], int(d["arity"]), tuple(tuple(g) for g in d.get("generators", [])))
            for d in data
        )
    )


def structure_to_json(m: Structure) -> Dict:
    return {
        "n": m.n,
        "kinds": kind_sequence_to_json(m.sig),
        "relations": {
            kind_id: sorted([list(t) for t in tuples])
            for kind_id, tuples in m.relations
        },
    }


def structure_from_json(data: Dict, validate: bool = True) -> Structure:
    sig = kind_sequence_from_json(data["kinds"])
    rels = {
        kind_id: frozenset(tuple(int(v) for v in t) for t in tuples)
        for kind_id, tuples in data.get("relations", {}).items()
    }
    m = Structure.make(int(data["n"]), sig, rels)
    if validate:
        problems = validate_structure(m)
        if problems:
            raise ValueError("invalid structure document: " + "; ".join(problems[:5]))
    return m


def dump_structure(m: Structure) -> str:
    return json.dumps(structure_to_json(m), sort_keys=True, indent=2)


def load_structure(text: str) -> Structure:
    return structure_from_json(json.loads(text))
