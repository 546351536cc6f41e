"""The seeded random class of high graphs behind the added quantifier.

Membership is a property of the isomorphism class: low graphs are always
out; a high graph is in with probability p(|H|), where p is h (default) or
1/g ("g-inverse" mode), decided by one keyed uniform draw per canonical
form.  That realizes an independent coin per isomorphism class without ever
materializing the indexed bit sequence; sample_tbar_prefix exposes the
indexed view over the canonical enumeration and agrees with membership by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .canon import DEFAULT_EXACT_CAP, canonical_form, enumerate_graph_reps
from .growth import GrowthFunctions, eval_growth
from .lowness import classify_low, LownessVerdict
from .rng import u01
from .structures import Structure

PROB_MODES = ("h-of-size", "g-inverse")


@dataclass
class QuantifierClass:
    """Isomorphism-closed random class of high graphs with a lazy oracle."""

    iota: int
    gf: GrowthFunctions
    seed: int
    prob_mode: str = "h-of-size"
    exact_cap: int = DEFAULT_EXACT_CAP
    budget: int = 10_000_000
    cache: Dict[Tuple[int, bytes], bool] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.iota not in (1, 2):
            raise ValueError("iota must be 1 or 2")
        if self.prob_mode not in PROB_MODES:
            raise ValueError(f"prob_mode must be one of {PROB_MODES}")

    def inclusion_probability(self, n: int) -> float:
        h, g = eval_growth(self.gf, n)
        return h if self.prob_mode == "h-of-size" else 1.0 / g


def membership(q: QuantifierClass, h: Structure, budget: Optional[int] = None) -> bool:
    """Whether the graph's isomorphism class belongs to the random class.

    Raises BudgetExhausted (from the lowness search) rather than guessing
    when the low/high status cannot be resolved.
    """
    if h.n == 0:
        return False
    form = canonical_form(h, q.exact_cap)
    key = (form.n, form.bits)
    if key in q.cache:
        return q.cache[key]
    verdict = classify_low(h, q.iota, q.gf, budget if budget is not None else q.budget)
    if not verdict.is_high:
        bit = False
    else:
        p = q.inclusion_probability(h.n)
        bit = u01(q.seed, "member", form.n, form.bits) < p
    q.cache[key] = bit
    return bit


def classify_and_membership(
    q: QuantifierClass, h: Structure, budget: Optional[int] = None
) -> Tuple[LownessVerdict, bool]:
    """Verdict plus membership bit, for reports that want both."""
    verdict = classify_low(h, q.iota, q.gf, budget if budget is not None else q.budget)
    return verdict, membership(q, h, budget)


def sample_tbar_prefix(q: QuantifierClass, m_max: int) -> List[dict]:
    """Explicit prefix of the membership bit sequence over the enumeration.

    Row m describes the m-th canonical graph: its size, form, lowness, and
    bit.  Consistent with membership on every query because both sides ask
    the same oracle.
    """
    rows = []
    for m, (form, rep) in enumerate(enumerate_graph_reps(q.exact_cap, q.exact_cap)):
        if m >= m_max:
            break
        verdict = classify_low(rep, q.iota, q.gf, q.budget)
        bit = membership(q, rep)
        rows.append(
            {
                "m": m,
                "n_nodes": form.n,
                "canon_hex": form.hex,
                "low": not verdict.is_high,
                "t": 1 if bit else 0,
            }
        )
    if len(rows) < m_max:
        raise ValueError(
            f"enumeration up to {q.exact_cap} nodes yields only {len(rows)} classes, "
            f"asked for {m_max}"
        )
    return rows
