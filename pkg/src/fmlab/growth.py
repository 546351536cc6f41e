"""Growth functions h and g = n**h(n) controlling thresholds and rates.

The default pins h(n) = 1 for n <= 16 and h(n) = 1/log2(log2(n)) above,
so every graph on at most 16 nodes is classified low and the whole
machinery degenerates there by design.  Desk-scale experiments therefore
usually run with an override (constant or table) that produces small,
non-trivial thresholds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

PAPER_CUTOFF = 16


@dataclass(frozen=True)
class GrowthFunctions:
    """h: N+ -> (0, 1] and the induced g(n) = n**h(n).

    mode is one of "paper" (the default piecewise definition), "constant"
    (h identically `constant`), or "table" (explicit n -> h(n) map; missing
    entries are an error).
    """

    mode: str = "paper"
    constant: Optional[float] = None
    table: Optional[Tuple[Tuple[int, float], ...]] = None

    def __post_init__(self):
        if self.mode == "paper":
            if self.constant is not None or self.table is not None:
                raise ValueError("paper mode takes no parameters")
        elif self.mode == "constant":
            if self.constant is None or not (0.0 < self.constant <= 1.0):
                raise ValueError("constant mode needs h in (0, 1]")
        elif self.mode == "table":
            if not self.table:
                raise ValueError("table mode needs a non-empty table")
            for n, h in self.table:
                if n < 1 or not (0.0 < h <= 1.0):
                    raise ValueError(f"table entry ({n}, {h}) out of range")
        else:
            raise ValueError(f"unknown growth mode {self.mode!r}")

    def h(self, n: int) -> float:
        if n < 1:
            raise ValueError("growth functions are defined for n >= 1")
        if self.mode == "paper":
            if n <= PAPER_CUTOFF:
                return 1.0
            return 1.0 / math.log2(math.log2(n))
        if self.mode == "constant":
            return self.constant
        for key, value in self.table:
            if key == n:
                return value
        raise KeyError(f"growth table has no entry for n={n}")

    def g(self, n: int) -> float:
        return float(n) ** self.h(n)

    def describe(self) -> str:
        if self.mode == "paper":
            return "paper"
        if self.mode == "constant":
            return f"const:{self.constant}"
        return "table:" + json.dumps(dict(self.table), sort_keys=True)


PAPER_DEFAULT = GrowthFunctions("paper")


def eval_growth(gf: GrowthFunctions, n: int) -> Tuple[float, float]:
    """Return (h(n), g(n)) for the selected mode; n must be >= 1."""
    h = gf.h(n)
    return h, float(n) ** h


def constant_growth(c: float) -> GrowthFunctions:
    return GrowthFunctions("constant", constant=c)


def table_growth(table: Mapping[int, float]) -> GrowthFunctions:
    return GrowthFunctions("table", table=tuple(sorted(table.items())))


def growth_from_spec(text: str) -> GrowthFunctions:
    """Parse a CLI/config growth description.

    Accepted forms: "paper", "const:<h>", "table:<json object or path>".
    """
    if text == "paper":
        return PAPER_DEFAULT
    if text.startswith("const:"):
        return constant_growth(float(text.split(":", 1)[1]))
    if text.startswith("table:"):
        payload = text.split(":", 1)[1]
        if payload.strip().startswith("{"):
            raw = json.loads(payload)
        else:
            with open(payload, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        return table_growth({int(k): float(v) for k, v in raw.items()})
    raise ValueError(f"cannot parse growth spec {text!r}")
