"""Report containers and statistics helpers for the experiment harness.

Reports are canonical JSON: sorted keys, fixed separators, no wall-clock
content, so a rerun with the same configuration and master seed produces a
byte-identical document.  Timing is a side channel (stderr), never part of
the report.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

TOOL_VERSION = "0.1.0"

Z95 = 1.959963984540054


def wilson_ci(successes: int, trials: int, z: float = Z95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    spread = (z / denom) * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return max(0.0, center - spread), min(1.0, center + spread)


def mean_ci(values: List[float], z: float = Z95) -> Tuple[float, float, float]:
    """(mean, lo, hi) with a normal-approximation interval."""
    if not values:
        return 0.0, 0.0, 0.0
    mean = sum(values) / len(values)
    if len(values) == 1:
        return mean, mean, mean
    var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
    half = z * math.sqrt(var / len(values))
    return mean, mean - half, mean + half


def trend_verdict(freqs: List[float], cis: List[Tuple[float, float]]) -> str:
    """"->1" / "->0" for a clean monotone approach, else "inconclusive".

    Monotone within confidence: each step may drop (rise) by at most the two
    half-widths involved; the last frequency must already be within 0.1 of
    the limit.
    """
    if not freqs:
        return "inconclusive"
    halves = [(hi - lo) / 2 for lo, hi in cis]
    nondec = all(
        freqs[i + 1] >= freqs[i] - (halves[i] + halves[i + 1]) for i in range(len(freqs) - 1)
    )
    noninc = all(
        freqs[i + 1] <= freqs[i] + (halves[i] + halves[i + 1]) for i in range(len(freqs) - 1)
    )
    if nondec and freqs[-1] >= 0.9:
        return "->1"
    if noninc and freqs[-1] <= 0.1:
        return "->0"
    return "inconclusive"


def _plain(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _plain(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_plain(v) for v in obj)
    if isinstance(obj, bytes):
        return obj.hex()
    if isinstance(obj, float) and (math.isnan(obj) or math.isinf(obj)):
        return str(obj)
    return obj


def canonical_json(data) -> str:
    return json.dumps(_plain(data), sort_keys=True, indent=2) + "\n"


def fingerprint(data) -> str:
    compact = json.dumps(_plain(data), sort_keys=True, separators=(",", ":"))
    return hashlib.blake2b(compact.encode(), digest_size=8).hexdigest()


@dataclass
class ExperimentReport:
    kind: str
    config: Dict
    master_seed: int
    rows: List[Dict] = field(default_factory=list)
    verdicts: Dict[str, str] = field(default_factory=dict)
    extras: Dict = field(default_factory=dict)
    ok: bool = True
    tool_version: str = TOOL_VERSION

    @property
    def config_fingerprint(self) -> str:
        return fingerprint(self.config)

    def to_json(self) -> str:
        return canonical_json(
            {
                "kind": self.kind,
                "tool_version": self.tool_version,
                "config": self.config,
                "config_fingerprint": self.config_fingerprint,
                "master_seed": self.master_seed,
                "rows": self.rows,
                "verdicts": self.verdicts,
                "extras": self.extras,
                "ok": self.ok,
            }
        )

    def write(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    def rows_csv(self) -> str:
        if not self.rows:
            return ""
        keys = sorted({k for row in self.rows for k in row})
        lines = [",".join(keys)]
        for row in self.rows:
            lines.append(",".join(str(_plain(row.get(k, ""))) for k in keys))
        return "\n".join(lines) + "\n"
