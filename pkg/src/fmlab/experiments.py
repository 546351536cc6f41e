"""Monte Carlo experiments: zero-one convergence, extension axioms, the
two-sampler distribution comparison, the scheme dichotomy, definability,
and iterated drawings.

Every experiment is a pure function of its configuration and master seed:
trial seeds are derived per (experiment, sentence, size, trial), triple
sharing a seed where two samplers must coincide exactly.  Reports embed the
configuration fingerprint; aborted evaluations (unresolved lowness) are
counted, and a report with more than five percent aborts is marked not ok
rather than presented as a biased frequency.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .formulas import free_vars, parse
from .growth import GrowthFunctions, growth_from_spec
from .kinds import GRAPH_KIND_ID, GRAPH_SIG, Kind, orbit_of
from .logic import (
    EvaluationAborted,
    SchemeRegistry,
    check_extension_axiom,
    defined_set,
    elaborate,
    evaluate,
    fo_definable,
    fo_definable_with_params,
)
from .lowness import BudgetExhausted, classify_low
from .quantifier import QuantifierClass
from .reports import ExperimentReport, mean_ci, trend_verdict, wilson_ci
from .rng import derive_seed
from .schemes import Scheme, build_interpreted_graph, make_scheme, valid_params
from .structures import (
    ConstantProfile,
    SplitProfile,
    Structure,
    count_orbits,
    draw_random_graph,
    draw_structure,
    iter_orbit_reps,
)
from .taxonomy import is_one_weak, is_trivial
from .iterated import UDescriptor, iterated_draw, iterated_draw_b17


@dataclass(frozen=True)
class ExperimentConfig:
    sentences: Tuple[str, ...] = ()
    sizes: Tuple[int, ...] = (8, 12)
    trials: int = 50
    q: float = 0.5
    growth: str = "paper"
    iota: int = 1
    seed: int = 0
    prob_mode: str = "h-of-size"
    draw_mode: str = "joint"  # "joint" or "fixed-tbar"
    rank: int = 1
    max_params: int = 1
    pairs: Tuple[Tuple[int, int], ...] = ((1, 1),)

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.sizes or list(self.sizes) != sorted(self.sizes):
            raise ValueError("sizes must be non-empty and ascending")
        if not (0.0 < self.q < 1.0):
            raise ValueError("q must be in (0, 1)")
        if self.draw_mode not in ("joint", "fixed-tbar"):
            raise ValueError("draw_mode must be 'joint' or 'fixed-tbar'")

    def gf(self) -> GrowthFunctions:
        return growth_from_spec(self.growth)

    def as_dict(self) -> Dict:
        return dataclasses.asdict(self)


def neighborhood_scheme(name: str = "nbhd") -> Scheme:
    """Nodes: the neighbors of the parameter; edges inherited from the host."""
    return make_scheme(
        name=name,
        sig=GRAPH_SIG,
        blocks=[("x",)],
        groups=[()],
        params=("z",),
        node_formulas=[parse("E(x, z) and not x = z")],
        edge_formulas=[[parse("E(x, x')")]],
        param_formula=parse("z = z"),
    )


def default_registry() -> SchemeRegistry:
    registry = SchemeRegistry()
    registry.register(neighborhood_scheme())
    return registry


def _quantifier_for_trial(cfg: ExperimentConfig, gf: GrowthFunctions, trial_seed: int, fixed: Optional[QuantifierClass]):
    if cfg.draw_mode == "fixed-tbar":
        return fixed
    return QuantifierClass(cfg.iota, gf, derive_seed(trial_seed, "tbar"), cfg.prob_mode)


def run_zero_one_experiment(
    cfg: ExperimentConfig, registry: Optional[SchemeRegistry] = None
) -> ExperimentReport:
    """Empirical truth frequency of each sentence over the joint draw of the
    host graph and the quantifier class, per size."""
    registry = registry if registry is not None else default_registry()
    gf = cfg.gf()
    asts = []
    for text in cfg.sentences:
        ast = elaborate(parse(text), registry)
        if free_vars(ast) - {"_t"}:
            raise ValueError(f"sentence has free variables: {text!r}")
        asts.append(ast)
    fixed = QuantifierClass(cfg.iota, gf, derive_seed(cfg.seed, "tbar-fixed"), cfg.prob_mode)
    report = ExperimentReport("zero-one", cfg.as_dict(), cfg.seed)
    ok = True
    for si, (text, ast) in enumerate(zip(cfg.sentences, asts)):
        freqs: List[float] = []
        cis: List[Tuple[float, float]] = []
        for n in cfg.sizes:
            successes = aborts = 0
            for t in range(cfg.trials):
                trial_seed = derive_seed(cfg.seed, "zo", si, n, t)
                g = draw_random_graph(n, cfg.q, derive_seed(trial_seed, "graph"))
                qc = _quantifier_for_trial(cfg, gf, trial_seed, fixed)
                try:
                    if evaluate(g, ast, {}, qc, registry):
                        successes += 1
                except EvaluationAborted:
                    aborts += 1
            completed = cfg.trials - aborts
            freq = successes / completed if completed else 0.0
            lo, hi = wilson_ci(successes, completed)
            abort_rate = aborts / cfg.trials
            ok = ok and abort_rate <= 0.05
            freqs.append(freq)
            cis.append((lo, hi))
            report.rows.append(
                {
                    "sentence": text,
                    "n": n,
                    "trials": cfg.trials,
                    "successes": successes,
                    "aborts": aborts,
                    "abort_rate": abort_rate,
                    "freq": freq,
                    "ci_lo": lo,
                    "ci_hi": hi,
                }
            )
        report.verdicts[text] = trend_verdict(freqs, cis)
        halves = [(hi - lo) / 2 for lo, hi in cis]
        report.extras.setdefault("nondecreasing_within_ci", {})[text] = all(
            freqs[i + 1] >= freqs[i] - (halves[i] + halves[i + 1])
            for i in range(len(freqs) - 1)
        )
    report.extras["envelope"] = {
        str(n): 1.0 - (1.0 - gf.h(max(1, round((n - 1) * cfg.q)))) ** n for n in cfg.sizes
    }
    report.ok = ok
    return report


def run_extension_axiom_experiment(
    q: float,
    sizes: Sequence[int],
    trials: int,
    pairs: Sequence[Tuple[int, int]],
    seed: int,
) -> ExperimentReport:
    cfg = {
        "q": q,
        "sizes": list(sizes),
        "trials": trials,
        "pairs": [list(p) for p in pairs],
        "seed": seed,
    }
    report = ExperimentReport("ext-axioms", cfg, seed)
    for k, l in pairs:
        freqs, cis = [], []
        for n in sizes:
            hits = 0
            for t in range(trials):
                g = draw_random_graph(n, q, derive_seed(seed, "ext", k, l, n, t))
                if check_extension_axiom(g, k, l):
                    hits += 1
            freq = hits / trials
            lo, hi = wilson_ci(hits, trials)
            freqs.append(freq)
            cis.append((lo, hi))
            report.rows.append(
                {"pair": [k, l], "n": n, "trials": trials, "hits": hits, "freq": freq, "ci_lo": lo, "ci_hi": hi}
            )
        report.verdicts[f"E({k},{l})"] = trend_verdict(freqs, cis)
    return report


# Distribution comparison.


@dataclass(frozen=True)
class QLevelKind:
    """One relation added by a quantifier-defined formula at some level."""

    kind: Kind
    param_vars: Tuple[str, ...]
    formula: str

    def __post_init__(self):
        if len(self.param_vars) != self.kind.arity:
            raise ValueError("parameter variables must match the kind arity")


def _graph_stats(g: Structure) -> Dict[str, float]:
    n = g.n
    masks = [0] * n
    for a, b in g.edges():
        masks[a - 1] |= 1 << (b - 1)
        masks[b - 1] |= 1 << (a - 1)
    edge_count = len(g.edges())
    triangles = 0
    c4_pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            common = (masks[i] & masks[j]).bit_count()
            if (masks[i] >> j) & 1:
                triangles += common
            c4_pairs += common * (common - 1) // 2
    degrees = [masks[v].bit_count() for v in range(n)]
    path2 = sum(d * (d - 1) // 2 for d in degrees)
    possible = n * (n - 1) // 2
    return {
        "edge_density": edge_count / possible if possible else 0.0,
        "triangles": triangles / 3.0,
        "paths2": float(path2),
        "c4": c4_pairs / 2.0,
    }


def compare_distributions(
    cfg: ExperimentConfig,
    pipeline: Sequence[Sequence[QLevelKind]],
    registry: Optional[SchemeRegistry] = None,
) -> ExperimentReport:
    """Expansion sampler (base graph plus quantifier-defined relations)
    against the direct sampler (every added kind drawn independently with
    probability q/g(n)); both share the trial seed so the graph layers are
    identical and level zero diverges nowhere."""
    registry = registry if registry is not None else default_registry()
    gf = cfg.gf()
    new_kinds: List[QLevelKind] = [qk for level in pipeline for qk in level]
    sig_full = GRAPH_SIG.extended(*[qk.kind for qk in new_kinds])
    level_asts = [
        [(qk, elaborate(parse(qk.formula), registry)) for qk in level] for level in pipeline
    ]
    sentence_asts = []
    for text in cfg.sentences:
        ast = elaborate(parse(text), registry)
        if free_vars(ast) - {"_t"}:
            raise ValueError(f"sentence has free variables: {text!r}")
        sentence_asts.append((text, ast))
    direct_profile = SplitProfile.of(
        {GRAPH_KIND_ID: cfg.q, **{qk.kind.id: cfg.q for qk in new_kinds}},
        [qk.kind.id for qk in new_kinds],
        gf,
    )

    per_stat: Dict[str, Dict[str, List[float]]] = {}

    def record(side: str, name: str, value: float):
        per_stat.setdefault(name, {"a": [], "b": []})[side].append(value)

    report = ExperimentReport("compare", {**cfg.as_dict(), "levels": len(pipeline)}, cfg.seed)
    aborts = total = 0
    for n in cfg.sizes:
        for t in range(cfg.trials):
            total += 1
            shared = derive_seed(cfg.seed, "cmp", n, t)
            qc = QuantifierClass(cfg.iota, gf, derive_seed(shared, "tbar"), cfg.prob_mode)
            base = draw_random_graph(n, cfg.q, shared)
            expanded = base
            sig_so_far = GRAPH_SIG
            aborted = False
            try:
                for level in level_asts:
                    sig_so_far = sig_so_far.extended(*[qk.kind for qk, _ in level])
                    rels = {kind_id: tuples for kind_id, tuples in expanded.relations}
                    for qk, ast in level:
                        chosen = set()
                        for rep in iter_orbit_reps(n, qk.kind):
                            env = dict(zip(qk.param_vars, rep))
                            if evaluate(expanded, ast, env, qc, registry):
                                chosen.update(orbit_of(qk.kind.group, rep))
                        rels[qk.kind.id] = frozenset(chosen)
                    expanded = Structure.make(n, sig_so_far, rels)
            except EvaluationAborted:
                aborts += 1
                aborted = True
            direct = draw_structure(sig_full, direct_profile, n, shared)
            if not aborted:
                for name, value in _graph_stats(expanded).items():
                    record("a", f"n{n}:{name}", value)
                for qk in new_kinds:
                    orbits = count_orbits(n, qk.kind)
                    group = len(qk.kind.group)
                    present = len(expanded.rel(qk.kind.id)) // group if orbits else 0
                    record("a", f"n{n}:density:{qk.kind.id}", present / orbits if orbits else 0.0)
                for text, ast in sentence_asts:
                    record("a", f"n{n}:sentence:{text}", 1.0 if evaluate(expanded, ast, {}, qc, registry) else 0.0)
            for name, value in _graph_stats(direct).items():
                record("b", f"n{n}:{name}", value)
            for qk in new_kinds:
                orbits = count_orbits(n, qk.kind)
                group = len(qk.kind.group)
                present = len(direct.rel(qk.kind.id)) // group if orbits else 0
                record("b", f"n{n}:density:{qk.kind.id}", present / orbits if orbits else 0.0)
            for text, ast in sentence_asts:
                record("b", f"n{n}:sentence:{text}", 1.0 if evaluate(direct, ast, {}, qc, registry) else 0.0)

    max_div = 0.0
    for name in sorted(per_stat):
        a_vals, b_vals = per_stat[name]["a"], per_stat[name]["b"]
        mean_a, lo_a, hi_a = mean_ci(a_vals)
        mean_b, lo_b, hi_b = mean_ci(b_vals)
        diff = abs(mean_a - mean_b)
        max_div = max(max_div, diff)
        report.rows.append(
            {
                "statistic": name,
                "mean_expansion": mean_a,
                "ci_expansion": [lo_a, hi_a],
                "mean_direct": mean_b,
                "ci_direct": [lo_b, hi_b],
                "diff": diff,
                "ci_overlap": (lo_a <= hi_b and lo_b <= hi_a),
            }
        )
    abort_rate = aborts / total if total else 0.0
    report.extras["max_divergence"] = max_div
    report.extras["abort_rate"] = abort_rate
    report.ok = abort_rate <= 0.05
    return report


def run_dichotomy_experiment(scheme: Scheme, cfg: ExperimentConfig) -> ExperimentReport:
    """Rates of low and high derived graphs across random hosts, together
    with the scheme's classification; the report states rates, the direction
    claims live in the verdict fields."""
    gf = cfg.gf()
    profile = ConstantProfile.of({k.id: cfg.q for k in scheme.sig})
    weak = is_one_weak(scheme, gf, seed=derive_seed(cfg.seed, "weak"))
    report = ExperimentReport(
        "dichotomy", {**cfg.as_dict(), "scheme": scheme.name}, cfg.seed
    )
    for n in cfg.sizes:
        samples = high = aborts = 0
        node_counts: List[float] = []
        for t in range(cfg.trials):
            host = draw_structure(scheme.sig, profile, n, derive_seed(cfg.seed, "dich", n, t))
            params = valid_params(host, scheme, cap=6, seed=derive_seed(cfg.seed, "dichp", n, t))
            for cbar in params:
                derived = build_interpreted_graph(host, scheme, cbar).to_structure()
                node_counts.append(float(derived.n))
                try:
                    verdict = classify_low(derived, cfg.iota, gf)
                except BudgetExhausted:
                    aborts += 1
                    continue
                samples += 1
                if verdict.is_high:
                    high += 1
        rate = high / samples if samples else 0.0
        lo, hi = wilson_ci(high, samples)
        report.rows.append(
            {
                "n": n,
                "samples": samples,
                "high": high,
                "high_rate": rate,
                "ci_lo": lo,
                "ci_hi": hi,
                "aborts": aborts,
                "mean_nodes": sum(node_counts) / len(node_counts) if node_counts else 0.0,
            }
        )
    report.verdicts["trivial"] = str(is_trivial(scheme))
    report.verdicts["one_weak"] = f"{weak.value}:{weak.clause}"
    return report


def run_definability_experiment(
    cfg: ExperimentConfig, registry: Optional[SchemeRegistry] = None
) -> ExperimentReport:
    """Fraction of hosts on which the one-free-variable formula defines a set
    that no parameter-free (and no parameterized) formula of the configured
    rank defines."""
    registry = registry if registry is not None else default_registry()
    gf = cfg.gf()
    if not cfg.sentences:
        raise ValueError("definability experiment needs a formula")
    ast = elaborate(parse(cfg.sentences[0]), registry)
    fixed = QuantifierClass(cfg.iota, gf, derive_seed(cfg.seed, "tbar-fixed"), cfg.prob_mode)
    report = ExperimentReport(
        "definability", {**cfg.as_dict(), "formula": cfg.sentences[0]}, cfg.seed
    )
    ok = True
    for n in cfg.sizes:
        nondef_pf = nondef_wp = aborts = empty = full = 0
        for t in range(cfg.trials):
            trial_seed = derive_seed(cfg.seed, "defin", n, t)
            g = draw_random_graph(n, cfg.q, derive_seed(trial_seed, "graph"))
            qc = _quantifier_for_trial(cfg, gf, trial_seed, fixed)
            try:
                subset = defined_set(g, ast, qc, registry)
            except EvaluationAborted:
                aborts += 1
                continue
            empty += 0 if subset else 1
            full += 1 if len(subset) == n else 0
            if not fo_definable(g, subset, cfg.rank):
                nondef_pf += 1
                if not fo_definable_with_params(g, subset, cfg.rank, cfg.max_params):
                    nondef_wp += 1
        completed = cfg.trials - aborts
        abort_rate = aborts / cfg.trials
        ok = ok and abort_rate <= 0.05
        report.rows.append(
            {
                "n": n,
                "trials": cfg.trials,
                "completed": completed,
                "aborts": aborts,
                "abort_rate": abort_rate,
                "nondefinable_rate": nondef_pf / completed if completed else 0.0,
                "nondefinable_with_params_rate": nondef_wp / completed if completed else 0.0,
                "empty_rate": empty / completed if completed else 0.0,
                "full_rate": full / completed if completed else 0.0,
            }
        )
    report.ok = ok
    return report


def run_iterated_experiment(
    u: UDescriptor,
    cfg: ExperimentConfig,
    b17: bool = False,
    registry: Optional[SchemeRegistry] = None,
) -> ExperimentReport:
    """Relation densities of the level-by-level drawing across sizes."""
    gf = cfg.gf()
    if b17 and registry is None:
        registry = default_registry()
    report = ExperimentReport(
        "iterated", {**cfg.as_dict(), "levels": u.level_count(), "b17": b17}, cfg.seed
    )
    sig = u.full_signature()
    for n in cfg.sizes:
        densities: Dict[str, List[float]] = {k.id: [] for k in sig}
        for t in range(cfg.trials):
            seed = derive_seed(cfg.seed, "iter", n, t)
            if b17:
                m = iterated_draw_b17(u, n, seed, registry, gf)
            else:
                m = iterated_draw(u, n, seed, gf)
            for kind in sig:
                orbits = count_orbits(n, kind)
                present = len(m.rel(kind.id)) // len(kind.group) if orbits else 0
                densities[kind.id].append(present / orbits if orbits else 0.0)
        for kind_id, values in sorted(densities.items()):
            mean, lo, hi = mean_ci(values)
            report.rows.append(
                {"n": n, "kind": kind_id, "density": mean, "ci_lo": lo, "ci_hi": hi}
            )
    return report
