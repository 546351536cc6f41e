"""fmlab: a finite-model laboratory.

Invariant random structures, graph interpretation schemes, low/high graph
classification, a seeded random class of high graphs acting as a logic
quantifier, and Monte Carlo experiments for the induced zero-one behavior.
"""

__version__ = "0.1.0"

from .growth import GrowthFunctions, PAPER_DEFAULT, constant_growth, eval_growth, table_growth
from .kinds import GRAPH_KIND, GRAPH_SIG, Kind, KindSequence
from .structures import (
    ConstantProfile,
    SplitProfile,
    Structure,
    TableProfile,
    draw_random_graph,
    draw_structure,
    validate_structure,
)
from .canon import CanonicalForm, canonical_form, enumerate_graphs
from .lowness import LownessVerdict, classify_low_1, classify_low_1_exhaustive, classify_low_2, verify_witness
from .quantifier import QuantifierClass, membership, sample_tbar_prefix
from .schemes import InterpretedGraph, Scheme, build_interpreted_graph, make_scheme
from .logic import SchemeRegistry, check_extension_axiom, defined_set, elaborate, evaluate, fo_definable, type_partition
