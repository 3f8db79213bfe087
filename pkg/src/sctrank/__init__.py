"""Size-change termination: decision, ranking-function synthesis, certificate checking."""

from .decide import Variant, Verdict, closure, compose, decide_sct
from .errors import (
    BudgetExceeded,
    ClassificationError,
    GenerationError,
    IllFormedRanking,
    InstanceError,
    NonTerminatingError,
    ParseError,
    SctError,
    UndefinedSuccessor,
)
from .generators import RandomParams, builtin, family_61, family_62, family_63, gen_random, gen_random_fanin, k_ranking
from .model import Acg, Arc, FlowPoint, Label, SizeChangeGraph, classify, load_instance, parse_instance, serialize_instance, transpose
from .preserver import compute_mtp, is_thread_preserver, strict_max_ranking, strict_min_ranking
from .rankgen import RankVector, next_vector, reachable_vectors, synthesize, synthesize_fanin, synthesize_fanout
from .ranking import Const, MaxVal, MinVal, RankingDoc, VarSet, load_ranking, parse_ranking, serialize_ranking
from .verify import Exhaustive, Sampled, VerifyReport, verify_ranking

__version__ = "0.1.0"

__all__ = [
    "Acg", "Arc", "BudgetExceeded", "ClassificationError", "Const", "Exhaustive", "FlowPoint",
    "GenerationError", "IllFormedRanking", "InstanceError", "Label", "MaxVal", "MinVal",
    "NonTerminatingError", "ParseError", "RandomParams", "RankVector", "RankingDoc", "Sampled",
    "SctError", "SizeChangeGraph", "UndefinedSuccessor", "VarSet", "Variant", "Verdict",
    "VerifyReport", "builtin", "classify", "closure", "compose", "compute_mtp", "decide_sct",
    "family_61", "family_62", "family_63", "gen_random", "gen_random_fanin", "is_thread_preserver",
    "k_ranking", "load_instance", "load_ranking", "next_vector", "parse_instance", "parse_ranking",
    "reachable_vectors", "serialize_instance", "serialize_ranking", "strict_max_ranking",
    "strict_min_ranking", "synthesize", "synthesize_fanin", "synthesize_fanout", "transpose",
    "verify_ranking",
]
