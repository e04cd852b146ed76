"""Static verification of attribute accesses in modular attribute grammars."""

__version__ = "0.1.0"

from .analysis import analyze, analyze_role, build_for_role, fault_keys, violation_keys
from .errors import (
    AgError, BaselineDirty, BudgetExceeded, ChoiceUnderflow, EmptyLanguage, ImbalanceError, IndexOutOfRange,
    MissingActionCfg, ParseError, PropagateOnNonUnitProduction, UnknownType, ValidationError,
)
from .model import (
    Bundle, Production, RoleSpec, TypeHierarchy, bundle_from_dict, dump_bundle, load_bundle, producers, subtype_of,
)
from .mutation import run_campaign
from .oracle import oracle_check
from .postorder import check_postorder
from .rolecfg import build_role_cfg, dedup_productions, to_dot
from .samples import load_sample
from .visit import Violation, VisitStats, visit, visit_optimized

__all__ = [
    "AgError", "BaselineDirty", "BudgetExceeded", "Bundle", "ChoiceUnderflow", "EmptyLanguage", "ImbalanceError",
    "IndexOutOfRange", "MissingActionCfg", "ParseError", "Production", "PropagateOnNonUnitProduction", "RoleSpec",
    "TypeHierarchy", "UnknownType", "ValidationError", "Violation", "VisitStats", "analyze", "analyze_role",
    "build_for_role", "build_role_cfg", "bundle_from_dict", "check_postorder", "dedup_productions", "dump_bundle",
    "fault_keys", "load_bundle", "load_sample", "oracle_check", "producers", "run_campaign", "subtype_of", "to_dot",
    "violation_keys", "visit", "visit_optimized",
]
