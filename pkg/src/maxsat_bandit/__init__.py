"""Bandit-guided local search for (weighted) partial MaxSAT."""

from .bandit import BanditState, reward
from .formula import (
    INFEASIBLE,
    Clause,
    Formula,
    FormulaBuilder,
    Literal,
    WCNFError,
    from_clauses,
    load_wcnf,
    parse_wcnf,
    serialize_wcnf,
    validate_model,
)
from .hydeci import hydeci
from .search import SolveConfig, SolveResult, bms_pick, solve
from .state import SearchState, init_state

__all__ = [
    "BanditState",
    "Clause",
    "Formula",
    "FormulaBuilder",
    "INFEASIBLE",
    "Literal",
    "SearchState",
    "SolveConfig",
    "SolveResult",
    "WCNFError",
    "bms_pick",
    "from_clauses",
    "hydeci",
    "init_state",
    "load_wcnf",
    "parse_wcnf",
    "reward",
    "serialize_wcnf",
    "solve",
    "validate_model",
]
