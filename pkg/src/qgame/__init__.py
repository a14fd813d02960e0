"""Pure-strategy Nash equilibria of entangled quantum Prisoner's Dilemma games."""
from .linalg import DomainError, NumericalError, jacobi_eigs, kron
from .game import GameDefinition, entanglement_entropy, final_state, payoffs, pd2, pd3
from .strategies import CATALOG, Space, StrategyPoint, catalog_lookup, grid
from .equilibrium import (
    SearchConfig,
    best_response,
    find_threshold,
    find_thresholds,
    make_predicate,
    search_symmetric_ne,
    verify_nash,
)

__all__ = [
    "CATALOG",
    "DomainError",
    "GameDefinition",
    "NumericalError",
    "SearchConfig",
    "Space",
    "StrategyPoint",
    "best_response",
    "catalog_lookup",
    "entanglement_entropy",
    "final_state",
    "find_threshold",
    "find_thresholds",
    "grid",
    "jacobi_eigs",
    "kron",
    "make_predicate",
    "payoffs",
    "pd2",
    "pd3",
    "search_symmetric_ne",
    "verify_nash",
]
