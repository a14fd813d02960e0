"""Quantized Prisoner's Dilemma: games, the J^dag (U_1 x ... x U_n) J pipeline, payoffs.

Basis ordering: player 0 (Alice) is the most significant qubit, and the
classical outcome letters map C -> 0, D -> 1.  The payoff for basis index
``b`` is therefore the table entry for ``format(b, "0nb")`` spelled in C/D.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .linalg import DomainError, entangler, is_unitary, kron_all

PD2_PAYOFFS = {
    "CC": (3.0, 3.0),
    "CD": (0.0, 5.0),
    "DC": (5.0, 0.0),
    "DD": (1.0, 1.0),
}


def _pd3_payoffs() -> dict[str, tuple[float, ...]]:
    table = {}
    for outcome in map("".join, product("CD", repeat=3)):
        defectors = outcome.count("D")
        row = []
        for move in outcome:
            if defectors == 0:
                row.append(3.0)
            elif defectors == 3:
                row.append(1.0)
            elif defectors == 1:
                row.append(5.0 if move == "D" else 2.0)
            else:
                row.append(4.0 if move == "D" else 0.0)
        table[outcome] = tuple(row)
    return table


PD3_PAYOFFS = _pd3_payoffs()


def outcomes(players: int) -> list[str]:
    """Outcome strings in basis order (CC..C first, DD..D last)."""
    return ["".join(p) for p in product("CD", repeat=players)]


@dataclass(frozen=True)
class GameDefinition:
    players: int
    gamma: float
    payoff_table: Mapping[str, tuple[float, ...]]

    def __post_init__(self):
        if self.players not in (2, 3):
            raise DomainError(f"players must be 2 or 3, got {self.players!r}")
        if not (0.0 <= self.gamma <= math.pi / 2 + 1e-12) or not math.isfinite(self.gamma):
            raise DomainError(f"gamma={self.gamma!r} outside [0, pi/2]")
        expected = outcomes(self.players)
        table = {}
        for key in expected:
            if key not in self.payoff_table:
                raise DomainError(f"payoff table is missing outcome {key!r}")
            row = tuple(float(x) for x in self.payoff_table[key])
            if len(row) != self.players:
                raise DomainError(
                    f"outcome {key!r} has {len(row)} payoffs, expected {self.players}"
                )
            if not all(math.isfinite(x) for x in row):
                raise DomainError(f"outcome {key!r} has a non-finite payoff")
            table[key] = row
        extra = set(self.payoff_table) - set(expected)
        if extra:
            raise DomainError(f"unknown outcome(s) in payoff table: {sorted(extra)}")
        object.__setattr__(self, "payoff_table", MappingProxyType(table))

    def __reduce__(self):
        # the read-only table view does not pickle; rebuild from a plain dict
        return (GameDefinition, (self.players, self.gamma, dict(self.payoff_table)))

    @cached_property
    def payoff_matrix(self) -> np.ndarray:
        """(2**players, players) array; row b holds the payoffs at basis state b."""
        return np.array([self.payoff_table[k] for k in outcomes(self.players)])

    @cached_property
    def gate(self) -> np.ndarray:
        return entangler(self.players, min(self.gamma, math.pi / 2))

    @cached_property
    def _gate_dagger(self) -> np.ndarray:
        return self.gate.conj().T

    def with_gamma(self, gamma: float) -> "GameDefinition":
        return dataclasses.replace(self, gamma=gamma)

    @property
    def is_symmetric(self) -> bool:
        """True when permuting players permutes the payoff vector the same way."""
        for key, row in self.payoff_table.items():
            for i in range(self.players):
                for j in range(self.players):
                    swapped = list(key)
                    swapped[i], swapped[j] = swapped[j], swapped[i]
                    if self.payoff_table["".join(swapped)][j] != row[i]:
                        return False
        return True


def pd2(gamma: float = 0.0) -> GameDefinition:
    return GameDefinition(2, gamma, PD2_PAYOFFS)


def pd3(gamma: float = 0.0) -> GameDefinition:
    return GameDefinition(3, gamma, PD3_PAYOFFS)


@dataclass(frozen=True)
class PayoffOperator:
    player: int
    diagonal: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal).astype(complex)

    def expectation(self, state: np.ndarray) -> float:
        return float(np.dot(self.diagonal, np.abs(state) ** 2))


@dataclass(frozen=True)
class FinalStateReport:
    state: np.ndarray
    outcome_probabilities: np.ndarray
    density_matrix_trace: float

    def probability(self, outcome: str) -> float:
        return float(self.outcome_probabilities[int(outcome.replace("C", "0").replace("D", "1"), 2)])


def entanglement_entropy(gamma: float) -> float:
    """Von Neumann entropy of J(gamma)|0..0>, with 0 ln 0 taken as 0."""
    if not math.isfinite(gamma) or gamma < -1e-12 or gamma > math.pi / 2 + 1e-12:
        raise DomainError(f"gamma={gamma!r} outside [0, pi/2]")
    s = math.sin(gamma / 2) ** 2
    c = math.cos(gamma / 2) ** 2
    return -sum(p * math.log(p) for p in (s, c) if p > 0.0)


def payoff_operator(game: GameDefinition, player: int) -> PayoffOperator:
    if not 0 <= player < game.players:
        raise DomainError(f"player index {player!r} out of range for {game.players} players")
    return PayoffOperator(player, game.payoff_matrix[:, player].copy())


def initial_state(game: GameDefinition) -> np.ndarray:
    return game.gate[:, 0].copy()


def _check_profile(game: GameDefinition, profile: Sequence) -> list[np.ndarray]:
    if len(profile) != game.players:
        raise DomainError(f"expected {game.players} strategies, got {len(profile)}")
    mats = []
    for i, u in enumerate(profile):
        u = np.asarray(u.unitary() if hasattr(u, "unitary") else u, dtype=complex)
        if u.shape != (2, 2) or not is_unitary(u, 1e-9):
            raise DomainError(f"strategy for player {i} is not a 2x2 unitary")
        mats.append(u)
    return mats


def final_state(game: GameDefinition, profile: Sequence) -> FinalStateReport:
    """``profile`` holds one 2x2 unitary (or strategy point) per player."""
    mats = _check_profile(game, profile)
    psi = game._gate_dagger @ (kron_all(mats) @ game.gate[:, 0])
    probs = np.abs(psi) ** 2
    return FinalStateReport(psi, probs, float(probs.sum()))


def payoffs(game: GameDefinition, profile: Sequence) -> np.ndarray:
    """Expected payoff per player, tr($_i rho_f) = sum_b table_i(b) P(b)."""
    probs = final_state(game, profile).outcome_probabilities
    return probs @ game.payoff_matrix


def _apply_on_axis(state: np.ndarray, u: np.ndarray, axis: int, players: int) -> np.ndarray:
    # (2**axis, 2, rest): matmul broadcasts u over the leading block
    s = state.reshape(2**axis, 2, 2 ** (players - axis - 1))
    return np.matmul(u, s).reshape(-1)


def probe_payoffs(
    game: GameDefinition, player: int, probes: np.ndarray, others: Sequence
) -> np.ndarray:
    """Payoff of ``player`` for each 2x2 operator in ``probes`` (shape (k, 2, 2)).

    ``others`` are the fixed unitaries of the remaining players in seat order.
    Probes are not required to be unitary, which lets callers evaluate the
    quadratic form at non-normalized points.
    """
    n = game.players
    if len(others) != n - 1:
        raise DomainError(f"expected {n - 1} fixed strategies, got {len(others)}")
    state = game.gate[:, 0]
    seats = [s for s in range(n) if s != player]
    for seat, u in zip(seats, others):
        state = _apply_on_axis(state, np.asarray(u, dtype=complex), seat, n)
    block = state.reshape(2**player, 2, 2 ** (n - player - 1))
    probes = np.asarray(probes, dtype=complex)
    batch = np.matmul(probes[:, None], block[None]).reshape(len(probes), 2**n)
    amps = batch @ game._gate_dagger.T
    return (amps.real**2 + amps.imag**2) @ game.payoff_matrix[:, player]
