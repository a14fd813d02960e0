"""Strategy spaces, the named strategy catalog, and search grids.

Every space embeds into SU(2), so a strategy always has coefficients
(w, x, y, z) with U = w I + i x sx + i y sy + i z sz:

* ``2p-diag``    U(theta, phi) -> (cos phi cos t, 0, sin t, sin phi cos t)
* ``2p-offdiag`` U(theta, phi) -> (cos t, sin t sin phi, sin t cos phi, 0)

with t = theta / 2.  The search code relies on this to evaluate payoffs as
quadratic forms.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .linalg import (
    DomainError,
    normalize_su2,
    unitary_from_su2,
    unitary_from_two_param_diag,
    unitary_from_two_param_offdiag,
    su2_from_unitary,
)


class Space(str, enum.Enum):
    CLASSICAL = "classical"
    DIAG = "2p-diag"
    OFFDIAG = "2p-offdiag"
    SU2 = "su2"

    @property
    def is_two_param(self) -> bool:
        return self in (Space.DIAG, Space.OFFDIAG)


_SPACE_ALIASES = {
    "classical": Space.CLASSICAL,
    "2p-diag": Space.DIAG,
    "two-param-diag": Space.DIAG,
    "diag": Space.DIAG,
    "2p-offdiag": Space.OFFDIAG,
    "two-param-offdiag": Space.OFFDIAG,
    "offdiag": Space.OFFDIAG,
    "su2": Space.SU2,
}


def parse_space(tag) -> Space:
    if isinstance(tag, Space):
        return tag
    try:
        return _SPACE_ALIASES[str(tag).strip().lower()]
    except KeyError:
        raise DomainError(f"unknown strategy space {tag!r}") from None


@dataclass(frozen=True)
class StrategyPoint:
    space: Space
    params: tuple
    name: str | None = None

    def __post_init__(self):
        space = parse_space(self.space)
        object.__setattr__(self, "space", space)
        if space is Space.CLASSICAL:
            if self.params not in (("C",), ("D",)):
                raise DomainError(f"classical move must be C or D, got {self.params!r}")
        elif space.is_two_param:
            theta, phi = (float(p) for p in self.params)
            if not (-1e-12 <= theta <= math.pi + 1e-12 and -1e-12 <= phi <= math.pi / 2 + 1e-12):
                raise DomainError(f"(theta, phi)=({theta}, {phi}) outside [0, pi] x [0, pi/2]")
            object.__setattr__(self, "params", (theta, phi))
        else:
            v = normalize_su2(self.params)
            object.__setattr__(self, "params", tuple(float(c) for c in v))

    @classmethod
    def classical(cls, move: str, name: str | None = None) -> "StrategyPoint":
        return cls(Space.CLASSICAL, (move,), name)

    @classmethod
    def diag(cls, theta: float, phi: float, name: str | None = None) -> "StrategyPoint":
        return cls(Space.DIAG, (theta, phi), name)

    @classmethod
    def offdiag(cls, theta: float, phi: float, name: str | None = None) -> "StrategyPoint":
        return cls(Space.OFFDIAG, (theta, phi), name)

    @classmethod
    def su2(cls, coeffs, name: str | None = None) -> "StrategyPoint":
        return cls(Space.SU2, tuple(coeffs), name)

    def unitary(self) -> np.ndarray:
        return to_unitary(self)

    def coeffs(self) -> np.ndarray:
        return to_coeffs(self)

    def label(self) -> str:
        if self.name:
            return self.name
        if self.space is Space.CLASSICAL:
            return self.params[0]
        body = ";".join(_fmt(p) for p in self.params)
        return f"{self.space.value}({body})"


def _fmt(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def to_unitary(point: StrategyPoint) -> np.ndarray:
    if point.space is Space.CLASSICAL:
        return unitary_from_two_param_diag(0.0 if point.params[0] == "C" else math.pi, 0.0)
    if point.space is Space.DIAG:
        return unitary_from_two_param_diag(*_clip_angles(*point.params))
    if point.space is Space.OFFDIAG:
        return unitary_from_two_param_offdiag(*_clip_angles(*point.params))
    return unitary_from_su2(point.params)


def _clip_angles(theta, phi):
    return min(max(theta, 0.0), math.pi), min(max(phi, 0.0), math.pi / 2)


def coeffs_diag(theta, phi) -> np.ndarray:
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.stack([np.cos(phi) * c, np.zeros_like(c), s, np.sin(phi) * c], axis=-1)


def coeffs_offdiag(theta, phi) -> np.ndarray:
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.stack([c, s * np.sin(phi), s * np.cos(phi), np.zeros_like(c)], axis=-1)


def to_coeffs(point: StrategyPoint) -> np.ndarray:
    if point.space is Space.CLASSICAL:
        return np.array([1.0, 0, 0, 0]) if point.params[0] == "C" else np.array([0, 0, 1.0, 0])
    if point.space is Space.DIAG:
        return coeffs_diag(*point.params)
    if point.space is Space.OFFDIAG:
        return coeffs_offdiag(*point.params)
    return np.array(point.params)


def same_strategy(a, b, tol: float = 1e-9) -> bool:
    """Whether two points (or coefficient vectors) give the same operator up to phase."""
    va = a.coeffs() if isinstance(a, StrategyPoint) else np.asarray(a, float)
    vb = b.coeffs() if isinstance(b, StrategyPoint) else np.asarray(b, float)
    return abs(abs(float(va @ vb)) - 1.0) <= tol


def embed(point: StrategyPoint, space) -> StrategyPoint | None:
    """Re-express ``point`` in ``space``; None if the operator is not in that space."""
    space = parse_space(space)
    if point.space is space:
        return point
    v = point.coeffs()
    name = point.name
    if space is Space.SU2:
        return StrategyPoint.su2(v, name)
    for s in (v, -v):
        w, x, y, z = s
        if space is Space.CLASSICAL:
            if same_strategy(s, [1, 0, 0, 0]):
                return StrategyPoint.classical("C", name)
            if same_strategy(s, [0, 0, 1, 0]):
                return StrategyPoint.classical("D", name)
            return None
        if space is Space.DIAG:
            if abs(x) > 1e-9 or y < -1e-12 or w < -1e-12 or z < -1e-12:
                continue
            half = math.atan2(y, math.hypot(w, z))
            phi = math.atan2(z, w) if math.hypot(w, z) > 1e-12 else 0.0
            cand = StrategyPoint.diag(2 * half, phi, name)
        else:
            if abs(z) > 1e-9 or w < -1e-12 or x < -1e-12 or y < -1e-12:
                continue
            half = math.atan2(math.hypot(x, y), w)
            phi = math.atan2(x, y) if math.hypot(x, y) > 1e-12 else 0.0
            cand = StrategyPoint.offdiag(2 * half, phi, name)
        if same_strategy(cand, v):
            return cand
    return None


def point_from_unitary(u, space=Space.SU2, name: str | None = None) -> StrategyPoint | None:
    return embed(StrategyPoint.su2(su2_from_unitary(u), name), space)


_R2 = 1 / math.sqrt(2)
_Ka = 1 / (2 * math.sqrt(2))
_Kb = math.sqrt(3) / (2 * math.sqrt(2))

CATALOG: dict[str, StrategyPoint] = {
    "C": StrategyPoint.diag(0.0, 0.0, "C"),
    "D": StrategyPoint.diag(math.pi, 0.0, "D"),
    "Q": StrategyPoint.diag(0.0, math.pi / 2, "Q"),
    "I": StrategyPoint.su2((1, 0, 0, 0), "I"),
    "iSx": StrategyPoint.su2((0, 1, 0, 0), "iSx"),
    "iSy": StrategyPoint.su2((0, 0, 1, 0), "iSy"),
    "iSz": StrategyPoint.su2((0, 0, 0, 1), "iSz"),
    "K1": StrategyPoint.su2((_R2, 0, _R2, 0), "K1"),
    "K2": StrategyPoint.su2((_R2, 0, -_R2, 0), "K2"),
    "K3": StrategyPoint.su2((-_Ka, _Kb, _Ka, _Kb), "K3"),
    "K4": StrategyPoint.su2((_Ka, -_Kb, _Ka, _Kb), "K4"),
    "K5": StrategyPoint.su2((_Ka, _Kb, -_Ka, _Kb), "K5"),
    "K6": StrategyPoint.su2((_Ka, _Kb, _Ka, -_Kb), "K6"),
}


def catalog_lookup(name: str) -> StrategyPoint:
    try:
        return CATALOG[name]
    except KeyError:
        raise DomainError(f"unknown strategy name {name!r}; known: {', '.join(CATALOG)}") from None


# Preferred spelling when several catalog names denote one operator
# (C=I, D=iSy, Q=iSz).  Three-player output follows the Pauli naming.
_PREFERENCE = {
    2: ["C", "D", "Q", "iSx", "I", "iSy", "iSz", "K1", "K2", "K3", "K4", "K5", "K6"],
    3: ["C", "iSx", "iSy", "iSz", "I", "D", "Q", "K1", "K2", "K3", "K4", "K5", "K6"],
}


def catalog_in_space(space, players: int = 2) -> list[StrategyPoint]:
    """Distinct catalog operators representable in ``space``, named canonically."""
    space = parse_space(space)
    out: list[StrategyPoint] = []
    for name in _PREFERENCE[players]:
        p = embed(CATALOG[name], space)
        if p is None or any(same_strategy(p, q) for q in out):
            continue
        out.append(p)
    return out


def catalog_name(coeffs, players: int = 2) -> str | None:
    for name in _PREFERENCE[players]:
        if same_strategy(CATALOG[name], coeffs, 1e-8):
            return name
    return None


# Super-Fibonacci spiral constants (Alexa, 2022): phi^2 = 2, psi^4 = psi + 4.
_SF_PHI = math.sqrt(2.0)
_SF_PSI = 1.533751168755204288118041


def su2_sample(count: int, seed: int = 0) -> np.ndarray:
    """Deterministic low-discrepancy points on the unit 3-sphere, shape (count, 4).

    ``seed`` 0 gives the plain spiral; other seeds apply a fixed random
    rotation drawn from that seed.
    """
    if count < 1:
        raise DomainError("sample size must be positive")
    s = np.arange(count) + 0.5
    r = np.sqrt(s / count)
    big_r = np.sqrt(1.0 - s / count)
    alpha = 2 * np.pi * s / _SF_PHI
    beta = 2 * np.pi * s / _SF_PSI
    pts = np.stack([r * np.sin(alpha), r * np.cos(alpha), big_r * np.sin(beta), big_r * np.cos(beta)], 1)
    if seed:
        q, rr = np.linalg.qr(np.random.default_rng(seed).normal(size=(4, 4)))
        pts = pts @ (q * np.sign(np.diag(rr))).T
    return pts / np.linalg.norm(pts, axis=1)[:, None]


_AXES = np.concatenate([np.eye(4), -np.eye(4)])


@dataclass(frozen=True)
class StrategyGrid:
    """Lazy grid over one strategy space.

    Two-parameter grids are (n_theta, n_phi) lattices covering both endpoints
    of [0, pi] x [0, pi/2], ordered theta-major.  The su2 grid has ``size``
    points: the 8 signed axes followed by spiral points.
    """

    space: Space
    resolution: tuple[int, ...]
    seed: int = 0

    def __len__(self) -> int:
        if self.space is Space.CLASSICAL:
            return 2
        return int(np.prod(self.resolution))

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        nt, nph = self.resolution
        return np.linspace(0.0, math.pi, nt), np.linspace(0.0, math.pi / 2, nph)

    def coeffs(self) -> np.ndarray:
        """All grid points as SU(2) coefficient rows, in iteration order."""
        if self.space is Space.CLASSICAL:
            return np.array([[1.0, 0, 0, 0], [0, 0, 1.0, 0]])
        if self.space is Space.SU2:
            (size,) = self.resolution
            return np.concatenate([_AXES, su2_sample(size - 8, self.seed)]) if size > 8 else _AXES.copy()
        th, ph = self.axes()
        tt, pp = np.meshgrid(th, ph, indexing="ij")
        fn = coeffs_diag if self.space is Space.DIAG else coeffs_offdiag
        return fn(tt, pp).reshape(-1, 4)

    def __iter__(self) -> Iterator[StrategyPoint]:
        if self.space is Space.CLASSICAL:
            yield StrategyPoint.classical("C")
            yield StrategyPoint.classical("D")
        elif self.space is Space.SU2:
            for row in self.coeffs():
                yield StrategyPoint.su2(row)
        else:
            th, ph = self.axes()
            for t in th:
                for p in ph:
                    yield StrategyPoint(self.space, (float(t), float(p)))


def grid(space, resolution, seed: int = 0) -> StrategyGrid:
    space = parse_space(space)
    res = (resolution,) if isinstance(resolution, int) else tuple(int(r) for r in resolution)
    if space is Space.SU2:
        if len(res) != 1 or res[0] < 8:
            raise DomainError(f"su2 grid needs a single size >= 8, got {resolution!r}")
    elif space.is_two_param:
        if len(res) == 1:
            res = (res[0], res[0])
        if len(res) != 2 or min(res) < 2:
            raise DomainError(f"two-parameter grid needs >= 2 points per axis, got {resolution!r}")
    else:
        res = (2,)
    return StrategyGrid(space, res, seed)
