"""Game files, gamma sweeps with regime labels, and CSV output."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path

import numpy as np

from .equilibrium import (
    DEFAULT_EPS,
    DEFAULT_RESOLUTION,
    EquilibriumReport,
    SearchConfig,
    fit_family,
    search_symmetric_ne,
    verify_nash,
)
from .game import PD2_PAYOFFS, PD3_PAYOFFS, GameDefinition, entanglement_entropy, outcomes
from .linalg import DomainError
from .strategies import Space, catalog_in_space, parse_space, same_strategy

REGIMES = ("classical", "transition", "quantum", "coexistence", "none")


class GameConfigError(DomainError):
    """A game file is malformed; the message names the offending key."""


def _game_from_dict(doc, where: str) -> GameDefinition:
    if not isinstance(doc, dict):
        raise GameConfigError(f"{where}: top level must be a JSON object")
    for key in ("players", "payoffs"):
        if key not in doc:
            raise GameConfigError(f"{where}: missing key {key!r}")
    players = doc["players"]
    if players not in (2, 3) or isinstance(players, bool):
        raise GameConfigError(f"{where}: key 'players' must be 2 or 3, got {players!r}")
    gamma = doc.get("gamma", 0.0)
    if isinstance(gamma, bool) or not isinstance(gamma, (int, float)) or not 0.0 <= gamma <= math.pi / 2 + 1e-12:
        raise GameConfigError(f"{where}: key 'gamma' must be a number in [0, pi/2], got {gamma!r}")
    table = doc["payoffs"]
    if not isinstance(table, dict):
        raise GameConfigError(f"{where}: key 'payoffs' must be an object")
    for key in outcomes(players):
        if key not in table:
            raise GameConfigError(f"{where}: payoffs missing outcome {key!r}")
        row = table[key]
        if not isinstance(row, list) or len(row) != players:
            raise GameConfigError(f"{where}: payoffs[{key!r}] must list {players} numbers")
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) for x in row):
            raise GameConfigError(f"{where}: payoffs[{key!r}] has a non-numeric entry")
    extra = sorted(set(table) - set(outcomes(players)))
    if extra:
        raise GameConfigError(f"{where}: payoffs has unknown outcome {extra[0]!r}")
    unknown = sorted(set(doc) - {"players", "gamma", "payoffs"})
    if unknown:
        raise GameConfigError(f"{where}: unknown key {unknown[0]!r}")
    return GameDefinition(players, float(gamma), {k: tuple(v) for k, v in table.items()})


def parse_game_config(source) -> GameDefinition:
    """Load a game from a JSON file, or the built-in "pd2" / "pd3" tables."""
    if isinstance(source, str) and source in ("pd2", "pd3"):
        return GameDefinition(2, 0.0, PD2_PAYOFFS) if source == "pd2" else GameDefinition(3, 0.0, PD3_PAYOFFS)
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise GameConfigError(f"{path}: cannot read game file ({exc.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return _game_from_dict(doc, str(path))


@dataclass(frozen=True)
class SweepConfig:
    game: GameDefinition
    space: Space = Space.SU2
    gammas: tuple = ()
    eps: float | None = None
    search: bool | None = None  # None: search only in su2
    search_config: SearchConfig = field(default_factory=SearchConfig)
    resolution: tuple = DEFAULT_RESOLUTION
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "space", parse_space(self.space))
        gs = tuple(float(g) for g in self.gammas)
        if not gs:
            raise DomainError("sweep needs at least one gamma")
        for g in gs:
            if not math.isfinite(g) or not 0.0 <= g <= math.pi / 2 + 1e-12:
                raise DomainError(f"gamma={g!r} outside [0, pi/2]")
        object.__setattr__(self, "gammas", gs)

    @staticmethod
    def gamma_range(start: float, stop: float, count: int) -> tuple:
        if not 0.0 <= start <= stop <= math.pi / 2 + 1e-12:
            raise DomainError(f"need 0 <= start <= stop <= pi/2, got [{start}, {stop}]")
        if count < 2:
            raise DomainError(f"gamma count must be >= 2, got {count}")
        return tuple(float(g) for g in np.linspace(start, stop, count))

    @property
    def searching(self) -> bool:
        return self.space is Space.SU2 if self.search is None else self.search


@dataclass(frozen=True)
class EquilibriumRow:
    id: str
    payoffs: tuple
    a: float | None = None
    b: float | None = None


@dataclass(frozen=True)
class GammaSweepRecord:
    gamma: float
    entropy: float
    regime: str
    equilibria: tuple  # of EquilibriumRow, sorted by id


def _is_defect_type(report: EquilibriumReport) -> bool:
    # every player flips: the operator lies in span{i sx, i sy}
    return all(abs(p.coeffs()[0]) < 1e-9 and abs(p.coeffs()[3]) < 1e-9 for p in report.profile)


def _is_symmetric(report: EquilibriumReport) -> bool:
    first = report.profile[0]
    return all(same_strategy(first, p) for p in report.profile[1:])


def classify_regime(reports) -> str:
    """classical: a symmetric all-defect-type equilibrium only; quantum: other
    symmetric equilibria only; coexistence: both; transition: asymmetric only."""
    sym = [r for r in reports if _is_symmetric(r)]
    if not reports:
        return "none"
    if not sym:
        return "transition"
    defect = any(_is_defect_type(r) for r in sym)
    other = any(not _is_defect_type(r) for r in sym)
    if defect and other:
        return "coexistence"
    return "classical" if defect else "quantum"


def _catalog_candidates(game: GameDefinition, space: Space):
    pts = catalog_in_space(space, game.players)
    if game.players == 2:
        return [list(p) for p in product(pts, repeat=2)]
    return [[p] * game.players for p in pts]


def equilibria_at(game: GameDefinition, config: SweepConfig) -> list[EquilibriumReport]:
    space = config.space
    eps = DEFAULT_EPS[space] if config.eps is None else config.eps
    found: list[EquilibriumReport] = []
    for prof in _catalog_candidates(game, space):
        verdict = verify_nash(game, prof, space, eps, config.resolution)
        if verdict.is_equilibrium:
            fam = fit_family(prof[0].coeffs()) if space is Space.SU2 and _sym(prof) else None
            found.append(EquilibriumReport(tuple(prof), verdict.payoffs, game.gamma, verdict, fam))
    if config.searching and game.is_symmetric:
        cfg = replace(config.search_config, eps=eps, resolution=config.resolution)
        for rep in search_symmetric_ne(game, space, cfg):
            if not any(all(same_strategy(p, q) for p, q in zip(rep.profile, f.profile)) for f in found):
                found.append(rep)
    return sorted(found, key=lambda r: r.id)


def _sym(prof) -> bool:
    return all(same_strategy(prof[0], p) for p in prof[1:])


def _record(game: GameDefinition, config: SweepConfig) -> GammaSweepRecord:
    reports = equilibria_at(game, config)
    rows = tuple(
        EquilibriumRow(
            r.id,
            tuple(float(x) for x in r.payoffs),
            None if r.family is None else r.family.a,
            None if r.family is None else r.family.b,
        )
        for r in reports
    )
    return GammaSweepRecord(game.gamma, entanglement_entropy(game.gamma), classify_regime(reports), rows)


def _record_task(args):
    game, config = args
    return _record(game, config)


def run_sweep(config: SweepConfig) -> list[GammaSweepRecord]:
    """One record per gamma, sorted by gamma; any failure aborts the whole sweep."""
    tasks = [(config.game.with_gamma(g), config) for g in config.gammas]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            records = list(pool.map(_record_task, tasks))
    else:
        records = [_record_task(t) for t in tasks]
    return sorted(records, key=lambda r: r.gamma)


# ---------------------------------------------------------------------------
# CSV


def _fixed(x: float) -> str:
    out = f"{x:.12f}"
    # values that round to zero print without a sign
    return out[1:] if out.startswith("-") and float(out) == 0.0 else out


def _sig(x: float | None) -> str:
    if x is None:
        return ""
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def csv_header(players: int) -> list[str]:
    return ["gamma", "entropy", "regime", "equilibrium", *(f"payoff_{i + 1}" for i in range(players)), "a", "b"]


def format_csv(records, players: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(players))
    for rec in records:
        head = [_fixed(rec.gamma), _fixed(rec.entropy), rec.regime]
        if not rec.equilibria:
            w.writerow(head + [""] * (players + 3))
        for row in rec.equilibria:
            w.writerow(head + [row.id, *(_sig(p) for p in row.payoffs), _sig(row.a), _sig(row.b)])
    return buf.getvalue()


def emit_csv(records, path, players: int | None = None) -> Path:
    """Write ``records`` as UTF-8 CSV with LF endings; nothing is created on error."""
    records = list(records)
    if not records:
        raise DomainError("no sweep records to write")
    if players is None:
        sizes = {len(r.payoffs) for rec in records for r in rec.equilibria}
        if len(sizes) > 1:
            raise DomainError("records mix player counts")
        if not sizes:
            raise DomainError("player count unknown: pass players= for all-empty records")
        players = sizes.pop()
    text = format_csv(records, players)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
    return path


def read_csv(path) -> list[GammaSweepRecord]:
    """Parse a file written by ``emit_csv`` back into records."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:4] != ["gamma", "entropy", "regime", "equilibrium"]:
        raise DomainError(f"{path}: not a sweep CSV")
    players = len(rows[0]) - 6
    grouped: dict[tuple, list] = {}
    for row in rows[1:]:
        key = (float(row[0]), float(row[1]), row[2])
        grouped.setdefault(key, [])
        if row[3]:
            pay = tuple(float(x) for x in row[4 : 4 + players])
            a = float(row[4 + players]) if row[4 + players] else None
            b = float(row[5 + players]) if row[5 + players] else None
            grouped[key].append(EquilibriumRow(row[3], pay, a, b))
    return [GammaSweepRecord(g, s, reg, tuple(eqs)) for (g, s, reg), eqs in grouped.items()]
