"""Best responses, epsilon-Nash verification, symmetric equilibrium search and
entanglement thresholds.

With the other players fixed, a player's payoff over SU(2) coefficients v is a
real quadratic form v^T M v.  Over SU(2) the best response is therefore the
top eigenspace of M; over the two-parameter sets it is a grid scan of the
same form followed by coordinate-wise golden-section refinement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, least_squares, minimize, minimize_scalar

from .game import GameDefinition, payoffs, probe_payoffs
from .linalg import (
    DomainError,
    EigenDecomposition4,
    NumericalError,
    jacobi_eigs,
    su2_matrices,
    unitary_from_su2,
)
from .strategies import (
    CATALOG,
    Space,
    StrategyPoint,
    catalog_in_space,
    catalog_lookup,
    catalog_name,
    coeffs_diag,
    coeffs_offdiag,
    grid,
    parse_space,
    same_strategy,
    su2_sample,
    to_unitary,
)

DEFAULT_EPS = {Space.SU2: 1e-7, Space.CLASSICAL: 1e-7, Space.DIAG: 5e-4, Space.OFFDIAG: 5e-4}
DEFAULT_RESOLUTION = (181, 91)
REFINE_STEP = 1e-8

# e_i then (e_i + e_j)/sqrt(2): payoffs at these 10 points fix the quadratic form
_PAIRS = [(i, j) for i in range(4) for j in range(i + 1, 4)]
_PROBE_COEFFS = np.concatenate(
    [np.eye(4), np.array([(np.eye(4)[i] + np.eye(4)[j]) / math.sqrt(2) for i, j in _PAIRS])]
)
_PROBE_MATS = su2_matrices(_PROBE_COEFFS)
_UPPER = tuple(np.array(ix) for ix in zip(*_PAIRS))


def _as_unitary(s) -> np.ndarray:
    return to_unitary(s) if isinstance(s, StrategyPoint) else np.asarray(s, dtype=complex)


def quadratic_form(game: GameDefinition, player: int, others: Sequence) -> np.ndarray:
    """Symmetric M with payoff(player; v) = v^T M v for unit SU(2) coefficients v.

    ``others`` holds the fixed strategies (unitaries or points) of the other
    players in seat order.
    """
    if not 0 <= player < game.players:
        raise DomainError(f"player index {player!r} out of range")
    vals = probe_payoffs(game, player, _PROBE_MATS, [_as_unitary(o) for o in others])
    d = vals[:4]
    off = vals[4:] - 0.5 * (d[_UPPER[0]] + d[_UPPER[1]])
    m = np.diag(d)
    m[_UPPER] = off
    m[_UPPER[1], _UPPER[0]] = off
    return m


def symmetric_form(game: GameDefinition, v) -> np.ndarray:
    """Player 0's quadratic form when every other player uses coefficients ``v``."""
    u = su2_matrices(np.asarray(v, dtype=float))
    return quadratic_form(game, 0, [u] * (game.players - 1))


@dataclass(frozen=True, eq=False)
class BestResponse:
    space: Space
    value: float
    argmax_set: tuple
    method: str
    eigen: EigenDecomposition4 | None = None
    form: np.ndarray | None = None
    grid_values: np.ndarray | None = field(default=None, repr=False)
    grid_shape: tuple | None = None


def _golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-11):
    """Golden-section maximization on [lo, hi]; endpoints are always considered."""
    inv = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    best = max(((fc, c), (fd, d), (f(lo), lo), (f(hi), hi)), key=lambda t: t[0])
    return best[1], best[0]


def _refine(m: np.ndarray, space: Space, theta: float, phi: float, value: float, dt: float, dp: float):
    coeff = coeffs_diag if space is Space.DIAG else coeffs_offdiag

    def f(t, p):
        c = coeff(t, p)
        return float(c @ m @ c)

    for _ in range(200):
        t_new, v_t = _golden_max(lambda t: f(t, phi), max(0.0, theta - dt), min(math.pi, theta + dt))
        if v_t <= value:
            t_new, v_t = theta, value
        p_new, v_p = _golden_max(lambda p: f(t_new, p), max(0.0, phi - dp), min(math.pi / 2, phi + dp))
        if v_p <= v_t:
            p_new, v_p = phi, v_t
        step = max(abs(t_new - theta), abs(p_new - phi))
        theta, phi, value = t_new, p_new, v_p
        if step < REFINE_STEP:
            break
    return theta, phi, value


def best_response(
    game: GameDefinition,
    player: int,
    others: Sequence,
    space=Space.SU2,
    resolution=None,
    refine: bool = True,
) -> BestResponse:
    space = parse_space(space)
    m = quadratic_form(game, player, others)
    if space is Space.SU2:
        eig = jacobi_eigs(m)
        pts = tuple(StrategyPoint.su2(col) for col in eig.top_eigenspace.T)
        return BestResponse(space, eig.lambda_max, pts, "eigen", eig, m)

    g = grid(space, resolution or DEFAULT_RESOLUTION)
    coeffs = g.coeffs()
    vals = np.einsum("ki,ij,kj->k", coeffs, m, coeffs)
    top = vals.max()
    # first maximum up to rounding: lowest theta, then phi
    k = int(np.argmax(vals >= top - 1e-12 * max(1.0, abs(top))))
    if space is Space.CLASSICAL:
        pts = (StrategyPoint.classical("CD"[k]),)
        return BestResponse(space, float(vals[k]), pts, "grid", None, m, vals, (2,))

    nt, nph = g.resolution
    it, ip = divmod(k, nph)
    th, ph = g.axes()
    theta, phi, value = float(th[it]), float(ph[ip]), float(vals[k])
    if refine:
        theta, phi, value = _refine(m, space, theta, phi, value, th[1] - th[0], ph[1] - ph[0])
    pt = StrategyPoint(space, (theta, phi))
    return BestResponse(space, value, (pt,), "grid", None, m, vals, (nt, nph))


@dataclass(frozen=True, eq=False)
class NashVerdict:
    is_equilibrium: bool
    deviation_gains: tuple
    epsilon: float
    strict: bool
    payoffs: np.ndarray
    best_responses: tuple = field(repr=False, default=())

    @property
    def max_gain(self) -> float:
        return max(self.deviation_gains)


def _spaces_for(space, players: int) -> list[Space]:
    if isinstance(space, (list, tuple)):
        if len(space) != players:
            raise DomainError(f"expected {players} spaces, got {len(space)}")
        return [parse_space(s) for s in space]
    return [parse_space(space)] * players


STRICT_CELLS = 5


def _grid_strict(br: BestResponse, current: StrategyPoint, current_value: float, eps: float) -> bool:
    """Every eps-optimal grid point must lie within a few cells of ``current``.

    A flat direction (a non-strict equilibrium) puts eps-optimal points far
    away; the quadratic fall-off around a strict maximum keeps them close.
    """
    vals = br.grid_values
    mine = current.coeffs()
    if br.space is Space.CLASSICAL:
        alt = [v for v, c in zip(vals, ([1.0, 0, 0, 0], [0, 0, 1.0, 0])) if not same_strategy(c, mine)]
        return all(v < current_value - eps for v in alt)
    g = grid(br.space, br.grid_shape)
    th, ph = g.axes()
    radius = STRICT_CELLS * max(th[1] - th[0], ph[1] - ph[0])
    near_opt = vals >= current_value - eps
    overlap = np.abs(g.coeffs()[near_opt] @ mine)
    return bool(np.all(overlap >= math.cos(radius)))


def verify_nash(
    game: GameDefinition,
    profile: Sequence[StrategyPoint],
    space=Space.SU2,
    eps: float | None = None,
    resolution=None,
) -> NashVerdict:
    """Check that no player gains more than ``eps`` by deviating within ``space``.

    ``space`` is one tag for everybody or one per player.  When ``eps`` is
    None the largest per-space default applies (1e-7 exact, 5e-4 grid).
    """
    if len(profile) != game.players:
        raise DomainError(f"expected {game.players} strategies, got {len(profile)}")
    spaces = _spaces_for(space, game.players)
    if eps is None:
        eps = max(DEFAULT_EPS[s] for s in spaces)
    mats = [_as_unitary(p) for p in profile]
    current = payoffs(game, mats)
    gains, brs, strict = [], [], True
    for i, sp in enumerate(spaces):
        others = mats[:i] + mats[i + 1 :]
        br = best_response(game, i, others, sp, resolution)
        gains.append(br.value - float(current[i]))
        brs.append(br)
        if sp is Space.SU2:
            me = profile[i].coeffs() if isinstance(profile[i], StrategyPoint) else None
            in_top = me is not None and np.linalg.norm(br.eigen.top_eigenspace.T @ me) > 1 - 1e-6
            strict &= br.eigen.top_eigenspace.shape[1] == 1 and in_top
        else:
            pt = profile[i] if isinstance(profile[i], StrategyPoint) else None
            strict &= pt is not None and _grid_strict(br, pt, float(current[i]), eps)
    ok = all(g <= eps for g in gains)
    return NashVerdict(ok, tuple(gains), eps, bool(ok and strict), current, tuple(brs))


# ---------------------------------------------------------------------------
# family templates

_R3 = math.sqrt(3) / 2
FAMILY_TEMPLATES = {
    "F1+": (np.array([0, 0, 1.0, 0]), np.array([0, 0, 0, 1.0])),
    "F1-": (np.array([0, 0, 1.0, 0]), np.array([0, 0, 0, -1.0])),
    "F2++": (np.array([_R3, 0, 0, 0.5]), np.array([0, _R3, 0.5, 0])),
    "F2+-": (np.array([_R3, 0, 0, 0.5]), np.array([0, _R3, -0.5, 0])),
    "F2-+": (np.array([_R3, 0, 0, -0.5]), np.array([0, _R3, 0.5, 0])),
    "F2--": (np.array([_R3, 0, 0, -0.5]), np.array([0, _R3, -0.5, 0])),
}
FAMILY_TOL = 1e-6


@dataclass(frozen=True)
class FamilyFit:
    template: str
    a: float
    b: float
    residual: float


def fit_family(v) -> FamilyFit | None:
    """Match +-(a*u1 - b*u2) with a, b > 0 against the family templates."""
    v = np.asarray(v, dtype=float)
    for name, (u1, u2) in FAMILY_TEMPLATES.items():
        for s in (1.0, -1.0):
            a, b = s * float(v @ u1), -s * float(v @ u2)
            if a <= FAMILY_TOL or b <= FAMILY_TOL:
                continue
            res = float(np.linalg.norm(v - s * (a * u1 - b * u2)))
            if res < FAMILY_TOL:
                norm = math.hypot(a, b)
                return FamilyFit(name, a / norm, b / norm, res)
    return None


# ---------------------------------------------------------------------------
# symmetric search


@dataclass(frozen=True)
class SearchConfig:
    multistarts: int = 64
    seed: int = 0
    eps: float | None = None
    damping: float = 0.5
    max_iter: int = 500
    resolution: tuple = DEFAULT_RESOLUTION
    coarse: tuple = (61, 31)


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    profile: tuple
    payoffs: np.ndarray
    gamma: float
    verdict: NashVerdict = field(repr=False)
    family: FamilyFit | None = None

    @property
    def id(self) -> str:
        return "x".join(p.label() for p in self.profile)

    @property
    def strict(self) -> bool:
        return self.verdict.strict


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v) >= np.abs(v).max() - 1e-9))
    return -v if v[k] < 0 else v


def _named_point(v: np.ndarray, space: Space, players: int) -> StrategyPoint:
    name = catalog_name(v, players)
    if name is not None:
        from .strategies import embed

        p = embed(CATALOG[name], space)
        if p is not None:
            return StrategyPoint(p.space, p.params, name)
    v = _canonical_sign(v)
    v = np.where(np.abs(v) < 1e-12, 0.0, v)
    return StrategyPoint.su2(v)


def _sym_residual(game: GameDefinition, x: np.ndarray) -> np.ndarray:
    nx = float(np.linalg.norm(x))
    u = x / nx
    mu = symmetric_form(game, u) @ u
    return np.concatenate([mu - float(u @ mu) * u, [nx - 1.0]])


def _polish(game: GameDefinition, v0: np.ndarray) -> np.ndarray | None:
    """Solve M(u) u = (u^T M(u) u) u by least squares, starting at ``v0``."""
    try:
        r = least_squares(
            lambda x: _sym_residual(game, x), v0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400
        )
    except (ValueError, np.linalg.LinAlgError):
        return None
    u = r.x / np.linalg.norm(r.x)
    if np.max(np.abs(_sym_residual(game, u))) > 1e-9:
        return None
    return u


STALL_WINDOW = 50


def _iterate(game: GameDefinition, v: np.ndarray, damping: float, max_iter: int):
    """Damped symmetric best-response iteration; returns (v, converged).

    Gives up early once the step size has failed to halve over
    ``STALL_WINDOW`` iterations (a cycle or a repelling fixed point).
    """
    u_old = su2_matrices(v)
    steps: list[float] = []
    for k in range(max_iter):
        top = jacobi_eigs(symmetric_form(game, v)).top_eigenspace
        p = top @ (top.T @ v)
        if np.linalg.norm(p) < 1e-8:
            p = top[:, 0]
        p = p / np.linalg.norm(p)
        if p @ v < 0:
            p = -p
        nv = (1 - damping) * v + damping * p
        nv = nv / np.linalg.norm(nv)
        u_new = su2_matrices(nv)
        step = min(np.max(np.abs(u_new - u_old)), np.max(np.abs(u_new + u_old)))
        if step < 1e-10:
            return nv, True
        steps.append(step)
        if k >= STALL_WINDOW and step > 0.5 * steps[k - STALL_WINDOW]:
            return nv, False
        v, u_old = nv, u_new
    return v, False


def _report(game: GameDefinition, point: StrategyPoint, verdict: NashVerdict, space: Space) -> EquilibriumReport:
    fam = fit_family(point.coeffs()) if space is Space.SU2 else None
    profile = (point,) * game.players
    return EquilibriumReport(profile, verdict.payoffs, game.gamma, verdict, fam)


def _search_su2(game: GameDefinition, config: SearchConfig) -> list[EquilibriumReport]:
    n = game.players
    eps = DEFAULT_EPS[Space.SU2] if config.eps is None else config.eps
    seeds = list(su2_sample(config.multistarts, config.seed)) if config.multistarts > 0 else []
    seeds += [p.coeffs() for p in catalog_in_space(Space.SU2, n)]
    kept: list[tuple[np.ndarray, EquilibriumReport]] = []
    rejected: list[np.ndarray] = []

    def consider(u):
        if u is None:
            return
        if any(same_strategy(u, w, 1e-8) for w, _ in kept) or any(same_strategy(u, w, 1e-8) for w in rejected):
            return
        point = _named_point(u, Space.SU2, n)
        verdict = verify_nash(game, [point] * n, Space.SU2, eps)
        if verdict.is_equilibrium:
            kept.append((u, _report(game, point, verdict, Space.SU2)))
        else:
            rejected.append(u)

    for v0 in seeds:
        v0 = np.asarray(v0, dtype=float)
        v, converged = _iterate(game, v0, config.damping, config.max_iter)
        if converged:
            consider(v)
        else:
            consider(_polish(game, v))
            consider(_polish(game, v0))
    return [r for _, r in kept]


def _grid_gain(game: GameDefinition, c: np.ndarray, fine: np.ndarray) -> float:
    m = symmetric_form(game, c)
    return float(np.max(np.einsum("ki,ij,kj->k", fine, m, fine)) - c @ m @ c)


def _search_two_param(game: GameDefinition, space: Space, config: SearchConfig) -> list[EquilibriumReport]:
    n = game.players
    eps = DEFAULT_EPS[space] if config.eps is None else config.eps
    coeff = coeffs_diag if space is Space.DIAG else coeffs_offdiag
    fine = grid(space, config.resolution).coeffs()
    coarse = grid(space, config.coarse)
    th, ph = coarse.axes()
    cc = coarse.coeffs().reshape(len(th), len(ph), 4)
    gains = np.array([[_grid_gain(game, cc[i, j], fine) for j in range(len(ph))] for i in range(len(th))])

    padded = np.pad(gains, 1, constant_values=np.inf)
    starts = []
    for i in range(len(th)):
        for j in range(len(ph)):
            window = padded[i : i + 3, j : j + 3]
            if gains[i, j] <= window.min() and gains[i, j] < 0.05:
                starts.append((gains[i, j], th[i], ph[j]))
    starts.sort()

    def objective(x):
        t = min(max(x[0], 0.0), math.pi)
        p = min(max(x[1], 0.0), math.pi / 2)
        return _grid_gain(game, coeff(t, p), fine)

    reports: list[EquilibriumReport] = []
    tried: list[np.ndarray] = []
    for _, t0, p0 in starts[:50]:
        r = minimize(objective, [t0, p0], method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 400})
        t = min(max(r.x[0], 0.0), math.pi)
        p = min(max(r.x[1], 0.0), math.pi / 2)
        if objective([t0, p0]) <= r.fun:
            t, p = t0, p0
        c = coeff(t, p)
        if any(same_strategy(c, w, 1e-8) for w in tried):
            continue
        tried.append(c)
        point = _named_point(c, space, n)
        if point.space is not space:
            point = StrategyPoint(space, (t, p))
        verdict = verify_nash(game, [point] * n, space, eps, config.resolution)
        if verdict.is_equilibrium:
            reports.append(_report(game, point, verdict, space))
    return reports


def search_symmetric_ne(game: GameDefinition, space=Space.SU2, config: SearchConfig | None = None) -> list[EquilibriumReport]:
    """All symmetric pure equilibria reachable by the configured protocol.

    An empty list means only that no epsilon-equilibrium was found under this
    protocol, not that none exists.
    """
    config = config or SearchConfig()
    space = parse_space(space)
    if not game.is_symmetric:
        raise DomainError("symmetric search requires a symmetric payoff table")
    if space is Space.SU2:
        reports = _search_su2(game, config)
    elif space.is_two_param:
        reports = _search_two_param(game, space, config)
    else:
        reports = []
        for move in "CD":
            pt = StrategyPoint.classical(move)
            verdict = verify_nash(game, [pt] * game.players, space, config.eps)
            if verdict.is_equilibrium:
                reports.append(_report(game, pt, verdict, space))
    return sorted(reports, key=lambda r: r.id)


# ---------------------------------------------------------------------------
# one-parameter curves and threshold predicates


def _curve_roots(h: Callable[[float], float], lo: float, hi: float, n: int, periodic: bool) -> list[float]:
    """Roots of ``h`` on [lo, hi] from a scan plus brentq.

    Roots come in close pairs just past a tangency, so besides sign changes
    every discrete local minimum of |h| is minimized properly; if the
    extremum crosses zero the two roots on either side are bracketed too.
    """
    xs = list(np.linspace(lo, hi, n, endpoint=not periodic))
    ys = [h(x) for x in xs]
    if periodic:
        xs.append(hi)
        ys.append(ys[0])
    zero = 1e-12 * max(1.0, max(abs(y) for y in ys))
    ys = [0.0 if abs(y) < zero else y for y in ys]
    roots = [float(x) for x, y in zip(xs, ys) if y == 0.0]
    brackets = []
    for k in range(len(xs) - 1):
        if ys[k] * ys[k + 1] < 0:
            brackets.append((xs[k], xs[k + 1]))
    for k in range(1, len(xs) - 1):
        y0, y1, y2 = ys[k - 1], ys[k], ys[k + 1]
        if not (abs(y1) <= abs(y0) and abs(y1) <= abs(y2)) or y0 * y1 <= 0 or y1 * y2 <= 0:
            continue
        sign = math.copysign(1.0, y1)
        r = minimize_scalar(lambda x: sign * h(x), bounds=(xs[k - 1], xs[k + 1]), method="bounded",
                            options={"xatol": 1e-13})
        ym = h(r.x)
        if abs(ym) < zero:
            roots.append(float(r.x))
        elif sign * ym < 0:
            brackets += [(xs[k - 1], r.x), (r.x, xs[k + 1])]
    for a, b in brackets:
        if h(a) * h(b) < 0:
            roots.append(brentq(h, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return sorted(roots)


def _curve_equilibria(game, curve, tangent, lo, hi, periodic, eps, n_scan=64):
    def h(alpha):
        v = curve(alpha)
        return float(tangent(alpha) @ symmetric_form(game, v) @ v)

    found = []
    for alpha in _curve_roots(h, lo, hi, n_scan, periodic):
        v = curve(alpha)
        m = symmetric_form(game, v)
        if np.linalg.norm(m @ v - (v @ m @ v) * v) > 1e-8:
            continue
        point = StrategyPoint.su2(v)
        verdict = verify_nash(game, [point] * game.players, Space.SU2, eps)
        if verdict.is_equilibrium:
            found.append((alpha, point, verdict))
    return found


def defect_branch_equilibria(game: GameDefinition, eps: float | None = None):
    """Symmetric su2 equilibria on the full-defection circle w = z = 0."""
    eps = DEFAULT_EPS[Space.SU2] if eps is None else eps
    return _curve_equilibria(
        game,
        lambda a: np.array([0.0, math.sin(a), math.cos(a), 0.0]),
        lambda a: np.array([0.0, math.cos(a), -math.sin(a), 0.0]),
        0.0,
        math.pi,
        True,
        eps,
    )


def family_equilibria(game: GameDefinition, eps: float | None = None):
    """Symmetric su2 equilibria of the form a*u1 - b*u2 on any family template."""
    eps = DEFAULT_EPS[Space.SU2] if eps is None else eps
    out = []
    for name, (u1, u2) in FAMILY_TEMPLATES.items():
        hits = _curve_equilibria(
            game,
            lambda a, u1=u1, u2=u2: math.cos(a) * u1 - math.sin(a) * u2,
            lambda a, u1=u1, u2=u2: -math.sin(a) * u1 - math.cos(a) * u2,
            1e-9,
            math.pi / 2 - 1e-9,
            False,
            eps,
        )
        out += [(name, alpha, pt, verdict) for alpha, pt, verdict in hits]
    return out


@dataclass(frozen=True)
class Predicate:
    name: str
    fn: Callable[[GameDefinition], bool] = field(repr=False)

    def __call__(self, game: GameDefinition) -> bool:
        return bool(self.fn(game))


def parse_profile_id(text: str, players: int | None = None) -> list[StrategyPoint]:
    """Inverse of ``EquilibriumReport.id``: names or literals joined by 'x'."""
    names = sorted(CATALOG, key=len, reverse=True)
    out, i = [], 0
    while i < len(text):
        if out:
            if text[i] != "x":
                raise DomainError(f"bad profile id {text!r} at offset {i}")
            i += 1
        for sp in ("su2(", "2p-diag(", "2p-offdiag(", "classical("):
            if text.startswith(sp, i):
                j = text.index(")", i)
                vals = [float(x) for x in text[i + len(sp) : j].split(";")]
                tag = Space(sp[:-1])
                if tag is Space.SU2:
                    # labels are rounded to 6 decimals
                    vals = list(np.array(vals) / np.linalg.norm(vals))
                out.append(StrategyPoint(tag, tuple(vals)))
                i = j + 1
                break
        else:
            for nm in names:
                if text.startswith(nm, i):
                    out.append(catalog_lookup(nm))
                    i += len(nm)
                    break
            else:
                raise DomainError(f"bad profile id {text!r} at offset {i}")
    if players is not None and len(out) != players:
        raise DomainError(f"profile {text!r} has {len(out)} strategies, expected {players}")
    return out


THRESHOLD_EPS = 1e-9


def make_predicate(name: str, space=Space.SU2, eps: float | None = THRESHOLD_EPS,
                   config: SearchConfig | None = None, resolution=None) -> Predicate:
    """Named gamma-predicates.

    * ``ne:<profile>``  the profile (e.g. ``DxD``) is an eps-equilibrium in ``space``
    * ``classical-ne``  a symmetric su2 equilibrium with w = z = 0 exists
    * ``family-ne``     a symmetric su2 equilibrium on a family template exists
    * ``any-sym-ne``    ``search_symmetric_ne`` finds something

    ``eps`` defaults to 1e-9 in every space: best responses are refined, and a
    loose grid epsilon would shift the located boundary.
    """
    space = parse_space(space)
    if name.startswith("ne:"):
        text = name[3:]

        def fn(game):
            prof = parse_profile_id(text, game.players)
            return verify_nash(game, prof, space, eps, resolution).is_equilibrium

        return Predicate(f"{name}@{space.value}", fn)
    if name == "classical-ne":
        return Predicate(name, lambda g: bool(defect_branch_equilibria(g, eps)))
    if name == "family-ne":
        return Predicate(name, lambda g: bool(family_equilibria(g, eps)))
    if name == "any-sym-ne":
        cfg = config or SearchConfig(eps=eps)
        return Predicate(f"{name}@{space.value}", lambda g: bool(search_symmetric_ne(g, space, cfg)))
    raise DomainError(f"unknown predicate {name!r}")


class AmbiguousThresholdError(NumericalError):
    def __init__(self, predicate: str, brackets):
        self.brackets = list(brackets)
        spans = ", ".join(f"[{a:.6f}, {b:.6f}]" for a, b in self.brackets)
        super().__init__(f"predicate {predicate!r} switches {len(self.brackets)} times: {spans}")


@dataclass(frozen=True)
class ThresholdReport:
    predicate: str
    gamma_star: float | None
    width: float
    bracket: tuple
    value_below: bool
    value_above: bool

    @property
    def found(self) -> bool:
        return self.gamma_star is not None


def _bisect(game, predicate, lo, hi, f_lo, tol):
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(game.with_gamma(mid)) == f_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def find_thresholds(game: GameDefinition, predicate: Predicate, lo: float = 0.0, hi: float = math.pi / 2,
                    tol: float = 1e-6, scan: int = 64) -> list[ThresholdReport]:
    """Every gamma in [lo, hi] where ``predicate`` switches, each bisected to width <= tol."""
    if not 0.0 <= lo < hi <= math.pi / 2 + 1e-12:
        raise DomainError(f"bad gamma range [{lo}, {hi}]")
    xs = np.linspace(lo, hi, scan)
    vals = [predicate(game.with_gamma(float(x))) for x in xs]
    out = []
    for k in range(scan - 1):
        if vals[k] != vals[k + 1]:
            a, b = _bisect(game, predicate, float(xs[k]), float(xs[k + 1]), vals[k], tol)
            out.append(ThresholdReport(predicate.name, 0.5 * (a + b), b - a, (a, b), vals[k], vals[k + 1]))
    return out


def find_threshold(game: GameDefinition, predicate: Predicate, lo: float = 0.0, hi: float = math.pi / 2,
                   tol: float = 1e-6, scan: int = 64) -> ThresholdReport:
    """Single switch of ``predicate`` on [lo, hi].

    A constant predicate yields a report with ``gamma_star`` None; more than
    one switch raises ``AmbiguousThresholdError``.
    """
    reports = find_thresholds(game, predicate, lo, hi, tol, scan)
    if not reports:
        v = predicate(game.with_gamma(lo))
        return ThresholdReport(predicate.name, None, hi - lo, (lo, hi), v, v)
    if len(reports) > 1:
        raise AmbiguousThresholdError(predicate.name, [r.bracket for r in reports])
    return reports[0]
