"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""
import math
import subprocess
import sys
from itertools import product

import numpy as np
import pytest
from scipy.optimize import minimize

import oracle
from qgame.equilibrium import (
    SearchConfig,
    best_response,
    defect_branch_equilibria,
    family_equilibria,
    find_thresholds,
    make_predicate,
    quadratic_form,
    search_symmetric_ne,
    verify_nash,
)
from qgame.game import entanglement_entropy, final_state, payoffs, pd2, pd3
from qgame.linalg import I2, SIGMA_X, SIGMA_Y, unitary_from_su2, unitary_from_two_param_offdiag
from qgame.strategies import CATALOG, Space

TH1 = math.asin(math.sqrt(1 / 5))
TH2 = math.asin(math.sqrt(2 / 5))
GB = math.asin(math.sqrt(1 / 3))
ONSET = 0.60276
D, Q, iSy = CATALOG["D"], CATALOG["Q"], CATALOG["iSy"]


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {number} {title}: {detail}")
        assert ok, detail

    return emit


def unit4(rng):
    v = rng.normal(size=4)
    return v / np.linalg.norm(v)


def random_instance(rng):
    n = int(rng.integers(2, 4))
    gamma = float(rng.uniform(0, math.pi / 2))
    game = pd2(gamma) if n == 2 else pd3(gamma)
    return n, game, int(rng.integers(n)), [oracle.su2(unit4(rng)) for _ in range(n - 1)]


def test_1_classical_embedding(report):
    # two players defect with the gate's own flip; three players with i sx
    flips = {2: D.unitary(), 3: 1j * SIGMA_X}
    worst = 0.0
    for gamma in np.linspace(0, math.pi / 2, 20):
        for n, make, table in ((2, pd2, oracle.PD2), (3, pd3, oracle.PD3)):
            for moves in product("CD", repeat=n):
                mats = [flips[n] if m == "D" else I2 for m in moves]
                worst = max(worst, np.max(np.abs(payoffs(make(gamma), mats) - table["".join(moves)])))
    report(1, "classical embedding", worst <= 1e-12, f"max error {worst:.2e} over 12 profiles x 20 gammas")


def test_2_endpoints(report):
    dd = verify_nash(pd2(0.0), [D, D], Space.DIAG)
    qq = verify_nash(pd2(math.pi / 2), [Q, Q], Space.DIAG)
    err_d = np.max(np.abs(dd.payoffs - 1))
    err_q = np.max(np.abs(qq.payoffs - 3))
    ok = dd.is_equilibrium and qq.is_equilibrium and err_d <= 1e-9 and err_q <= 1e-9
    report(2, "two-player endpoints", ok,
           f"(D,D) NE={dd.is_equilibrium} err={err_d:.1e}; (Q,Q) NE={qq.is_equilibrium} err={err_q:.1e}")


def test_3_two_player_thresholds(report):
    lo = find_thresholds(pd2(), make_predicate("ne:DxD", Space.DIAG))
    hi = find_thresholds(pd2(), make_predicate("ne:QxQ", Space.DIAG))
    got = [r.gamma_star for r in lo + hi]
    ok = len(lo) == 1 and len(hi) == 1 and abs(got[0] - TH1) <= 1e-5 and abs(got[1] - TH2) <= 1e-5
    worst = 0.0
    for gamma in np.linspace(TH1, TH2, 12)[1:-1]:
        v = verify_nash(pd2(gamma), [D, Q], Space.DIAG)
        ok &= v.is_equilibrium
        worst = max(worst, abs(v.payoffs[0] - 5 * math.cos(gamma) ** 2), abs(v.payoffs[1] - 5 * math.sin(gamma) ** 2))
    ok &= worst <= 1e-9
    report(3, "two-player thresholds", ok, f"switches {got} vs ({TH1:.7f}, {TH2:.7f}); transition payoff err {worst:.1e}")


def test_4_two_player_su2_boundary(report):
    cfg = SearchConfig(multistarts=64, seed=0)
    worst, found = 0.0, 0
    for gamma in (0.1, 0.3, 0.5, 0.6, GB - 1e-3):
        for r in search_symmetric_ne(pd2(gamma), Space.SU2, cfg):
            found += 1
            worst = max(worst, np.max(np.abs(r.payoffs - (1 + 2 * math.sin(gamma) ** 2))))
    above = {g: len(search_symmetric_ne(pd2(g), Space.SU2, cfg)) for g in (0.63, 0.70, 0.78, math.pi / 2 - 0.01)}
    ok = found > 0 and worst <= 1e-8 and not any(above.values())
    report(4, "two-player su2 boundary", ok,
           f"{found} equilibria below boundary, payoff err {worst:.1e}; "
           f"none found under protocol above (counts {list(above.values())})")


def test_5_flip_y_persistence(report):
    pays, ok, worst = [], True, 0.0
    for gamma in np.linspace(0, math.pi / 2, 100):
        v = verify_nash(pd3(gamma), [iSy] * 3, Space.OFFDIAG)
        ok &= v.is_equilibrium
        worst = max(worst, np.max(np.abs(v.payoffs - (1 + 2 * math.sin(gamma) ** 2))))
        pays.append(v.payoffs[0])
    mono = all(b > a for a, b in zip(pays, pays[1:]))
    report(5, "three-player flip-y persistence", ok and worst <= 1e-10 and mono,
           f"all NE={ok}, payoff err {worst:.1e}, monotone={mono}")


def test_6_k_equilibria(report):
    reps = search_symmetric_ne(pd3(math.pi / 2), Space.SU2)
    ks = [CATALOG[f"K{i}"].coeffs() for i in range(1, 7)]
    matched = set()
    ok = len(reps) == 6
    for r in reps:
        v = r.profile[0].coeffs()
        ok &= all(np.allclose(p.coeffs(), v, atol=1e-12) for p in r.profile)
        hit = [i for i, k in enumerate(ks) if abs(v @ k) >= 1 - 1e-6]
        matched.update(hit)
        ok &= len(hit) == 1 and np.max(np.abs(r.payoffs - 11 / 4)) <= 1e-9 and not r.strict
    form = quadratic_form(pd3(math.pi / 2), 0, [CATALOG["K1"], CATALOG["K1"]])
    form_err = np.max(np.abs(form - np.diag([11 / 4, 10 / 4, 11 / 4, 10 / 4])))
    ok &= matched == set(range(6)) and form_err <= 1e-10
    report(6, "K equilibria at maximal entanglement", ok,
           f"{len(reps)} found, matched {sorted(i + 1 for i in matched)}, K1 form err {form_err:.1e}")


def test_7_three_player_thresholds(report):
    fam = find_thresholds(pd3(), make_predicate("family-ne"))
    cls = find_thresholds(pd3(), make_predicate("classical-ne"))
    onset = fam[0].gamma_star if fam else None
    end = fam[-1].gamma_star if len(fam) > 1 else None
    boundary = cls[0].gamma_star if len(cls) == 1 else None
    ok_onset = onset is not None and abs(onset - ONSET) <= 2e-4
    ok_gb = boundary is not None and abs(boundary - GB) <= 1e-5
    ok_end = end is not None and abs(end - math.pi / 4) <= 1e-5
    coexist = True
    for gamma in np.linspace(ONSET, 0.61548, 6)[1:-1]:
        g = pd3(gamma)
        fams = family_equilibria(g)
        coexist &= bool(fams) and bool(defect_branch_equilibria(g))
        coexist &= all(v.payoffs[0] > 1 + 2 * math.sin(gamma) ** 2 for _, _, _, v in fams)
    report(7, "three-player thresholds", ok_onset and ok_gb and ok_end and coexist,
           f"onset {onset} (ok={ok_onset}); boundary {boundary} (ok={ok_gb}); "
           f"family end {end} vs pi/4={math.pi / 4:.7f} (ok={ok_end}); coexistence ok={coexist}")


def _grid_route(n, gamma, player, others, pts):
    vals = oracle.payoff_many(n, gamma, player, others, pts)
    best = float(vals.max())

    def neg(x):
        return -oracle.payoff_many(n, gamma, player, others, [x / np.linalg.norm(x)])[0]

    for k in np.argsort(vals)[-3:]:
        r = minimize(neg, pts[k], method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-12})
        best = max(best, -r.fun)
    return float(vals.max()), best


def test_8_property_suites(report):
    rng = np.random.default_rng(8)
    form_err = 0.0
    for _ in range(1000):
        n, game, player, others = random_instance(rng)
        v = unit4(rng)
        mats = list(others)
        mats.insert(player, oracle.su2(v))
        form_err = max(form_err, abs(v @ quadratic_form(game, player, others) @ v - payoffs(game, mats)[player]))

    prob_err = 0.0
    games = [pd2(0.4), pd3(1.1)]
    for k in range(10_000):
        g = games[k % 2]
        rep = final_state(g, [unitary_from_su2(unit4(rng)) for _ in range(g.players)])
        prob_err = max(prob_err, abs(rep.outcome_probabilities.sum() - 1), abs(rep.density_matrix_trace - 1))

    phase_err = 0.0
    for _ in range(200):
        g = pd3(rng.uniform(0, math.pi / 2))
        mats = [unitary_from_su2(unit4(rng)) for _ in range(3)]
        base = payoffs(g, mats)
        shifted = [np.exp(1j * rng.uniform(0, 2 * math.pi)) * u for u in mats]
        negated = [-mats[0], mats[1], -mats[2]]
        phase_err = max(phase_err, np.max(np.abs(payoffs(g, shifted) - base)), np.max(np.abs(payoffs(g, negated) - base)))

    pts = rng.normal(size=(10_000, 4))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    grid_err, grid_over = 0.0, 0.0
    for _ in range(30):
        n, game, player, others = random_instance(rng)
        value = best_response(game, player, others, Space.SU2).value
        raw, polished = _grid_route(n, game.gamma, player, others, pts)
        grid_over = max(grid_over, raw - value)
        grid_err = max(grid_err, abs(value - polished))

    s0, s1 = entanglement_entropy(0.0), entanglement_entropy(math.pi / 2)
    ent_err = max(abs(s0), abs(s1 - math.log(2)))
    ok = (form_err <= 1e-10 and prob_err <= 1e-12 and phase_err <= 1e-12
          and grid_over <= 1e-10 and grid_err <= 2e-3 and ent_err <= 1e-12)
    report(8, "property suites", ok,
           f"form {form_err:.1e}, probability {prob_err:.1e}, phase/sign {phase_err:.1e}, "
           f"eigen-vs-grid {grid_err:.1e} (raw overshoot {grid_over:.1e}), entropy {ent_err:.1e}")


def test_9_closed_form_lattice(report):
    isy = 1j * SIGMA_Y
    worst = 0.0
    for gamma in np.linspace(0, math.pi / 2, 20):
        g = pd3(gamma)
        for theta in np.linspace(0, math.pi, 20):
            for phi in np.linspace(0, math.pi / 2, 20):
                got = payoffs(g, [unitary_from_two_param_offdiag(theta, phi), isy, isy])[0]
                expected = (1 + 2 * math.cos(phi) ** 2 * math.sin(gamma) ** 2) * math.sin(theta / 2) ** 2
                worst = max(worst, abs(got - expected))
    report(9, "closed-form lattice", worst <= 1e-10, f"max error {worst:.1e} on 8000 points")


def test_10_sweep_determinism(report, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        cmd = [sys.executable, "-m", "qgame", "sweep", "--game", "pd3", "--space", "su2",
               "--range", "0.55", "0.75", "3", "--seed", "0", "--starts", "16", "--out", str(path)]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        outs.append((proc.returncode, path.read_bytes() if path.exists() else b""))
    ok = all(code == 0 for code, _ in outs) and outs[0][1] and outs[0][1] == outs[1][1]
    report(10, "sweep determinism", bool(ok),
           f"exit codes {[c for c, _ in outs]}, {len(outs[0][1])} bytes, identical={outs[0][1] == outs[1][1]}")
