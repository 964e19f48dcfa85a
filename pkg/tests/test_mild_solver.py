"""Mild-solution solvers: contraction construction, Duhamel quadrature,
Picard iteration, the integrating-factor stepper, continuation, snapshots."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chenlee_lab.core import (
    EquationParams,
    Grid,
    SpectralField,
    semigroup_apply,
)
from chenlee_lab.solver import (
    CflError,
    NonContractionError,
    PicardError,
    QuadratureConvergenceError,
    SolverBlowupError,
    SolverConfig,
    Trajectory,
    chebyshev_nodes,
    continue_globally,
    contraction_time,
    duhamel_integral,
    export_trajectory_csv,
    g_exponent,
    load_snapshot,
    save_snapshot,
    solve,
    solve_picard,
    solve_stepper,
)
from chenlee_lab.spaces import l2_norm, sobolev_norm

GRID = Grid(8.0 * np.pi, 256)
PARAMS = EquationParams(beta=1.0, eta=1.0)


def _gaussian(amp, grid=GRID):
    return SpectralField.from_function(grid, lambda x: amp * np.exp(-x * x))


# ---------------------------------------------------------------------------
# config / trajectory plumbing
# ---------------------------------------------------------------------------

def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(dt=0.0)
    with pytest.raises(ValueError):
        SolverConfig(dt=2.0, T=1.0)
    with pytest.raises(ValueError):
        SolverConfig(method="euler")


def test_trajectory_validation():
    u = _gaussian(1.0)
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 1.0]), [u], PARAMS)
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.5, 0.25]), [u, u, u], PARAMS)
    with pytest.raises(ValueError):
        Trajectory(np.array([0.5]), [u], PARAMS)  # must start at 0


def test_trajectory_state_lookup():
    traj = solve_stepper(_gaussian(0.1), PARAMS, SolverConfig(dt=2e-3, T=0.1))
    assert l2_norm(traj.state_at(0.01) - traj.states[5]) == 0.0
    with pytest.raises(KeyError):
        traj.state_at(0.033)


def test_chebyshev_nodes():
    t = chebyshev_nodes(2.0, 8)
    assert t[0] == 0.0 and t[-1] == pytest.approx(2.0)
    assert np.all(np.diff(t) > 0)
    assert t.size == 9


# ---------------------------------------------------------------------------
# contraction construction
# ---------------------------------------------------------------------------

def test_g_exponent_values():
    assert g_exponent(0.0) == 0.25
    assert g_exponent(1.0) == 0.25
    assert g_exponent(-0.25) == pytest.approx(0.125)
    with pytest.raises(ValueError):
        g_exponent(-0.5)


def test_contraction_time_closed_form():
    # C=0.5, ||phi||=1, s=0: gamma=1, T = (4*0.5)^{-1/0.25} = 2^{-4}
    assert contraction_time(1.0, 0.0, 1.0, 0.5) == pytest.approx(0.0625)
    assert contraction_time(0.0, 0.0, 1.0, 0.5) == 1.0
    assert contraction_time(1e-9, 0.0, 1.0, 0.5) == 1.0  # capped at 1


def test_contraction_time_monotone_in_norm():
    ts = [contraction_time(r, 0.0, 1.0, 0.4) for r in (0.5, 1.0, 2.0, 4.0)]
    assert all(a >= b for a, b in zip(ts, ts[1:]))


# ---------------------------------------------------------------------------
# stepper
# ---------------------------------------------------------------------------

def test_cfl_rejection():
    with pytest.raises(CflError):
        solve_stepper(_gaussian(0.1), PARAMS, SolverConfig(dt=0.1, T=1.0))


def test_linear_run_matches_semigroup():
    phi = _gaussian(1.0)
    p = EquationParams(beta=1.0, eta=1.0, nonlinear=False)
    traj = solve_stepper(phi, p, SolverConfig(dt=2e-3, T=1.0, keep_every=100))
    for t, u in zip(traj.times, traj.states):
        ref = semigroup_apply(phi, t, p)
        scale = max(np.abs(ref.coeffs).max(), 1e-300)
        assert np.abs(u.coeffs - ref.coeffs).max() <= 1e-12 * scale


def test_instability_band_growth():
    # single mode at xi = 0.5 grows at exactly e^{0.25 eta t} under the
    # linear flow (p(1/2) = -eta/4)
    g = Grid(4.0 * np.pi, 64)
    phi = SpectralField.single_mode(g, 2, 0.1)  # xi = 2*pi/(4 pi) = 0.5
    p = EquationParams(beta=0.0, eta=2.0, nonlinear=False)
    traj = solve_stepper(phi, p, SolverConfig(dt=1e-2, T=1.0, keep_every=25))
    for t, u in zip(traj.times, traj.states):
        assert l2_norm(u) == pytest.approx(np.exp(0.5 * t) * l2_norm(phi), rel=1e-12)


def test_stepper_fourth_order():
    # Richardson: ||u_h - u_{h/2}|| / ||u_{h/2} - u_{h/4}|| ~ 2^4
    g = Grid(8.0 * np.pi, 128)
    phi = _gaussian(2.0, g)
    sols = {}
    for dt in (4e-3, 2e-3, 1e-3):
        sols[dt] = solve_stepper(phi, PARAMS, SolverConfig(dt=dt, T=1.0,
                                                           keep_every=10 ** 6)).final_state()
    e1 = l2_norm(sols[4e-3] - sols[2e-3])
    e2 = l2_norm(sols[2e-3] - sols[1e-3])
    order = np.log2(e1 / e2)
    assert order == pytest.approx(4.0, abs=0.35)


def test_blowup_detection():
    cfg = SolverConfig(dt=1e-3, T=1.0, keep_every=10, amplitude_cap=0.5)
    with pytest.raises(SolverBlowupError) as exc:
        solve_stepper(_gaussian(0.9), PARAMS, cfg)  # already past the tiny cap
    assert 0.0 < exc.value.t_blowup <= 1.0


def test_mass_conserved_exactly():
    traj = solve_stepper(_gaussian(0.5), PARAMS, SolverConfig(dt=1e-3, T=0.5, keep_every=50))
    mass = np.array([u.coeffs[0] for u in traj.states])
    assert np.abs(mass - mass[0]).max() == 0.0


# ---------------------------------------------------------------------------
# Duhamel quadrature
# ---------------------------------------------------------------------------

def test_duhamel_zero_for_linear_flow():
    p = EquationParams(nonlinear=False)
    traj = solve_stepper(_gaussian(0.5), p, SolverConfig(dt=2e-3, T=0.2, keep_every=25))
    assert l2_norm(duhamel_integral(traj, 0.2)) == 0.0


def test_duhamel_identity():
    # u(t) = S(t) phi - int_0^t S(t-t') u u_x dt' along a nonlinear run
    phi = _gaussian(0.5)
    traj = solve_stepper(phi, PARAMS, SolverConfig(dt=1e-3, T=0.25, keep_every=10))
    t = 0.25
    lhs = traj.final_state()
    rhs = semigroup_apply(phi, t, PARAMS) - duhamel_integral(traj, t)
    assert l2_norm(lhs - rhs) <= 1e-8 * l2_norm(lhs)


def test_duhamel_convergence_guard():
    phi = _gaussian(0.5)
    traj = solve_stepper(phi, PARAMS, SolverConfig(dt=1e-3, T=0.25, keep_every=10))
    with pytest.raises(QuadratureConvergenceError):
        duhamel_integral(traj, 0.25, quad_nodes=1, panel_length=10.0, tol=1e-14)


def test_duhamel_range_check():
    traj = solve_stepper(_gaussian(0.1), PARAMS, SolverConfig(dt=2e-3, T=0.1, keep_every=10))
    with pytest.raises(ValueError):
        duhamel_integral(traj, 0.5)


# ---------------------------------------------------------------------------
# Picard route
# ---------------------------------------------------------------------------

def test_picard_requires_dissipation():
    with pytest.raises(ValueError):
        solve_picard(_gaussian(0.1), EquationParams(eta=0.0), SolverConfig(dt=1e-3, T=0.1))


def test_picard_converges_and_agrees_with_stepper():
    phi = _gaussian(0.05)
    cfg = SolverConfig(dt=1e-3, T=0.25)
    traj_p = solve_picard(phi, PARAMS, cfg, s=0.0)
    assert traj_p.info["residual"] <= 1e-10
    assert all(r <= 0.75 for r in traj_p.info["ratios"])
    traj_s = solve_stepper(phi, PARAMS, cfg)
    assert l2_norm(traj_p.final_state() - traj_s.final_state()) <= 1e-6


@pytest.mark.filterwarnings("ignore")  # divergence is the point here
def test_picard_diverges_for_large_data():
    phi = _gaussian(40.0)
    with pytest.raises((NonContractionError, SolverBlowupError, PicardError)):
        solve_picard(phi, PARAMS, SolverConfig(dt=1e-3, T=1.0))


def test_solve_dispatch():
    phi = _gaussian(0.05)
    cfg_p = SolverConfig(dt=1e-3, T=0.2, method="picard")
    cfg_s = SolverConfig(dt=1e-3, T=0.2, method="if_rk4")
    a = solve(phi, PARAMS, cfg_p)
    b = solve(phi, PARAMS, cfg_s)
    assert a.info["method"] == "picard"
    assert b.info["method"] == "if_rk4"
    assert l2_norm(a.final_state() - b.final_state()) <= 1e-6


# ---------------------------------------------------------------------------
# continuation
# ---------------------------------------------------------------------------

def test_continuation_matches_single_run():
    phi = _gaussian(0.3)
    cfg = SolverConfig(dt=1e-3, T=0.2, keep_every=50)
    seg = solve_stepper(phi, PARAMS, cfg)
    glued = continue_globally(seg, PARAMS, cfg, T_total=0.6)
    whole = solve_stepper(phi, PARAMS, SolverConfig(dt=1e-3, T=0.6, keep_every=50))
    assert glued.times[-1] == pytest.approx(0.6)
    assert l2_norm(glued.final_state() - whole.final_state()) <= 1e-10
    assert all(r <= 1e-8 for r in glued.info["restart_overlap_residuals"])


# ---------------------------------------------------------------------------
# snapshots and CSV export
# ---------------------------------------------------------------------------

def test_snapshot_roundtrip(tmp_path):
    u = _gaussian(0.7)
    path = tmp_path / "state.snap"
    save_snapshot(path, u, 0.375)
    v, t = load_snapshot(path)
    assert t == 0.375
    assert v.grid.M == GRID.M and v.grid.L == pytest.approx(GRID.L)
    scale = np.abs(u.coeffs).max()
    assert np.abs(v.coeffs - u.coeffs).max() <= 1e-6 * scale  # complex64 payload


def test_snapshot_rejects_garbage(tmp_path):
    path = tmp_path / "bad.snap"
    path.write_bytes(b"not a snapshot at all, sorry......")
    with pytest.raises(ValueError):
        load_snapshot(path)


def test_snapshot_rejects_truncation(tmp_path):
    u = _gaussian(0.7)
    path = tmp_path / "state.snap"
    save_snapshot(path, u, 0.0)
    data = path.read_bytes()
    path.write_bytes(data[:-16])
    with pytest.raises(ValueError):
        load_snapshot(path)


def test_trajectory_csv_deterministic(tmp_path):
    traj = solve_stepper(_gaussian(0.2), PARAMS, SolverConfig(dt=2e-3, T=0.1, keep_every=10))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    export_trajectory_csv(traj, p1)
    export_trajectory_csv(traj, p2)
    text = p1.read_bytes()
    assert text == p2.read_bytes()
    assert text.splitlines()[0].startswith(b"t,l2,hs_0,re_uhat0")
    assert len(text.splitlines()) == traj.times.size + 1
