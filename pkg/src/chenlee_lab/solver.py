"""Mild-solution solvers for u_t + u u_x + beta*H u_xx + eta*(H u_x - u_xx) = 0.

Two independent routes to u(t) = S(t) phi - int_0^t S(t-t') [u u_x](t') dt':

* `solve_picard` iterates the Duhamel map on Chebyshev-spaced time nodes
  (the contraction-mapping construction, valid for small data / short T);
* `solve_stepper` is an integrating-factor RK4 production stepper (exact
  linear multiplier, classical RK4 on the transformed nonlinearity).

They agree within combined tolerance, which is the discrete uniqueness
check used throughout the experiment suite.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import BarycentricInterpolator, CubicSpline

from .core import (
    EquationParams,
    Grid,
    SpectralField,
    nonlinear_term,
    semigroup_multiplier,
    linear_symbol,
    symbol_q,
)
from .spaces import TimeWeightedTrace, l2_norm, sobolev_norm


class CflError(ValueError):
    """Time step too large for the fastest retained linear phase."""


class SolverBlowupError(RuntimeError):
    def __init__(self, t_blowup, message=None):
        self.t_blowup = t_blowup
        super().__init__(message or f"solution blew up near t={t_blowup:.6g}")


class PicardError(RuntimeError):
    pass


class NonContractionError(PicardError):
    pass


class QuadratureConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    dt: float = 1e-3
    T: float = 1.0
    picard_max_iters: int = 40
    picard_tol: float = 1e-12
    method: str = "if_rk4"  # or "picard"
    n_time_nodes: int = 16  # Chebyshev panels for the Picard route
    quad_nodes: int = 10  # Gauss-Legendre nodes per quadrature panel
    panel_length: float = 0.25
    keep_every: int = 1
    amplitude_cap: float = 1e6
    dealias_budget: float = 1e-6

    def __post_init__(self):
        if self.dt <= 0 or self.T <= 0:
            raise ValueError("dt and T must be positive")
        if self.dt > self.T:
            raise ValueError(f"dt={self.dt} exceeds T={self.T}")
        if self.picard_tol <= 0:
            raise ValueError("picard_tol must be positive")
        if self.method not in ("picard", "if_rk4"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class Trajectory:
    times: np.ndarray
    states: list  # of SpectralField
    params: EquationParams
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size != len(self.states):
            raise ValueError("times/states length mismatch")
        if self.times.size and (self.times[0] != 0.0 and "t_offset" not in self.info):
            raise ValueError("trajectory must start at t=0")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def grid(self) -> Grid:
        return self.states[0].grid

    def final_state(self) -> SpectralField:
        return self.states[-1]

    def state_at(self, t: float, atol: float = 1e-12) -> SpectralField:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > atol:
            raise KeyError(f"no stored state at t={t}")
        return self.states[i]

    def norm_trace(self, s: float) -> TimeWeightedTrace:
        hs = np.array([sobolev_norm(u, s) for u in self.states])
        l2 = np.array([l2_norm(u) for u in self.states])
        mask = self.times > 0
        return TimeWeightedTrace(self.times[mask], hs[mask], l2[mask], s)

    def coeff_matrix(self) -> np.ndarray:
        return np.array([u.coeffs for u in self.states])


# ---------------------------------------------------------------------------
# contraction construction
# ---------------------------------------------------------------------------

def g_exponent(s: float) -> float:
    """Time-gain exponent of the bilinear estimate: (1+2s)/4 on (-1/2, 0),
    1/4 for s >= 0."""
    if s <= -0.5:
        raise ValueError(f"contraction construction requires s > -1/2, got s={s}")
    return 0.25 * (1.0 + 2.0 * s) if s < 0 else 0.25


def contraction_time(phi_norm_hs: float, s: float, eta: float, C: float) -> float:
    """Guaranteed contraction horizon min{1, (4 C gamma)^(-1/g(s))} with
    gamma = 2 C ||phi||_{H^s}; C is the calibrated bilinear-estimate
    constant for this (eta, s)."""
    if C <= 0:
        raise ValueError("calibration constant C must be positive")
    if phi_norm_hs < 0:
        raise ValueError("negative norm")
    g = g_exponent(s)
    gamma = 2.0 * C * phi_norm_hs
    if gamma == 0.0:
        return 1.0
    return float(min(1.0, (4.0 * C * gamma) ** (-1.0 / g)))


# ---------------------------------------------------------------------------
# time quadrature of the Duhamel integral
# ---------------------------------------------------------------------------

def chebyshev_nodes(T: float, n: int) -> np.ndarray:
    """n+1 Chebyshev-Lobatto nodes on [0, T], increasing from 0."""
    i = np.arange(n + 1)
    return 0.5 * T * (1.0 - np.cos(np.pi * i / n))


def _interpolator(times: np.ndarray, values: np.ndarray):
    """Polynomial interpolation for few nodes (Chebyshev-spaced Picard
    grids), cubic spline otherwise."""
    if times.size <= 40:
        return BarycentricInterpolator(times, values, axis=0)
    return CubicSpline(times, values, axis=0)

def _gl_quadrature(sym: np.ndarray, interp, t: float, n_nodes: int, panel_length: float):
    """Composite Gauss-Legendre quadrature of int_0^t e^{sym (t-tau)} G(tau) dtau
    where G(tau) is the interpolated nonlinearity spectrum."""
    out = np.zeros(sym.shape, dtype=np.complex128)
    if t == 0.0:
        return out
    n_panels = max(1, int(np.ceil(t / panel_length)))
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    edges = np.linspace(0.0, t, n_panels + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        tau = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        w = 0.5 * (b - a) * weights
        G = interp(tau)  # (n_nodes, M)
        E = np.exp(np.multiply.outer(t - tau, sym))
        out += (w[:, None] * E * G).sum(axis=0)
    return out


def duhamel_integral(traj_segment: Trajectory, t: float,
                     quad_nodes: int = 10, panel_length: float = 0.25,
                     tol: float = 1e-8, check: bool = True) -> SpectralField:
    """int_0^t S(t - t') [u u_x](t') dt' evaluated from a stored trajectory.

    The nonlinearity is sampled at the trajectory nodes, interpolated in
    time, and integrated by composite Gauss-Legendre with the exact
    semigroup multiplier at each quadrature node.  With `check`, the node
    count is doubled and a relative change above `tol` raises
    QuadratureConvergenceError.
    """
    times = traj_segment.times
    if not (times[0] <= t <= times[-1] + 1e-12):
        raise ValueError(f"t={t} outside trajectory range")
    grid = traj_segment.grid
    params = traj_segment.params
    if not params.nonlinear:
        return SpectralField.zero(grid)  # linear flow: integrand vanishes
    G = np.array([nonlinear_term(u).coeffs for u in traj_segment.states])
    interp = _interpolator(times, G)
    sym = linear_symbol(grid.xi, params)
    sym[grid.M // 2] = 0.0
    val = _gl_quadrature(sym, interp, t, quad_nodes, panel_length)
    if check:
        val2 = _gl_quadrature(sym, interp, t, 2 * quad_nodes, panel_length)
        scale = max(np.linalg.norm(val2), 1e-300)
        err = np.linalg.norm(val2 - val) / scale
        if err > tol:
            raise QuadratureConvergenceError(
                f"node doubling changed the Duhamel integral by {err:.3e} (tol {tol:.1e})"
            )
        val = val2
    val[grid.M // 2] = 0.0
    return SpectralField(grid, val)


# ---------------------------------------------------------------------------
# Picard iteration on Chebyshev time nodes
# ---------------------------------------------------------------------------

def solve_picard(phi: SpectralField, params: EquationParams, config: SolverConfig,
                 s: float = 0.0) -> Trajectory:
    """Fixed-point iteration of Psi(u) = S(t) phi - (1/2) int_0^t S(t-t')
    d/dx(u^2) dt' from the first iterate u(t) = S(t) phi.

    Converges geometrically for data inside the contraction ball; the
    per-iteration sup-in-time H^s ratios are recorded in info["ratios"].
    """
    if params.eta <= 0:
        raise ValueError("the Picard route needs eta > 0 (dissipative estimates)")
    grid = phi.grid
    times = chebyshev_nodes(config.T, config.n_time_nodes)
    sym = linear_symbol(grid.xi, params)
    sym[grid.M // 2] = 0.0
    E_nodes = np.exp(np.multiply.outer(times, sym))
    E_nodes[:, grid.M // 2] = 0.0
    lin = E_nodes * phi.coeffs[None, :]

    def apply_map(u_mat: np.ndarray) -> np.ndarray:
        if not params.nonlinear:
            return lin.copy()
        G = np.array([
            nonlinear_term(SpectralField(grid, row, check=False),
                           dealias_budget=config.dealias_budget).coeffs
            for row in u_mat
        ])
        interp = _interpolator(times, G)
        out = lin.copy()
        for i in range(1, times.size):
            out[i] -= _gl_quadrature(sym, interp, times[i], config.quad_nodes,
                                     config.panel_length)
        return out

    def sup_hs(mat: np.ndarray) -> float:
        w = (1.0 + grid.xi ** 2) ** s
        return float(np.sqrt((w * np.abs(mat) ** 2).sum(axis=1).max() * grid.dxi))

    u = lin.copy()
    diffs, ratios = [], []
    bad_streak = 0
    for _ in range(config.picard_max_iters):
        u_new = apply_map(u)
        if not np.all(np.isfinite(u_new.view(np.float64))):
            raise SolverBlowupError(config.T, "Picard iterate diverged")
        d = sup_hs(u_new - u)
        if diffs:
            r = d / diffs[-1] if diffs[-1] > 0 else 0.0
            ratios.append(r)
            bad_streak = bad_streak + 1 if r >= 1.0 else 0
            if bad_streak >= 3:
                raise NonContractionError(
                    f"no contraction: ratios {ratios[-3:]} (data too large for T={config.T}?)"
                )
        diffs.append(d)
        u = u_new
        if d < config.picard_tol:
            break
    else:
        raise PicardError(
            f"Picard did not reach tol={config.picard_tol:.1e} in "
            f"{config.picard_max_iters} iterations (last diff {diffs[-1]:.3e})"
        )

    residual = sup_hs(apply_map(u) - u)
    states = [SpectralField(grid, row.copy()) for row in u]
    return Trajectory(times, states, params,
                      info={"method": "picard", "diffs": diffs, "ratios": ratios,
                            "residual": residual, "s": s})


# ---------------------------------------------------------------------------
# integrating-factor RK4 stepper
# ---------------------------------------------------------------------------

def _check_cfl(grid: Grid, dt: float, params: EquationParams):
    qmax = float(np.max(np.abs(symbol_q(grid.xi, params))))
    if dt * qmax > 1.0 + 1e-12:
        raise CflError(
            f"dt={dt:.3e} does not resolve the fastest linear phase: "
            f"dt*max|q| = {dt * qmax:.3f} > 1"
        )


def solve_stepper(phi: SpectralField, params: EquationParams,
                  config: SolverConfig) -> Trajectory:
    """Integrating-factor RK4: exact multiplier on the linear symbol, RK4
    on the transformed nonlinearity.  Exact for linear runs; 4th order in
    dt otherwise."""
    grid = phi.grid
    _check_cfl(grid, config.dt, params)
    n_steps = max(1, int(round(config.T / config.dt)))
    dt = config.T / n_steps

    E1 = semigroup_multiplier(grid, dt, params)
    E2 = semigroup_multiplier(grid, 0.5 * dt, params)
    half_xi = 0.5j * grid.xi

    if params.nonlinear:
        budget = config.dealias_budget

        def rhs(c):
            return -nonlinear_term(SpectralField(grid, c, check=False),
                                   dealias_budget=budget).coeffs
    else:
        zero = np.zeros(grid.M, dtype=np.complex128)

        def rhs(c):
            return zero

    c = phi.coeffs.copy()
    c[grid.M // 2] = 0.0
    times = [0.0]
    states = [SpectralField(grid, c.copy())]
    amp_scale = grid.L * np.sqrt(2.0 / np.pi)

    for n in range(1, n_steps + 1):
        k1 = dt * rhs(c)
        k2 = dt * rhs(E2 * (c + 0.5 * k1))
        k3 = dt * rhs(E2 * c + 0.5 * k2)
        k4 = dt * rhs(E1 * c + E2 * k3)
        c = E1 * c + (E1 * k1 + 2.0 * E2 * (k2 + k3) + k4) / 6.0
        if not np.all(np.isfinite(c.view(np.float64))):
            raise SolverBlowupError(n * dt)
        if n % config.keep_every == 0 or n == n_steps:
            u = SpectralField(grid, c.copy(), check=False)
            if np.abs(u.values()).max() > config.amplitude_cap:
                raise SolverBlowupError(n * dt, "amplitude cap exceeded")
            times.append(n * dt)
            states.append(u)

    return Trajectory(np.array(times), states, params,
                      info={"method": "if_rk4", "dt": dt, "n_steps": n_steps})


def continue_globally(traj: Trajectory, params: EquationParams,
                      config: SolverConfig, T_total: float,
                      overlap_tol: float = 1e-8) -> Trajectory:
    """Restart the stepper from the final state until T_total.

    At each restart the previous segment is re-integrated across a short
    overlap with halved dt; disagreement above `overlap_tol` in L^2 means
    the glued solution is not self-consistent.
    """
    times = list(traj.times)
    states = list(traj.states)
    residuals = []
    t0 = times[-1]
    while t0 < T_total - 1e-12:
        T_seg = min(config.T, T_total - t0)
        seg_cfg = replace(config, T=T_seg)
        seg = solve_stepper(states[-1], params, seg_cfg)
        # overlap oracle: the first steps past the restart recomputed with
        # halved dt; disagreement measures gluing self-consistency
        dt_seg = seg.info["dt"]
        n_over = min(2, seg.info["n_steps"])
        coarse = solve_stepper(states[-1], params,
                               replace(config, T=n_over * dt_seg, dt=dt_seg,
                                       keep_every=n_over))
        fine = solve_stepper(states[-1], params,
                             replace(config, T=n_over * dt_seg, dt=dt_seg / 2.0,
                                     keep_every=2 * n_over))
        res = l2_norm(coarse.final_state() - fine.final_state())
        residuals.append(res)
        if res > overlap_tol:
            raise SolverBlowupError(t0, f"restart overlap residual {res:.3e} > {overlap_tol:.1e}")
        times.extend(t0 + seg.times[1:])
        states.extend(seg.states[1:])
        t0 = times[-1]
    info = dict(traj.info)
    info["restart_overlap_residuals"] = residuals
    return Trajectory(np.array(times), states, params, info=info)


def solve(phi: SpectralField, params: EquationParams, config: SolverConfig,
          s: float = 0.0) -> Trajectory:
    if config.method == "picard":
        return solve_picard(phi, params, config, s=s)
    return solve_stepper(phi, params, config)


# ---------------------------------------------------------------------------
# trajectory export
# ---------------------------------------------------------------------------

SNAPSHOT_MAGIC = b"CLSNAP1\x00"


def save_snapshot(path, field_: SpectralField, t: float):
    """32-byte header (magic, M, L, t) + flat little-endian complex64."""
    g = field_.grid
    header = SNAPSHOT_MAGIC + struct.pack("<Qdd", g.M, g.L, t)
    assert len(header) == 32
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(field_.coeffs.astype("<c8").tobytes())


def load_snapshot(path):
    with open(path, "rb") as fh:
        header = fh.read(32)
        if header[:8] != SNAPSHOT_MAGIC:
            raise ValueError("not a state snapshot file")
        M, L, t = struct.unpack("<Qdd", header[8:])
        coeffs = np.frombuffer(fh.read(), dtype="<c8").astype(np.complex128)
    if coeffs.size != M:
        raise ValueError("truncated snapshot")
    return SpectralField(Grid(L, int(M)), coeffs), t


def export_trajectory_csv(traj: Trajectory, path, s: float = 0.0, modes=(1, 2, 4)):
    """CSV columns: t, L2 norm, H^s norm, Re u_hat(0), |u_hat| at selected
    integer mode numbers."""
    import csv

    from .report import format_value

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["t", "l2", f"hs_{s:g}", "re_uhat0"] + [f"abs_mode_{m}" for m in modes])
        for t, u in zip(traj.times, traj.states):
            idx = [u.grid.mode_index(m) for m in modes]
            w.writerow([format_value(v) for v in
                        [t, l2_norm(u), sobolev_norm(u, s), float(u.coeffs[0].real)]
                        + [float(np.abs(u.coeffs[i])) for i in idx]])
