"""Grid/transform invariants, linear symbols, Hilbert transform, semigroup
and the dealiased quadratic nonlinearity."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chenlee_lab.core import (
    AliasingBudgetWarning,
    EquationParams,
    Grid,
    SpectralField,
    hilbert_transform,
    linear_symbol,
    nonlinear_term,
    random_real_field,
    semigroup_apply,
    semigroup_multiplier,
    symbol_p,
    symbol_q,
    x_derivative,
)

GRID = Grid(8.0 * np.pi, 256)
PARAMS = EquationParams(beta=1.0, eta=1.0)


def _rand_field(seed, grid=GRID):
    return random_real_field(grid, np.random.default_rng(seed), spectral_decay=1.0)


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(0.0, 64)
    with pytest.raises(ValueError):
        Grid(1.0, 48)  # not a power of two
    with pytest.raises(ValueError):
        Grid(1.0, 4)  # too small


def test_grid_derived_quantities():
    g = Grid(5.0, 64)
    assert g.dx * g.M == pytest.approx(2.0 * g.L)
    assert g.dxi == pytest.approx(np.pi / g.L)
    assert g.x[0] == pytest.approx(-g.L)
    assert g.xi_max == pytest.approx(np.pi * 31 / 5.0)
    assert g.mode_index(-1) == g.M - 1


# ---------------------------------------------------------------------------
# transform pair
# ---------------------------------------------------------------------------

def test_roundtrip_smooth_function():
    f = SpectralField.from_function(GRID, lambda x: np.exp(-x * x) * np.cos(x))
    vals = f.values()
    ref = np.exp(-GRID.x ** 2) * np.cos(GRID.x)
    assert np.abs(vals - ref).max() <= 1e-12 * np.abs(ref).max()


def test_plancherel_exact():
    u = _rand_field(0)
    lhs = np.sum(np.abs(u.coeffs) ** 2) * GRID.dxi
    rhs = np.sum(u.values() ** 2) * GRID.dx
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_continuum_normalization_gaussian():
    # u_hat(0) = (2 pi)^{-1/2} int e^{-x^2} dx = 1/sqrt(2)
    f = SpectralField.from_function(GRID, lambda x: np.exp(-x * x))
    assert f.coeffs[0] == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-12)


def test_single_mode_values():
    f = SpectralField.single_mode(GRID, 5, 0.7)
    xi5 = 5 * np.pi / GRID.L
    assert np.abs(f.values() - 0.7 * np.cos(xi5 * GRID.x)).max() <= 1e-12


def test_nyquist_zeroed():
    rng = np.random.default_rng(3)
    f = SpectralField.from_values(GRID, rng.standard_normal(GRID.M))
    assert f.coeffs[GRID.M // 2] == 0.0


def test_nonfinite_rejected():
    c = np.zeros(GRID.M, dtype=complex)
    c[3] = np.nan
    with pytest.raises(ValueError):
        SpectralField(GRID, c)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_from_values_hermitian(seed):
    rng = np.random.default_rng(seed)
    f = SpectralField.from_values(GRID, rng.standard_normal(GRID.M))
    assert f.is_hermitian()


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(-3, 3))
def test_arithmetic_preserves_hermitian(seed, alpha):
    a = _rand_field(seed)
    b = _rand_field(seed + 1)
    assert (a + b).is_hermitian()
    assert (a - b).is_hermitian()
    assert (alpha * a).is_hermitian()
    assert (-a).is_hermitian()


def test_grid_mismatch_raises():
    a = _rand_field(0)
    b = _rand_field(0, Grid(8.0 * np.pi, 512))
    with pytest.raises(ValueError):
        a + b


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

def test_symbol_values():
    p = EquationParams(beta=2.0, eta=3.0)
    assert symbol_q(2.0, p) == pytest.approx(8.0)
    assert symbol_q(-2.0, p) == pytest.approx(-8.0)  # odd
    assert symbol_p(0.5, p) == pytest.approx(-0.75)  # instability band
    assert symbol_p(1.0, p) == 0.0
    assert symbol_p(2.0, p) == pytest.approx(6.0)
    assert linear_symbol(2.0, p) == pytest.approx(8j - 6.0)


def test_instability_band_is_unit_interval():
    xi = np.linspace(-3, 3, 1201)
    p = symbol_p(xi, PARAMS)
    inside = (np.abs(xi) > 1e-12) & (np.abs(xi) < 1.0 - 1e-12)
    assert np.all(p[inside] < 0)
    assert np.all(p[~inside] >= -1e-15)


def test_params_validation():
    with pytest.raises(ValueError):
        EquationParams(beta=-1.0)
    with pytest.raises(ValueError):
        EquationParams(eta=-0.1)


# ---------------------------------------------------------------------------
# Hilbert transform and derivative
# ---------------------------------------------------------------------------

def test_hilbert_cos_sin():
    xi5 = 5 * np.pi / GRID.L
    c = SpectralField.from_function(GRID, lambda x: np.cos(xi5 * x))
    s = SpectralField.from_function(GRID, lambda x: np.sin(xi5 * x))
    assert np.abs(hilbert_transform(c).values() + np.sin(xi5 * GRID.x)).max() <= 1e-12
    assert np.abs(hilbert_transform(s).values() - np.cos(xi5 * GRID.x)).max() <= 1e-12


def test_hilbert_kills_mean():
    f = SpectralField.from_function(GRID, lambda x: 1.0 + np.cos(x))
    assert hilbert_transform(f).coeffs[0] == 0.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_hilbert_squared_is_minus_identity(seed):
    u = _rand_field(seed)
    c = u.coeffs.copy()
    c[0] = 0.0  # mean-zero
    u = SpectralField(GRID, c)
    hh = hilbert_transform(hilbert_transform(u))
    assert np.abs(hh.coeffs + u.coeffs).max() <= 1e-13 * max(np.abs(u.coeffs).max(), 1.0)


def test_x_derivative_sin():
    xi3 = 3 * np.pi / GRID.L
    s = SpectralField.from_function(GRID, lambda x: np.sin(xi3 * x))
    d = x_derivative(s)
    assert np.abs(d.values() - xi3 * np.cos(xi3 * GRID.x)).max() <= 1e-12
    d2 = x_derivative(s, order=2)
    assert np.abs(d2.values() + xi3 ** 2 * np.sin(xi3 * GRID.x)).max() <= 1e-11


# ---------------------------------------------------------------------------
# semigroup
# ---------------------------------------------------------------------------

def test_semigroup_identity_at_zero():
    u = _rand_field(1)
    v = semigroup_apply(u, 0.0, PARAMS)
    assert np.abs(v.coeffs - u.coeffs).max() == 0.0


def test_semigroup_forward_only():
    with pytest.raises(ValueError):
        semigroup_apply(_rand_field(0), -0.1, PARAMS)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_semigroup_law(t, s):
    E_t = semigroup_multiplier(GRID, t, PARAMS)
    E_s = semigroup_multiplier(GRID, s, PARAMS)
    E_ts = semigroup_multiplier(GRID, t + s, PARAMS)
    assert np.abs(E_t * E_s - E_ts).max() <= 1e-12 * max(np.abs(E_ts).max(), 1.0)


def test_semigroup_growth_cap():
    # |E(xi, t)| = e^{-p(xi) t} <= e^{eta t / 4}, max at xi = 1/2
    for t in (0.1, 0.5, 1.0):
        E = semigroup_multiplier(GRID, t, PARAMS)
        assert np.abs(E).max() <= np.exp(PARAMS.eta * t / 4.0) * (1 + 1e-12)


# ---------------------------------------------------------------------------
# nonlinearity
# ---------------------------------------------------------------------------

def test_nonlinear_term_cosine_oracle():
    # u = cos(a x)  =>  u u_x = -(a/2) sin(2 a x)
    a = 5 * np.pi / GRID.L
    u = SpectralField.from_function(GRID, lambda x: np.cos(a * x))
    w = nonlinear_term(u)
    ref = -(a / 2.0) * np.sin(2 * a * GRID.x)
    assert np.abs(w.values() - ref).max() <= 1e-12


@pytest.mark.filterwarnings("ignore::chenlee_lab.core.AliasingBudgetWarning")
def test_nonlinear_term_mean_exactly_zero():
    u = _rand_field(4)  # deliberately rough: the mean must vanish regardless
    assert nonlinear_term(u).coeffs[0] == 0.0


@pytest.mark.filterwarnings("ignore::chenlee_lab.core.AliasingBudgetWarning")
def test_nonlinear_term_hermitian():
    assert nonlinear_term(_rand_field(5)).is_hermitian()


def test_aliasing_warning_on_rough_data():
    rng = np.random.default_rng(6)
    u = random_real_field(GRID, rng)  # flat spectrum: badly under-resolved square
    with pytest.warns(AliasingBudgetWarning):
        nonlinear_term(u)


def test_no_aliasing_warning_when_resolved():
    u = SpectralField.from_function(GRID, lambda x: np.exp(-x * x))
    import warnings as _w
    with _w.catch_warnings():
        _w.simplefilter("error", AliasingBudgetWarning)
        nonlinear_term(u)


# ---------------------------------------------------------------------------
# random fields
# ---------------------------------------------------------------------------

def test_random_field_seeded_and_hermitian():
    a = _rand_field(11)
    b = _rand_field(11)
    assert np.array_equal(a.coeffs, b.coeffs)
    assert a.is_hermitian()
    assert np.abs(a.values().imag if np.iscomplexobj(a.values()) else 0.0) == 0.0


def test_random_field_band_restriction():
    rng = np.random.default_rng(2)
    u = random_real_field(GRID, rng, band=(2.0, 5.0))
    outside = (np.abs(GRID.xi) < 2.0) | (np.abs(GRID.xi) > 5.0)
    assert np.abs(u.coeffs[outside]).max() == 0.0
