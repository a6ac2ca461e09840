"""Heat semigroup, Bessel/Mittag-Leffler special functions, fractional powers,
and the fractional Klein-Gordon route.  The heat multiplier is pinned against a
dense matrix exponential; every closed-form kernel has a second route."""

import math

import numpy as np
import pytest

from latticewave import (
    CauchyData,
    FracParams,
    GridSpec,
    LatticeField,
    TimeModel,
    bessel_i,
    convolve,
    dirac_data,
    discrete_laplacian,
    erfc,
    frac_power,
    fractional_kernels,
    heat_kernel_bessel,
    heat_kernel_spectral,
    heat_semigroup,
    kg_residual,
    mittag_leffler,
    multiplier_d2,
    p_t_operator,
    random_field,
    relative_gap,
    riesz,
    riesz_inverse,
    solve_kg,
    solve_kg_fractional,
)
from latticewave.lattice import norm


def _grid1(N=16, h=0.5):
    return GridSpec((N,), h)


# -- heat kernels: closed form vs spectral ----------------------------------------


@pytest.mark.parametrize("shape,h", [((16,), 0.5), ((8, 8), 0.7)])
@pytest.mark.parametrize("s", [0.1, 0.5, 2.0])
def test_heat_kernel_dual_routes_agree(shape, h, s):
    grid = GridSpec(shape, h)
    kb = heat_kernel_bessel(grid, s)
    ks = heat_kernel_spectral(grid, s)
    assert np.max(np.abs(kb.values - ks.values)) <= 1e-12


def test_heat_kernel_at_zero_is_identity():
    grid = _grid1(N=8)
    for K in (heat_kernel_bessel(grid, 0.0), heat_kernel_spectral(grid, 0.0)):
        want = np.zeros((8, 4), dtype=complex)
        want[0, 0] = 1.0 / 0.5  # h^-n spike
        assert np.max(np.abs(K.values - want)) <= 1e-12


def test_heat_kernel_is_positive_and_real():
    grid = _grid1()
    K = heat_kernel_bessel(grid, 0.7)
    assert np.max(np.abs(K.values[..., 1:])) == 0.0
    vals = K.values[..., 0]
    assert np.max(np.abs(vals.imag)) <= 1e-16
    assert np.min(vals.real) > 0.0


def test_heat_kernel_convolution_is_semigroup(rng):
    grid = _grid1()
    f = random_field(grid, rng)
    s = 0.4
    got = convolve(heat_kernel_spectral(grid, s), f)
    assert relative_gap(got, heat_semigroup(f, s)) <= 1e-12


def test_heat_rejects_negative_time():
    grid = _grid1(N=8)
    f = LatticeField.delta(grid)
    with pytest.raises(ValueError):
        heat_semigroup(f, -0.1)
    with pytest.raises(ValueError):
        heat_kernel_spectral(grid, -0.1)
    with pytest.raises(ValueError):
        heat_kernel_bessel(grid, -0.1)


def test_heat_kernel_bessel_overflow_guard():
    grid = _grid1(h=0.01)  # u = 2s/h^2 is huge
    with pytest.raises(ValueError):
        heat_kernel_bessel(grid, 1.0)


# -- heat semigroup vs dense matrix exponential ------------------------------------


def test_heat_semigroup_matches_matrix_exponential(rng):
    # independent oracle: assemble the Laplacian as a dense matrix from the
    # position stencil, exponentiate by eigendecomposition, compare
    N, h, s = 6, 0.8, 0.7
    grid = GridSpec((N,), h)
    L = np.empty((N, N))
    for j in range(N):
        basis = np.zeros((N, grid.blades), dtype=complex)
        basis[j, 0] = 1.0
        L[:, j] = discrete_laplacian(LatticeField(grid, basis)).values[:, 0].real
    assert np.max(np.abs(L - L.T)) == 0.0
    w, V = np.linalg.eigh(L)
    x = rng.standard_normal(N)
    want = V @ (np.exp(s * w) * (V.T @ x))
    f = LatticeField.from_scalar(grid, x.astype(complex))
    got = heat_semigroup(f, s).values[:, 0]
    assert np.max(np.abs(got - want)) <= 1e-12


def test_heat_semigroup_properties(rng):
    grid = _grid1()
    f = random_field(grid, rng)
    a = heat_semigroup(heat_semigroup(f, 0.3), 0.5)
    b = heat_semigroup(f, 0.8)
    assert relative_gap(a, b) <= 1e-12
    assert relative_gap(heat_semigroup(f, 0.0), f) <= 1e-13
    # the zero mode (total mass per blade) is conserved
    before = f.values.sum(axis=0)
    after = heat_semigroup(f, 1.7).values.sum(axis=0)
    assert np.max(np.abs(after - before)) <= 1e-12 * max(1.0, np.max(np.abs(before)))


def test_explicit_euler_converges_first_order(rng):
    grid = _grid1(N=8)
    f = random_field(grid, rng, scalar=True)
    s = 0.3
    want = heat_semigroup(f, s)

    def euler_error(K: int) -> float:
        delta = s / K
        cur = f
        for _ in range(K):
            cur = cur + delta * discrete_laplacian(cur)
        return relative_gap(cur, want)

    e64, e128 = euler_error(64), euler_error(128)
    assert 1.8 <= e64 / e128 <= 2.2


# -- special functions --------------------------------------------------------------


def test_bessel_matches_integral_representation():
    theta = np.linspace(0.0, math.pi, 20001)
    for u in (0.5, 2.5, 10.0):
        for k in (0, 1, 3):
            quad = np.trapezoid(np.exp(u * np.cos(theta)) * np.cos(k * theta), theta) / math.pi
            assert abs(bessel_i(k, u) - quad) <= 1e-10 * abs(quad)


def test_bessel_recurrence_and_symmetry():
    for u in (0.3, 4.0, 50.0):
        for k in (1, 2, 5):
            lhs = bessel_i(k - 1, u) - bessel_i(k + 1, u)
            rhs = 2.0 * k / u * bessel_i(k, u)
            assert abs(lhs - rhs) <= 1e-12 * abs(rhs)
    assert bessel_i(-3, 1.7) == bessel_i(3, 1.7)


def test_bessel_edge_cases():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(2, 0.0) == 0.0
    assert bessel_i(300, 0.1) == 0.0  # true value far below double precision
    with pytest.raises(ValueError):
        bessel_i(0, -1.0)
    with pytest.raises(ValueError):
        bessel_i(0, 701.0)


def test_mittag_leffler_classical_identities():
    for z in (0.5, -2.0, 3.0j, 1.0 - 1.0j):
        assert abs(mittag_leffler(1.0, 1.0, z) - np.exp(z)) <= 1e-13 * abs(np.exp(z))
    x = 1.3
    assert mittag_leffler(2.0, 1.0, x**2) == pytest.approx(math.cosh(x), rel=1e-13)
    assert mittag_leffler(2.0, 2.0, x**2) == pytest.approx(math.sinh(x) / x, rel=1e-13)
    z = 0.7
    assert mittag_leffler(1.0, 2.0, z) == pytest.approx((math.exp(z) - 1.0) / z, rel=1e-13)
    u = 0.4
    assert mittag_leffler(0.5, 1.0, u) == pytest.approx(math.exp(u * u) * erfc(-u), rel=1e-12)


def test_mittag_leffler_guards():
    with pytest.raises(ValueError):
        mittag_leffler(0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        mittag_leffler(1.0, -1.0, 0.5)
    with pytest.raises(ValueError):
        mittag_leffler(1.0, 1.0, 40.0)  # outside the series domain guard
    with pytest.raises(ValueError):
        mittag_leffler(1.0, 1.0, -25.0)  # refuses to return cancellation noise


# -- fractional powers ---------------------------------------------------------------


def test_frac_params_validation():
    FracParams(0.25, 1.0)
    for alpha in (0.0, 0.5, 0.6, -0.1):
        with pytest.raises(ValueError):
            FracParams(alpha, 1.0)
    with pytest.raises(ValueError):
        FracParams(0.25, 0.0)
    with pytest.raises(ValueError):
        FracParams(0.25, 1.0, nodes=5)
    with pytest.raises(ValueError):
        FracParams(0.25, 1.0, t_max=-1.0)
    with pytest.raises(ValueError):
        FracParams(0.25, 1.0, head_tol=0.0)
    assert FracParams(0.25, 2.0).upper_cutoff() == pytest.approx(10.0)
    assert FracParams(0.25, 2.0, t_max=3.0).upper_cutoff() == 3.0


def test_frac_power_spectral_plane_wave_eigenvalue():
    grid = _grid1()
    pw = LatticeField.plane_wave(grid, (2,))
    xi = 2 * math.pi * 2 / (16 * 0.5)
    mu = (multiplier_d2(xi, 0.5) + 1.0) ** (-0.25)
    p = FracParams(0.25, 1.0)
    assert relative_gap(frac_power(pw, p), pw * mu) <= 1e-13


def test_frac_power_mode_validation(rng):
    grid = _grid1(N=8)
    f = random_field(grid, rng)
    with pytest.raises(ValueError):
        frac_power(f, FracParams(0.25, 1.0), mode="magic")


@pytest.mark.parametrize("alpha", [0.1, 0.25, 0.4])
def test_subordination_quadrature_matches_spectral(rng, alpha):
    grid = _grid1()
    f = random_field(grid, rng)
    p = FracParams(alpha, 1.0)
    got = frac_power(f, p, mode="subordination")
    want = frac_power(f, p, mode="spectral")
    assert relative_gap(got, want) <= 1e-6


def test_subordination_quadrature_2d(rng):
    grid = GridSpec((8, 8), 0.7)
    f = random_field(grid, rng)
    p = FracParams(0.25, 1.0)
    got = frac_power(f, p, mode="subordination")
    want = frac_power(f, p, mode="spectral")
    assert relative_gap(got, want) <= 1e-6


def test_riesz_round_trips(rng):
    grid = _grid1()
    f = random_field(grid, rng)
    p = FracParams(0.25, 1.0)
    assert relative_gap(riesz_inverse(riesz(f, p), p), f) <= 1e-9
    assert relative_gap(riesz(riesz_inverse(f, p), p), f) <= 1e-9


def test_riesz_squared_is_power_multiplier():
    # (D - m gamma)^2 = d^2 + m^2 turns two riesz applications into a plain power
    grid = _grid1()
    pw = LatticeField.plane_wave(grid, (3,))
    xi = 2 * math.pi * 3 / (16 * 0.5)
    p = FracParams(0.2, 1.0)
    mu = (multiplier_d2(xi, 0.5) + 1.0) ** (1.0 - 2 * p.alpha)
    assert relative_gap(riesz(riesz(pw, p), p), pw * mu) <= 1e-12


# -- fractional Klein-Gordon ----------------------------------------------------------


@pytest.mark.parametrize("make_tm,t", [(TimeModel.continuous, 0.8),
                                       (lambda: TimeModel.central_difference(0.2), 1.0)])
def test_fractional_route_reproduces_plain_solver(rng, make_tm, t):
    grid = _grid1()
    tm = make_tm()
    data = CauchyData(random_field(grid, rng), random_field(grid, rng))
    p = FracParams(0.25, 1.0)
    want = solve_kg(data, tm, p.m, t)
    got = solve_kg_fractional(data, tm, p, t, mode="spectral")
    assert relative_gap(got, want) <= 1e-9
    got_sub = solve_kg_fractional(data, tm, p, t, mode="subordination")
    assert relative_gap(got_sub, want) <= 1e-6


def test_fractional_kernels_at_zero(rng):
    grid = _grid1()
    p = FracParams(0.25, 1.0)
    _, K1a = fractional_kernels(grid, TimeModel.continuous(), p, 0.0)
    assert norm(K1a) <= 1e-13


def test_p_t_splits_into_wave_solutions(rng):
    grid = _grid1()
    p = FracParams(0.25, 1.0)
    tm = TimeModel.continuous()
    phi = random_field(grid, rng)
    t = 0.6
    plus = p_t_operator(phi, tm, p, t)
    minus = p_t_operator(phi, tm, p, -t)
    even = (plus + minus) * 0.5
    odd = (plus - minus) * 0.5
    assert relative_gap(even, solve_kg(CauchyData.rest(phi), tm, p.m, t)) <= 1e-12
    vel = dirac_data(phi, p.alpha, p.m).phi1
    assert relative_gap(odd, solve_kg(CauchyData(LatticeField.zeros(grid), vel), tm, p.m, t)) <= 1e-12
    assert relative_gap(p_t_operator(phi, tm, p, 0.0), phi) <= 1e-13


def test_p_t_slices_solve_the_wave_equation(rng):
    grid = _grid1()
    p = FracParams(0.25, 1.0)
    tau = 0.2
    tm = TimeModel.central_difference(tau)
    phi = random_field(grid, rng)
    slices = [p_t_operator(phi, tm, p, k * tau) for k in (1, 2, 3)]
    assert kg_residual(*slices, p.m, tau) <= 1e-11
