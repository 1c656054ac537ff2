import math
import warnings

import numpy as np
import pytest
from oracles import (
    dense_brute_hamiltonian,
    general_eigs_4x4,
    trapezoid_gaussian_moment,
    trapezoid_inner,
)

from ipl import (
    ConsistencyError,
    MissingStateError,
    ValidationError,
    analytic_spectrum,
    apply_h_coeff,
    build_eigenstate,
    closed_form_state,
    derive_params,
    discretize_linear,
    discretize_nonlocal,
    eig_sym,
    grid_eigensystem,
    localization_length,
    localization_length_cells,
    lowest_physical_levels,
    params_from_lambda_g,
    recurrence_matrix,
    recurrence_matrix_eigs,
)
from ipl import continuum, gausspoly as gp

SQRT_235 = 1.5329709716755893   # sqrt(1.5^2 + 2*0.05)
SQRT_245 = 1.5652475842498528   # sqrt(1.5^2 + 4*0.05)


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

def test_derive_params_arithmetic():
    p = derive_params(0.5, 1.0, 10 * math.pi / 4)
    assert p.lam == 1.5
    assert p.g == pytest.approx(0.1, abs=1e-15)


def test_derive_params_figure_pair():
    p = derive_params(0.5, 1.0, 5 * math.pi)
    assert p.lam == 1.5
    assert p.g == pytest.approx(0.05, abs=1e-16)
    assert not p.degenerate


def test_derive_params_zero_coupling_flagged_degenerate():
    p = derive_params(0.0, 1.0, 10.0)
    assert p.lam == 1.0
    assert p.g == 0.0
    assert p.degenerate


def test_derive_params_validation():
    with pytest.raises(ValidationError):
        derive_params(-0.1, 1.0, 1.0)
    with pytest.raises(ValidationError):
        derive_params(0.5, 0.0, 1.0)
    with pytest.raises(ValidationError):
        derive_params(0.5, 1.0, -2.0)


def test_params_from_lambda_g_roundtrip():
    p = params_from_lambda_g(1.5, 0.05)
    q = derive_params(p.epsilon, p.cell_length, p.half_span)
    assert q.g == pytest.approx(p.g, rel=1e-15)
    assert q.lam == p.lam
    with pytest.raises(ValidationError):
        params_from_lambda_g(0.9, 0.05)


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def test_spectrum_canonical_values(canonical_params):
    levels = analytic_spectrum(canonical_params, 2)
    table = {(lv.n, lv.sign): lv.energy for lv in levels}
    assert table[(0, "+")] == 1.5
    assert (0, "-") not in table
    assert table[(1, "+")] == pytest.approx(SQRT_235, abs=1e-15)
    assert table[(1, "-")] == pytest.approx(-SQRT_235, abs=1e-15)
    assert table[(2, "+")] == pytest.approx(SQRT_245, abs=1e-15)
    assert table[(2, "-")] == pytest.approx(-SQRT_245, abs=1e-15)


def test_spectrum_single_nodeless_level(canonical_params):
    levels = analytic_spectrum(canonical_params, 0)
    assert levels == [(0, "+", canonical_params.lam)]


def test_spectrum_pairing_and_gap(canonical_params):
    levels = analytic_spectrum(canonical_params, 8)
    lam = canonical_params.lam
    delta = min(0.01, canonical_params.g)
    pos = sorted(lv.energy for lv in levels if lv.n >= 1 and lv.sign == "+")
    neg = sorted(-lv.energy for lv in levels if lv.n >= 1 and lv.sign == "-")
    assert np.allclose(pos, neg, atol=0)
    assert sum(abs(lv.energy - lam) < 1e-12 for lv in levels) == 1
    assert all(abs(lv.energy + lam) > delta for lv in levels)


def test_spectrum_ascending_flag(canonical_params):
    energies = [lv.energy for lv in analytic_spectrum(canonical_params, 5, ascending=True)]
    assert energies == sorted(energies)


def test_spectrum_degenerate_two_level():
    p = derive_params(0.5, 1.0, math.inf)
    assert p.degenerate
    levels = analytic_spectrum(p, 7)
    assert [(lv.n, lv.sign) for lv in levels] == [(0, "+"), (0, "-")]
    assert levels[0].energy == 1.5 and levels[1].energy == -1.5


# ---------------------------------------------------------------------------
# eigenstates
# ---------------------------------------------------------------------------

def test_ground_state_paper_amplitude(canonical_params):
    s = build_eigenstate(canonical_params, 0, "+", "paper")
    amp = (1.0 / (math.pi * canonical_params.g)) ** 0.25
    assert s.coeffs_a.size == 1 and s.coeffs_b.size == 1
    assert s.coeffs_a[0] == pytest.approx(amp, rel=1e-14)
    assert s.coeffs_b[0] == pytest.approx(amp, rel=1e-14)
    assert s.energy == canonical_params.lam


def test_missing_negative_ground_state(canonical_params):
    with pytest.raises(MissingStateError):
        build_eigenstate(canonical_params, 0, "-")
    with pytest.raises(MissingStateError):
        closed_form_state(canonical_params, 0, "-")


@pytest.mark.parametrize("n,sign", [(1, "-"), (2, "-"), (1, "+"), (2, "+")])
def test_recurrence_matches_closed_forms(canonical_params, n, sign):
    built = build_eigenstate(canonical_params, n, sign, "paper")
    closed = closed_form_state(canonical_params, n, sign, "paper")
    assert built.energy == pytest.approx(closed.energy, abs=1e-15)
    assert np.abs(built.coeffs_a - closed.coeffs_a).max() <= 1e-12
    assert np.abs(built.coeffs_b - closed.coeffs_b).max() <= 1e-12


def test_closed_form_n1_structure(canonical_params):
    s = closed_form_state(canonical_params, 1, "-", "paper")
    offset = 0.5 * (SQRT_235 + 1.5)
    lead = s.coeffs_a[1]
    assert s.coeffs_a[0] / lead == pytest.approx(offset, rel=1e-14)
    # second component: constant term negated
    assert s.coeffs_b[0] == pytest.approx(-s.coeffs_a[0], abs=1e-15)
    assert s.coeffs_b[1] == pytest.approx(s.coeffs_a[1], abs=1e-15)


def test_closed_form_n2_constant_term(canonical_params):
    s = build_eigenstate(canonical_params, 2, "-")
    g = canonical_params.g
    assert s.coeffs_a[0] / s.coeffs_a[2] == pytest.approx(-g / 2.0, rel=1e-12)


def test_paper_normalization_total_norm_two(canonical_params):
    # componentwise unit norm means total spinor norm 2; checked both by
    # exact moments and by the trapezoid quadrature oracle
    for n, sign in ((1, "-"), (2, "-")):
        s = closed_form_state(canonical_params, n, sign, "paper")
        assert s.total_norm_sq() == pytest.approx(2.0, rel=1e-12)
        xi = np.linspace(-3.0, 3.0, 200001)
        p1, p2 = s.component_values(xi)
        num = trapezoid_inner(p1, p1, xi) + trapezoid_inner(p2, p2, xi)
        assert num == pytest.approx(2.0, rel=1e-8)


def test_unit_total_normalization(canonical_params):
    for n in range(0, 7):
        s = build_eigenstate(canonical_params, n, "+" )
        assert s.total_norm_sq() == pytest.approx(1.0, rel=1e-12)


def test_gaussian_moment_against_quadrature():
    g = 0.05
    for k in range(0, 9):
        exact = gp.gaussian_moment(k, g)
        num = trapezoid_gaussian_moment(k, g)
        if k % 2 == 1:
            assert abs(num) <= 1e-12
        else:
            assert num == pytest.approx(exact, rel=1e-9)


def test_termination_and_leading_equality(canonical_params):
    lam, g = canonical_params.lam, canonical_params.g
    for n, sign in ((3, "-"), (5, "+"), (8, "-")):
        s = build_eigenstate(canonical_params, n, sign)
        a, b = s.coeffs_a, s.coeffs_b
        scale = max(np.abs(a).max(), np.abs(b).max())
        assert abs(a[n] - b[n]) <= 1e-10 * scale
        # push the recurrence one past the end: the next coefficients vanish
        am1 = a[n - 1] if n >= 1 else 0.0
        bm1 = b[n - 1] if n >= 1 else 0.0
        nxt_a = (am1 - bm1 - lam * a[n] + s.energy * b[n]) / (g * (n + 1))
        nxt_b = (bm1 - am1 + lam * b[n] - s.energy * a[n]) / (g * (n + 1))
        assert abs(nxt_a) <= 1e-10 * scale
        assert abs(nxt_b) <= 1e-10 * scale


def test_orthogonality_of_distinct_states(canonical_params):
    states = [build_eigenstate(canonical_params, 0, "+")]
    for n in range(1, 7):
        states.append(build_eigenstate(canonical_params, n, "-"))
        states.append(build_eigenstate(canonical_params, n, "+"))
    for i, si in enumerate(states):
        for sj in states[i + 1:]:
            assert abs(continuum.overlap(si, sj)) <= 1e-10


def test_wrong_energy_does_not_terminate(canonical_params):
    with pytest.raises(ConsistencyError):
        continuum._build_coefficients(canonical_params.lam, canonical_params.g, 3, 1.9)


# ---------------------------------------------------------------------------
# operator action in coefficient space
# ---------------------------------------------------------------------------

def test_apply_h_ground_direction(canonical_params):
    lam, g = canonical_params.lam, canonical_params.g
    r1, r2 = continuum.apply_h_pair(lam, g, [1.0], [1.0])
    assert np.allclose(gp.trim(r1), [lam], atol=1e-15)
    assert np.allclose(gp.trim(r2), [lam], atol=1e-15)


def test_apply_h_antisymmetric_seed_not_eigen(canonical_params):
    lam, g = canonical_params.lam, canonical_params.g
    r1, r2 = continuum.apply_h_pair(lam, g, [1.0], [-1.0])
    assert np.allclose(r1, [-lam, -2.0], atol=1e-15)
    assert np.allclose(r2, [lam, -2.0], atol=1e-15)


def test_apply_h_g_mismatch(canonical_params):
    other = params_from_lambda_g(1.5, 0.1)
    s = build_eigenstate(other, 1, "-")
    with pytest.raises(ValidationError):
        apply_h_coeff(canonical_params, s)


@pytest.mark.parametrize("lam", [1.1, 1.5, 3.0])
@pytest.mark.parametrize("g", [0.01, 0.05, 0.5])
def test_eigen_residual_coefficient_space(lam, g):
    p = params_from_lambda_g(lam, g)
    for n in range(0, 11):
        for sign in ("+", "-"):
            if n == 0 and sign == "-":
                continue
            s = build_eigenstate(p, n, sign)
            assert continuum.eigen_residual_coeff(p, s) <= 1e-11


# ---------------------------------------------------------------------------
# one-step recurrence matrix
# ---------------------------------------------------------------------------

def test_recurrence_matrix_eigs_zero_at_termination_index(canonical_params):
    # the nonzero pair closes exactly one step before the polynomial degree:
    # the discriminant lam^2 + 2g(k+1) - E_n^2 vanishes at k = n - 1
    for n in (1, 3, 6):
        e = math.sqrt(canonical_params.lam**2 + 2 * canonical_params.g * n)
        r = recurrence_matrix_eigs(canonical_params, e, n - 1)
        assert r.values == (0.0, 0.0, 0.0, 0.0)
        assert not r.negative_discriminant


def test_recurrence_matrix_eigs_vs_general_solver(canonical_params):
    e = 1.7
    for k in (0, 2, 5):
        got = sorted(recurrence_matrix_eigs(canonical_params, e, k).values)
        m = recurrence_matrix(canonical_params, e, k)
        ref = sorted(x.real for x in general_eigs_4x4(m))
        assert np.allclose(got, ref, atol=1e-10)


def test_recurrence_matrix_eigs_nodeless_pair(canonical_params):
    g = canonical_params.g
    r = recurrence_matrix_eigs(canonical_params, canonical_params.lam, 0)
    expected = math.sqrt(2 * g) / g
    assert sorted(r.values) == pytest.approx(
        sorted((0.0, 0.0, expected, -expected)), abs=1e-13)


def test_recurrence_matrix_eigs_general_c(canonical_params):
    g = canonical_params.g
    lam = canonical_params.lam
    # the non-normalizable branch c = -1/g: same magnitudes, swapped roles
    r = recurrence_matrix_eigs(canonical_params, lam, 0, c=-1.0 / g)
    expected = math.sqrt(2.0 / g)
    assert sorted(r.values) == pytest.approx(
        sorted((0.0, 0.0, expected, -expected)), abs=1e-12)
    m = recurrence_matrix(canonical_params, lam, 0, c=-1.0 / g)
    ref = sorted(x.real for x in general_eigs_4x4(m))
    assert np.allclose(sorted(r.values), ref, atol=1e-10)
    with pytest.raises(ValidationError):
        recurrence_matrix_eigs(canonical_params, lam, 1, c=-1.0 / g)


def test_recurrence_matrix_eigs_complex_flag(canonical_params):
    # energy far inside the gap: discriminant negative, imaginary pair
    r = recurrence_matrix_eigs(canonical_params, 5.0, 0)
    assert r.negative_discriminant


def test_recurrence_step_matches_matrix(canonical_params):
    state = continuum.RecurrenceState(0, (0.3, -0.2, 1.0, 1.0))
    nxt = continuum.recurrence_step(canonical_params, 1.6, state)
    m = recurrence_matrix(canonical_params, 1.6, 0)
    assert np.allclose(nxt.s_vector, m @ np.array(state.s_vector), atol=1e-15)
    assert nxt.k == 1


# ---------------------------------------------------------------------------
# localization length
# ---------------------------------------------------------------------------

def test_localization_length_value():
    assert localization_length(0.1, 1.0, 100.0) == pytest.approx(
        3.5682482323055424, abs=1e-15)


def test_localization_length_exponent_identity():
    # exp(-xi^2/(2g)) with xi = pi x/(2L) equals exp(-x^2/l^2) exactly
    eps, a, L = 0.37, 1.3, 42.0
    ell = localization_length(eps, a, L)
    g = math.pi * eps * a / (2 * L)
    for x in (0.5, 3.0, 11.0):
        xi = math.pi * x / (2 * L)
        assert xi**2 / (2 * g) == pytest.approx(x**2 / ell**2, rel=1e-13)


def test_localization_length_cells_consistency():
    eps, a, L = 0.42, 1.0, 217.0
    dphi = math.pi * a / (4 * L)
    assert localization_length(eps, a, L) / a == pytest.approx(
        localization_length_cells(eps, dphi), rel=1e-13)


def test_localization_length_small_coupling_limit():
    widths = [localization_length(e, 1.0, 50.0) for e in (1e-2, 1e-4, 1e-6)]
    assert widths[0] > widths[1] > widths[2]
    assert widths[2] < 1e-2


# ---------------------------------------------------------------------------
# linearized grid oracle
# ---------------------------------------------------------------------------

def test_linear_grid_matches_brute_assembly(canonical_params):
    op = discretize_linear(canonical_params, n_points=201)
    brute = dense_brute_hamiltonian(canonical_params.lam, canonical_params.g, np.asarray(op.xi))
    assert np.abs(op.matrix - brute).max() == 0.0


def test_linear_grid_exactly_symmetric(canonical_params):
    op = discretize_linear(canonical_params, n_points=401)
    assert np.abs(op.matrix - op.matrix.T).max() == 0.0
    assert op.n_points == 401
    assert op.xi_min == -op.xi_max


def test_linear_grid_validation(canonical_params):
    with pytest.raises(ValidationError):
        discretize_linear(canonical_params, n_points=400)
    with pytest.raises(ValidationError):
        discretize_linear(canonical_params, xi_max=-1.0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        discretize_linear(canonical_params, xi_max=0.5, n_points=201)
    assert any("truncates" in str(w.message) for w in caught)


def test_sector_split_equals_dense(canonical_params):
    op = discretize_linear(canonical_params, n_points=301)
    w_dense = eig_sym(op.matrix).eigenvalues
    w_split = grid_eigensystem(op).eigenvalues
    assert np.abs(w_dense - w_split).max() <= 1e-11
    system = grid_eigensystem(op)
    h = op.matrix
    r = h @ system.eigenvectors - system.eigenvectors * system.eigenvalues
    assert np.abs(r).max() <= 1e-10


def test_linear_grid_low_spectrum(canonical_params):
    op = discretize_linear(canonical_params, n_points=1501)
    got = lowest_physical_levels(op, 11)
    want = np.sort([lv.energy for lv in analytic_spectrum(canonical_params, 5)])
    assert np.abs((got - want) / want).max() <= 2e-4


def test_linear_grid_second_order_convergence(canonical_params):
    want = np.sort([lv.energy for lv in analytic_spectrum(canonical_params, 2)])

    def err(n_points):
        op = discretize_linear(canonical_params, n_points=n_points)
        got = lowest_physical_levels(op, 5)
        return np.abs((got - want) / want).max()

    e1, e2 = err(751), err(1501)
    assert 3.0 <= e1 / e2 <= 5.0


def test_linear_grid_mirror_branch_is_alternating(canonical_params):
    # the centered stencil carries an exact mirrored copy of the spectrum
    # on grid-alternating vectors; filtering must drop a -lam image
    op = discretize_linear(canonical_params, n_points=801)
    system = grid_eigensystem(op)
    mask = continuum.physical_mask(op, system)
    w = system.eigenvalues
    near_neg = (np.abs(w + canonical_params.lam) < 0.01)
    assert near_neg.any()                          # the mirror image exists
    assert not (near_neg & mask).any()             # and is filtered out
    near_pos = (np.abs(w - canonical_params.lam) < 1e-3)
    assert (near_pos & mask).sum() == 1


# ---------------------------------------------------------------------------
# nonlocal grid oracle
# ---------------------------------------------------------------------------

def test_nonlocal_zero_coupling_spectrum():
    op = discretize_nonlocal(0.0, 1.0, 5 * math.pi, 1.0, 4)
    w = np.linalg.eigvalsh(op.matrix)
    assert np.abs(np.abs(w) - 1.0).max() <= 1e-12


def test_nonlocal_shift_algebra():
    op = discretize_nonlocal(0.5, 1.0, 5 * math.pi, 1.0, 3)
    t = ((op.coupling - np.diag(np.cos(op.xi))) / 0.5).T
    m, k = op.n_points, op.shift_steps
    ttt = t @ t.T
    # identity minus the projectors on the k sites that shift off the grid
    expected = np.eye(m)
    expected[np.arange(m - k, m), np.arange(m - k, m)] = 0.0
    assert np.abs(ttt - expected).max() == 0.0


def test_nonlocal_commensurate_spacing():
    op = discretize_nonlocal(0.5, 1.0, 5 * math.pi, 1.5, 16)
    shift = math.pi / (2 * 5 * math.pi)
    assert op.spacing * 16 == pytest.approx(shift, rel=1e-14)
    assert op.n_points % 2 == 1
    with pytest.raises(ValidationError):
        discretize_nonlocal(0.5, 1.0, 5 * math.pi, 1.5, 0)
    with pytest.raises(ValidationError):
        discretize_nonlocal(0.5, 1.0, 5 * math.pi, 1.5, 2.5)


def test_nonlocal_approaches_linearized():
    # doubling the span halves both g and the hop; the low-lying smooth
    # levels drift towards the closed-form values, errors strictly down
    eps, a = 0.5, 1.0
    errors = []
    for L in (5 * math.pi, 10 * math.pi):
        p = derive_params(eps, a, L)
        op = discretize_nonlocal(eps, a, L, 1.5, 16)
        system = grid_eigensystem(op)
        w = system.eigenvalues[continuum.physical_mask(op, system)]
        targets = np.sort([lv.energy for lv in analytic_spectrum(p, 2)])
        errors.append(np.array([np.abs(w - t).min() / abs(t) for t in targets]))
    assert (errors[1] < errors[0]).all()
    assert errors[1].max() < 0.05
