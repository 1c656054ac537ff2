import numpy as np
import pytest

from ipl import (
    AngleProfile,
    DegenerateCellError,
    LatticeSpec,
    ValidationError,
    build_full_hamiltonian,
    build_reduced_hamiltonian,
    equidistant_angles,
)


def test_equidistant_three_cells():
    prof = equidistant_angles(3)
    assert np.allclose(prof.values, [np.pi / 8, np.pi / 4, 3 * np.pi / 8], atol=0, rtol=0)


def test_equidistant_endpoints_only():
    prof = equidistant_angles(2)
    assert prof.values[0] == np.pi / 8
    assert prof.values[-1] == 3 * np.pi / 8


def test_equidistant_step():
    prof = equidistant_angles(5)
    steps = np.diff(prof.values)
    assert np.allclose(steps, np.pi / 16, atol=1e-15)


def test_equidistant_midpoint_odd():
    prof = equidistant_angles(9)
    assert prof.values[4] == pytest.approx(np.pi / 4, abs=1e-15)


def test_equidistant_rejects_single_cell():
    with pytest.raises(ValidationError):
        equidistant_angles(1)


def test_angle_profile_rejects_nonfinite():
    with pytest.raises(ValidationError):
        AngleProfile([0.1, np.nan])


def test_spec_validation():
    with pytest.raises(ValidationError):
        LatticeSpec(3, equidistant_angles(4))
    with pytest.raises(ValidationError):
        LatticeSpec(2, equidistant_angles(2), coupling0=-0.1)
    with pytest.raises(ValidationError):
        LatticeSpec(2, equidistant_angles(2), lattice_constant=0.0)


def test_single_cell_block_at_quarter_pi():
    spec = LatticeSpec(1, AngleProfile([np.pi / 4]), d1=1.0, d2=-1.0)
    h = build_full_hamiltonian(spec).dense()
    assert np.allclose(h, [[0, 1], [1, 0]], atol=1e-15)


def test_single_cell_block_at_zero():
    spec = LatticeSpec(1, AngleProfile([0.0]), d1=1.0, d2=-1.0)
    h = build_full_hamiltonian(spec).dense()
    assert np.allclose(h, [[1, 0], [0, -1]], atol=0)


def test_coupling_block_placement():
    # two cells: the only cross-block entries sit at (2,1) and (1,2)
    # in zero-based indexing, both equal to the bare coupling
    spec = LatticeSpec(2, equidistant_angles(2), coupling0=0.3)
    h = build_full_hamiltonian(spec).dense()
    cross = h.copy()
    cross[:2, :2] = 0.0
    cross[2:, 2:] = 0.0
    expected = np.zeros((4, 4))
    expected[2, 1] = expected[1, 2] = 0.3
    assert np.array_equal(cross, expected)


def test_dense_exactly_symmetric():
    spec = LatticeSpec.equidistant(17, coupling0=0.7, d1=2.3, d2=-0.4)
    for builder in (build_full_hamiltonian, build_reduced_hamiltonian):
        h = builder(spec).dense()
        assert np.abs(h - h.T).max() == 0.0


def test_reduced_from_full_identity():
    rng = np.random.default_rng(3)
    for _ in range(5):
        n = int(rng.integers(2, 9))
        spec = LatticeSpec(
            n,
            AngleProfile(rng.uniform(0, np.pi, n)),
            coupling0=float(rng.uniform(0, 1)),
            d1=float(rng.uniform(0.5, 2.0)),
            d2=float(rng.uniform(-2.0, -0.5)),
        )
        full = build_full_hamiltonian(spec).dense()
        reduced = build_reduced_hamiltonian(spec).dense()
        shift = (spec.d1 + spec.d2) / 2.0
        rescaled = (full - shift * np.eye(2 * n)) * (2.0 / (spec.d1 - spec.d2))
        assert np.abs(reduced - rescaled).max() <= 1e-15


def test_reduced_blocks_at_quarter_pi():
    spec = LatticeSpec(3, AngleProfile([np.pi / 4] * 3), coupling0=0.2)
    bt = build_reduced_hamiltonian(spec)
    for m in range(3):
        assert np.allclose(bt.diag_blocks[m], [[0, 1], [1, 0]], atol=1e-15)


def test_reduced_blocks_traceless_involutions():
    spec = LatticeSpec.equidistant(31, coupling0=0.5)
    bt = build_reduced_hamiltonian(spec)
    for block in bt.diag_blocks:
        assert abs(np.trace(block)) <= 1e-15
        assert np.abs(block @ block - np.eye(2)).max() <= 1e-14


def test_isospectral_decoupled_reduced():
    # eps = 0: every reduced cell is an involution, spectrum {-1, +1} N-fold
    for n in (2, 7):
        spec = LatticeSpec.equidistant(n, coupling0=0.0)
        w = np.linalg.eigvalsh(build_reduced_hamiltonian(spec).dense())
        assert np.abs(np.sort(w) - np.array([-1.0] * n + [1.0] * n)).max() <= 1e-12


def test_isospectral_decoupled_full_profile_independent():
    rng = np.random.default_rng(11)
    d1, d2 = 1.7, -0.3
    reference = None
    for _ in range(3):
        spec = LatticeSpec(6, AngleProfile(rng.uniform(0, np.pi, 6)), 0.0, d1, d2)
        w = np.sort(np.linalg.eigvalsh(build_full_hamiltonian(spec).dense()))
        expected = np.sort([d2] * 6 + [d1] * 6)
        assert np.abs(w - expected).max() <= 1e-12
        if reference is not None:
            assert np.abs(w - reference).max() <= 1e-12
        reference = w


def test_reduced_coupling_rescaling():
    spec = LatticeSpec.equidistant(4, coupling0=0.3, d1=2.0, d2=-1.0)
    assert spec.reduced_coupling == pytest.approx(0.2, abs=1e-15)
    bt = build_reduced_hamiltonian(spec)
    assert bt.upper_blocks[0][0, 1] == pytest.approx(0.2, abs=1e-15)


def test_degenerate_cell_error():
    spec = LatticeSpec.equidistant(3, coupling0=0.1, d1=1.0, d2=1.0)
    with pytest.raises(DegenerateCellError):
        build_reduced_hamiltonian(spec)
