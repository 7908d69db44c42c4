import numpy as np
import pytest

from gaugelab.errors import BoundaryLeak, NotConverged
from gaugelab.matter1d import (MatterSpec, auto_spec, calibrate_potential,
                               solve_double_well, _eigvals_lowest)


def test_harmonic_limit():
    # theta = -m*w^2 with w = 1 and a vanishing quartic term
    spec = MatterSpec(theta=-1.0, phi=1e-12, half_width=14.0, n_grid=2048, n_mat=8)
    basis = solve_double_well(spec)
    expected = np.arange(8) + 0.5
    np.testing.assert_allclose(basis.energies, expected, atol=1e-7)
    assert abs(basis.x10 - 1 / np.sqrt(2)) < 1e-8


def test_harmonic_limit_scaled_mass_frequency():
    m, w = 2.0, 1.5
    spec = MatterSpec(theta=-m * w**2, phi=1e-12, half_width=10.0, n_grid=2048,
                      n_mat=6, mass=m)
    basis = solve_double_well(spec)
    np.testing.assert_allclose(basis.energies, (np.arange(6) + 0.5) * w, atol=1e-7)
    assert abs(basis.x10 - 1 / np.sqrt(2 * m * w)) < 1e-8


def test_parity_selection_rules(basis):
    n = basis.n_mat
    even = np.arange(n) % 2 == 0
    same_parity = np.equal.outer(even, even)
    assert np.abs(basis.x_mat[same_parity]).max() < 1e-12
    assert np.abs(basis.x2_mat[~same_parity]).max() < 1e-12
    assert np.abs(basis.p_mat[same_parity]).max() < 1e-12


def test_hermiticity(basis):
    assert np.abs(basis.x_mat - basis.x_mat.T).max() < 1e-12
    assert np.abs(basis.x2_mat - basis.x2_mat.T).max() < 1e-12
    assert np.abs(basis.p_mat - basis.p_mat.conj().T).max() < 1e-12
    # p is i times a real antisymmetric matrix
    assert np.abs(basis.p_mat.real).max() < 1e-14


def test_phase_convention(basis):
    ladder = np.diag(basis.x_mat, 1)
    assert (ladder >= 0).all()
    assert basis.x10 > 0


def test_energies_strictly_increasing(basis):
    assert (np.diff(basis.energies) > 0).all()


def test_canonical_commutator_lower_half(basis):
    comm = basis.x_mat @ basis.p_mat - basis.p_mat @ basis.x_mat
    half = basis.n_mat // 2
    diag = comm.diagonal()[:half]
    np.testing.assert_allclose(diag.imag, 1.0, rtol=0.05)
    assert np.abs(diag.real).max() < 0.05


def test_oscillator_strength_sum(basis):
    # sum_nu (eps_nu - eps_0) |X_0nu|^2 = 1/(2m) once enough levels are kept
    total = ((basis.energies - basis.energies[0]) * basis.x_mat[0, :] ** 2).sum()
    assert abs(total - 0.5) < 0.005


def test_boundary_leak_raises():
    spec = MatterSpec(theta=-1.0, phi=1e-12, half_width=4.0, n_grid=1024, n_mat=8)
    with pytest.raises(BoundaryLeak):
        solve_double_well(spec)


def test_not_converged_raises():
    spec = MatterSpec(theta=-1.0, phi=1e-12, half_width=14.0, n_grid=64, n_mat=8)
    with pytest.raises(NotConverged):
        solve_double_well(spec)


def test_spec_invariants():
    with pytest.raises(ValueError):
        MatterSpec(1.0, -0.1, 1.0).validate()
    with pytest.raises(ValueError):
        MatterSpec(1.0, 0.1, -1.0).validate()
    with pytest.raises(ValueError):
        MatterSpec(1.0, 0.1, 1.0, n_mat=1).validate()
    with pytest.raises(ValueError):
        MatterSpec(1.0, 0.1, 1.0, n_grid=32, n_mat=30).validate()


def test_calibration_rejects_nonpositive_target():
    with pytest.raises(ValueError):
        calibrate_potential(0.0)
    with pytest.raises(ValueError):
        calibrate_potential(-3.0)


def test_calibrated_anharmonicity(basis):
    # quantitative anchor: anharmonicity ~ 70 at resonance
    assert abs(basis.anharmonicity - 70.0) / 70.0 < 1e-3
    assert abs(basis.omega0 - 1.0) < 1e-8


@pytest.mark.parametrize("target", [5.0, 25.0])
def test_calibration_other_targets(target):
    spec = calibrate_potential(target, 1.0, n_mat=8)
    basis = solve_double_well(spec)
    assert abs(basis.anharmonicity - target) / target < 1e-3
    assert abs(basis.omega0 - 1.0) < 1e-8


def test_calibration_bisection_oracle(calibrated_spec):
    # independent oracle: plain bisection over the quartic weight at theta = 1,
    # re-solving the well at every step
    def mu_of(phi):
        spec = auto_spec(1.0, phi, n_mat=10, n_grid=2048)
        e = _eigvals_lowest(spec, spec.n_grid, 3)
        return (e[2] - 2 * e[1] + e[0]) / (e[1] - e[0])

    lo, hi = 0.1, 0.3  # mu decreases with phi on this bracket
    for _ in range(45):
        mid = 0.5 * (lo + hi)
        if mu_of(mid) > 70.0:
            lo = mid
        else:
            hi = mid
    phi_oracle = 0.5 * (lo + hi)
    assert abs(mu_of(phi_oracle) - 70.0) / 70.0 < 1e-3
    # compare through the scale-invariant shape combination phi^2 / theta^3
    shape_pkg = calibrated_spec.phi**2 / calibrated_spec.theta**3
    shape_oracle = phi_oracle**2 / 1.0
    assert abs(shape_pkg - shape_oracle) / shape_oracle < 1e-3


def test_grid_refinement_oracle(basis, calibrated_spec):
    # reference solve at 4x resolution and 1.5x box
    spec = calibrated_spec
    fine = MatterSpec(spec.theta, spec.phi, 1.5 * spec.half_width,
                      n_grid=4 * spec.n_grid, n_mat=spec.n_mat)
    ref = solve_double_well(fine, check_convergence=False)
    rel = np.abs(basis.energies - ref.energies) / np.maximum(1.0, np.abs(ref.energies))
    assert rel.max() < 1e-8


def test_calibration_doubled_grid_stability(calibrated_spec):
    spec = calibrated_spec
    doubled = MatterSpec(spec.theta, spec.phi, spec.half_width,
                         n_grid=2 * spec.n_grid, n_mat=spec.n_mat)
    b2 = solve_double_well(doubled, check_convergence=False)
    assert abs(b2.anharmonicity - 70.0) < 1e-4


def test_determinism(calibrated_spec):
    a = solve_double_well(calibrated_spec)
    b = solve_double_well(calibrated_spec)
    assert np.array_equal(a.energies, b.energies)
    assert np.array_equal(a.x_mat, b.x_mat)
    assert np.array_equal(a.p_mat, b.p_mat)


def test_json_dump_schema(basis):
    payload = basis.to_json_dict()
    assert set(payload) == {"eps", "X", "P", "X2"}
    assert len(payload["eps"]) == basis.n_mat
    assert len(payload["X"]) == basis.n_mat
    # complex momentum entries are [re, im] pairs
    assert len(payload["P"][0][1]) == 2
