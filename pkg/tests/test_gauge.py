import numpy as np
import pytest

from gaugelab.errors import ClosedFormNeedsTwoLevels, UnsupportedKind
from gaugelab.fockspace import fock_operators, restrict
from gaugelab.gauge import (build_h_alpha, build_model, conjugate_by_gauge_unitary,
                            delta_operator, gauge_unitary, truncated_unitary)


def free_spectrum(basis, n_ph, omega, count):
    levels = np.add.outer(basis.energies, omega * (np.arange(n_ph) + 0.5)).ravel()
    return np.sort(levels)[:count]


def block_indices(n_keep_mat, n_keep_ph, n_ph):
    return [mu * n_ph + n for mu in range(n_keep_mat) for n in range(n_keep_ph)]


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_decoupled_limit(basis, make_space, alpha):
    space = make_space(0.0)
    h = build_h_alpha(alpha, basis, space)
    vals = np.linalg.eigvalsh(h.matrix)[:40]
    np.testing.assert_allclose(vals, free_spectrum(basis, space.n_ph, space.omega, 40),
                               atol=1e-10)


def test_gauge_invariance_of_exact_spectra(basis, make_space):
    # lowest six eigenvalues agree between the Coulomb and dipole forms once
    # cutoffs are converged; re-diagonalizing at enlarged cutoffs is the oracle
    from gaugelab.analysis import eigensolve
    from gaugelab.matter1d import auto_spec, solve_double_well

    vals = {}
    spec = basis.spec
    big_spec = auto_spec(spec.theta, spec.phi, n_mat=40, n_grid=spec.n_grid)
    big_basis = solve_double_well(big_spec)
    for tag, (b, n_mat, n_ph) in {
            "base": (basis, 30, 40), "big": (big_basis, 40, 60)}.items():
        space = make_space(0.5, n_ph=n_ph, n_mat=n_mat)
        e0 = eigensolve(build_h_alpha(0.0, b, space), k=6).energies
        e1 = eigensolve(build_h_alpha(1.0, b, space), k=6).energies
        vals[tag] = (e0, e1)
    for tag in vals:
        e0, e1 = vals[tag]
        assert np.abs((e0 - e1) / e0).max() < 1e-6
    # an intermediate gauge sits on the same spectrum
    e_half = eigensolve(build_h_alpha(0.5, basis, make_space(0.5)), k=6).energies
    assert np.abs((e_half - vals["base"][0]) / e_half).max() < 1e-6
    # cutoff escalation leaves the converged values in place
    assert np.abs((vals["base"][0] - vals["big"][0]) / vals["big"][0]).max() < 1e-6


def test_dipole_gauge_term_by_term(basis, make_space):
    space = make_space(0.7)
    h = build_h_alpha(1.0, basis, space).matrix
    ops = fock_operators(space.mode())
    q = space.charge
    nm, nph = space.n_mat, space.n_ph
    explicit = (np.kron(np.diag(basis.energies), np.eye(nph)).astype(complex)
                + np.kron(np.eye(nm), ops.h_ph)
                + q * np.kron(basis.x_mat, ops.momentum)
                + (q**2 / (2 * space.volume)) * np.kron(basis.x2_mat, np.eye(nph)))
    assert np.abs(h - explicit).max() < 1e-10


def test_gauge_unitary_identity_and_inverse(basis, make_space):
    space = make_space(0.4, n_ph=24, n_mat=10)
    eye = np.eye(space.dim)
    r_same = gauge_unitary(0.7, 0.7, basis, space)
    assert np.abs(r_same.matrix - eye).max() < 1e-12
    r01 = gauge_unitary(0.0, 1.0, basis, space).matrix
    r10 = gauge_unitary(1.0, 0.0, basis, space).matrix
    assert np.abs(r01 @ r10 - eye).max() < 1e-10
    assert np.abs(r01 @ r01.conj().T - eye).max() < 1e-9


def test_cross_construction_maps_gauges(basis, make_space):
    # conjugating the Coulomb Hamiltonian into the dipole gauge must reproduce
    # the independently assembled dipole Hamiltonian on cutoff-stable blocks,
    # with the deviation shrinking as the matter cutoff grows
    devs = {}
    for n_mat in (20, 30):
        space = make_space(0.5, n_mat=n_mat)
        h0 = build_h_alpha(0.0, basis, space).matrix
        h1 = build_h_alpha(1.0, basis, space).matrix
        rotated = conjugate_by_gauge_unitary(h0, 0.0, 1.0, basis, space)
        sel = block_indices(8, 10, space.n_ph)
        devs[n_mat] = np.abs((rotated - h1)[np.ix_(sel, sel)]).max()
    assert devs[30] < 1e-7
    assert devs[30] < devs[20] / 100


def test_truncated_unitary_contracts(basis, make_space):
    space = make_space(0.5)
    eye = np.eye(space.sub_dim)
    t_same = truncated_unitary(0.3, 0.3, basis, space)
    assert np.abs(t_same.matrix - eye).max() < 1e-12
    t10 = truncated_unitary(1.0, 0.0, basis, space).matrix
    assert np.abs(t10 @ t10.conj().T - eye).max() < 1e-12
    # the truncated rotation is NOT the projected full rotation
    r10_block = restrict(gauge_unitary(1.0, 0.0, basis, space).matrix, space)
    assert np.abs(t10 - r10_block).max() > 0.01


def test_standard_dipole_is_quantum_rabi(basis, make_space):
    space = make_space(0.3)
    model = build_model("standard", basis, space, 1.0)
    ops = fock_operators(space.mode())
    nph = space.n_ph
    sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]])
    eta, omega = space.eta, space.omega
    qrm = (np.kron(np.diag(basis.energies[:2]), np.eye(nph)).astype(complex)
           + np.kron(np.eye(2), ops.h_ph)
           + eta * omega * np.kron(sigma_x, 1j * (ops.a_dag - ops.a))
           + eta**2 * omega * np.eye(2 * nph))
    assert np.abs(model.matrix - qrm).max() < 1e-12


def test_standard_equals_projected_only_in_coulomb(basis, make_space):
    space = make_space(0.6)
    std0 = build_model("standard", basis, space, 0.0)
    proj0 = build_model("projected", basis, space, 0.0)
    assert np.abs(std0.matrix - proj0.matrix).max() < 1e-12
    std1 = build_model("standard", basis, space, 1.0)
    proj1 = build_model("projected", basis, space, 1.0)
    assert np.abs(std1.matrix - proj1.matrix).max() > 1e-3


def test_projected_matches_sliced_full_build(basis, make_space):
    space = make_space(0.6)
    proj = build_model("projected", basis, space, 1.0)
    full = build_h_alpha(1.0, basis, space).matrix
    np.testing.assert_allclose(proj.matrix, restrict(full, space), atol=1e-14)


def test_rotated_class_shares_spectrum(basis, make_space):
    space = make_space(0.5)
    std = build_model("standard", basis, space, 1.0)
    base = np.linalg.eigvalsh(std.matrix)
    for target in (0.0, 0.5, -0.3):
        rot = build_model("rotated", basis, space, 1.0, alpha_target=target)
        vals = np.linalg.eigvalsh(rot.matrix)
        assert np.abs(vals - base).max() < 1e-10


def test_all_models_hermitian(basis, make_space):
    space = make_space(0.8)
    mats = [build_h_alpha(0.5, basis, space).matrix,
            build_model("standard", basis, space, 1.0).matrix,
            build_model("projected", basis, space, 1.0).matrix,
            build_model("rotated", basis, space, 1.0, alpha_target=0.0).matrix]
    for m in mats:
        assert np.abs(m - m.conj().T).max() < 1e-10


def test_three_level_truncation_models(basis, make_space):
    # the truncation machinery is generic in the retained level count
    space = make_space(0.5, m_levels=3)
    std = build_model("standard", basis, space, 1.0)
    proj = build_model("projected", basis, space, 1.0)
    rot = build_model("rotated", basis, space, 1.0, alpha_target=0.0)
    assert std.dim == proj.dim == rot.dim == 3 * space.n_ph
    for model in (std, proj, rot):
        assert np.abs(model.matrix - model.matrix.conj().T).max() < 1e-10
    np.testing.assert_allclose(np.linalg.eigvalsh(rot.matrix),
                               np.linalg.eigvalsh(std.matrix), atol=1e-10)
    # the wider projector tightens the ground state toward the exact one
    from gaugelab.analysis import cs_bound, eigensolve
    es = eigensolve(build_h_alpha(1.0, basis, make_space(1.0)), k=1)
    b2 = cs_bound(es.state(0), make_space(1.0))
    b3 = cs_bound(es.state(0), make_space(1.0, m_levels=3))
    assert b3 >= b2


def test_unsupported_kind(basis, make_space):
    space = make_space(0.5)
    with pytest.raises(UnsupportedKind):
        build_model("bogus", basis, space, 1.0)
    with pytest.raises(UnsupportedKind):
        build_model("rotated", basis, space, 1.0)  # missing alpha_target
    with pytest.raises(UnsupportedKind):
        delta_operator(basis, space, form="bogus")


def test_delta_needs_two_levels(basis, make_space):
    space = make_space(0.5, m_levels=3)
    with pytest.raises(ClosedFormNeedsTwoLevels):
        delta_operator(basis, space, "closed")


def test_delta_vanishes_without_coupling(basis, make_space):
    space = make_space(0.0)
    for form in ("closed", "hamiltonian_difference", "rotation_difference"):
        mat = delta_operator(basis, space, form).matrix
        assert np.abs(mat).max() < 1e-12


def test_delta_closed_vs_hamiltonian_difference(basis, make_space):
    space = make_space(0.5)
    closed = delta_operator(basis, space, "closed").matrix
    ham = delta_operator(basis, space, "hamiltonian_difference").matrix
    assert np.abs(closed - ham).max() < 1e-10


def test_delta_closed_vs_rotation_difference(basis, make_space):
    # the rotation route runs through the full-space unitary, so compare on
    # low-photon blocks and demand stability under cutoff escalation
    devs = {}
    for n_ph in (40, 60):
        space = make_space(0.5, n_ph=n_ph)
        closed = delta_operator(basis, space, "closed").matrix
        rot = delta_operator(basis, space, "rotation_difference").matrix
        sel = block_indices(2, 13, n_ph)
        devs[n_ph] = np.abs((closed - rot)[np.ix_(sel, sel)]).max()
    assert devs[40] < 1e-6
    assert devs[60] < 1e-6


def test_delta_diagonal_structure(basis, make_space):
    # parity makes the two-level x^2 block diagonal, so the closed form is
    # diagonal (x) identity
    space = make_space(0.9)
    mat = delta_operator(basis, space, "closed").matrix
    off = mat - np.diag(np.diag(mat))
    assert np.abs(off).max() < 1e-14
    assert mat[0, 0] > 0 and mat[space.n_ph, space.n_ph] > 0
