"""Gauge-parametrized Hamiltonians, gauge-fixing unitaries, truncated models.

The gauge family is indexed by one real parameter alpha (0 = Coulomb,
1 = dipole).  On the composite space the exact Hamiltonian reads

    H_alpha = (p - q(1-alpha)A)^2/2m + V(x)
              + (v/2)[(Pi + q*alpha*x/v)^2 + omega^2 A^2]

assembled from the solved matter matrices: p^2/2m + V(x) enters as the
diagonal of solved energies, x^2 as its true matrix elements, and the cross
terms as Kronecker products.  The charge q carries the Pi-shift so that
conjugation by R = exp[i q (alpha-alpha') x A] maps alpha-representations
exactly onto alpha'-representations (verified numerically by the
cross-construction tests).

Truncated models on the P-block (lowest m_levels matter states):

  * standard:  free parts projected, every x (x^2, p) inside the interaction
    replaced by PxP ((PxP)^2, PpP); at alpha = 1, m_levels = 2 this is the
    quantum Rabi model.
  * projected: P H_alpha P restricted to the block.
  * rotated:   T H_standard T^dag with the truncated rotation
    T = exp[i q (alpha-alpha') PxP A].

All unitaries are built by eigendecomposition of the Hermitian generator;
the generator factorizes as (matter block) x (mode amplitude), so its
eigensystem is the Kronecker product of two small ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClosedFormNeedsTwoLevels, DimensionMismatch, UnsupportedKind
from .fockspace import CompositeOperator, CompositeSpace, fock_operators, restrict
from .matter1d import MatterBasis

MODEL_KINDS = ("exact", "standard", "projected", "rotated")


@dataclass(frozen=True)
class ModelSpec:
    """A named model: its kind, gauge parameter(s), and built Hamiltonian."""

    kind: str
    alpha: float
    operator: CompositeOperator
    space: CompositeSpace
    on_subspace: bool
    alpha_target: float | None = None

    @property
    def matrix(self) -> np.ndarray:
        return self.operator.matrix

    @property
    def dim(self) -> int:
        return self.operator.dim

    @property
    def label(self) -> str:
        if self.kind == "rotated":
            return f"rotated(a={self.alpha:g}->{self.alpha_target:g})"
        return f"{self.kind}(a={self.alpha:g})"


def hamiltonian_blocks(alpha: float, basis: MatterBasis, space: CompositeSpace,
                       m_levels: int | None = None):
    """Coupling-independent pieces: H(eta) = H_free + q*K1 + q^2*K2.

    `m_levels` = None builds on the full matter dimension; an integer builds
    the same structure on that many matter levels (used by the projected
    model, whose P-block of every Kronecker term is the matter-block slice).
    """
    nm = space.n_mat if m_levels is None else m_levels
    _check_space(basis, space)
    ops = fock_operators(space.mode())
    eye_m = np.eye(nm)
    eye_ph = np.eye(space.n_ph)
    mass = basis.spec.mass
    h_free = (np.kron(np.diag(basis.energies[:nm]), eye_ph)
              + np.kron(eye_m, ops.h_ph)).astype(complex)
    k1 = (-(1 - alpha) / mass) * np.kron(basis.p_mat[:nm, :nm], ops.amplitude) \
        + alpha * np.kron(basis.x_mat[:nm, :nm], ops.momentum)
    k2 = ((1 - alpha) ** 2 / (2 * mass)) * np.kron(eye_m, ops.amplitude @ ops.amplitude) \
        + (alpha**2 / (2 * space.volume)) * np.kron(basis.x2_mat[:nm, :nm], eye_ph)
    return h_free, k1.astype(complex), k2.astype(complex)


def build_h_alpha(alpha: float, basis: MatterBasis, space: CompositeSpace,
                  blocks=None) -> CompositeOperator:
    """Exact alpha-gauge Hamiltonian on the full composite space."""
    if blocks is None:
        blocks = hamiltonian_blocks(alpha, basis, space)
    h_free, k1, k2 = blocks
    q = space.charge
    h = h_free + q * k1 + (q * q) * k2
    return CompositeOperator(h, space.n_mat, space.n_ph, hermitian=True,
                             _skip_check=True)


def _check_space(basis: MatterBasis, space: CompositeSpace) -> None:
    if space.n_mat > basis.n_mat:
        raise DimensionMismatch(
            f"space wants {space.n_mat} matter levels, basis has {basis.n_mat}")


def _generator_factors(x_block: np.ndarray, space: CompositeSpace):
    """Eigendecomposition of x_block (x) amplitude, factor by factor."""
    ops = fock_operators(space.mode())
    lam_x, u_x = np.linalg.eigh(x_block)
    lam_a, u_a = np.linalg.eigh(ops.amplitude)
    return lam_x, u_x, lam_a, u_a


def _phase_vector(coeff: float, lam_x: np.ndarray, lam_a: np.ndarray) -> np.ndarray:
    return np.exp(1j * coeff * np.outer(lam_x, lam_a).ravel())


def _assemble_unitary(coeff, lam_x, u_x, lam_a, u_a) -> np.ndarray:
    u = np.kron(u_x, u_a)
    return (u * _phase_vector(coeff, lam_x, lam_a)) @ u.conj().T


def gauge_unitary(alpha: float, alpha_prime: float, basis: MatterBasis,
                  space: CompositeSpace) -> CompositeOperator:
    """Gauge-fixing unitary R = exp[i q (alpha - alpha') x A] on the full space.

    Maps alpha-gauge representations to alpha'-gauge ones:
    O_{alpha'} = R O_alpha R^dag.
    """
    _check_space(basis, space)
    nm = space.n_mat
    coeff = space.charge * (alpha - alpha_prime)
    r = _assemble_unitary(coeff, *_generator_factors(basis.x_mat[:nm, :nm], space))
    return CompositeOperator(r, nm, space.n_ph)


def truncated_unitary(alpha: float, alpha_prime: float, basis: MatterBasis,
                      space: CompositeSpace) -> CompositeOperator:
    """Truncated rotation T = exp[i q (alpha - alpha') PxP A] on the P-block."""
    m = space.m_levels
    coeff = space.charge * (alpha - alpha_prime)
    t = _assemble_unitary(coeff, *_generator_factors(basis.x_mat[:m, :m], space))
    return CompositeOperator(t, m, space.n_ph)


def conjugate_by_gauge_unitary(matrix: np.ndarray, alpha: float, alpha_prime: float,
                               basis: MatterBasis, space: CompositeSpace,
                               truncated: bool = False) -> np.ndarray:
    """R O R^dag (or T O T^dag) without forming the dense unitary.

    Works factor by factor on the (matter, photon, matter, photon) tensor,
    which keeps the cost at a few thin matrix products instead of two dense
    dim^3 multiplies.
    """
    nm = space.m_levels if truncated else space.n_mat
    if matrix.shape != (nm * space.n_ph, nm * space.n_ph):
        raise DimensionMismatch(
            f"matrix shape {matrix.shape} incompatible with {(nm * space.n_ph,) * 2}")
    lam_x, u_x, lam_a, u_a = _generator_factors(basis.x_mat[:nm, :nm], space)
    coeff = space.charge * (alpha - alpha_prime)
    np_ = space.n_ph
    t4 = matrix.reshape(nm, np_, nm, np_)
    # W = (u_x (x) u_a)^dag O (u_x (x) u_a)
    w = np.einsum("ia,jb,ijkl,kc,ld->abcd", u_x.conj(), u_a.conj(), t4, u_x, u_a,
                  optimize=True)
    w = w.reshape(nm * np_, nm * np_)
    ph = _phase_vector(coeff, lam_x, lam_a)
    w = (ph[:, None] * w) * ph.conj()[None, :]
    w4 = w.reshape(nm, np_, nm, np_)
    out = np.einsum("ia,jb,abcd,kc,ld->ijkl", u_x, u_a, w4, u_x.conj(), u_a.conj(),
                    optimize=True)
    return out.reshape(nm * np_, nm * np_)


def _build_standard(alpha: float, basis: MatterBasis, space: CompositeSpace) -> np.ndarray:
    """Standard truncating map: project free parts, substitute PxP, PpP, (PxP)^2."""
    m = space.m_levels
    ops = fock_operators(space.mode())
    eye_m = np.eye(m)
    eye_ph = np.eye(space.n_ph)
    mass = basis.spec.mass
    q = space.charge
    x_t = basis.x_mat[:m, :m]
    p_t = basis.p_mat[:m, :m]
    h = (np.kron(np.diag(basis.energies[:m]), eye_ph)
         + np.kron(eye_m, ops.h_ph)).astype(complex)
    h += (-q * (1 - alpha) / mass) * np.kron(p_t, ops.amplitude)
    h += (q**2 * (1 - alpha) ** 2 / (2 * mass)) * np.kron(eye_m, ops.amplitude @ ops.amplitude)
    h += (q * alpha) * np.kron(x_t, ops.momentum)
    h += (q**2 * alpha**2 / (2 * space.volume)) * np.kron(x_t @ x_t, eye_ph)
    return h


def build_model(kind: str, basis: MatterBasis, space: CompositeSpace,
                alpha: float, alpha_target: float | None = None) -> ModelSpec:
    """Construct one of the catalogued models; see module docstring."""
    _check_space(basis, space)
    if kind == "exact":
        op = build_h_alpha(alpha, basis, space)
        return ModelSpec(kind, alpha, op, space, on_subspace=False)
    if kind == "standard":
        h = _build_standard(alpha, basis, space)
        op = CompositeOperator(h, space.m_levels, space.n_ph, hermitian=True,
                               _skip_check=True)
        return ModelSpec(kind, alpha, op, space, on_subspace=True)
    if kind == "projected":
        # The P-block of every Kronecker term is its matter-block slice, so
        # assemble directly on m_levels; identical to slicing the full build.
        blocks = hamiltonian_blocks(alpha, basis, space, m_levels=space.m_levels)
        q = space.charge
        h = blocks[0] + q * blocks[1] + q * q * blocks[2]
        op = CompositeOperator(h, space.m_levels, space.n_ph, hermitian=True,
                               _skip_check=True)
        return ModelSpec(kind, alpha, op, space, on_subspace=True)
    if kind == "rotated":
        if alpha_target is None:
            raise UnsupportedKind("rotated kind needs alpha_target")
        h_std = _build_standard(alpha, basis, space)
        h = conjugate_by_gauge_unitary(h_std, alpha, alpha_target, basis, space,
                                       truncated=True)
        op = CompositeOperator(h, space.m_levels, space.n_ph, hermitian=True,
                               _skip_check=True)
        return ModelSpec(kind, alpha, op, space, on_subspace=True,
                         alpha_target=alpha_target)
    raise UnsupportedKind(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


DELTA_FORMS = ("closed", "rotation_difference", "hamiltonian_difference")


def delta_operator(basis: MatterBasis, space: CompositeSpace,
                   form: str = "closed") -> CompositeOperator:
    """Photon-number discrepancy operator on the two-level block.

    Orientation: the closed form is eta^2 (Px^2P/(PxP)^2 - I) (x) I_ph with
    (PxP)^-2 read as the scalar x10^-2, which equals
    (projected(1) - standard(1))/omega.  The rotation-difference route is
    built with the matching orientation,
    P R_01 n R_01^dag P - T_01 n T_01^dag; its matrix elements near the Fock
    cutoff are boundary artifacts, so comparisons belong on low-photon blocks.
    """
    if form not in DELTA_FORMS:
        raise UnsupportedKind(f"unknown delta form {form!r}")
    if space.m_levels != 2:
        raise ClosedFormNeedsTwoLevels(
            f"delta operator defined for two retained levels, got {space.m_levels}")
    if form == "closed":
        x2_t = basis.x2_mat[:2, :2]
        mat = space.eta**2 * np.kron(x2_t / space.x10**2 - np.eye(2),
                                     np.eye(space.n_ph))
        return CompositeOperator(mat.astype(complex), 2, space.n_ph,
                                 hermitian=True, _skip_check=True)
    if form == "hamiltonian_difference":
        proj = build_model("projected", basis, space, 1.0)
        std = build_model("standard", basis, space, 1.0)
        mat = (proj.matrix - std.matrix) / space.omega
        return CompositeOperator(mat, 2, space.n_ph, hermitian=True,
                                 _skip_check=True)
    ops = fock_operators(space.mode())
    number = ops.a_dag @ ops.a
    n_full = np.kron(np.eye(space.n_mat), number).astype(complex)
    n_dipole = conjugate_by_gauge_unitary(n_full, 0.0, 1.0, basis, space)
    n_sub = np.kron(np.eye(2), number).astype(complex)
    n_rot = conjugate_by_gauge_unitary(n_sub, 0.0, 1.0, basis, space, truncated=True)
    mat = restrict(n_dipole, space) - n_rot
    return CompositeOperator(mat, 2, space.n_ph, hermitian=True, _skip_check=True)
