"""1D double-well dipole: grid eigensolver, shape calibration, matrix elements.

The dipole is a unit-mass charge in V(x) = -theta*x^2/2 + phi*x^4/4 solved on
a uniform grid with Dirichlet walls at +-L.  The kinetic term uses a
high-order central finite-difference stencil, assembled as a symmetric banded
matrix; eigenvalues come from the banded LAPACK driver and eigenvectors from
shift-inverted Lanczos with a fixed start vector (deterministic).

Units: hbar = 1, m = 1 by default.  `calibrate_potential` rescales (theta,
phi) so the lowest transition equals a requested mode frequency, which makes
resonance exact by construction and leaves only the dimensionless well shape
(fixed by the anharmonicity target) as physics input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eig_banded
from scipy.optimize import brentq

from .errors import BoundaryLeak, CalibrationFailed, NotConverged

# Central finite-difference coefficients c[k] for f''(x) ~ sum_k c[k]*(f_{i+k}+f_{i-k})/h^2
# (c[0] counted once).  Keys are the formal accuracy order.
_D2_STENCILS = {
    4: [-5 / 2, 4 / 3, -1 / 12],
    6: [-49 / 18, 3 / 2, -3 / 20, 1 / 90],
    8: [-205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560],
    10: [-5269 / 1800, 5 / 3, -5 / 21, 5 / 126, -5 / 1008, 1 / 3150],
}
# First derivative, antisymmetric halves: f'(x) ~ sum_k c[k]*(f_{i+k}-f_{i-k})/h
_D1_STENCILS = {
    4: [0.0, 2 / 3, -1 / 12],
    6: [0.0, 3 / 4, -3 / 20, 1 / 60],
    8: [0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280],
    10: [0.0, 5 / 6, -5 / 21, 5 / 84, -5 / 504, 1 / 1260],
}

DEFAULT_N_GRID = 2048
DEFAULT_N_MAT = 30
DEFAULT_STENCIL_ORDER = 10

BOUNDARY_AMPLITUDE_TOL = 1e-10
GRID_CONVERGENCE_TOL = 1e-9  # in units of omega0, against a doubled grid


@dataclass(frozen=True)
class MatterSpec:
    """Shape and discretization of the double-well dipole."""

    theta: float
    phi: float
    half_width: float
    n_grid: int = DEFAULT_N_GRID
    n_mat: int = DEFAULT_N_MAT
    mass: float = 1.0
    stencil_order: int = DEFAULT_STENCIL_ORDER

    def validate(self) -> None:
        if self.phi <= 0:
            raise ValueError("phi must be positive (potential bounded below)")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.n_mat < 2:
            raise ValueError("n_mat must be at least 2")
        if self.n_grid < 4 * self.n_mat:
            raise ValueError("n_grid must be at least 4*n_mat")
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.stencil_order not in _D2_STENCILS:
            raise ValueError(f"stencil_order must be one of {sorted(_D2_STENCILS)}")

    def potential(self, x: np.ndarray) -> np.ndarray:
        return -self.theta * x**2 / 2 + self.phi * x**4 / 4


@dataclass(frozen=True)
class MatterBasis:
    """Lowest eigenlevels of the dipole with position/momentum matrix elements.

    `x_mat` and `x2_mat` are real symmetric; `p_mat` is i times a real
    antisymmetric matrix (Hermitian).  Phases are fixed so every
    x_mat[k, k+1] >= 0, which makes the doublet dipole element real positive.
    """

    spec: MatterSpec
    energies: np.ndarray
    x_mat: np.ndarray
    x2_mat: np.ndarray
    p_mat: np.ndarray

    @property
    def n_mat(self) -> int:
        return len(self.energies)

    @property
    def omega0(self) -> float:
        return float(self.energies[1] - self.energies[0])

    @property
    def omega1(self) -> float:
        return float(self.energies[2] - self.energies[1])

    @property
    def anharmonicity(self) -> float:
        return (self.omega1 - self.omega0) / self.omega0

    @property
    def x10(self) -> float:
        return float(self.x_mat[0, 1])

    def to_json_dict(self) -> dict:
        """JSON dump: {"eps", "X", "P", "X2"}; complex P entries as [re, im]."""
        p_pairs = np.stack([self.p_mat.real, self.p_mat.imag], axis=-1)
        return {
            "eps": self.energies.tolist(),
            "X": self.x_mat.tolist(),
            "P": p_pairs.tolist(),
            "X2": self.x2_mat.tolist(),
        }


def _grid(half_width: float, n_grid: int):
    # Walls sit one spacing outside the outermost points; the point set is an
    # exact mirror image of itself so parity cancellations are exact in floats.
    h = 2 * half_width / (n_grid + 1)
    x = (np.arange(n_grid) - (n_grid - 1) / 2) * h
    return x, h


def _banded_hamiltonian(spec: MatterSpec, n_grid: int):
    x, h = _grid(spec.half_width, n_grid)
    coeff = _D2_STENCILS[spec.stencil_order]
    band = np.zeros((len(coeff), n_grid))
    band[0] = -coeff[0] / (2 * spec.mass * h * h) + spec.potential(x)
    for k in range(1, len(coeff)):
        band[k, :] = -coeff[k] / (2 * spec.mass * h * h)
    return x, h, band


def _eigvals_lowest(spec: MatterSpec, n_grid: int, k: int) -> np.ndarray:
    _, _, band = _banded_hamiltonian(spec, n_grid)
    return eig_banded(band, lower=True, eigvals_only=True, select="i",
                      select_range=(0, k - 1))


def _sparse_hamiltonian(band: np.ndarray, n: int):
    mat = sp.diags([band[0]], [0])
    for k in range(1, band.shape[0]):
        mat = mat + sp.diags([band[k][: n - k]], [-k]) + sp.diags([band[k][: n - k]], [k])
    return mat.tocsc()


def _eigpairs_lowest(spec: MatterSpec, n_grid: int, k: int):
    """Lowest-k eigenvectors by deterministic shift-inverted Lanczos.

    Energies are recomputed as Rayleigh quotients, whose error is quadratic
    in the residual; this removes the eps*||H|| eigenvalue noise floor that
    the 1/h^2 kinetic scale would otherwise impose.
    """
    x, h, band = _banded_hamiltonian(spec, n_grid)
    mat = _sparse_hamiltonian(band, n_grid)
    v0 = np.full(n_grid, 1.0 / math.sqrt(n_grid))  # fixed start keeps ARPACK deterministic
    vmin = float(spec.potential(x).min())
    vals, vecs = spla.eigsh(mat, k=k, sigma=vmin - 1.0, which="LM", v0=v0)
    order = np.argsort(vals)
    vecs = vecs[:, order]
    energies = np.einsum("ij,ij->j", vecs, mat @ vecs)
    return x, h, energies, vecs, mat


def solve_double_well(spec: MatterSpec, check_convergence: bool = True) -> MatterBasis:
    """Solve for the lowest `n_mat` levels and their x, x^2, p matrix elements.

    Enforces the boundary-leak contract (edge amplitude below 1e-10 for every
    retained level) and, when `check_convergence`, re-solves the eigenvalues
    on a doubled grid and demands agreement within 1e-9*omega0.
    """
    spec.validate()
    x, h, energies, vecs, mat = _eigpairs_lowest(spec, spec.n_grid, spec.n_mat)

    # The symmetric well gives eigenstates of definite parity; project each
    # vector onto its dominant parity component to strip eigensolver mixing
    # inside near-degenerate doublets, then refresh the Rayleigh quotients.
    flipped = vecs[::-1, :]
    even = (vecs + flipped) / 2
    odd = (vecs - flipped) / 2
    for k in range(spec.n_mat):
        vk = even[:, k] if even[:, k] @ even[:, k] >= odd[:, k] @ odd[:, k] else odd[:, k]
        vecs[:, k] = vk / math.sqrt(vk @ vk)
    energies = np.einsum("ij,ij->j", vecs, mat @ vecs)

    edge_amp = np.abs(vecs[[0, -1], :]).max() / math.sqrt(h)
    if edge_amp > BOUNDARY_AMPLITUDE_TOL:
        raise BoundaryLeak(
            f"edge amplitude {edge_amp:.3e} exceeds {BOUNDARY_AMPLITUDE_TOL:.0e}; "
            f"enlarge half_width (currently {spec.half_width})")

    # Sign convention: walk up the ladder making each <k|x|k+1> nonnegative.
    x_mat = vecs.T @ (x[:, None] * vecs)
    for k in range(spec.n_mat - 1):
        if x_mat[k, k + 1] < 0:
            vecs[:, k + 1] = -vecs[:, k + 1]
            x_mat[:, k + 1] = -x_mat[:, k + 1]
            x_mat[k + 1, :] = -x_mat[k + 1, :]

    x2_mat = vecs.T @ ((x**2)[:, None] * vecs)

    c1 = _D1_STENCILS[spec.stencil_order]
    dvecs = np.zeros_like(vecs)
    for k in range(1, len(c1)):
        dvecs[:-k] += c1[k] * vecs[k:]
        dvecs[k:] -= c1[k] * vecs[:-k]
    dvecs /= h
    deriv = vecs.T @ dvecs
    deriv = (deriv - deriv.T) / 2  # exact antisymmetry => p_mat exactly Hermitian
    p_mat = -1j * deriv

    if check_convergence:
        omega0 = energies[1] - energies[0]
        fine = _eigpairs_lowest(spec, 2 * spec.n_grid, spec.n_mat)[2]
        shift = np.abs(np.sort(fine) - energies).max()
        if shift > GRID_CONVERGENCE_TOL * abs(omega0):
            raise NotConverged(
                f"doubling n_grid shifts eigenvalues by {shift:.3e} "
                f"(> {GRID_CONVERGENCE_TOL:.0e}*omega0 = {GRID_CONVERGENCE_TOL * abs(omega0):.3e})")

    return MatterBasis(spec=spec, energies=energies, x_mat=x_mat,
                       x2_mat=x2_mat, p_mat=p_mat)


def _outer_turning_point(theta: float, phi: float, energy: float) -> float:
    """Largest root of V(x) = energy (clamped to the well scale from below)."""
    disc = theta * theta + 4 * phi * energy
    if disc <= 0:
        return math.sqrt(max(theta, 0.0) / phi)  # at/below the well bottom
    if theta >= 0:
        x2 = (theta + math.sqrt(disc)) / phi
    else:
        # stable form for the single-well branch (theta < 0, energy > 0)
        x2 = 4 * energy / (math.sqrt(disc) - theta)
    return math.sqrt(x2)


def auto_spec(theta: float, phi: float, n_mat: int = DEFAULT_N_MAT,
              n_grid: int = DEFAULT_N_GRID, mass: float = 1.0,
              stencil_order: int = DEFAULT_STENCIL_ORDER,
              margin: float = 1.5) -> MatterSpec:
    """Pick the box half-width as `margin` x the top retained level's turning point.

    Solves once with a curvature-based estimate of the top energy, then
    rebuilds the spec from the actual spectrum (a single iteration settles
    it).  The default margin holds the boundary-leak contract for deep
    quartic wells; softer wells need a wider box (see calibrate_potential).
    """
    if theta > 0:
        well_freq = math.sqrt(2 * theta / mass)
        barrier = theta * theta / (4 * phi)
    else:
        well_freq = math.sqrt(-theta / mass)
        barrier = 0.0
    top_guess = -barrier + well_freq * (n_mat + 1)
    half = margin * _outer_turning_point(theta, phi, max(top_guess, well_freq))
    probe = MatterSpec(theta=theta, phi=phi, half_width=half, n_grid=n_grid,
                       n_mat=n_mat, mass=mass, stencil_order=stencil_order)
    top = float(_eigvals_lowest(probe, n_grid, n_mat)[-1])
    half = margin * _outer_turning_point(theta, phi, top)
    return MatterSpec(theta=theta, phi=phi, half_width=half, n_grid=n_grid,
                      n_mat=n_mat, mass=mass, stencil_order=stencil_order)


def _shape_anharmonicity(phi: float, n_grid: int) -> float:
    """Anharmonicity of the theta=1 well at quartic weight `phi`.

    The box covers several levels beyond the lowest three: the tunneling
    splitting is exponentially small, so wall compression that shifts the
    doublet differentially by even 1e-8 would pollute the ratio.
    """
    spec = auto_spec(1.0, phi, n_mat=10, n_grid=n_grid)
    e = _eigvals_lowest(spec, n_grid, 3)
    w0 = e[1] - e[0]
    w1 = e[2] - e[1]
    return (w1 - w0) / w0


@lru_cache(maxsize=8)
def calibrate_potential(target_mu: float, mode_frequency: float = 1.0,
                        n_mat: int = DEFAULT_N_MAT, n_grid: int = DEFAULT_N_GRID) -> MatterSpec:
    """Find (theta, phi) with anharmonicity `target_mu` and omega0 = `mode_frequency`.

    One dimensionless shape parameter remains after fixing the energy scale:
    at theta = 1 the quartic weight phi sets the barrier height, and the
    anharmonicity grows monotonically as the barrier rises (phi shrinks).
    A bracketed root find in log(phi) pins the shape; the exact scaling law
    eps_k(theta*s^4, phi*s^6) = s^2 * eps_k(theta, phi) then rescales the
    lowest transition onto the requested mode frequency, so resonance holds
    by construction.
    """
    if not target_mu > 0:
        raise ValueError("target_mu must be positive")
    if not mode_frequency > 0:
        raise ValueError("mode_frequency must be positive")

    # Bracket the shape root on a log grid; splittings below ~1e-8 of the
    # well frequency sink into eigensolver noise, which bounds usable mu.
    lo, hi = None, None
    grid_pts = np.linspace(math.log10(0.02), math.log10(20.0), 25)
    prev_lg, prev_val = None, None
    for lg in grid_pts[::-1]:  # descend from shallow wells (small mu) to deep
        val = _shape_anharmonicity(10.0**lg, n_grid) - target_mu
        if prev_val is not None and val * prev_val < 0:
            lo, hi = lg, prev_lg
            break
        prev_lg, prev_val = lg, val
    if lo is None:
        raise CalibrationFailed(
            f"no bracket for target_mu={target_mu}; reachable range exhausted")
    try:
        lg_star = brentq(lambda lg: _shape_anharmonicity(10.0**lg, n_grid) - target_mu,
                         lo, hi, xtol=1e-13, maxiter=120)
    except RuntimeError as exc:
        raise CalibrationFailed(str(exc)) from None
    phi_shape = 10.0**lg_star

    shape_spec = auto_spec(1.0, phi_shape, n_mat=24, n_grid=n_grid)
    e = _eigpairs_lowest(shape_spec, n_grid, 2)[2]
    scale = mode_frequency / abs(e[1] - e[0])  # s^2 in the scaling law
    theta = float(scale**2)
    phi = float(phi_shape * scale**3)

    # widen the box until the leak contract holds; soft wells need more than
    # the deep-quartic default margin
    margin = 1.5
    while True:
        spec = auto_spec(theta, phi, n_mat=n_mat, n_grid=n_grid, margin=margin)
        try:
            solve_double_well(spec, check_convergence=False)
            break
        except BoundaryLeak:
            margin *= 1.3
            if margin > 5.0:
                raise CalibrationFailed(
                    "box sizing failed: boundary leak persists at 5x the "
                    "turning point") from None
    e = _eigvals_lowest(spec, n_grid, 3)
    mu = (e[2] - 2 * e[1] + e[0]) / (e[1] - e[0])
    if abs(mu - target_mu) / target_mu >= 1e-3:
        raise CalibrationFailed(
            f"calibrated anharmonicity {mu:.6f} misses target {target_mu} by "
            f"{abs(mu - target_mu) / target_mu:.2e} relative")
    return spec
