"""Complex dense linear algebra, state types, sampling, and distances.

Pure states are stored as raw unit vectors (no global-phase
canonicalization; every observable used downstream is phase-invariant).
All eigenvalue work goes through Hermitian-specialized routines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

__all__ = [
    "NORM_TOL",
    "HERM_TOL",
    "PSD_TOL",
    "PureState",
    "DensityMatrix",
    "is_hermitian",
    "is_unitary",
    "is_psd",
    "sample_haar_state",
    "sample_haar_unitary",
    "overlap2",
    "trace_inner",
    "trace_distance",
    "dmax",
    "sample_beta",
]

NORM_TOL = 1e-12
HERM_TOL = 1e-10
PSD_TOL = 1e-9


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T)) <= tol


def is_unitary(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    if m.shape[0] != m.shape[1]:
        return False
    eye = np.eye(m.shape[0])
    return np.max(np.abs(m.conj().T @ m - eye)) <= tol


def is_psd(m: np.ndarray, tol: float = PSD_TOL) -> bool:
    if not is_hermitian(m):
        return False
    return float(np.linalg.eigvalsh(m)[0]) >= -tol


@dataclass(frozen=True)
class PureState:
    """A unit vector in C^d."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > 1e-9:
            raise ValueError(f"state vector not normalized: ||v||^2 = {norm2}")
        if abs(math.sqrt(norm2) - 1.0) > NORM_TOL:
            # renormalize tiny drift so downstream invariants hold exactly
            object.__setattr__(self, "amplitudes", amps / math.sqrt(norm2))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> "DensityMatrix":
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian PSD unit-trace operator on C^d."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        if not is_hermitian(m):
            raise ValueError("density matrix not Hermitian within tolerance")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > HERM_TOL:
            raise ValueError(f"density matrix trace {tr} != 1")
        if float(np.linalg.eigvalsh(m)[0]) < -PSD_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _check_same_dim(a, b):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")


def sample_haar_state(d: int, rng: RngStream) -> PureState:
    """Uniform (Haar) random unit vector in C^d.

    Realized by normalizing d i.i.d. standard complex Gaussians.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    g = rng.rng
    z = g.standard_normal(d) + 1j * g.standard_normal(d)
    return PureState(z / np.linalg.norm(z))


def sample_haar_unitary(d: int, rng: RngStream) -> np.ndarray:
    """Haar random unitary via QR of a complex Ginibre matrix.

    Each column of Q is rephased so the corresponding R diagonal entry
    is real positive, which makes the distribution exactly Haar.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    g = rng.rng
    z = (g.standard_normal((d, d)) + 1j * g.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return q * phases


def overlap2(a: PureState, b: PureState) -> float:
    """|<a|b>|^2."""
    _check_same_dim(a, b)
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def trace_inner(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Tr(rho sigma), guaranteed real for Hermitian inputs."""
    _check_same_dim(rho, sigma)
    return float(np.trace(rho.matrix @ sigma.matrix).real)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """(1/2)||rho - sigma||_1 via the Hermitian eigenvalues of the difference."""
    _check_same_dim(rho, sigma)
    ev = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(0.5 * np.sum(np.abs(ev)))


def dmax(rho: DensityMatrix, sigma: DensityMatrix, support_tol: float = 1e-9) -> float:
    """Max-relative entropy: smallest lam with rho <= e^lam sigma.

    Returns +inf when the support of rho is not contained in the support
    of sigma (tested at `support_tol`).
    """
    _check_same_dim(rho, sigma)
    w, v = np.linalg.eigh(sigma.matrix)
    on = w > support_tol
    if not np.all(on):
        # weight of rho outside sigma's support
        v_off = v[:, ~on]
        leak = float(np.trace(v_off.conj().T @ rho.matrix @ v_off).real)
        if leak > support_tol:
            return math.inf
    v_on = v[:, on]
    inv_sqrt = v_on / np.sqrt(w[on])
    core = inv_sqrt.conj().T @ rho.matrix @ inv_sqrt
    lam_max = float(np.linalg.eigvalsh((core + core.conj().T) / 2)[-1])
    lam_max = max(lam_max, 0.0)
    if lam_max == 0.0:
        return -math.inf
    return math.log(lam_max)


def sample_beta(a: float, b: float, rng: RngStream) -> float:
    """Beta(a, b) draw realized as a ratio of two Gamma draws."""
    if a <= 0 or b <= 0:
        raise ValueError("beta parameters must be positive")
    g = rng.rng
    x = g.gamma(a)
    y = g.gamma(b)
    return float(x / (x + y))
