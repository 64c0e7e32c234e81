"""Exact constructions on the symmetric subspace of (C^d)^{⊗k}.

Projectors, the continuous tomography POVM sampler, the block-diagonal
post-measurement state and its spectrum, measure-and-prepare and cloning
channels, and the phase-averaged superposition states used as hard
decision instances.

Dense operations on (C^d)^{⊗k} refuse to run when d^k exceeds
DENSE_BUDGET; closed-form paths (dimensions, block coefficients, block
trace distance) have no such limit and use exact integer arithmetic.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .linalg import PureState, DensityMatrix, sample_beta, HERM_TOL
from .rng import RngStream

__all__ = [
    "DENSE_BUDGET",
    "DenseBudgetError",
    "SymBasis",
    "SymBlockSpectrum",
    "sym_dimension",
    "type_vectors",
    "permutation_operator",
    "sym_basis",
    "sym_projector",
    "standard_povm_sample",
    "beta_coefficient",
    "beta_coefficient_exact",
    "block_spectrum",
    "pi_u_t",
    "rho_u_closed_form",
    "trace_distance_rho_u_block",
    "maximally_mixed_sym",
    "mp_channel",
    "clone_channel",
    "chiribella_combination",
    "phi_t_state",
    "averaged_phase_state",
    "partial_trace_first",
    "partial_trace_last",
]

DENSE_BUDGET = 20_000


class DenseBudgetError(ValueError):
    """Raised when a dense tensor-power operation exceeds DENSE_BUDGET."""


def _check_budget(d: int, k: int, label: str) -> None:
    if d**k > DENSE_BUDGET:
        raise DenseBudgetError(
            f"{label}: d^k = {d}^{k} exceeds dense budget {DENSE_BUDGET}"
        )


def sym_dimension(d: int, k: int) -> int:
    """Dimension of the symmetric subspace: C(d+k-1, k), exact."""
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    return math.comb(d + k - 1, k)


def type_vectors(d: int, k: int) -> list[tuple[int, ...]]:
    """All occupation vectors (l_0..l_{d-1}) with nonnegative entries summing to k.

    Ordered lexicographically; the count is C(d+k-1, k).
    """
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], remaining: int, slots: int):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for v in range(remaining + 1):
            rec(prefix + (v,), remaining - v, slots - 1)

    rec((), k, d)
    return out


def permutation_operator(pi: tuple[int, ...], d: int) -> np.ndarray:
    """The d^k x d^k unitary permuting tensor factors by pi.

    pi is given as a tuple of images: position j receives the factor that
    was at position pi^{-1}(j).
    """
    k = len(pi)
    _check_budget(d, k, "permutation_operator")
    n = d**k
    inv = [0] * k
    for src, dst in enumerate(pi):
        inv[dst] = src
    op = np.zeros((n, n))
    powers = [d ** (k - 1 - j) for j in range(k)]
    for col, idx in enumerate(itertools.product(range(d), repeat=k)):
        row = sum(idx[inv[j]] * powers[j] for j in range(k))
        op[row, col] = 1.0
    return op


@dataclass(frozen=True)
class SymBasis:
    """Orthonormal occupation-number basis of the symmetric subspace."""

    d: int
    k: int
    types: tuple[tuple[int, ...], ...]
    vectors: np.ndarray  # shape (d^k, dim), columns orthonormal


import functools


@functools.lru_cache(maxsize=None)
def sym_basis(d: int, k: int) -> SymBasis:
    """Build the occupation-number basis embedded in (C^d)^{⊗k}.

    Cached; callers must not mutate the vectors array."""
    _check_budget(d, k, "sym_basis")
    types = type_vectors(d, k)
    index = {t: j for j, t in enumerate(types)}
    n = d**k
    vecs = np.zeros((n, len(types)))
    for flat, idx in enumerate(itertools.product(range(d), repeat=k)):
        counts = [0] * d
        for i in idx:
            counts[i] += 1
        vecs[flat, index[tuple(counts)]] = 1.0
    vecs /= np.linalg.norm(vecs, axis=0)
    return SymBasis(d, k, tuple(types), vecs)


@functools.lru_cache(maxsize=None)
def _sym_projector_cached(d: int, k: int) -> np.ndarray:
    basis = sym_basis(d, k)
    p = basis.vectors @ basis.vectors.conj().T
    p.setflags(write=False)
    return p


def sym_projector(d: int, k: int) -> np.ndarray:
    """Orthogonal projector onto the symmetric subspace of (C^d)^{⊗k}.

    Cached and returned read-only; copy before mutating."""
    return _sym_projector_cached(d, k)


def standard_povm_sample(phi: PureState, k: int, rng: RngStream) -> PureState:
    """Sample an outcome of the continuous symmetric-subspace POVM on phi^{⊗k}.

    The outcome u has density C(d+k-1,k)|<phi|u>|^{2k} du. No rejection:
    the squared overlap with phi is a Beta(k+1, d-1) draw, the relative
    phase is uniform, and the orthogonal component is Haar in the
    orthocomplement of phi. k=0 reduces to a Haar-uniform draw.
    """
    d = phi.dim
    if k < 0:
        raise ValueError("k must be >= 0")
    if d == 1:
        warnings.warn("standard_povm_sample degenerate at d=1: outcome is phi up to phase")
        theta = rng.rng.uniform(0.0, 2.0 * math.pi)
        return PureState(phi.amplitudes * np.exp(1j * theta))
    a2 = sample_beta(k + 1, d - 1, rng)
    theta = rng.rng.uniform(0.0, 2.0 * math.pi)
    g = rng.rng
    z = g.standard_normal(d) + 1j * g.standard_normal(d)
    z -= phi.amplitudes * np.vdot(phi.amplitudes, z)
    z /= np.linalg.norm(z)
    u = math.sqrt(a2) * np.exp(1j * theta) * phi.amplitudes + math.sqrt(1.0 - a2) * z
    return PureState(u)


def beta_coefficient_exact(d: int, k: int, t: int) -> Fraction:
    """Block coefficient of the post-measurement state, exact rational.

    beta_t = (k+t)(k+t-1)...(t+1) / ((d+2k-1)...(d+k)); empty products
    at k=0 give 1.
    """
    if not 0 <= t <= k:
        raise ValueError(f"t={t} out of range [0, {k}]")
    num = math.prod(range(t + 1, k + t + 1))
    den = math.prod(range(d + k, d + 2 * k))
    return Fraction(num, den) if k > 0 else Fraction(1)


def beta_coefficient(d: int, k: int, t: int) -> float:
    return float(beta_coefficient_exact(d, k, t))


def block_dimension(d: int, k: int, t: int) -> int:
    """dim W^t = C(d+k-t-2, k-t): symmetric states with t factors pinned."""
    if not 0 <= t <= k:
        raise ValueError(f"t={t} out of range [0, {k}]")
    return math.comb(d + k - t - 2, k - t)


@dataclass(frozen=True)
class SymBlockSpectrum:
    """Per-block coefficient and dimension of the post-measurement state."""

    d: int
    k: int
    betas: tuple[float, ...]
    dims: tuple[int, ...]


def block_spectrum(d: int, k: int) -> SymBlockSpectrum:
    betas = tuple(beta_coefficient(d, k, t) for t in range(k + 1))
    dims = tuple(block_dimension(d, k, t) for t in range(k + 1))
    return SymBlockSpectrum(d, k, betas, dims)


def _householder_to(u: np.ndarray) -> np.ndarray:
    """Unitary (reflection, up to phase) mapping e_0 to u up to a phase.

    Sufficient wherever only conjugation by the rotation matters.
    """
    d = u.shape[0]
    overlap = u[0]
    phase = overlap / abs(overlap) if abs(overlap) > 1e-14 else 1.0
    target = u / phase  # now <e0|target> is real nonnegative
    w = target - np.eye(d, dtype=complex)[:, 0]
    nw2 = float(np.vdot(w, w).real)
    if nw2 < 1e-28:
        return np.eye(d, dtype=complex)
    return np.eye(d, dtype=complex) - 2.0 * np.outer(w, w.conj()) / nw2


def _kron_power(m: np.ndarray, k: int) -> np.ndarray:
    return reduce(np.kron, [m] * k) if k > 0 else np.eye(1, dtype=m.dtype)


def pi_u_t(u: PureState, k: int, t: int) -> np.ndarray:
    """Projector onto the block of the symmetric subspace with exactly t
    factors along u.

    Built by rotating the computational basis with e_0 -> u and selecting
    the occupation-number basis vectors whose first entry is t.
    """
    d = u.dim
    _check_budget(d, k, "pi_u_t")
    if not 0 <= t <= k:
        raise ValueError(f"t={t} out of range [0, {k}]")
    basis = sym_basis(d, k)
    cols = [j for j, tv in enumerate(basis.types) if tv[0] == t]
    b = basis.vectors[:, cols].astype(complex)
    rot = _kron_power(_householder_to(u.amplitudes), k)
    rb = rot @ b
    return rb @ rb.conj().T


def rho_u_closed_form(u: PureState, k: int) -> DensityMatrix:
    """Post-measurement state sum_t beta_t Pi_u^t as a dense matrix."""
    d = u.dim
    _check_budget(d, k, "rho_u_closed_form")
    n = d**k
    acc = np.zeros((n, n), dtype=complex)
    for t in range(k + 1):
        acc += beta_coefficient(d, k, t) * pi_u_t(u, k, t)
    return DensityMatrix(acc)


def trace_distance_rho_u_block(d: int, k: int) -> float:
    """Blockwise trace distance between the post-measurement state and the
    maximally mixed symmetric state, exact rationals throughout."""
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    uniform = Fraction(1, sym_dimension(d, k))
    total = Fraction(0)
    for t in range(k + 1):
        diff = beta_coefficient_exact(d, k, t) - uniform
        total += abs(diff) * block_dimension(d, k, t)
    return float(total / 2)


def maximally_mixed_sym(d: int, k: int) -> DensityMatrix:
    """Maximally mixed state on the symmetric subspace."""
    return DensityMatrix(sym_projector(d, k) / sym_dimension(d, k))


def partial_trace_first(op: np.ndarray, d: int, n_first: int, n_rest: int) -> np.ndarray:
    """Trace out the first n_first tensor factors of an operator on
    (C^d)^{⊗(n_first+n_rest)}."""
    a, b = d**n_first, d**n_rest
    return np.einsum("aiaj->ij", op.reshape(a, b, a, b))


def partial_trace_last(op: np.ndarray, d: int, n_keep: int, n_last: int) -> np.ndarray:
    """Trace out the last n_last tensor factors."""
    a, b = d**n_keep, d**n_last
    return np.einsum("iaja->ij", op.reshape(a, b, a, b))


def mp_channel(tau: DensityMatrix, d: int, k: int) -> DensityMatrix:
    """Measure-and-prepare channel on a k-copy symmetric input.

    Measures with the continuous POVM and re-prepares k copies of the
    outcome; computed exactly as a normalized partial contraction of the
    symmetric projector on 2k factors. Inputs not supported on the
    symmetric subspace are projected there with a warning.
    """
    if d ** (2 * k) > DENSE_BUDGET:
        raise DenseBudgetError(
            f"mp_channel: d^(2k) = {d}^{2 * k} exceeds dense budget {DENSE_BUDGET}"
        )
    p = sym_projector(d, k)
    m = tau.matrix
    proj = p @ m @ p
    tr = float(np.trace(proj).real)
    if abs(tr - 1.0) > 1e-9:
        warnings.warn("mp_channel input not supported on the symmetric subspace; projecting")
    proj = proj / tr
    n = d**k
    big4 = sym_projector(d, 2 * k).reshape(n, n, n, n)
    # Tr_first[(proj ⊗ I) P_sym] without forming the d^{2k} matrices
    out = np.einsum("ab,biaj->ij", proj, big4)
    scale = math.comb(d + k - 1, k) / math.comb(d + 2 * k - 1, 2 * k)
    out = scale * out
    out = (out + out.conj().T) / 2
    return DensityMatrix(out)


def clone_channel(rho: np.ndarray | None, d: int, s: int, k: int) -> DensityMatrix:
    """Optimal s -> k symmetric cloning channel.

    rho is an operator on (C^d)^{⊗s} (None allowed when s=0, where the
    channel prepares the maximally mixed symmetric state).
    """
    if not 0 <= s <= k:
        raise ValueError("need 0 <= s <= k")
    _check_budget(d, k, "clone_channel")
    if s == 0:
        base = np.eye(1, dtype=complex) if rho is None else np.atleast_2d(rho)
        scale_in = float(np.trace(base).real)
        out = sym_projector(d, k) * (scale_in / sym_dimension(d, k))
        return DensityMatrix(out)
    p = sym_projector(d, k)
    lifted = np.kron(rho, np.eye(d ** (k - s)))
    out = (math.comb(d + s - 1, s) / math.comb(d + k - 1, k)) * (p @ lifted @ p)
    out = (out + out.conj().T) / 2
    return DensityMatrix(out)


def chiribella_combination(rho: DensityMatrix, d: int, k: int) -> DensityMatrix:
    """Convex combination of cloning channels applied to the partial traces
    of rho; equals the measure-and-prepare channel output."""
    _check_budget(d, k, "chiribella_combination")
    den = math.comb(d + 2 * k - 1, k)
    n = d**k
    acc = np.zeros((n, n), dtype=complex)
    for s in range(k + 1):
        weight = math.comb(k, s) * math.comb(d + k - 1, k - s) / den
        reduced = partial_trace_last(rho.matrix, d, s, k - s) if s < k else rho.matrix
        if s == 0:
            acc += weight * (sym_projector(d, k) / sym_dimension(d, k)) * float(
                np.trace(np.atleast_2d(reduced)).real
            )
        else:
            acc += weight * clone_channel(reduced, d, s, k).matrix
    acc = (acc + acc.conj().T) / 2
    return DensityMatrix(acc)


def phi_t_state(phi: PureState, k: int, t: int) -> PureState:
    """Uniform superposition with phi in t of k registers and e_0 elsewhere.

    Requires <e_0|phi> = 0; subsets are enumerated lexicographically.
    """
    d = phi.dim
    if abs(phi.amplitudes[0]) > HERM_TOL:
        raise ValueError("phi must be orthogonal to the first basis state")
    if not 0 <= t <= k:
        raise ValueError(f"t={t} out of range [0, {k}]")
    _check_budget(d, k, "phi_t_state")
    e0 = np.zeros(d, dtype=complex)
    e0[0] = 1.0
    vec = np.zeros(d**k, dtype=complex)
    for subset in itertools.combinations(range(k), t):
        factors = [phi.amplitudes if j in subset else e0 for j in range(k)]
        vec += reduce(np.kron, factors) if k > 0 else np.ones(1, dtype=complex)
    vec /= math.sqrt(math.comb(k, t))
    return PureState(vec)


def averaged_phase_state(phi: PureState, eps: float, k: int) -> DensityMatrix:
    """Binomial mixture over t of the t-register superposition states.

    Equals the phase average of (sqrt(1-eps) e^{i theta} e_0 +
    sqrt(eps) phi)^{⊗k} over a uniform theta.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    d = phi.dim
    _check_budget(d, k, "averaged_phase_state")
    n = d**k
    acc = np.zeros((n, n), dtype=complex)
    for t in range(k + 1):
        weight = math.comb(k, t) * eps**t * (1.0 - eps) ** (k - t)
        v = phi_t_state(phi, k, t).amplitudes
        acc += weight * np.outer(v, v.conj())
    return DensityMatrix(acc)
