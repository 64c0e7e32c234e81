"""Inner-product estimators for two parties holding copies of pure states.

Two estimation routes: a multi-copy route where each party measures all
k local copies with the continuous symmetric-subspace POVM, and a
single-copy route built on cross-collision statistics of measurements in
shared random bases. Plus the two-outcome SWAP test as a baseline and the
threshold deciders for the orthogonal-vs-matching promise problem.

Randomness layout (shared with the protocol harness so that in-process
protocol runs reproduce the direct calls bit for bit): child stream 0 is
shared randomness, 1 is the first party, 2 is the second, 3 the referee.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .linalg import PureState, DensityMatrix, overlap2, trace_inner, sample_haar_state
from .rng import RngStream
from .symmetric import standard_povm_sample

__all__ = [
    "STREAM_SHARED",
    "STREAM_ALICE",
    "STREAM_BOB",
    "STREAM_REFEREE",
    "EstimateRecord",
    "MulticopyConstants",
    "multicopy_constants",
    "multicopy_estimate",
    "multicopy_variance_exact",
    "multicopy_variance_bound",
    "singlecopy_estimate",
    "singlecopy_variance_exact_pure",
    "born_sample",
    "classical_collision",
    "collision_variance_bound",
    "swap_test",
    "swap_test_variance",
    "generalized_swap_variance",
    "dipe_decide_threshold",
    "dipe_decide_pi0",
    "pi0_reject_probability",
    "make_state_pair",
]

# Child-stream indices; the protocol harness assigns the same ones.
STREAM_SHARED = 0
STREAM_ALICE = 1
STREAM_BOB = 2
STREAM_REFEREE = 3


@dataclass(frozen=True)
class EstimateRecord:
    """One run of an estimator: the unbiased estimate plus its raw statistic
    and enough bookkeeping to reproduce it."""

    value: float
    raw: float
    d: int
    k: int
    n_bases: int | None = None
    m: int | None = None
    seed: int | None = None
    path: tuple[int, ...] = ()
    degenerate: bool = False


@dataclass(frozen=True)
class MulticopyConstants:
    """Affine calibration w = slope * |<u|v>|^2 - offset making the
    multi-copy statistic unbiased for the squared overlap."""

    d: int
    k: int
    slope: float
    offset: float
    mean_a: float  # intercept of E|<u|v>|^2 = mean_a + mean_b * f
    mean_b: float


def multicopy_constants(d: int, k: int) -> MulticopyConstants:
    if d < 1 or k < 1:
        raise ValueError("need d >= 1 and k >= 1")
    slope = (d + k) ** 2 / k**2
    offset = (d + 2 * k) / k**2
    mean_a = (d + 2 * k) / (d + k) ** 2
    mean_b = k**2 / (d + k) ** 2
    return MulticopyConstants(d, k, slope, offset, mean_a, mean_b)


def multicopy_estimate(
    phi: PureState, psi: PureState, k: int, rng: RngStream
) -> EstimateRecord:
    """Estimate |<phi|psi>|^2 from k copies per party.

    Each party samples the continuous POVM on its k copies; the referee
    rescales the squared overlap of the two outcomes. Unbiased; the value
    is not clamped to [0, 1]. Pure inputs only: mixed states break the
    calibration, so pass density matrices elsewhere.
    """
    if isinstance(phi, DensityMatrix) or isinstance(psi, DensityMatrix):
        raise TypeError("multicopy_estimate requires pure states")
    if phi.dim != psi.dim:
        raise ValueError("dimension mismatch")
    d = phi.dim
    if k < 1:
        raise ValueError("k must be >= 1")
    if d == 1:
        warnings.warn("multicopy_estimate degenerate at d=1: overlap is exactly 1")
        return EstimateRecord(
            value=1.0, raw=1.0, d=d, k=k, seed=rng.seed, path=rng.path, degenerate=True
        )
    u = standard_povm_sample(phi, k, rng.child(STREAM_ALICE))
    v = standard_povm_sample(psi, k, rng.child(STREAM_BOB))
    x = overlap2(u, v)
    c = multicopy_constants(d, k)
    return EstimateRecord(
        value=c.slope * x - c.offset, raw=x, d=d, k=k, seed=rng.seed, path=rng.path
    )


def multicopy_variance_exact(d: int, k: int, f: float) -> float:
    """Exact variance of the multi-copy estimate at squared overlap f."""
    if d < 2 or k < 1:
        raise ValueError("need d >= 2 and k >= 1")
    k1, k2 = k + 1, k + 2
    bracket = (
        k2**2 * k1**2 * f**2
        + 4 * k1 * k2 * (1 - f) ** 2
        + 2 * (d - 2 + f) ** 2
        + 2 * (d - 2 + f**2)
        + 4 * k1**2 * (1 - f) ** 2
        + 8 * k1 * (1 - f) * (d + 2 * f - 2)
        + 8 * k1**2 * k2 * f * (1 - f)
        + 4 * k1**2 * f * (d - 2 + f)
        + 8 * k1**2 * (f**2 - f)
    ) / k**4
    pref = (d + k) ** 2 / (d + k + 1) ** 2
    return pref * bracket - (d + 2 * k) ** 2 / k**4 - 2 * (d + 2 * k) * f / k**2 - f**2


def multicopy_variance_bound(d: int, k: int, f: float) -> float:
    """Simple upper bound on the multi-copy variance, O(d^2/k^4 + 1/k)."""
    return (
        (4 * f - 2 * f**2) / k
        + (2 * d * f + f**2 + 4) / k**2
        + (4 * d + 4) / k**3
        + (d**2 + 2 * d) / k**4
    )


def born_sample(rho: DensityMatrix, unitary: np.ndarray, m: int, rng: RngStream) -> np.ndarray:
    """Draw m outcomes of the basis measurement U rho U^† in the
    computational basis, from the exact outcome distribution."""
    probs = np.einsum("bi,ij,bj->b", unitary, rho.matrix, unitary.conj()).real
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-8:
        raise RuntimeError(f"born_sample: outcome probabilities sum to {total}")
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    return rng.rng.choice(rho.dim, size=m, p=probs)


def classical_collision(x: np.ndarray, y: np.ndarray) -> float:
    """Fraction of colliding ordered cross pairs between two outcome lists."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.size == 0 or y.size == 0:
        raise ValueError("need at least one sample on each side")
    hi = int(max(x.max(), y.max())) + 1
    cx = np.bincount(x, minlength=hi)
    cy = np.bincount(y, minlength=hi)
    return float(cx @ cy) / (x.size * y.size)


def _check_distribution(p: np.ndarray, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"{name} is not a probability distribution")
    return p


def collision_variance_bound(p: np.ndarray, q: np.ndarray, m: int) -> float:
    """Upper bound on the variance of the cross-collision fraction with m
    samples from each of p and q."""
    p = _check_distribution(p, "p")
    q = _check_distribution(q, "q")
    if m < 1:
        raise ValueError("m must be >= 1")
    g = float(p @ q)
    cross = float(p @ q**2 + p**2 @ q)
    return g / m**2 + cross / m


def singlecopy_estimate(
    rho: DensityMatrix | PureState,
    sigma: DensityMatrix | PureState,
    n_bases: int,
    m: int,
    rng: RngStream,
) -> EstimateRecord:
    """Estimate Tr(rho sigma) from single copies measured in shared random
    bases.

    For each of n_bases Haar bases both parties measure m copies and the
    referee rescales the cross-collision fraction; the reported value is
    the average over bases. Accepts mixed states. Not clamped.
    """
    rho_m = rho.density() if isinstance(rho, PureState) else rho
    sigma_m = sigma.density() if isinstance(sigma, PureState) else sigma
    if rho_m.dim != sigma_m.dim:
        raise ValueError("dimension mismatch")
    d = rho_m.dim
    if n_bases < 1 or m < 1:
        raise ValueError("need n_bases >= 1 and m >= 1")
    if d == 1:
        warnings.warn("singlecopy_estimate degenerate at d=1: overlap is exactly 1")
        return EstimateRecord(
            value=1.0, raw=1.0, d=d, k=1, n_bases=n_bases, m=m,
            seed=rng.seed, path=rng.path, degenerate=True,
        )
    from .linalg import sample_haar_unitary

    vals = np.empty(n_bases)
    raws = np.empty(n_bases)
    for i in range(n_bases):
        u = sample_haar_unitary(d, rng.child(STREAM_SHARED, i))
        x = born_sample(rho_m, u, m, rng.child(STREAM_ALICE, i))
        y = born_sample(sigma_m, u, m, rng.child(STREAM_BOB, i))
        g = classical_collision(x, y)
        raws[i] = g
        vals[i] = (d + 1) * g - 1.0
    return EstimateRecord(
        value=float(vals.mean()), raw=float(raws.mean()), d=d, k=1,
        n_bases=n_bases, m=m, seed=rng.seed, path=rng.path,
    )


def singlecopy_variance_exact_pure(d: int, m: int, f: float) -> float:
    """Exact variance of one base's collision statistic for pure inputs
    with squared overlap f. Multiply by (d+1)^2 for the variance of the
    rescaled estimate w_i."""
    if d < 2 or m < 1:
        raise ValueError("need d >= 2 and m >= 1")
    base_var = (
        d**2 * (1 + f) ** 2 - d * (6 - f) * f + d + 2 * (1 - f) ** 2
    ) / (d * (d + 1) ** 2 * (d + 2) * (d + 3))
    second = (
        (1 + f) / ((d + 1) * m**2)
        + ((m - 1) / m**2) * (4 + 8 * f) / ((d + 1) * (d + 2))
        - ((2 * m - 1) / m**2)
        * (d**2 * (1 + f) ** 2 + 5 * d * (1 + f) ** 2 + 2 * (1 - f) ** 2)
        / (d * (d + 1) * (d + 2) * (d + 3))
    )
    return base_var + second


def swap_test(f: float, k: int, rng: RngStream) -> float:
    """Simulated SWAP-test estimate of a squared overlap f from k trials.

    Each trial accepts with probability (1+f)/2; the estimate
    1 - 2 * (rejection fraction) is unbiased with variance (1-f^2)/k.
    """
    if not 0.0 <= f <= 1.0:
        raise ValueError("f must lie in [0, 1]")
    if k < 1:
        raise ValueError("k must be >= 1")
    rejects = rng.rng.random(k) >= (1.0 + f) / 2.0
    return 1.0 - 2.0 * float(rejects.mean())


def swap_test_variance(f: float, k: int) -> float:
    return (1.0 - f**2) / k


def generalized_swap_variance(rho: DensityMatrix, sigma: DensityMatrix, k: int) -> float:
    """Variance of the permutation-test estimate of Tr(rho sigma) from k
    joint copies, valid for mixed inputs."""
    if k < 1:
        raise ValueError("k must be >= 1")
    f = trace_inner(rho, sigma)
    r2s = float(np.trace(rho.matrix @ rho.matrix @ sigma.matrix).real)
    rs2 = float(np.trace(rho.matrix @ sigma.matrix @ sigma.matrix).real)
    return 1.0 / k**2 + ((k - 1) / k**2) * (r2s + rs2) - ((2 * k - 1) / k**2) * f**2


def dipe_decide_threshold(u: PureState, v: PureState, d: int) -> int:
    """Decide the orthogonal-vs-matching promise from the two POVM outcomes:
    case 2 (orthogonal) iff |<u|v>|^2 <= 10/d."""
    return 2 if overlap2(u, v) <= 10.0 / d else 1


def pi0_reject_probability(u: PureState, psi: PureState, k: int) -> float:
    """Probability that none of k copies of psi is found along u:
    (1 - |<u|psi>|^2)^k."""
    return (1.0 - overlap2(u, psi)) ** k


def dipe_decide_pi0(u: PureState, psi: PureState, k: int, rng: RngStream) -> int:
    """Decide the promise by a two-outcome test on psi^{⊗k}: project onto
    the block of the symmetric subspace orthogonal to u in every factor.
    Case 2 iff that projection accepts."""
    return 2 if rng.rng.random() < pi0_reject_probability(u, psi, k) else 1


def make_state_pair(d: int, f: float, rng: RngStream) -> tuple[PureState, PureState]:
    """Haar-random pair of pure states with squared overlap exactly f."""
    if not 0.0 <= f <= 1.0:
        raise ValueError("f must lie in [0, 1]")
    phi = sample_haar_state(d, rng)
    if f == 1.0:
        return phi, phi
    if d == 1:
        raise ValueError("d=1 admits only f=1")
    g = rng.rng
    z = g.standard_normal(d) + 1j * g.standard_normal(d)
    z -= phi.amplitudes * np.vdot(phi.amplitudes, z)
    z /= np.linalg.norm(z)
    psi = math.sqrt(f) * phi.amplitudes + math.sqrt(1.0 - f) * z
    return phi, PureState(psi)
