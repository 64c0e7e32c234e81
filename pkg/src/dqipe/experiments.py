"""Monte Carlo experiment driver.

Instance generators for the promise problems and lower-bound witness
constructions, the named experiments dispatched by the CLI, Wilson
confidence intervals, and CSV/JSON result files that round-trip.

CSV layout: comment lines "# config: <json>", "# passed: ...", then a
header row and data rows. Estimate experiments emit one row per trial
with columns (trial, seed_path, w, raw_stat); check experiments emit the
summary as a single row. JSON files mirror the same content with a
"summary" object.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, asdict
from fractions import Fraction
from importlib import resources

import numpy as np

from .linalg import (
    DensityMatrix,
    PureState,
    sample_haar_state,
    trace_distance,
    dmax,
)
from .rng import RngStream
from . import estimators as est
from . import symmetric as sym
from . import oracles
from .protocol import (
    Role,
    Smp,
    OneWay,
    run_protocol,
    multicopy_smp_strategies,
    singlecopy_smp_strategies,
    pi0_oneway_strategies,
)
from .wire import open_transport

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "ExperimentResult",
    "load_defaults",
    "wilson_interval",
    "gen_dipe_instance",
    "gen_problem1_instance",
    "gen_swaplb_instance",
    "sample_truncated_binomial",
    "run_experiment",
    "emit_result",
    "parse_result",
]

EXPERIMENTS = (
    "estimate-multicopy",
    "estimate-singlecopy",
    "dipe-threshold",
    "dipe-pi0",
    "variance-check-multicopy",
    "variance-check-singlecopy",
    "variance-check-swap",
    "spectrum-check",
    "mp-bound-check",
    "tracedist-check",
    "moment-check",
    "problem1-distinguish",
)


def load_defaults() -> dict:
    """Calibrated constants shipped with the package (see scripts/)."""
    with resources.files("dqipe").joinpath("defaults.json").open() as fh:
        return json.load(fh)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    d: int = 8
    k: int = 0  # 0 selects the experiment's calibrated default
    m: int = 32
    n_bases: int = 1
    eps: float = 0.1
    f: float = 0.5
    trials: int = 1000
    seed: int = 0
    setting: str = "smp"
    transport: str = "inproc"
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if min(self.d, self.m, self.n_bases, self.trials) < 1 or self.k < 0:
            raise ValueError("d, m, n_bases, trials must be positive; k nonnegative")
        if not (0.0 <= self.eps <= 1.0 and 0.0 <= self.f <= 1.0):
            raise ValueError("eps and f must lie in [0, 1]")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(**data)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[dict]
    summary: dict
    passed: bool
    wall_clock: float = 0.0

    def content_equal(self, other: "ExperimentResult") -> bool:
        """Equality up to wall-clock time; used for round-trip checks."""
        return (
            self.config == other.config
            and self.rows == other.rows
            and self.summary == other.summary
            and self.passed == other.passed
        )


def wilson_interval(successes: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial proportion."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = successes / n
    denom = 1.0 + z**2 / n
    center = (p + z**2 / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / n + z**2 / (4 * n**2))
    return max(0.0, center - half), min(1.0, center + half)


# --- instance generators ---


def gen_dipe_instance(d: int, case: int, rng: RngStream) -> tuple[PureState, PureState]:
    """Case 1: the same Haar state twice. Case 2: two independent draws."""
    if d < 2:
        raise ValueError("d must be >= 2")
    phi = sample_haar_state(d, rng)
    if case == 1:
        return phi, phi
    if case == 2:
        return phi, sample_haar_state(d, rng)
    raise ValueError("case must be 1 or 2")


def _embed_tail(vec: np.ndarray) -> np.ndarray:
    out = np.zeros(vec.size + 1, dtype=complex)
    out[1:] = vec
    return out


def gen_problem1_instance(
    d: int, eps: float, case: int, rng: RngStream
) -> tuple[PureState, PureState]:
    """Phase-fragile states in C^{d+1}: sqrt(1-eps) e^{i theta} |0> +
    sqrt(eps)|phi> with phi Haar in the span of the last d basis states.

    Case 1 shares phi between the parties (fresh phases); case 2 draws
    independent phi and psi."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    if d < 2:
        raise ValueError("d must be >= 2")
    g = rng.rng
    theta, theta2 = g.uniform(0.0, 2.0 * math.pi, size=2)
    phi = sample_haar_state(d, rng)
    psi = phi if case == 1 else sample_haar_state(d, rng)
    if case not in (1, 2):
        raise ValueError("case must be 1 or 2")
    e0 = np.zeros(d + 1, dtype=complex)
    e0[0] = 1.0

    def build(angle: float, tail: PureState) -> PureState:
        return PureState(
            math.sqrt(1.0 - eps) * np.exp(1j * angle) * e0
            + math.sqrt(eps) * _embed_tail(tail.amplitudes)
        )

    return build(theta, phi), build(theta2, psi)


def gen_swaplb_instance(eps: float, which: int = 0) -> tuple[PureState, PureState]:
    """Qubit pair whose squared overlap with |0> is 1/2 -+ eps; the two
    variants have squared overlap 1 - 4 eps^2 with each other."""
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must be in (0, 1/2)")
    if which not in (0, 1):
        raise ValueError("which must be 0 or 1")
    lo, hi = math.sqrt(0.5 - eps), math.sqrt(0.5 + eps)
    amps = np.array([lo, hi]) if which == 0 else np.array([hi, lo])
    return PureState(amps.astype(complex)), PureState(np.array([1.0, 0.0], dtype=complex))


def sample_truncated_binomial(k: int, eps: float, m_cap: int, rng: RngStream) -> tuple[int, bool]:
    """Binomial(k, eps) draw plus a flag marking draws above m_cap."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps must be in [0, 1]")
    t = int(rng.rng.binomial(k, eps))
    return t, t > m_cap


# --- fast vectorized samplers for the variance checks ---


def _haar_pairs(d: int, f: float, n: int, g: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    phi = g.standard_normal((n, d)) + 1j * g.standard_normal((n, d))
    phi /= np.linalg.norm(phi, axis=1, keepdims=True)
    z = g.standard_normal((n, d)) + 1j * g.standard_normal((n, d))
    z -= phi * np.einsum("nd,nd->n", phi.conj(), z)[:, None]
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    psi = math.sqrt(f) * phi + math.sqrt(1.0 - f) * z
    return phi, psi


def _povm_samples_batch(states: np.ndarray, k: int, g: np.random.Generator) -> np.ndarray:
    n, d = states.shape
    a2 = g.beta(k + 1, d - 1, size=n)
    theta = g.uniform(0.0, 2.0 * math.pi, size=n)
    z = g.standard_normal((n, d)) + 1j * g.standard_normal((n, d))
    z -= states * np.einsum("nd,nd->n", states.conj(), z)[:, None]
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return (
        np.sqrt(a2)[:, None] * np.exp(1j * theta)[:, None] * states
        + np.sqrt(1.0 - a2)[:, None] * z
    )


def _singlecopy_w_batch(d: int, m: int, f: float, n: int, g: np.random.Generator) -> np.ndarray:
    phi, psi = _haar_pairs(d, f, n, g)
    z = g.standard_normal((n, d, d)) + 1j * g.standard_normal((n, d, d))
    q, r = np.linalg.qr(z)
    diag = np.einsum("nii->ni", r)
    u = q * (diag / np.abs(diag))[:, None, :]
    p = np.abs(np.einsum("nbi,ni->nb", u, phi)) ** 2
    qd = np.abs(np.einsum("nbi,ni->nb", u, psi)) ** 2
    p /= p.sum(axis=1, keepdims=True)
    qd /= qd.sum(axis=1, keepdims=True)
    w = np.empty(n)
    for i in range(n):
        cx = g.multinomial(m, p[i])
        cy = g.multinomial(m, qd[i])
        w[i] = (d + 1) * float(cx @ cy) / m**2 - 1.0
    return w


def _multicopy_w_batch(d: int, k: int, f: float, n: int, g: np.random.Generator) -> np.ndarray:
    phi, psi = _haar_pairs(d, f, n, g)
    u = _povm_samples_batch(phi, k, g)
    v = _povm_samples_batch(psi, k, g)
    x = np.abs(np.einsum("nd,nd->n", u.conj(), v)) ** 2
    c = est.multicopy_constants(d, k)
    return c.slope * x - c.offset


# --- the experiments ---


def _seed_path_str(stream: RngStream) -> str:
    return "/".join(str(p) for p in stream.path)


def _summary_stats(values: np.ndarray) -> tuple[float, float, float]:
    mean = float(values.mean())
    var = float(values.var(ddof=1)) if values.size > 1 else 0.0
    se = math.sqrt(var / values.size) if values.size > 1 else 0.0
    return mean, var, se


def _run_estimate_multicopy(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    k = config.k if config.k > 0 else 8
    transport = open_transport(config.transport)
    alice, bob, referee = multicopy_smp_strategies(k)
    rows = []
    try:
        for t in range(config.trials):
            tr = root.child(t)
            phi, psi = est.make_state_pair(config.d, config.f, tr.child(0))
            run = run_protocol(
                Smp(), alice, bob, referee,
                {Role.ALICE: phi, Role.BOB: psi}, tr.child(1),
                transport=transport, run_id=f"trial{t}",
                meta={"d": config.d, "k": k},
            )
            rows.append(
                {
                    "trial": t,
                    "seed_path": _seed_path_str(tr.child(1)),
                    "w": run.result["w"],
                    "raw_stat": run.result["raw"],
                }
            )
    finally:
        transport.close()
    w = np.array([r["w"] for r in rows])
    mean, var, se = _summary_stats(w)
    passed = se == 0.0 or abs(mean - config.f) <= 4.0 * se
    summary = {
        "mean_w": mean, "var_w": var, "se": se,
        "target_f": config.f, "k": k, "trials": config.trials,
    }
    return rows, summary, passed


def _run_estimate_singlecopy(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    transport = open_transport(config.transport)
    alice, bob, referee = singlecopy_smp_strategies(config.d, config.n_bases, config.m)
    rows = []
    try:
        for t in range(config.trials):
            tr = root.child(t)
            phi, psi = est.make_state_pair(config.d, config.f, tr.child(0))
            run = run_protocol(
                Smp(), alice, bob, referee,
                {Role.ALICE: phi, Role.BOB: psi}, tr.child(1),
                transport=transport, shared_randomness=True, run_id=f"trial{t}",
                meta={"d": config.d, "n_bases": config.n_bases, "m": config.m},
            )
            rows.append(
                {
                    "trial": t,
                    "seed_path": _seed_path_str(tr.child(1)),
                    "w": run.result["w"],
                    "raw_stat": run.result["raw"],
                }
            )
    finally:
        transport.close()
    w = np.array([r["w"] for r in rows])
    mean, var, se = _summary_stats(w)
    passed = se == 0.0 or abs(mean - config.f) <= 4.0 * se
    summary = {
        "mean_w": mean, "var_w": var, "se": se,
        "target_f": config.f, "n_bases": config.n_bases, "m": config.m,
        "trials": config.trials,
    }
    return rows, summary, passed


def _run_dipe_threshold(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    defaults = load_defaults()
    k = config.k if config.k > 0 else defaults["dipe_threshold_c"] * math.ceil(
        math.sqrt(config.d)
    )
    summary: dict = {"k": k}
    ok = True
    for case in (1, 2):
        hits = 0
        for t in range(config.trials):
            tr = root.child(case, t)
            phi, psi = gen_dipe_instance(config.d, case, tr.child(0))
            u = sym.standard_povm_sample(phi, k, tr.child(1, est.STREAM_ALICE))
            v = sym.standard_povm_sample(psi, k, tr.child(1, est.STREAM_BOB))
            hits += est.dipe_decide_threshold(u, v, config.d) == case
        lo, hi = wilson_interval(hits, config.trials)
        summary[f"success_rate_case{case}"] = hits / config.trials
        summary[f"wilson_lo_case{case}"] = lo
        summary[f"wilson_hi_case{case}"] = hi
        ok = ok and lo >= 2.0 / 3.0
    return [], summary, ok


def _run_dipe_pi0(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    k = config.k if config.k > 0 else 3
    transport = open_transport(config.transport)
    alice, bob, referee = pi0_oneway_strategies(k)
    summary: dict = {"k": k}
    gaps = np.empty(config.trials)
    try:
        for case in (1, 2):
            hits = 0
            for t in range(config.trials):
                tr = root.child(case, t)
                phi, psi = gen_dipe_instance(config.d, case, tr.child(0))
                run = run_protocol(
                    OneWay(), alice, bob, referee,
                    {Role.ALICE: phi, Role.BOB: psi}, tr.child(1),
                    transport=transport, run_id=f"case{case}-trial{t}",
                    meta={"d": config.d, "k": k},
                )
                hits += run.result["case"] == case
                if case == 2:
                    # acceptance gap of the all-orthogonal test between an
                    # independent state and the state Alice measured
                    u = sym.standard_povm_sample(phi, k, tr.child(1, est.STREAM_ALICE))
                    gaps[t] = est.pi0_reject_probability(u, psi, k) - est.pi0_reject_probability(u, phi, k)
            lo, hi = wilson_interval(hits, config.trials)
            summary[f"success_rate_case{case}"] = hits / config.trials
            summary[f"wilson_lo_case{case}"] = lo
            summary[f"wilson_hi_case{case}"] = hi
    finally:
        transport.close()
    gap_mean, _, gap_se = _summary_stats(gaps)
    closed = sym.trace_distance_rho_u_block(config.d, k)
    summary["gap_mean"] = gap_mean
    summary["gap_se"] = gap_se
    summary["gap_closed_form"] = closed
    passed = gap_se == 0.0 or abs(gap_mean - closed) <= 4.0 * gap_se
    return [], summary, passed


def _run_variance_check_multicopy(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    k = config.k if config.k > 0 else 12
    w = _multicopy_w_batch(config.d, k, config.f, config.trials, root.rng)
    emp = float(w.var(ddof=1))
    exact = est.multicopy_variance_exact(config.d, k, config.f)
    ratio = emp / exact
    summary = {"mean_w": float(w.mean()), "empirical_var": emp, "exact_var": exact, "ratio": ratio, "k": k, "f": config.f}
    return [], summary, 0.95 <= ratio <= 1.05


def _run_variance_check_singlecopy(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    w = _singlecopy_w_batch(config.d, config.m, config.f, config.trials, root.rng)
    emp = float(w.var(ddof=1))
    exact = (config.d + 1) ** 2 * est.singlecopy_variance_exact_pure(
        config.d, config.m, config.f
    )
    ratio = emp / exact
    summary = {"mean_w": float(w.mean()), "se": math.sqrt(emp / config.trials), "empirical_var": emp, "exact_var": exact, "ratio": ratio, "m": config.m, "f": config.f}
    return [], summary, 0.95 <= ratio <= 1.05


def _run_variance_check_swap(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    k = config.k if config.k > 0 else 100
    rejects = root.rng.binomial(k, (1.0 - config.f) / 2.0, size=config.trials)
    w = 1.0 - 2.0 * rejects / k
    emp = float(w.var(ddof=1))
    exact = est.swap_test_variance(config.f, k)
    ratio = emp / exact
    summary = {"empirical_var": emp, "exact_var": exact, "ratio": ratio, "k": k, "f": config.f}
    return [], summary, 0.95 <= ratio <= 1.05


def _run_spectrum_check(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    k = config.k if config.k > 0 else 2
    u = sample_haar_state(config.d, root.child(0))
    rho = sym.rho_u_closed_form(u, k)
    spec = sym.block_spectrum(config.d, k)
    expected = sorted(
        [b for b, dim in zip(spec.betas, spec.dims) for _ in range(dim)]
    ) + [0.0] * (config.d**k - sym.sym_dimension(config.d, k))
    eigs = np.sort(np.linalg.eigvalsh(rho.matrix))
    eig_dev = float(np.max(np.abs(eigs - np.sort(np.array(expected)))))
    numeric = oracles.rho_u_numeric(u.amplitudes, k)
    entry_dev = float(np.max(np.abs(rho.matrix - numeric)))
    summary = {"max_eig_dev": eig_dev, "max_entry_dev": entry_dev, "k": k}
    return [], summary, eig_dev <= 1e-9 and entry_dev <= 1e-9


def _random_symmetric_pure(d: int, k: int, g: np.random.Generator) -> DensityMatrix:
    p = sym.sym_projector(d, k)
    z = g.standard_normal(d**k) + 1j * g.standard_normal(d**k)
    v = p @ z
    v /= np.linalg.norm(v)
    return DensityMatrix(np.outer(v, v.conj()))


def _run_mp_bound_check(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    k = config.k if config.k > 0 else 2
    sigma_m = sym.maximally_mixed_sym(config.d, k)
    floor = math.exp(-(k**2) / config.d)
    worst_eig = math.inf
    worst_excess = -math.inf
    for t in range(config.trials):
        tau = _random_symmetric_pure(config.d, k, root.child(t).rng)
        out = sym.mp_channel(tau, config.d, k)
        gap = np.linalg.eigvalsh(out.matrix - floor * sigma_m.matrix)
        worst_eig = min(worst_eig, float(gap[0]))
        worst_excess = max(worst_excess, dmax(sigma_m, out) - k**2 / config.d)
    summary = {"min_eig_slack": worst_eig, "max_dmax_excess": worst_excess, "k": k}
    return [], summary, worst_eig >= -1e-10 and worst_excess <= 1e-6


def _tracedist_closed_form_exact(d: int, k: int) -> Fraction:
    num = math.prod(range(d - 1, d + k - 1))
    den = math.prod(range(d + k, d + 2 * k))
    return Fraction(d - 1, d + k - 1) - Fraction(num, den)


def _run_tracedist_check(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    k = config.k if config.k > 0 else 3
    blockwise = sym.trace_distance_rho_u_block(config.d, k)
    closed = float(_tracedist_closed_form_exact(config.d, k))
    summary = {"blockwise": blockwise, "closed_form": closed, "k": k}
    ok = abs(blockwise - closed) <= 1e-12
    if config.d**k <= sym.DENSE_BUDGET and config.d ** (2 * k) <= 10**6:
        u = sample_haar_state(config.d, root.child(0))
        dense = trace_distance(
            sym.rho_u_closed_form(u, k), sym.maximally_mixed_sym(config.d, k)
        )
        summary["dense"] = dense
        ok = ok and abs(dense - blockwise) <= 1e-9
    return [], summary, ok


def _run_moment_check(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    d = config.d
    g = root.rng
    mats = []
    for _ in range(3):
        z = g.standard_normal((d, d)) + 1j * g.standard_normal((d, d))
        mats.append((z + z.conj().T) / 2)
    psi = g.standard_normal((config.trials, d)) + 1j * g.standard_normal((config.trials, d))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    max_z = 0.0
    for k in (1, 2, 3):
        prods = np.ones(config.trials)
        for a in mats[:k]:
            prods = prods * np.einsum("nd,de,ne->n", psi.conj(), a, psi).real
        exact = float(oracles.haar_moment_exact(mats[:k]).real)
        mean, _, se = _summary_stats(prods)
        if se > 0:
            max_z = max(max_z, abs(mean - exact) / se)
    summary = {"max_z": max_z, "draws": config.trials}
    return [], summary, max_z <= 4.0


def _run_problem1(config: ExperimentConfig, root: RngStream) -> tuple[list, dict, bool]:
    defaults = load_defaults()
    k = config.k if config.k > 0 else defaults["problem1_default_k"]
    window = config.eps * defaults["problem1_window_frac"]
    center = (1.0 - config.eps) ** 2
    summary: dict = {"k": k, "window": window, "center": center}
    ok = True
    for case in (1, 2):
        hits = 0
        for t in range(config.trials):
            tr = root.child(case, t)
            a, b = gen_problem1_instance(config.d, config.eps, case, tr.child(0))
            rec = est.multicopy_estimate(a, b, k, tr.child(1))
            decided = 2 if abs(rec.value - center) <= window else 1
            hits += decided == case
        lo, hi = wilson_interval(hits, config.trials)
        summary[f"success_rate_case{case}"] = hits / config.trials
        summary[f"wilson_lo_case{case}"] = lo
        summary[f"wilson_hi_case{case}"] = hi
        ok = ok and lo >= 2.0 / 3.0
    return [], summary, ok


_DISPATCH = {
    "estimate-multicopy": _run_estimate_multicopy,
    "estimate-singlecopy": _run_estimate_singlecopy,
    "dipe-threshold": _run_dipe_threshold,
    "dipe-pi0": _run_dipe_pi0,
    "variance-check-multicopy": _run_variance_check_multicopy,
    "variance-check-singlecopy": _run_variance_check_singlecopy,
    "variance-check-swap": _run_variance_check_swap,
    "spectrum-check": _run_spectrum_check,
    "mp-bound-check": _run_mp_bound_check,
    "tracedist-check": _run_tracedist_check,
    "moment-check": _run_moment_check,
    "problem1-distinguish": _run_problem1,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run the named experiment; deterministic given the config."""
    start = time.perf_counter()
    root = RngStream(config.seed)
    rows, summary, passed = _DISPATCH[config.experiment](config, root)
    return ExperimentResult(
        config=config, rows=rows, summary=summary, passed=passed,
        wall_clock=time.perf_counter() - start,
    )


# --- result files ---


def emit_result(result: ExperimentResult) -> str:
    if result.config.fmt == "json":
        doc = {
            "config": result.config.to_dict(),
            "rows": result.rows,
            "summary": result.summary,
            "passed": result.passed,
            "wall_clock": result.wall_clock,
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(result.config.to_dict(), sort_keys=False)}\n")
    buf.write(f"# passed: {json.dumps(result.passed)}\n")
    buf.write(f"# summary: {json.dumps(result.summary, sort_keys=False)}\n")
    writer = csv.writer(buf)
    if result.rows:
        cols = ["trial", "seed_path", "w", "raw_stat"]
        writer.writerow(cols)
        for row in result.rows:
            writer.writerow([row[c] if c == "seed_path" else repr(row[c]) if isinstance(row[c], float) else row[c] for c in cols])
    else:
        cols = list(result.summary.keys())
        writer.writerow(cols)
        writer.writerow([repr(v) if isinstance(v, float) else v for v in result.summary.values()])
    return buf.getvalue()


def parse_result(text: str) -> ExperimentResult:
    """Inverse of emit_result up to wall-clock time."""
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return ExperimentResult(
            config=ExperimentConfig.from_dict(doc["config"]),
            rows=doc["rows"],
            summary=doc["summary"],
            passed=doc["passed"],
            wall_clock=doc.get("wall_clock", 0.0),
        )
    config = None
    passed = False
    summary: dict = {}
    body_lines = []
    for line in text.splitlines():
        if line.startswith("# config: "):
            config = ExperimentConfig.from_dict(json.loads(line[len("# config: "):]))
        elif line.startswith("# passed: "):
            passed = json.loads(line[len("# passed: "):])
        elif line.startswith("# summary: "):
            summary = json.loads(line[len("# summary: "):])
        elif line.strip():
            body_lines.append(line)
    if config is None:
        raise ValueError("missing config line")
    rows: list[dict] = []
    if body_lines and body_lines[0].split(",")[0] == "trial":
        reader = csv.DictReader(body_lines)
        for rec in reader:
            rows.append(
                {
                    "trial": int(rec["trial"]),
                    "seed_path": rec["seed_path"],
                    "w": float(rec["w"]),
                    "raw_stat": float(rec["raw_stat"]),
                }
            )
    return ExperimentResult(config=config, rows=rows, summary=summary, passed=passed)
