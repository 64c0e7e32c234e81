"""Acceptance gate: one test per release criterion, each printing a
single PASS/FAIL line. Tolerances are part of the contract; do not
loosen them."""

import math
from fractions import Fraction

import numpy as np

from dqipe import estimators as est
from dqipe import oracles
from dqipe import symmetric as sym
from dqipe import wire
from dqipe.experiments import (
    ExperimentConfig,
    _multicopy_w_batch,
    _povm_samples_batch,
    _singlecopy_w_batch,
    gen_dipe_instance,
    run_experiment,
)
from dqipe.linalg import (
    DensityMatrix,
    PureState,
    dmax,
    sample_haar_state,
    trace_distance,
)
from dqipe.protocol import (
    Interactive,
    Message,
    OneWay,
    Role,
    Smp,
    Transcript,
    multicopy_smp_strategies,
    run_protocol,
    singlecopy_smp_strategies,
    validate_transcript,
)
from dqipe.rng import RngStream


def _report(n, label, ok):
    print(f"ACCEPTANCE {n:2d} {label}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {n} ({label}) failed"


def test_01_standard_povm_moments():
    d, k, n = 16, 8, 100_000
    g = np.random.default_rng(101)
    phi = sample_haar_state(d, RngStream(101))
    states = np.broadcast_to(phi.amplitudes, (n, d))
    u = _povm_samples_batch(np.array(states), k, g)
    x = np.abs(np.einsum("nd,nd->n", np.conj(states), u)) ** 2
    mean = (k + 1) / (d + k)
    var = (d - 1) * (k + 1) / ((d + k) ** 2 * (d + k + 1))
    se = x.std(ddof=1) / math.sqrt(n)
    ok = abs(x.mean() - mean) <= 3 * se and abs(x.var(ddof=1) / var - 1.0) <= 0.05
    _report(1, "standard POVM overlap moments (d=16, k=8)", ok)


def test_02_multicopy_unbiased():
    d, k, n = 8, 16, 10_000
    ok = True
    for i, f in enumerate((0.0, 0.5, 1.0)):
        root = RngStream(200 + i)
        w = np.empty(n)
        for t in range(n):
            tr = root.child(t)
            phi, psi = est.make_state_pair(d, f, tr.child(0))
            w[t] = est.multicopy_estimate(phi, psi, k, tr.child(1)).value
        se = w.std(ddof=1) / math.sqrt(n)
        ok = ok and abs(w.mean() - f) <= 3 * se
    _report(2, "multi-copy estimator unbiased (d=8, k=16)", ok)


def test_03_multicopy_variance():
    d, k, n = 6, 12, 100_000
    ok = True
    for f in (0.0, 1.0):
        w = _multicopy_w_batch(d, k, f, n, np.random.default_rng(int(300 + f)))
        ratio = w.var(ddof=1) / est.multicopy_variance_exact(d, k, f)
        ok = ok and 0.95 <= ratio <= 1.05
    _report(3, "multi-copy exact variance ratio (d=6, k=12)", ok)


def test_04_block_spectrum():
    d, k = 3, 2
    u = sample_haar_state(d, RngStream(400))
    rho = sym.rho_u_closed_form(u, k)
    eigs = np.sort(np.linalg.eigvalsh(rho.matrix))[::-1]
    want = np.array([2 / 5, 1 / 5, 1 / 5, 1 / 15, 1 / 15, 1 / 15, 0, 0, 0])
    ok = np.max(np.abs(eigs - want)) <= 1e-9
    numeric = oracles.rho_u_numeric(u.amplitudes, k)
    ok = ok and np.max(np.abs(rho.matrix - numeric)) <= 1e-9
    _report(4, "post-measurement block spectrum (d=3, k=2)", ok)


def test_05_trace_distance_closed_form():
    d, k = 25, 3
    closed = Fraction(d - 1, d + k - 1) - Fraction(
        math.prod(range(d - 1, d + k - 1)), math.prod(range(d + k, d + 2 * k))
    )
    ok = abs(sym.trace_distance_rho_u_block(d, k) - float(closed)) <= 1e-12
    u = sample_haar_state(3, RngStream(500))
    dense = trace_distance(sym.rho_u_closed_form(u, 2), sym.maximally_mixed_sym(3, 2))
    ok = ok and abs(dense - sym.trace_distance_rho_u_block(3, 2)) <= 1e-9
    _report(5, "blockwise trace distance closed form", ok)


def test_06_mp_channel_bound():
    g = np.random.default_rng(600)
    ok = True
    for d, k in ((4, 1), (4, 2), (6, 2)):
        sigma_m = sym.maximally_mixed_sym(d, k)
        floor = math.exp(-(k**2) / d)
        p = sym.sym_projector(d, k)
        for _ in range(50):
            z = p @ (g.standard_normal(d**k) + 1j * g.standard_normal(d**k))
            z /= np.linalg.norm(z)
            out = sym.mp_channel(DensityMatrix(np.outer(z, z.conj())), d, k)
            min_eig = float(np.linalg.eigvalsh(out.matrix - floor * sigma_m.matrix)[0])
            ok = ok and min_eig >= -1e-10
            ok = ok and dmax(sigma_m, out) <= k**2 / d + 1e-6
    _report(6, "measure-and-prepare dominates e^{-k^2/d} sigma_m", ok)


def test_07_cloning_decomposition():
    d, k = 3, 2
    g = np.random.default_rng(700)
    p = sym.sym_projector(d, k)
    ok = True
    for _ in range(10):
        z = g.standard_normal((d**k, d**k)) + 1j * g.standard_normal((d**k, d**k))
        m = p @ (z @ z.conj().T) @ p
        m /= np.trace(m).real
        rho = DensityMatrix(m)
        dev = np.max(
            np.abs(sym.mp_channel(rho, d, k).matrix - sym.chiribella_combination(rho, d, k).matrix)
        )
        ok = ok and dev <= 1e-8
    _report(7, "measure-and-prepare equals cloning mixture (d=3, k=2)", ok)


def test_08_singlecopy_unbiased_and_variance():
    d, m, n = 8, 32, 100_000
    ok = abs(est.singlecopy_variance_exact_pure(2, 1, 1.0) - 2.0 / 9.0) <= 1e-12
    for f in (0.0, 1.0):
        w = _singlecopy_w_batch(d, m, f, n, np.random.default_rng(int(800 + f)))
        se = w.std(ddof=1) / math.sqrt(n)
        ok = ok and abs(w.mean() - f) <= 3 * se
        exact = (d + 1) ** 2 * est.singlecopy_variance_exact_pure(d, m, f)
        ok = ok and 0.95 <= w.var(ddof=1) / exact <= 1.05
    _report(8, "single-copy estimator mean and exact variance (d=8, m=32)", ok)


def test_09_collision_estimator_variance():
    d, m, n = 2, 2, 1_000_000
    g = np.random.default_rng(900)
    p = np.array([0.3, 0.7])
    q = np.array([0.6, 0.4])
    exact = oracles.exhaustive_collision_variance(p, q, m)
    # m=2 draws per side: count of outcome 1 is Binomial(2, .)
    cx1 = g.binomial(m, p[1], size=n)
    cy1 = g.binomial(m, q[1], size=n)
    gtilde = ((m - cx1) * (m - cy1) + cx1 * cy1) / m**2
    emp = gtilde.var(ddof=1)
    centered = gtilde - gtilde.mean()
    se_var = math.sqrt((np.mean(centered**4) - emp**2) / n)
    ok = abs(emp - exact) <= 3 * se_var
    slack = est.collision_variance_bound(p, q, m) - exact
    ok = ok and slack >= 0.0
    _report(9, "collision variance: enumeration vs Monte Carlo vs bound", ok)


def test_10_dipe_end_to_end():
    res = run_experiment(
        ExperimentConfig("dipe-threshold", d=64, trials=500, seed=1000)
    )
    ok = (
        res.summary["wilson_lo_case1"] >= 2.0 / 3.0
        and res.summary["wilson_lo_case2"] >= 2.0 / 3.0
    )
    # one-way decider acceptance gap vs the closed-form trace distance
    d, k, n = 25, 3, 30_000
    root = RngStream(1001)
    gaps = np.empty(n)
    for t in range(n):
        tr = root.child(t)
        phi, psi = gen_dipe_instance(d, 2, tr.child(0))
        u = sym.standard_povm_sample(phi, k, tr.child(1))
        gaps[t] = est.pi0_reject_probability(u, psi, k) - est.pi0_reject_probability(
            u, phi, k
        )
    se = gaps.std(ddof=1) / math.sqrt(n)
    ok = ok and abs(gaps.mean() - sym.trace_distance_rho_u_block(d, k)) <= 3 * se
    _report(10, "threshold decider at d=64 and one-way acceptance gap", ok)


def test_11_swap_baselines():
    f, k, n = 0.5, 100, 100_000
    root = RngStream(1100)
    rejects = root.rng.binomial(k, (1 - f) / 2, size=n)
    w = 1.0 - 2.0 * rejects / k
    ok = abs(w.var(ddof=1) / est.swap_test_variance(f, k) - 1.0) <= 0.05
    pure = PureState(np.array([1, 0], dtype=complex)).density()
    ok = ok and est.generalized_swap_variance(pure, pure, 10) == 0.0
    _report(11, "SWAP-test baselines", ok)


def test_12_haar_moment_oracles():
    d, n = 4, 1_000_000
    g = np.random.default_rng(1200)
    mats = []
    for _ in range(4):
        z = g.standard_normal((d, d)) + 1j * g.standard_normal((d, d))
        mats.append((z + z.conj().T) / 2)
    psi = g.standard_normal((n, d)) + 1j * g.standard_normal((n, d))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    ok = True
    prods = np.ones(n)
    for k in range(1, 5):
        prods = prods * np.einsum("nd,de,ne->n", psi.conj(), mats[k - 1], psi).real
        exact = float(oracles.haar_moment_exact(mats[:k]).real)
        se = prods.std(ddof=1) / math.sqrt(n)
        ok = ok and abs(prods.mean() - exact) <= 3 * se
    for _ in range(100):
        q, gg, h, l = (complex(*g.standard_normal(2)) for _ in range(4))
        closed = oracles.phase_average_fourth_power(q, gg, h, l)
        quad = oracles.phase_average_fourth_power_quadrature(q, gg, h, l)
        ok = ok and abs(closed - quad) <= 1e-8 * max(1.0, abs(closed))
    _report(12, "Haar moment oracles and phase-average identity", ok)


def test_13_harness_equivalence():
    root = RngStream(1300)
    phi, psi = est.make_state_pair(8, 0.5, root.child(0))
    inputs = {Role.ALICE: phi, Role.BOB: psi}

    rng = root.child(1)
    direct1 = est.multicopy_estimate(phi, psi, 16, rng)
    a1, b1, r1 = multicopy_smp_strategies(16)
    t1 = run_protocol(Smp(), a1, b1, r1, inputs, rng)
    ok = t1.result["w"] == direct1.value and t1.result["raw"] == direct1.raw

    rng2 = root.child(2)
    direct2 = est.singlecopy_estimate(phi, psi, 2, 16, rng2)
    a2, b2, r2 = singlecopy_smp_strategies(8, 2, 16)
    t2 = run_protocol(Smp(), a2, b2, r2, inputs, rng2, shared_randomness=True)
    ok = ok and t2.result["w"] == direct2.value

    def msg(s, r_, i):
        return Message(i, s, r_, "scalar", 0.0, 8)

    illegal = [
        Transcript(Smp(), [msg(Role.ALICE, Role.BOB, 1)]),
        Transcript(OneWay(), [msg(Role.BOB, Role.REFEREE, 1), msg(Role.ALICE, Role.BOB, 2)]),
        Transcript(
            Interactive(max_rounds=1),
            [msg(Role.ALICE, Role.BOB, 1), msg(Role.BOB, Role.ALICE, 2)],
        ),
    ]
    ok = ok and all(validate_transcript(t) != "ok" for t in illegal)

    server = wire.FrameCollectorServer().start()
    try:
        tp = wire.open_transport(f"tcp:{server.address}")
        try:
            t_tcp = run_protocol(Smp(), a1, b1, r1, inputs, rng, transport=tp)
        finally:
            tp.close()
    finally:
        server.stop()
    ok = ok and t_tcp.result == t1.result
    ok = ok and all(
        np.array_equal(m1.payload, m2.payload)
        for m1, m2 in zip(t1.messages, t_tcp.messages)
    )
    _report(13, "protocol harness bit-identical, validator, transports", ok)
