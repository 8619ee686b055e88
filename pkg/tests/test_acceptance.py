"""Acceptance suite: one test per shipped criterion, at pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.  Criterion 6c is expected to fail: see its docstring for the
arithmetic.
"""

import time

import numpy as np

import discgame as dg
from discgame.cli import bench_table
from discgame.closedform import laplace_period, laplace_population
from discgame.hamiltonian import (
    LaplaceUnit,
    MetaSystem,
    ParticleCloud,
    ProductMarginals,
    ReplicatorSystem,
    UniformInterval,
    hamiltonian,
    hess_hamiltonian,
)

from conftest import (
    RPS_ENTRIES,
    random_skew,
    random_weights,
    rk4_solve,
    weighted_frobenius_sq,
)
from test_analysis import _hausdorff_to_polygon, axis_amplitude_for_log_level


def report(tag, ok, detail):
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {tag}: {detail}")
    assert ok, f"criterion {tag}: {detail}"


def test_c01_reconstruction_50_random_games():
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(5, 101))
        pm = dg.PayoutMatrix(random_skew(n, rng), weights=random_weights(n, rng))
        emb = dg.embed(pm)
        err = np.max(np.abs(dg.reconstruct_matrix(emb) - pm.entries))
        worst = max(worst, err / np.max(np.abs(pm.entries)))
    elapsed = time.perf_counter() - start
    report("1", worst < 1e-9 and elapsed < 5.0,
           f"max relative entry error {worst:.2e} (< 1e-9), "
           f"runtime {elapsed:.2f}s (< 5s)")


def test_c02_truncation_error_law():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(10):
        n = int(rng.integers(8, 40))
        pm = dg.PayoutMatrix(random_skew(n, rng), weights=random_weights(n, rng))
        emb = dg.embed(pm)
        for kept in range(1, emb.n_blocks):
            cut = dg.truncate(emb, 2 * kept)
            brute = weighted_frobenius_sq(
                dg.reconstruct_matrix(cut) - pm.entries, pm.weights)
            law = 2.0 * float(np.sum(emb.omegas[kept:] ** 2))
            worst = max(worst, abs(brute - law) / law)
    report("2", worst < 1e-9,
           f"truncation error matches 2·Σ tail ω² to {worst:.2e} (< 1e-9 rel)")


def test_c03_rps_fixture():
    pm = dg.PayoutMatrix(RPS_ENTRIES, labels=["rock", "paper", "scissors"])
    emb = dg.embed(pm)
    recon_err = np.max(np.abs(dg.reconstruct_matrix(emb) - RPS_ENTRIES))
    centroid = np.max(np.abs(emb.weights @ emb.coords))
    interior = dg.origin_in_hull_interior(emb.coords)
    ok = emb.rank == 2 and recon_err < 1e-10 and centroid < 1e-12 and interior
    report("3", ok,
           f"rank {emb.rank} (=2), payout error {recon_err:.1e} (< 1e-10), "
           f"centroid {centroid:.1e} (< 1e-12), origin interior {interior}")


def test_c04_dual_route_oracle():
    pm = dg.make_random_lowrank(100, 4, seed=17)
    emb = dg.embed(pm)
    rng = np.random.default_rng(9)
    w0 = rng.uniform(0.5, 1.5, 100)
    w0 /= w0.sum()
    dt = 5e-4
    latent = dg.integrate(ReplicatorSystem(ParticleCloud(emb.coords, w0)),
                          np.zeros(4), 10.0, dt, record_every=1000)
    dense = dg.direct_replicator(pm, w0, dt=dt, t_max=10.0, record_every=1000)
    mapped = w0[None, :] * np.exp(latent.thetas @ emb.coords.T)
    rel = float(np.max(np.abs(mapped - dense.weights) / dense.weights))
    report("4", rel < 1e-6,
           f"latent weights match dense RK4 replicator to {rel:.2e} (< 1e-6)")


def _conservation_case(builder):
    def drift_for(dt, scale=1):
        traj = builder(dt)
        return float(np.max(np.abs(traj.hamiltonians - traj.hamiltonians[0]))
                     / abs(traj.hamiltonians[0]))
    d_coarse = drift_for(0.01)
    d_fine = drift_for(0.005)
    return d_coarse, d_coarse / d_fine


def test_c05_conservation_and_order():
    rng = np.random.default_rng(5)
    base = dg.embed(dg.make_random_lowrank(50, 4, seed=3)).coords[:, :2]
    pts = np.concatenate([base, -base])
    masses = np.concatenate([rng.uniform(0.5, 1.5, 50)] * 2) / 2
    amps = {"linear": 0.25, "saturating": 0.6, "allee": 0.6}
    lines = []
    ok = True
    for growth, amp in amps.items():
        sys_ = ReplicatorSystem(ParticleCloud(pts, masses), growth=growth)
        drift, ratio = _conservation_case(
            lambda dt, s=sys_, a=amp: dg.integrate(s, [a, 0.0], 50.0, dt,
                                                   record_every=20))
        ok = ok and drift < 1e-6 and 3.0 <= ratio <= 5.0
        lines.append(f"{growth}: drift {drift:.2e}, halving ratio {ratio:.2f}")
    meta = MetaSystem([ReplicatorSystem(ParticleCloud(pts, masses)),
                       ReplicatorSystem(ParticleCloud(0.8 * pts, masses))],
                      [[1.0, 0.2], [0.2, 1.0]])
    drift, ratio = _conservation_case(
        lambda dt: dg.integrate_meta(meta, [0.2, 0.0, 0.0, 0.15], 50.0, dt,
                                     record_every=20))
    ok = ok and drift < 1e-6 and 3.0 <= ratio <= 5.0
    lines.append(f"2-patch meta: drift {drift:.2e}, halving ratio {ratio:.2f}")
    report("5", ok, "; ".join(lines) + "  (all < 1e-6, ratios in [3,5])")


LAPLACE_SYS = ReplicatorSystem(ProductMarginals([LaplaceUnit(), LaplaceUnit()]),
                               rate_mode="constant")


def test_c06a_laplace_trajectory_match():
    worst = 0.0
    for a in (0.2, 0.6, 0.9):
        period = laplace_period(a)
        total = laplace_population(a)
        traj = dg.integrate(LAPLACE_SYS, [0.0, a], period, period / 40000,
                            record_every=100)
        closed = np.array([dg.laplace_oscillator(a, total, t)
                           for t in traj.times])
        worst = max(worst, float(np.max(np.abs(traj.thetas - closed))))
    report("6a", worst < 1e-6,
           f"orbit matches a·sn/cn/dn over one period to {worst:.2e} (< 1e-6)")


def test_c06b_laplace_period_formula():
    worst = 0.0
    for a in (0.2, 0.6, 0.9):
        expected = laplace_period(a)
        traj = dg.integrate(LAPLACE_SYS, [0.0, a], 2.2 * expected,
                            expected / 40000, record_every=20)
        measured = dg.period_estimate(traj, np.zeros(2))
        worst = max(worst, abs(measured - expected) / expected)
    report("6b", worst < 1e-4,
           f"measured period matches 2(1-a²)K(a²) to {worst:.2e} (< 1e-4 rel)")


def test_c06c_small_amplitude_period_limit():
    """Measured period at a = 0.05 versus the harmonic limit π.

    The exact period is 2 (1 − a²) K(a²) = π (1 − 3a²/4 + O(a⁴)); at
    a = 0.05 that is π · 0.998124, a relative deviation of 1.88e-3, so the
    1e-3 gate asserted here cannot be met by the true dynamics.  The test
    is kept at its stated tolerance and is expected to fail.
    """
    a = 0.05
    expected = laplace_period(a)
    traj = dg.integrate(LAPLACE_SYS, [0.0, a], 2.2 * expected,
                        expected / 20000, record_every=20)
    measured = dg.period_estimate(traj, np.zeros(2))
    gap = abs(measured - np.pi) / np.pi
    report("6c", gap < 1e-3,
           f"period at a=0.05 is {measured:.6f} vs π: relative gap {gap:.2e} "
           f"(gate 1e-3; true value of the gap is 3a²/4 = 1.88e-3)")


def test_c07_closed_forms_vs_ode_oracles():
    lines = []
    ok = True

    y0 = np.array([0.7, -0.4])
    oracle = rk4_solve(lambda t, y: np.array([y[1], -y[0]]), y0, 0, 10.0, 40000)
    err = float(np.max(np.abs(dg.self_play(y0, 10.0) - oracle)))
    ok &= err < 1e-6
    lines.append(f"self-play {err:.1e}")

    def lag(t, s):
        y, avg = s[:2], s[2:]
        return np.concatenate([[avg[1], -avg[0]], (y - avg) / t])

    t0 = 1e-8
    state = np.concatenate([dg.fictitious_self_play(t0), [0.0, 1.0]])
    worst = 0.0
    for t1 in (0.5, 2.0, 5.0, 10.0):
        state = rk4_solve(lag, state, t0, t1, 100000)
        worst = max(worst, float(np.max(np.abs(
            dg.fictitious_self_play(t1) - state[:2]))))
        t0 = t1
    ok &= worst < 1e-6
    lines.append(f"fictitious {worst:.1e}")

    rng = np.random.default_rng(3)
    ys0 = rng.standard_normal((5, 2))

    def sga(t, flat):
        y = flat.reshape(5, 2)
        v = y.mean(axis=0)[None, :] - y / 5.0
        return np.column_stack([v[:, 1], -v[:, 0]]).ravel()

    oracle = rk4_solve(sga, ys0.ravel(), 0, 10.0, 100000).reshape(5, 2)
    err = float(np.max(np.abs(dg.sga_epicycles(ys0, 10.0) - oracle)))
    ok &= err < 1e-6
    lines.append(f"epicycles {err:.1e}")

    ratings = np.array([0.8, 0.2, -0.1, -0.9])
    w0 = np.array([0.1, 0.4, 0.3, 0.2])

    def repl(t, w):
        return w * ((ratings[:, None] - ratings[None, :]) @ w)

    oracle = rk4_solve(repl, w0, 0, 4.0, 40000)
    err = float(np.max(np.abs(dg.transitive_density(ratings, w0, 1.0, 4.0)
                              - oracle)))
    ok &= err < 1e-6
    lines.append(f"transitive {err:.1e}")

    def moments(t, s):
        return np.array([s[1] * 0.0, s[1] ** 2 * -1.0])  # (xbar, sigma), d=1

    oracle = rk4_solve(moments, np.array([0.0, 1.0]), 0, 3.0, 30000)
    _, sigma = dg.gaussian_quadratic([0.0], [[1.0]], [0.0], [[-1.0]], [[0.0]],
                                     3.0)
    err = abs(sigma[0, 0] - oracle[1])
    ok &= err < 1e-6 and abs(sigma[0, 0] - 0.25) < 1e-12
    lines.append(f"gaussian Σ {err:.1e}")

    report("7", ok, "closed forms vs RK4: " + ", ".join(lines) + " (all < 1e-6)")


def test_c08_recurrence_dichotomy():
    rng = np.random.default_rng(31)
    checked_interior = checked_divergent = 0
    ok = True
    for trial in range(50):
        if trial % 2 == 0:
            half = rng.standard_normal((int(rng.integers(4, 9)), 2))
            pts = np.concatenate([half, -half])
        else:
            pts = rng.standard_normal((int(rng.integers(8, 16)), 2)) * 0.5
            direction = rng.standard_normal(2)
            direction /= np.linalg.norm(direction)
            pts += (0.4 - np.min(pts @ direction)) * direction
        sys_ = ReplicatorSystem(ParticleCloud(pts, np.full(len(pts),
                                                           1.0 / len(pts))),
                                rate_mode="constant")
        interior = dg.origin_in_hull_interior(pts)
        equilibrium = dg.find_equilibrium(sys_)
        ok &= (equilibrium is not None) == interior
        theta0 = np.array([0.4, 0.0])
        if interior:
            traj = dg.integrate(sys_, theta0, 1000.0, 0.02, record_every=5,
                                divergence_threshold=250.0)
            ok &= not traj.divergent
            ok &= dg.recurrence_return(traj, theta0, 0.05) is not None
            checked_interior += 1
        else:
            traj = dg.integrate(sys_, theta0, 1000.0, 0.05, record_every=10,
                                divergence_threshold=250.0)
            ok &= dg.recurrence_return(traj, theta0, 0.05) is None
            norm_centroid = traj.centroids[-1]
            ok &= abs(dg.boundary_proximity(pts, norm_centroid)) < 0.01
            checked_divergent += 1
    report("8", ok and checked_interior == 25 and checked_divergent == 25,
           f"{checked_interior} recurrent and {checked_divergent} "
           "boundary-seeking clouds all satisfy "
           "equilibrium ⇔ origin interior ⇔ return within ε=0.05")


def test_c09_linearization_periods():
    rng = np.random.default_rng(13)
    lines = []
    ok = True
    for trial in range(3):
        half = rng.standard_normal((8, 2)) * rng.uniform(0.6, 1.2)
        pts = np.concatenate([half, -half])
        masses = np.concatenate([rng.uniform(0.5, 1.5, 8)] * 2) / 16
        sys_ = ReplicatorSystem(ParticleCloud(pts, masses))
        theta_star = dg.find_equilibrium(sys_)
        total = hamiltonian(sys_, theta_star)
        # ω₁ from re-embedding the latent payout under the stationary measure
        f = pts[:, [0]] @ pts[:, [1]].T - pts[:, [1]] @ pts[:, [0]].T
        stationary = ReplicatorSystem(ParticleCloud(pts, masses)) \
            .current_weights(theta_star)
        pm = dg.PayoutMatrix(f, weights=stationary / stationary.sum())
        omega1 = dg.embed(pm).omegas[0]
        predicted = 2 * np.pi / (total * omega1)
        freqs = dg.linearization_frequencies(sys_, theta_star)
        amp = 1e-3
        traj = dg.integrate(sys_, theta_star + [amp, 0.0], 3.2 * predicted,
                            predicted / 4000, record_every=4)
        measured = dg.period_estimate(traj, theta_star)
        gap = abs(measured - predicted) / predicted
        ok &= gap < 0.01
        ok &= abs(freqs[0] - total * omega1) / (total * omega1) < 1e-8
        lines.append(f"period {measured:.4f} vs 2π/(Pω₁) {predicted:.4f} "
                     f"({gap:.2e})")
    report("9", ok, "; ".join(lines) + "  (all within 1%)")


def test_c10_adaptive_dynamics_identity():
    rng = np.random.default_rng(21)
    half = rng.standard_normal((8, 2))
    pts = np.concatenate([half, -half])
    masses = np.concatenate([rng.uniform(0.5, 1.5, 8)] * 2) / 16
    sys_ = ReplicatorSystem(ParticleCloud(pts, masses))
    dt = 1e-3
    traj = dg.integrate(sys_, [0.5, 0.1], 2.0, dt, record_every=1)
    worst = 0.0
    for k in range(1, len(traj.times) - 1):
        fd = (traj.centroids[k + 1] - traj.centroids[k - 1]) / (2 * dt)
        theta = traj.thetas[k]
        predicted = hess_hamiltonian(sys_, theta) @ dg.rhs(sys_, theta)
        scale = max(1.0, float(np.max(np.abs(predicted))))
        worst = max(worst, float(np.max(np.abs(fd - predicted))) / scale)
    report("10", worst < 1e-4,
           f"finite-difference dȳ/dt matches Hess·U·∇H to {worst:.2e} "
           "(< 1e-4 rel at dt=1e-3)")


def test_c11_dual_polygon_limit():
    sys_ = ReplicatorSystem(ProductMarginals([UniformInterval(1.0),
                                              UniformInterval(1.0)]),
                            rate_mode="constant")
    log_level = 60.0  # conserved population e^60, far above the 1e6 floor
    amp = axis_amplitude_for_log_level(log_level)
    traj = dg.integrate(sys_, [amp, 0.0], 6.0 * amp, 0.02, record_every=5)
    pts = traj.thetas / np.max(np.abs(traj.thetas))
    diamond = np.array([[1, 0], [0, -1], [-1, 0], [0, 1]], dtype=float)
    dist = _hausdorff_to_polygon(pts, diamond)
    report("11", dist < 0.05,
           f"sup-normalized orbit at population level e^60 within Hausdorff "
           f"{dist:.3f} of the diamond (< 0.05)")


def test_c12_ipd_population_run():
    start = time.perf_counter()
    config = dg.IpdConfig(replicates=200, seed=0)
    agents, pm = dg.ipd_population(100, seed=42, config=config)
    elapsed = time.perf_counter() - start
    skew_gap = np.max(np.abs(pm.entries + pm.entries.T))
    emb = dg.embed(pm)
    monotone = bool(np.all(np.diff(emb.shares) <= 1e-12))
    ok = (elapsed < 600.0 and skew_gap == 0.0 and monotone
          and emb.shares[0] > 0.5)
    report("12", ok,
           f"n=100, 200 replicates in {elapsed:.1f}s (< 600s); payout exactly "
           f"skew; shares non-increasing with leading share "
           f"{emb.shares[0]:.2f} (> 0.5)")


def test_c13_performance_decoupling(tmp_path):
    rows = bench_table(trait_dims=(3, 30), direct_sizes=(200, 1600),
                       particles=400, steps=300)
    latent = {size: sec for mode, size, _, _, sec in rows if mode == "latent"}
    direct = {size: sec for mode, size, _, _, sec in rows if mode == "direct"}
    ratio_latent = max(latent.values()) / min(latent.values())
    ratio_direct = direct[1600] / direct[200]
    out = tmp_path / "bench.csv"
    with open(out, "w") as fh:
        fh.write("mode,size,rank,particles,sec_per_step\n")
        for mode, size, rank, particles, sec in rows:
            fh.write(f"{mode},{size},{rank},{particles},{sec!r}\n")
    ok = ratio_latent < 2.0 and ratio_direct > 2.0 and out.exists()
    report("13", ok,
           f"latent cost trait-dim 30 vs 3 differs by ×{ratio_latent:.2f} "
           f"(< 2); dense stepping n=1600 vs 200 grows ×{ratio_direct:.1f} "
           f"(> 2); table at {out}")
