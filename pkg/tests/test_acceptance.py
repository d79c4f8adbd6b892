"""Acceptance gate: one test, and one printed PASS/FAIL line, per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are also
collected into the terminal summary.  Criteria whose stated target disagrees
with the model are evaluated exactly as stated and allowed to fail.
"""
import time

import numpy as np
import pytest

from atomlaser.coherence import coherence_time, intensity_noise_spectrum
from atomlaser.criteria import evaluate_criteria
from atomlaser.dynamics import correlation_g1, correlation_g2, fit_linewidth, steady_state
from atomlaser.kinematics import BeamDescriptor, accelerate_beam, derive_beam_scales
from atomlaser.models import (ModelParams, eliminated_rates, generic_laser, ideal_laser,
                              linear_amplifier, micromaser_gain_apply, sg_laser,
                              three_mode_laser)
from atomlaser.operators import annihilation, random_density, trace_distance
from atomlaser.semiclassical import simulate_phase_diffusion
from atomlaser.superops import scaled_inverse_gain

from conftest import ACCEPTANCE_LINES
from oracles import poisson

BEAM = derive_beam_scales(BeamDescriptor("massive", 10.0, 0.01, mass=1.0))


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def rel(x, target):
    return abs(x - target) / abs(target)


def test_c01_ideal_steady_state_is_poisson():
    t0 = time.perf_counter()
    p = steady_state(ideal_laser(ModelParams(mu=5.0), 40)).populations
    wall = time.perf_counter() - t0
    q = poisson(5.0, 200)
    tv = 0.5 * (np.abs(p - q[:40]).sum() + q[40:].sum())
    record(1, tv <= 1e-6 and wall < 1.0, f"TV={tv:.2e} (<=1e-6), {wall:.3f}s (<1s)")


def test_c02_ideal_laser_second_order_coherent():
    t0 = time.perf_counter()
    tau = np.linspace(0, 10, 201)
    devs = {mu: float(np.abs(correlation_g2(ideal_laser(ModelParams(mu=mu), d), tau=tau).values - 1).max())
            for mu, d in ((5.0, 40), (20.0, 80))}
    wall = time.perf_counter() - t0
    worst = max(devs.values())
    record(2, worst <= 1e-8 and wall < 30,
           f"max|g2-1| mu=5: {devs[5.0]:.1e}, mu=20: {devs[20.0]:.1e} (<=1e-8), {wall:.2f}s")


def test_c03_linewidth_and_sg_halving():
    t0 = time.perf_counter()
    tau = np.linspace(0, 400, 801)
    gi = fit_linewidth(correlation_g1(ideal_laser(ModelParams(mu=20.0), 80), tau=tau)).gamma
    gs = fit_linewidth(correlation_g1(sg_laser(ModelParams(mu=20.0), 80), tau=tau)).gamma
    wall = time.perf_counter() - t0
    ok = rel(gi, 0.025) <= 0.10 and rel(gs / gi, 0.5) <= 0.15 and wall < 60
    record(3, ok, f"Gamma_ideal={gi:.5f} vs 0.025 (10%), Gamma_sg/Gamma_ideal={gs / gi:.4f} vs 0.5 (15%)")


def test_c04_coherence_time_times_flux():
    L = ideal_laser(ModelParams(mu=20.0), 80)
    g1 = correlation_g1(L, tau=np.linspace(0, 800, 1601))
    value = g1.flux * coherence_time(g1)
    gamma = fit_linewidth(g1).gamma
    record(4, rel(value, 800) <= 0.15,
           f"tau_coh*<I>={value:.1f} vs 2mu^2=800 (15%); <I>/Gamma={g1.flux / gamma:.1f}")


def test_c05_linear_amplifier():
    mu = 4.0
    L = linear_amplifier(ModelParams(mu=mu), 80)
    rho = steady_state(L)
    mean = float(np.arange(80) @ rho.populations)
    tau = np.linspace(0, 50, 1001)
    g1 = correlation_g1(L, tau=tau, rho_ss=rho)
    g2 = correlation_g2(L, tau=tau, rho_ss=rho)
    s0 = float(intensity_noise_spectrum(g2, omega=np.array([0.0])).values[0])
    ref = np.exp(-tau / (2 * (mu + 1)))
    g1_err = float(np.max(np.abs(np.abs(g1.values) - ref) / ref))
    parts = {"<n>": abs(mean - mu) <= 1e-6, "g2(0)": rel(g2.values[0], 2) <= 0.01,
             "S(0)": rel(s0, 41) <= 0.05, "g1": g1_err <= 0.02}
    record(5, all(parts.values()),
           f"<n>-4={mean - mu:.2e} (1e-6), g2(0)={g2.values[0]:.5f}, S(0)={s0:.3f}, "
           f"max rel |g1| err={g1_err:.1e}; failing: {[k for k, v in parts.items() if not v]}")


def test_c06_generic_above_threshold():
    L = generic_laser(ModelParams(n_s=50.0, theta=2.0), 120)
    rho = steady_state(L)
    n = np.arange(120)
    p = rho.populations
    mean = float(n @ p)
    var = float(n * n @ p - mean ** 2)
    g2_excess = float(n * (n - 1) @ p / mean ** 2 - 1)
    g1 = correlation_g1(L, tau=np.linspace(0, 300, 601), rho_ss=rho)
    ratio = g1.flux / fit_linewidth(g1).gamma
    ok = (rho.tail_bound < 1e-6 and rel(mean, 50) <= 0.05 and rel(var, 100) <= 0.10
          and rel(g2_excess, 0.02) <= 0.20 and rel(ratio, 5000) <= 0.15)
    record(6, ok, f"tail={rho.tail_bound:.1e}, <n>={mean:.4f}, Var={var:.3f}, "
                  f"g2(0)-1={g2_excess:.5f}, flux/Gamma={ratio:.0f}")


def test_c07_generic_below_threshold():
    # n_s is not fixed by the criterion; the below-threshold formulas hold for n_s >> 1
    L = generic_laser(ModelParams(n_s=1000.0, theta=0.5), 40)
    rho = steady_state(L)
    tau = np.linspace(0, 40, 801)
    g1 = correlation_g1(L, tau=tau, rho_ss=rho)
    g2 = correlation_g2(L, tau=tau, rho_ss=rho)
    gamma = fit_linewidth(g1).gamma
    report = evaluate_criteria(BEAM, g2, g1)
    unity = g1.flux / gamma
    ok = (rel(g1.mean_n, 1.0) <= 0.02 and rel(gamma, 0.5) <= 0.05 and rel(unity, 2.0) <= 0.15
          and report.verdict == "not-laser" and "condition4" in report.failed())
    record(7, ok, f"n_s=1000: <n>={g1.mean_n:.4f}, Gamma={gamma:.4f}, <I>/Gamma={unity:.3f}, "
                  f"tau_coh*<I>={report.condition4.value:.3f}, verdict={report.verdict} "
                  f"failed={report.failed()}")


def test_c08_adiabatic_elimination():
    t0 = time.perf_counter()
    rows = []
    for g in (200.0, 500.0, 1000.0):
        p = ModelParams(g=g, lam=50 * g, gamma=100.0, N=0.02)
        full = steady_state(three_mode_laser(p, (15, 2, 3)))
        n_full = float(full.marginal_populations(0) @ np.arange(15))
        # the stated 2x3 cutoffs leave ~1e-4 in the top b/c levels; 3x5 converges
        wide = steady_state(three_mode_laser(p, (15, 3, 5)))
        assert wide.tail_bound < 1e-6
        assert rel(float(wide.marginal_populations(0) @ np.arange(15)), n_full) < 0.01
        nu = p.gamma * p.N / p.kappa
        stated = steady_state(generic_laser(ModelParams(nu=nu, n_s=p.gamma * p.lam / g ** 2), 60))
        energy = steady_state(generic_laser(ModelParams(nu=nu, n_s=eliminated_rates(p)["n_s"]), 60))
        rows.append((g, n_full, float(np.arange(60) @ stated.populations),
                     float(np.arange(60) @ energy.populations)))
    wall = time.perf_counter() - t0
    ok = all(rel(s, f) <= 0.10 for _, f, s, _ in rows) and wall < 300
    detail = "; ".join(f"g={g:g}: full={f:.4f} n_s=gamma*lam/g^2 -> {s:.4f}, "
                       f"n_s=gamma*lam/(4g^2) -> {e:.4f}" for g, f, s, e in rows)
    record(8, ok, detail + f" ({wall:.1f}s)")


def test_c09_micromaser_gain_map():
    d = 14
    a_dag = annihilation(d).conj().T
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(5):
        rho = random_density(d, rng, support=11)
        closed = scaled_inverse_gain(a_dag)(rho.data) + rho.data   # J[a+] A[a+]^-1 rho
        worst = max(worst, trace_distance(micromaser_gain_apply(rho, 0.01).state, closed))
    record(9, worst <= 1e-3, f"max trace distance over 5 random states={worst:.2e} (<=1e-3)")


def test_c10_phase_diffusion():
    gamma = 0.05
    ens = simulate_phase_diffusion(gamma, 0.01 / gamma, 80.0, 10_000, seed=2026)
    mean, err = ens.coherence()
    z = np.abs(mean.real - np.exp(-0.5 * gamma * ens.times))[1:] / err[1:]
    # quantum |g1| of the ideal laser against the SDE at Gamma = kappa/(2 mu)
    sde = simulate_phase_diffusion(0.025, 0.4, 80.0, 10_000, seed=2026)
    m2, _ = sde.coherence()
    q = correlation_g1(ideal_laser(ModelParams(mu=20.0), 80), tau=sde.times)
    dev = float(np.max(np.abs(m2.real - np.abs(q.values)) / np.abs(q.values)))
    record(10, z.max() <= 3 and dev <= 0.10,
           f"max |SDE - exp(-Gamma tau/2)|/sigma={z.max():.2f} (<=3) over {len(z)} lags; "
           f"max rel dev from quantum |g1|={dev:.3f} (<=10%)")


def test_c11_beam_kinematics():
    rng = np.random.default_rng(11)
    worst_double = worst_comp = 0.0
    for _ in range(200):
        k, dk, m, hbar = np.exp(rng.uniform(-3, 3, 4))
        b = derive_beam_scales(BeamDescriptor("massive", k, dk, mass=m, hbar=hbar))
        s0 = 1 / (2 * dk)
        var_ratio = 1 + (hbar * b.tau_disp / (2 * m * s0 ** 2)) ** 2
        worst_double = max(worst_double, abs(var_ratio - 2) / 2)
        z1, z2 = np.exp(rng.uniform(-1, 1, 2))
        twice, once = accelerate_beam(accelerate_beam(b, z1), z2), accelerate_beam(b, z1 * z2)
        worst_comp = max(worst_comp, rel(twice.k_bar, once.k_bar), rel(twice.delta_k, once.delta_k),
                         rel(twice.delta_omega, b.delta_omega))
    w = derive_beam_scales(BeamDescriptor("massive", 10.0, 0.1, mass=1.0))
    exact = (w.tau_disp == 50.0 and w.l_disp == 500.0 and accelerate_beam(w, 2.0).l_disp == 4000.0)
    record(11, worst_double <= 1e-12 and worst_comp <= 1e-12 and exact,
           f"doubling err={worst_double:.1e}, composition err={worst_comp:.1e}, "
           f"worked numbers exact={exact}")


def _gate(L, tau):
    rho = steady_state(L)
    return evaluate_criteria(BEAM, correlation_g2(L, tau=tau, rho_ss=rho),
                             correlation_g1(L, tau=tau, rho_ss=rho))


def test_c12_criteria_gate():
    ideal = _gate(ideal_laser(ModelParams(mu=20.0), 80), np.linspace(0, 800, 1601))
    amp = _gate(linear_amplifier(ModelParams(mu=4.0), 80), np.linspace(0, 100, 401))
    below = _gate(generic_laser(ModelParams(n_s=1000.0, theta=0.5), 40), np.linspace(0, 40, 401))
    again = _gate(ideal_laser(ModelParams(mu=20.0), 80), np.linspace(0, 800, 1601))
    ok = (ideal.verdict == "laser" and amp.verdict == "not-laser" and "condition3" in amp.failed()
          and below.verdict == "not-laser" and "condition4" in below.failed()
          and ideal.to_dict() == again.to_dict())
    record(12, ok, f"ideal={ideal.verdict}, linear_amp={amp.verdict} {amp.failed()}, "
                   f"theta=0.5={below.verdict} {below.failed()}, deterministic={ideal.to_dict() == again.to_dict()}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
