"""Limit map: one-step oracle, cubic law, saturation, axis structure."""

import numpy as np
import pytest

import dkrotor as dk
from dkrotor.pseudoclassical import (
    RescaledParams,
    axis_persistence,
    cubic_energy,
    cubic_energy_rescaled,
    evolve_ensemble,
    map_step,
    off_axis_fraction,
    phase_portrait,
    saturation_estimates,
    uniform_ensemble,
    va_one_step,
)
from dkrotor.quantum import PlanckSpec

K = 5.0
PLANCK = PlanckSpec(1, 1, 1e-3)
PARAMS = RescaledParams.from_planck(K, PLANCK)


class TestRescaledParams:
    def test_values(self):
        hbar = 2 * np.pi + 1e-3
        assert PARAMS.ktilde == pytest.approx(5e-3 / hbar, rel=1e-12)
        assert PARAMS.delta == pytest.approx(2 * PARAMS.ktilde / np.pi, rel=1e-12)
        assert PARAMS.energy_rescale == pytest.approx((hbar / 1e-3) ** 2, rel=1e-12)

    def test_rejects_bad_kick(self):
        with pytest.raises(ValueError):
            RescaledParams.from_planck(-1.0, PLANCK)


class TestOneStepOracle:
    def test_branch_for_branch_equivalence(self):
        # momenta match exactly; angles agree to the last couple of ulps,
        # which is the rounding of the composite rotation in map_step
        rng = np.random.default_rng(42)
        theta0 = -np.pi + 2 * np.pi * rng.random(10_000)
        p0 = np.zeros_like(theta0)
        th_map, p_map = map_step(theta0, p0, dk.va(), PARAMS)
        th_or, p_or = va_one_step(theta0, PARAMS)
        assert np.array_equal(p_map, p_or)
        assert np.max(np.abs(th_map - th_or)) < 2e-15

    def test_interior_branches(self):
        delta = PARAMS.ktilde * (2.0 / np.pi)
        th, p = map_step(1.0, 0.0, dk.va(), PARAMS)
        assert p == 0.0 and th == pytest.approx(1.0 + delta, abs=1e-15)
        th, p = map_step(-1.0, 0.0, dk.va(), PARAMS)
        assert p == 0.0 and th == pytest.approx(-1.0 - delta, abs=1e-15)

    def test_edge_branches(self):
        delta = PARAMS.ktilde * (2.0 / np.pi)
        theta0 = np.pi - 0.5 * delta
        th, p = map_step(theta0, 0.0, dk.va(), PARAMS)
        assert p == pytest.approx(2 * delta, rel=1e-15)
        assert th == pytest.approx(theta0 - delta, abs=1e-14)
        theta0 = -np.pi + 0.25 * delta
        th, p = map_step(theta0, 0.0, dk.va(), PARAMS)
        assert p == pytest.approx(-2 * delta, rel=1e-15)
        assert th == pytest.approx(theta0 + delta, abs=1e-14)

    def test_branch_populations(self):
        rng = np.random.default_rng(7)
        theta0 = -np.pi + 2 * np.pi * rng.random(200_000)
        _, p1 = va_one_step(theta0, PARAMS)
        frac_up = np.mean(p1 > 0)
        frac_down = np.mean(p1 < 0)
        width = PARAMS.ktilde * (2.0 / np.pi) / (2 * np.pi)
        assert frac_up == pytest.approx(width, abs=4 * np.sqrt(width / 200_000))
        assert frac_down == pytest.approx(width, abs=4 * np.sqrt(width / 200_000))


class TestZeroKick:
    def test_map_is_identity(self):
        params0 = RescaledParams(ktilde=0.0, hbar=2 * np.pi, tilde=0.0, K=K)
        rng = np.random.default_rng(3)
        theta = -np.pi + 2 * np.pi * rng.random(1000)
        p = rng.normal(size=1000)
        th1, p1 = map_step(theta, p, dk.va(), params0)
        assert np.array_equal(p1, p)
        assert np.max(np.abs(th1 - theta)) < 1e-12


class TestCubicLaw:
    def test_values(self):
        d = PARAMS.delta
        assert cubic_energy(0, PARAMS) == 0.0
        assert cubic_energy(1, PARAMS) == pytest.approx(2 * d**3 / np.pi, rel=1e-12)

    def test_domain_error_past_saturation(self):
        t_s, _ = saturation_estimates(PARAMS)
        with pytest.raises(ValueError):
            cubic_energy(int(t_s) + 1, PARAMS)

    def test_ensemble_matches_within_monte_carlo_error(self):
        steps = 3000
        ens = uniform_ensemble(10_000, seed=0, stratified=True)
        rec = dk.log_record_times(steps)
        series = evolve_ensemble(
            ens, dk.va(), PARAMS, steps, record_times=rec, with_stderr=True
        )
        m = series.t >= 1
        pred = cubic_energy_rescaled(series.t[m], PARAMS)
        z = np.abs(series.E[m] - pred) / series.stderr[m]
        assert np.all(series.stderr[m] > 0)
        assert z.max() < 3.0


class TestSaturation:
    def test_estimates(self):
        t_s, E_s = saturation_estimates(PARAMS)
        hbar = PLANCK.hbar
        assert t_s == pytest.approx(np.pi**2 * hbar / (2 * K * 1e-3), rel=1e-12)
        assert t_s == pytest.approx(6.2e3, rel=0.01)
        assert E_s == pytest.approx(0.5 * (2 * np.pi) ** 2 * (hbar / 1e-3) ** 2, rel=1e-12)
        # the plateau estimate is the paper's ~8e8 figure
        assert E_s == pytest.approx(8e8, rel=0.05)

    def test_detuning_scaling(self):
        half = RescaledParams.from_planck(K, PlanckSpec(1, 1, 0.5e-3))
        t_s, E_s = saturation_estimates(PARAMS)
        t_s2, E_s2 = saturation_estimates(half)
        assert t_s2 / t_s == pytest.approx(2.0, rel=1e-3)
        assert E_s2 / E_s == pytest.approx(4.0, rel=1e-3)

    def test_undefined_at_zero_detuning(self):
        params0 = RescaledParams(ktilde=0.0, hbar=2 * np.pi, tilde=0.0, K=K)
        with pytest.raises(ValueError):
            saturation_estimates(params0)

    def test_energy_bounded_long_past_saturation(self):
        # the 2*pi momentum period keeps E within a factor 2 of the plateau
        t_s, E_s = saturation_estimates(PARAMS)
        steps = int(10 * t_s)
        ens = uniform_ensemble(2000, seed=1, stratified=True)
        rec = np.unique(np.linspace(2 * t_s, steps, 60).astype(int))
        series = evolve_ensemble(ens, dk.va(), PARAMS, steps, record_times=rec)
        late = series.t >= 2 * t_s
        assert np.all(series.E[late] > E_s / 2)
        assert np.all(series.E[late] < E_s * 2)


class TestAxisStructure:
    def test_persistence_va(self):
        frac = axis_persistence(dk.va(), PARAMS, samples=1_000_000, seed=2)
        expected = 1.0 - PARAMS.delta / np.pi
        sigma = np.sqrt(PARAMS.delta / np.pi / 1_000_000)
        assert frac == pytest.approx(expected, abs=5 * sigma)

    def test_persistence_vb(self):
        frac = axis_persistence(dk.vb(), PARAMS, samples=200_000, seed=2)
        assert frac > 1.0 - 10 * PARAMS.delta

    def test_persistence_vc_zero(self):
        frac = axis_persistence(dk.vc(), PARAMS, samples=50_000, seed=2)
        assert frac < 1e-3

    def test_persistence_zero_kick(self):
        params0 = RescaledParams(ktilde=0.0, hbar=2 * np.pi, tilde=0.0, K=K)
        assert axis_persistence(dk.va(), params0, samples=10_000) == 1.0

    def test_off_axis_fraction_grows_linearly(self):
        ens = uniform_ensemble(100_000, seed=4, stratified=True)
        frac = off_axis_fraction(ens, dk.va(), PARAMS, steps=500)
        t = np.arange(1, 501)
        slope = np.polyfit(t, frac, 1)[0]
        assert slope == pytest.approx(PARAMS.delta / np.pi, rel=0.05)


class TestPhasePortrait:
    def test_va_axis_point_drifts_then_climbs(self):
        # drift to +pi takes (pi-1)/delta steps, the climb to the 2*pi line
        # another pi/delta at speed 2*delta per step
        t_s, _ = saturation_estimates(PARAMS)
        (theta, p), = phase_portrait(dk.va(), PARAMS, [(1.0, 0.0)], int(1.8 * t_s))
        d = PARAMS.delta
        n_drift = int((np.pi - 1.0) / d) - 2
        assert np.all(p[:n_drift] == 0.0)
        drift = np.diff(theta[:n_drift])
        assert np.max(np.abs(drift - d)) < 1e-12
        climb = p[n_drift + 10 :]
        climb = climb[climb > 0]
        assert np.max(np.abs(np.diff(climb)[:100] - 2 * d)) < 1e-12
        # reaches the neighbourhood of the (0, 2*pi) structure
        assert p.max() > 5.5

    def test_vc_leaves_axis_immediately(self):
        (theta, p), = phase_portrait(dk.vc(), PARAMS, [(1.0, 0.0)], 5)
        assert abs(p[1]) > 1e-4

    def test_zero_kick_horizontal_lines(self):
        params0 = RescaledParams(ktilde=0.0, hbar=2 * np.pi, tilde=0.0, K=K)
        orbits = phase_portrait(dk.va(), params0, [(0.5, 1.0), (-0.5, 2.5)], 50)
        for theta, p in orbits:
            assert np.ptp(p) < 1e-12

    def test_momentum_wrapped_for_display(self):
        (theta, p), = phase_portrait(dk.va(), PARAMS, [(np.pi - 1e-4, 0.0)], 2000)
        assert np.all(p >= 0.0) and np.all(p < 2 * np.pi)


class TestEnsemble:
    def test_default_matches_quantum_initial_state(self):
        ens = uniform_ensemble(1000, seed=5)
        assert np.all(ens.p == 0.0)
        assert np.all(ens.theta >= -np.pi) and np.all(ens.theta < np.pi)

    def test_stratified_covers_all_strata(self):
        n = 1000
        ens = uniform_ensemble(n, seed=6, stratified=True)
        strata = np.floor((ens.theta + np.pi) / (2 * np.pi / n)).astype(int)
        assert len(np.unique(strata)) == n

    def test_seed_determinism(self):
        a = uniform_ensemble(100, seed=7).theta
        b = uniform_ensemble(100, seed=7).theta
        assert np.array_equal(a, b)


class TestQuantumAgreement:
    """The exact rotor and the limit map give the same E(t) past the crossover."""

    @pytest.mark.parametrize("factory,window_lo", [(dk.vb, None), (dk.vc, 100.0)])
    def test_agreement_within_15_percent(self, factory, window_lo):
        from dkrotor import analysis as an

        potential = factory()
        t_s_nom, _ = saturation_estimates(PARAMS)
        steps = int(1.1 * t_s_nom)
        rec = dk.log_record_times(steps)
        J = dk.default_grid_size(PLANCK)
        q = dk.evolve(dk.momentum_eigenstate(J), potential, K, PLANCK, steps,
                      record_times=rec)
        c = evolve_ensemble(
            uniform_ensemble(10_000, seed=0, stratified=True),
            potential, PARAMS, steps, record_times=rec,
        )
        if window_lo is None:
            window_lo = an.analyze_series(q).t_c
            assert window_lo is not None
        m = (q.t >= window_lo) & (q.t <= t_s_nom)
        rel = np.abs(q.E[m] - c.E[m]) / c.E[m]
        assert rel.max() < 0.15
