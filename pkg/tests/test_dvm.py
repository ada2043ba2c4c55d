import json
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from sofa_opt.dvm import (
    EnvironmentConfig,
    FourierTrajectory,
    Infeasible,
    daylight,
    demo_piecewise_seed,
    dominant_eigenvalue,
    dvm_domain,
    dvm_objective,
    fitness,
    food_at,
    fourier_of_piecewise,
    light_at,
    stage_rates,
)
from sofa_opt.dvm.environment import _grid_and_bases

FIXTURES = Path(__file__).parent / "data" / "dvm_rate_fixtures.json"


def deep_trajectory(order=2):
    return fourier_of_piecewise(demo_piecewise_seed(), order)


def constant_trajectory(depth, n=5):
    coeffs = np.zeros((3, n))
    coeffs[:, 0] = depth
    return FourierTrajectory(coeffs)


class TestEnvironmentPieces:
    def test_daylight_profile(self):
        assert daylight(0.0) == 0.0          # midnight
        assert daylight(0.5) == pytest.approx(1.0)
        assert daylight(0.25) == pytest.approx(0.0, abs=1e-12)

    def test_light_decays_with_depth(self):
        env = EnvironmentConfig()
        shallow = light_at(env, 0.5, 5.0)
        deep = light_at(env, 0.5, 80.0)
        assert deep < 1e-2 * shallow

    def test_no_food_above_surface(self):
        env = EnvironmentConfig()
        assert food_at(env, -3.0) == 0.0
        assert food_at(env, env.food_peak_depth) == pytest.approx(1.0)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            EnvironmentConfig(visual_predation=(1.0, 2.0))
        with pytest.raises(ValueError):
            EnvironmentConfig(adult_span=0.0)
        with pytest.raises(ValueError):
            EnvironmentConfig(swim_cost=-1.0)

    def test_config_dict_roundtrip(self):
        env = EnvironmentConfig(swim_cost=0.003, adult_span=25.0)
        again = EnvironmentConfig.from_dict(env.to_dict())
        assert again == env

    def test_speed_threshold_unit_conversion(self):
        env = EnvironmentConfig(feeding_speed_max_m_per_h=10.0)
        assert env.feeding_speed_max == 240.0


class TestStageRates:
    def test_zero_mortality_env_constant_at_food_peak(self):
        env = EnvironmentConfig(
            visual_predation=(0.0, 0.0, 0.0),
            background_mortality=(0.0, 0.0, 0.0),
        )
        at_peak = stage_rates(constant_trajectory(env.food_peak_depth), env)
        assert at_peak.a_y == 0.0 and at_peak.a_j == 0.0 and at_peak.a_a == 0.0
        # Any other constant depth feeds on thinner food: slower maturation,
        # fewer eggs.
        off_peak = stage_rates(constant_trajectory(30.0), env)
        assert at_peak.tau_y < off_peak.tau_y
        assert at_peak.tau_j < off_peak.tau_j
        assert at_peak.b > off_peak.b

    def test_always_fast_trajectory_infeasible(self):
        # Uniform food with no depth gate isolates the speed rule.  A single
        # huge harmonic keeps |dv/dt| above the threshold at every sample.
        env = EnvironmentConfig(
            food_peak_depth=0.0, food_width=1e9, feeding_depth_max=1e9,
            boundary_mortality=0.0,
        )
        amp = 20_000.0
        coeffs = np.zeros((3, 3))
        coeffs[:, 0] = 50.0
        coeffs[:, 1] = amp
        traj = FourierTrajectory(coeffs)
        t, _, dbasis = _grid_and_bases(3, env.time_samples)
        speeds = np.abs(traj.coefficients @ dbasis)
        assert np.all(speeds > env.feeding_speed_max)
        out = stage_rates(traj, env)
        assert isinstance(out, Infeasible)

    def test_too_deep_to_feed_infeasible(self):
        env = EnvironmentConfig()
        out = stage_rates(constant_trajectory(120.0), env)
        assert isinstance(out, Infeasible)

    def test_demo_deep_strategy_rates_regression(self):
        with open(FIXTURES, "r", encoding="utf-8") as fh:
            fixture = json.load(fh)
        env = EnvironmentConfig()
        traj = FourierTrajectory(np.asarray(fixture["coefficients"]))
        rates = stage_rates(traj, env)
        assert not isinstance(rates, Infeasible)
        for name, expected in fixture["rates"].items():
            assert getattr(rates, name) == pytest.approx(expected, rel=1e-9), name
        lam = dominant_eigenvalue(rates)
        assert lam == pytest.approx(fixture["eigenvalue"], rel=1e-9)
        assert fitness(traj, env).value == pytest.approx(fixture["fitness"], rel=1e-9)

    def test_boundary_violation_raises_mortality(self):
        env = EnvironmentConfig()
        coeffs = np.zeros((3, 3))
        coeffs[:, 0] = 10.0
        coeffs[:, 1] = 14.0   # dips above the surface around t ~ 0.75
        inside = stage_rates(constant_trajectory(10.0, n=3), env)
        poking = stage_rates(FourierTrajectory(coeffs), env)
        assert not isinstance(poking, Infeasible)
        assert poking.a_y > inside.a_y


class TestFitness:
    def test_fitness_is_exp_of_eigenvalue(self):
        env = EnvironmentConfig()
        traj = deep_trajectory()
        lam = dominant_eigenvalue(stage_rates(traj, env))
        assert fitness(traj, env).value == pytest.approx(np.exp(lam), rel=1e-12)

    def test_fitness_scale_monotone(self):
        env2 = EnvironmentConfig(fitness_scale=2.0)
        traj = deep_trajectory()
        lam = dominant_eigenvalue(stage_rates(traj, env2))
        assert fitness(traj, env2).value == pytest.approx(np.exp(2.0 * lam), rel=1e-12)

    def test_deep_beats_surface_under_strong_predation(self):
        env = EnvironmentConfig()
        deep = fitness(deep_trajectory(), env)
        surface = fitness(constant_trajectory(5.0), env)
        assert deep.is_feasible and surface.is_feasible
        assert deep.value > surface.value

    def test_argmax_preserved_by_transform(self):
        env = EnvironmentConfig()
        rng = np.random.default_rng(0)
        base = deep_trajectory()
        trajs = [base]
        for _ in range(6):
            coeffs = base.coefficients + rng.normal(0, 2.0, size=(3, 5))
            trajs.append(FourierTrajectory(coeffs))
        lams, js = [], []
        for traj in trajs:
            rates = stage_rates(traj, env)
            if isinstance(rates, Infeasible):
                continue
            lam = dominant_eigenvalue(rates)
            if isinstance(lam, Infeasible):
                continue
            lams.append(lam)
            js.append(fitness(traj, env).value)
        assert len(lams) >= 3
        assert int(np.argmax(lams)) == int(np.argmax(js))
        order_lam = np.argsort(lams)
        order_j = np.argsort(js)
        np.testing.assert_array_equal(order_lam, order_j)

    def test_infeasible_propagates(self):
        env = EnvironmentConfig()
        out = fitness(constant_trajectory(150.0), env)
        assert not out.is_feasible
        assert "net energy" in out.reason

    def test_phase_shift_invariance_time_symmetric_env(self):
        # With visual predation off, nothing depends on absolute time, and a
        # shift by a multiple of the quadrature step maps the midpoint grid
        # onto itself, so the fitness is identical to the last bit.
        env = EnvironmentConfig(visual_predation=(0.0, 0.0, 0.0))
        traj = deep_trajectory()
        phi = 32.0 / env.time_samples
        shifted = traj.phase_shift(phi)
        a = fitness(traj, env)
        b = fitness(shifted, env)
        assert a.is_feasible and b.is_feasible
        assert b.value == pytest.approx(a.value, rel=1e-12)


class TestProblemBuilders:
    def test_objective_dim(self):
        env = EnvironmentConfig()
        obj = dvm_objective(env, 2)
        assert obj.dim == 15
        out = obj.evaluate(deep_trajectory().flat())
        assert out.is_feasible

    def test_domain_matches_objective(self):
        dom = dvm_domain(2)
        assert dom.dimension == 15
        # Harmonic widths shrink with the harmonic index.
        assert dom.widths[1] > dom.widths[3]

    def test_domain_centers_are_seed_coefficients(self):
        dom = dvm_domain(2)
        seed = fourier_of_piecewise(demo_piecewise_seed(), 2)
        np.testing.assert_allclose(dom.centers, seed.flat(), rtol=1e-12)
