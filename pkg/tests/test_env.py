import numpy as np
import pytest
from dataclasses import replace

import wirebeam as wb
from wirebeam.env import (
    AdversaryAction,
    BeamState,
    BeamTrackingEnv,
    EnvConfig,
    EpisodeFinishedError,
    ProtagonistAction,
    adversary_wind,
    apply_protagonist_action,
    reward_from_power,
)

STATIC_POWER = -12.881197714043807  # aligned boresight at 5 m


class TestReset:
    def test_initial_power_is_aligned_boresight(self):
        env = BeamTrackingEnv(EnvConfig(), seed=0)
        assert env.received_power_now() == pytest.approx(STATIC_POWER, abs=1e-9)
        assert env.beam.steer_zenith == pytest.approx(90.0, abs=1e-9)
        assert env.beam.steer_azimuth == pytest.approx(0.0, abs=1e-9)

    def test_zero_gravity_alignment(self):
        cfg = EnvConfig(phys=wb.PhysParams(gravity=np.zeros(3)))
        env = BeamTrackingEnv(cfg, seed=0)
        assert env.beam.steer_zenith == pytest.approx(90.0, abs=1e-12)
        assert env.beam.steer_azimuth == pytest.approx(0.0, abs=1e-12)
        # gateway level with the unsagged midpoint
        assert env.gateway[2] == pytest.approx(5.0, abs=1e-12)

    def test_reset_deterministic(self):
        cfg = EnvConfig()
        a = BeamTrackingEnv(cfg, seed=3).observe().vector()
        b = BeamTrackingEnv(cfg, seed=3).observe().vector()
        np.testing.assert_array_equal(a, b)
        env = BeamTrackingEnv(cfg, seed=3)
        first = env.observe().vector()
        env.step(ProtagonistAction.UP, AdversaryAction.UP)
        np.testing.assert_array_equal(env.reset().vector(), first)

    def test_observation_at_rest(self):
        env = BeamTrackingEnv(EnvConfig(), seed=0)
        obs = env.observe()
        np.testing.assert_array_equal(obs.velocity, np.zeros(3))
        np.testing.assert_allclose(obs.beam_dir, [1.0, 0.0, 0.0], atol=1e-12)
        assert obs.vector().shape == (9,)


class TestActions:
    def test_protagonist_mapping(self):
        b = BeamState(90.0, 0.0)
        assert apply_protagonist_action(b, ProtagonistAction.STAY, 1.0) == BeamState(90.0, 0.0)
        assert apply_protagonist_action(b, ProtagonistAction.UP, 1.0) == BeamState(89.0, 0.0)
        assert apply_protagonist_action(b, ProtagonistAction.DOWN, 1.0) == BeamState(91.0, 0.0)
        assert apply_protagonist_action(b, ProtagonistAction.LEFT, 1.0) == BeamState(90.0, 1.0)
        assert apply_protagonist_action(b, ProtagonistAction.RIGHT, 1.0) == BeamState(90.0, -1.0)

    def test_adversary_wind_table(self):
        v = 10.0
        np.testing.assert_array_equal(adversary_wind(AdversaryAction.STAY, v), [0, 0, 0])
        np.testing.assert_array_equal(adversary_wind(AdversaryAction.UP, v), [0, 0, 10.0])
        np.testing.assert_array_equal(adversary_wind(AdversaryAction.DOWN, v), [0, 0, -10.0])
        np.testing.assert_array_equal(adversary_wind(AdversaryAction.LEFT, v), [-10.0, 0, 0])
        np.testing.assert_array_equal(adversary_wind(AdversaryAction.RIGHT, v), [10.0, 0, 0])
        np.testing.assert_array_equal(adversary_wind(AdversaryAction.FRONT, v), [0, 10.0, 0])
        np.testing.assert_array_equal(adversary_wind(AdversaryAction.BACK, v), [0, -10.0, 0])

    def test_beam_direction_unit_norm(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            b = BeamState(rng.uniform(-400, 400), rng.uniform(-400, 400))
            assert np.linalg.norm(b.direction()) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(BeamState(0.0, 123.0).direction(), [0, 0, 1], atol=1e-12)


class TestReward:
    def test_clipping_band(self):
        assert reward_from_power(STATIC_POWER, -27.0, 3.0) == 1.0  # (14.1)/3 clips high
        assert reward_from_power(-27.0, -27.0, 3.0) == 0.0
        assert reward_from_power(-40.0, -27.0, 3.0) == -1.0
        assert reward_from_power(-28.5, -27.0, 3.0) == pytest.approx(-0.5)

    def test_monotone_in_power(self):
        grid = np.linspace(-60.0, 0.0, 400)
        vals = [reward_from_power(p, -27.0, 3.0) for p in grid]
        assert np.all(np.diff(vals) >= 0.0)

    def test_step_reward_when_aligned(self, frozen_env_cfg):
        env = BeamTrackingEnv(frozen_env_cfg, seed=0)
        _, r_p, r_a, p_r = env.step(ProtagonistAction.STAY, AdversaryAction.STAY)
        assert r_p == 1.0 and r_a == -1.0
        assert p_r == pytest.approx(STATIC_POWER, abs=1e-6)


class TestStep:
    def test_horizon_enforced(self):
        cfg = EnvConfig(horizon=3)
        env = BeamTrackingEnv(cfg, seed=0)
        for _ in range(3):
            env.step(ProtagonistAction.STAY, AdversaryAction.STAY)
        with pytest.raises(EpisodeFinishedError):
            env.step(ProtagonistAction.STAY, AdversaryAction.STAY)

    def test_randomized_step_properties(self):
        # rewards bounded and zero-sum, exactly one angle moves by one beta
        # step (or none), endpoints pinned bitwise
        cfg = EnvConfig(horizon=1000)
        env = BeamTrackingEnv(cfg, seed=8)
        ends0 = (env.wire_state.positions[0].copy(), env.wire_state.positions[-1].copy())
        rng = np.random.default_rng(9)
        for _ in range(1000):
            prev = (env.beam.steer_zenith, env.beam.steer_azimuth)
            a_p = ProtagonistAction(int(rng.integers(5)))
            a_a = AdversaryAction(int(rng.integers(7)))
            _, r_p, r_a, _ = env.step(a_p, a_a)
            assert -1.0 <= r_p <= 1.0
            assert r_a == -r_p
            dz = abs(env.beam.steer_zenith - prev[0])
            da = abs(env.beam.steer_azimuth - prev[1])
            assert sorted((dz, da)) in ([0.0, 0.0], [0.0, cfg.beta])
        assert np.array_equal(env.wire_state.positions[0], ends0[0])
        assert np.array_equal(env.wire_state.positions[-1], ends0[1])

    def test_inactive_adversary_ignores_action_argument(self):
        cfg = EnvConfig(adversary_active=False, horizon=200)
        rng = np.random.default_rng(4)
        actions = [AdversaryAction(int(rng.integers(7))) for _ in range(200)]
        env_a = BeamTrackingEnv(cfg, seed=5)
        env_b = BeamTrackingEnv(cfg, seed=5)
        for a_a in actions:
            env_a.step(ProtagonistAction.STAY, a_a)
            env_b.step(ProtagonistAction.STAY, AdversaryAction.STAY)
        np.testing.assert_array_equal(env_a.wire_state.positions, env_b.wire_state.positions)

    def test_active_adversary_changes_trajectory(self):
        cfg = EnvConfig(adversary_active=True, horizon=50)
        env_a = BeamTrackingEnv(cfg, seed=5)
        env_b = BeamTrackingEnv(cfg, seed=5)
        for _ in range(50):
            env_a.step(ProtagonistAction.STAY, AdversaryAction.UP)
            env_b.step(ProtagonistAction.STAY, AdversaryAction.STAY)
        assert not np.array_equal(env_a.wire_state.positions, env_b.wire_state.positions)

    def test_seeded_trajectory_bitwise_deterministic(self):
        cfg = EnvConfig(horizon=300)

        def run():
            env = BeamTrackingEnv(cfg, seed=77)
            out = []
            for k in range(300):
                obs, _, _, p = env.step(
                    ProtagonistAction(k % 5), AdversaryAction(k % 7)
                )
                out.append((obs.vector(), p))
            return out

        for (va, pa), (vb, pb) in zip(run(), run()):
            np.testing.assert_array_equal(va, vb)
            assert pa == pb


class TestEnvConfigValidation:
    def test_invariants(self):
        with pytest.raises(ValueError):
            EnvConfig(horizon=0)
        with pytest.raises(ValueError):
            EnvConfig(beta=0.0)
        with pytest.raises(ValueError):
            EnvConfig(clip_scale=0.0)
        with pytest.raises(ValueError):
            EnvConfig(sbs_point=1)
        with pytest.raises(ValueError):
            EnvConfig(sbs_point=11)

    def test_module_level_reset_helper(self):
        env, obs = wb.env.reset(EnvConfig(), seed=1)
        assert isinstance(env, BeamTrackingEnv)
        assert obs.vector().shape == (9,)

    def test_explicit_gateway_override(self):
        cfg = EnvConfig(gateway_pos=np.array([-4.0, 0.0, 3.0]))
        env = BeamTrackingEnv(cfg, seed=0)
        np.testing.assert_array_equal(env.gateway, [-4.0, 0.0, 3.0])
        # alignment is still exact: the array factor sits at its coherent
        # peak, only the element pattern is off-boresight
        aod = wb.aod_geometry(env.sbs_position, env.gateway)
        af_peak = 10.0 * np.log10(32 * 32)
        expected = (
            23.0
            + wb.element_pattern(aod.zenith, aod.azimuth, cfg.antenna)
            + af_peak
            + 8.0
            + 20.0 * np.log10(0.005 / (4 * np.pi * aod.distance))
        )
        assert env.received_power_now() == pytest.approx(expected, abs=1e-9)
