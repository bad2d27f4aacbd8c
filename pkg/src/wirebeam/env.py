"""Beam-tracking decision process on the swaying wire.

Couples the wire physics to the phased-array link: a tracking agent (the
protagonist) nudges the steering angles by +/- beta per step while an
optional adversary injects additional wind. The per-step reward is the
received power mapped through a clipped linear band, and the adversary's
reward is its exact negation (zero-sum).
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import radio, wire


class EpisodeFinishedError(RuntimeError):
    """Raised when stepping an environment past its horizon."""


class ProtagonistAction(IntEnum):
    STAY = 0
    UP = 1
    DOWN = 2
    LEFT = 3
    RIGHT = 4


class AdversaryAction(IntEnum):
    STAY = 0
    UP = 1
    DOWN = 2
    LEFT = 3
    RIGHT = 4
    FRONT = 5
    BACK = 6


# (a_theta, a_phi) per protagonist action; at most one entry is nonzero.
_ANGLE_STEPS = {
    ProtagonistAction.STAY: (0.0, 0.0),
    ProtagonistAction.UP: (-1.0, 0.0),
    ProtagonistAction.DOWN: (1.0, 0.0),
    ProtagonistAction.LEFT: (0.0, 1.0),
    ProtagonistAction.RIGHT: (0.0, -1.0),
}

_WIND_DIRS = {
    AdversaryAction.STAY: np.array([0.0, 0.0, 0.0]),
    AdversaryAction.UP: np.array([0.0, 0.0, 1.0]),
    AdversaryAction.DOWN: np.array([0.0, 0.0, -1.0]),
    AdversaryAction.LEFT: np.array([-1.0, 0.0, 0.0]),
    AdversaryAction.RIGHT: np.array([1.0, 0.0, 0.0]),
    AdversaryAction.FRONT: np.array([0.0, 1.0, 0.0]),
    AdversaryAction.BACK: np.array([0.0, -1.0, 0.0]),
}


@dataclass
class BeamState:
    """Steering angles of the transmit beam, degrees."""

    steer_zenith: float = 90.0
    steer_azimuth: float = 0.0

    def direction(self) -> np.ndarray:
        """Unit vector [sin(t)cos(p), sin(t)sin(p), cos(t)] of the beam."""
        t = math.radians(self.steer_zenith)
        p = math.radians(self.steer_azimuth)
        return np.array([math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t)])


@dataclass
class Observation:
    """What both agents see: SBS position, velocity, and beam direction."""

    position: np.ndarray
    velocity: np.ndarray
    beam_dir: np.ndarray

    def vector(self) -> np.ndarray:
        """Flattened 9-dim input for the Q networks."""
        return np.concatenate([self.position, self.velocity, self.beam_dir])


def apply_protagonist_action(beam: BeamState, action: ProtagonistAction, beta_deg: float) -> BeamState:
    """New beam after moving zenith/azimuth by beta per the action table."""
    a_theta, a_phi = _ANGLE_STEPS[ProtagonistAction(action)]
    return BeamState(beam.steer_zenith + a_theta * beta_deg, beam.steer_azimuth + a_phi * beta_deg)


def adversary_wind(action: AdversaryAction, speed: float) -> np.ndarray:
    """Additional wind vector appended by the adversary (zero for STAY)."""
    return _WIND_DIRS[AdversaryAction(action)] * speed


def reward_from_power(p_r_dbm: float, clip_offset: float, clip_scale: float) -> float:
    """Clipped linear reward: ((P_r - offset) / scale) clamped to [-1, 1]."""
    return float(np.clip((p_r_dbm - clip_offset) / clip_scale, -1.0, 1.0))


@dataclass
class EnvConfig:
    """Everything needed to build one beam-tracking episode.

    gateway_pos, when None, is derived at construction time: the gateway
    sits at horizontal distance gateway_distance from the resting SBS, at
    the resting SBS height if gateway_level_with_sbs else at
    gateway_height. This makes the resting link distance exactly
    gateway_distance and the aligned steering (90, 0) degrees.
    """

    phys: wire.PhysParams = field(default_factory=wire.PhysParams)
    antenna: radio.AntennaConfig = field(default_factory=radio.AntennaConfig)
    budget: radio.LinkBudget = field(default_factory=radio.LinkBudget)
    gateway_pos: np.ndarray | None = None
    gateway_distance: float = 5.0
    gateway_height: float = 5.0
    gateway_level_with_sbs: bool = True
    sbs_point: int = 6  # 1-based point number along the wire
    tau: float = 0.01
    horizon: int = 1000
    beta: float = 1.0
    clip_offset: float = -27.0
    clip_scale: float = 3.0
    adversary_speed: float = 10.0
    adversary_active: bool = True
    ambient_wind: bool = True
    substeps: int = 1

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.clip_scale <= 0:
            raise ValueError("clip_scale must be > 0")
        if not 2 <= self.sbs_point <= self.phys.n_points - 1:
            raise ValueError(
                f"sbs_point must be an interior point (2..{self.phys.n_points - 1})"
            )
        if self.tau <= 0:
            raise ValueError("tau must be > 0")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if self.gateway_pos is not None:
            self.gateway_pos = np.asarray(self.gateway_pos, dtype=np.float64)

    @property
    def sbs_index(self) -> int:
        return self.sbs_point - 1


def resolve_gateway(cfg: EnvConfig) -> np.ndarray:
    """Concrete gateway position (explicit value wins over the derivation)."""
    if cfg.gateway_pos is not None:
        return np.asarray(cfg.gateway_pos, dtype=np.float64)
    rest = wire.equilibrium_shape(cfg.phys).positions[cfg.sbs_index]
    z = rest[2] if cfg.gateway_level_with_sbs else cfg.gateway_height
    return np.array([rest[0] - cfg.gateway_distance, rest[1], z])


class BeamTrackingEnv:
    """One episode of the two-agent beam-tracking process.

    The wire starts at its static equilibrium and the beam starts exactly
    aligned with the gateway as seen from that resting position. Each
    step: compose ambient plus adversary wind, advance the physics by tau,
    apply the protagonist's steering move, then score the received power
    at the new position and steering.
    """

    def __init__(self, cfg: EnvConfig, seed=None, rng: np.random.Generator | None = None):
        self.cfg = cfg
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        self.gateway = resolve_gateway(cfg)
        self.wire_state: wire.WireState = None  # set by reset
        self.beam: BeamState = None
        self.steps_taken = 0
        self.reset()

    def reset(self) -> Observation:
        """Equilibrium wire, time zero, beam aligned to the gateway."""
        self.wire_state = wire.equilibrium_shape(self.cfg.phys)
        aod = radio.aod_geometry(self.sbs_position, self.gateway)
        self.beam = BeamState(aod.zenith, aod.azimuth)
        self.steps_taken = 0
        return self.observe()

    @property
    def sbs_position(self) -> np.ndarray:
        return self.wire_state.positions[self.cfg.sbs_index]

    @property
    def sbs_velocity(self) -> np.ndarray:
        return self.wire_state.velocities[self.cfg.sbs_index]

    @property
    def time(self) -> float:
        return self.wire_state.time

    def observe(self) -> Observation:
        return Observation(
            position=self.sbs_position.copy(),
            velocity=self.sbs_velocity.copy(),
            beam_dir=self.beam.direction(),
        )

    def received_power_now(self) -> float:
        """Received power at the current position and steering, dBm."""
        aod = radio.aod_geometry(self.sbs_position, self.gateway)
        return radio.received_power(
            aod, self.beam.steer_zenith, self.beam.steer_azimuth, self.cfg.antenna, self.cfg.budget
        )

    def _total_wind(self, a_a: AdversaryAction) -> np.ndarray:
        v = wire.env_wind(self.time) if self.cfg.ambient_wind else np.zeros(3)
        if self.cfg.adversary_active:
            v = v + adversary_wind(a_a, self.cfg.adversary_speed)
        return v

    def preview_wire(self, a_a: AdversaryAction) -> wire.WireState:
        """Next wire state without mutating the env; reuses the exact noise
        the real step will draw (the RNG state is copied, not consumed)."""
        peek = np.random.Generator(np.random.PCG64())
        peek.bit_generator.state = self.rng.bit_generator.state
        return wire.step(
            self.wire_state, self._total_wind(a_a), self.cfg.phys, self.cfg.tau, self.cfg.substeps, peek
        )

    def step(self, a_p: ProtagonistAction, a_a: AdversaryAction = AdversaryAction.STAY):
        """Advance one decision interval.

        Returns (observation, protagonist reward, adversary reward,
        received power in dBm). Raises EpisodeFinishedError past the horizon.
        """
        if self.steps_taken >= self.cfg.horizon:
            raise EpisodeFinishedError(
                f"episode horizon of {self.cfg.horizon} steps already reached"
            )
        self.wire_state = wire.step(
            self.wire_state,
            self._total_wind(a_a),
            self.cfg.phys,
            self.cfg.tau,
            self.cfg.substeps,
            self.rng,
        )
        self.beam = apply_protagonist_action(self.beam, a_p, self.cfg.beta)
        p_r = self.received_power_now()
        r_p = reward_from_power(p_r, self.cfg.clip_offset, self.cfg.clip_scale)
        self.steps_taken += 1
        return self.observe(), r_p, -r_p, p_r

    def clone(self) -> "BeamTrackingEnv":
        return copy.deepcopy(self)


def reset(cfg: EnvConfig, seed=None) -> tuple[BeamTrackingEnv, Observation]:
    """Build a fresh environment and return it with the first observation."""
    env = BeamTrackingEnv(cfg, seed=seed)
    return env, env.observe()
