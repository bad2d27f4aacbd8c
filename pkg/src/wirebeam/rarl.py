"""Two-agent adversarial training loop and the fixed evaluation policies.

Per episode, both agents explore epsilon-greedily on a shared environment
tick, every transition is stored and both networks take one gradient step
per environment step, targets re-sync every few episodes, and two
per-episode probes track progress: the tracking agent is scored greedily
with the adversary disabled, and the adversary is scored greedily against
a frozen proxy tracker that was pre-trained without any adversary.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np

from . import deepq
from .checkpoint import AgentCheckpoint, load_checkpoint
from .env import (
    AdversaryAction,
    BeamTrackingEnv,
    EnvConfig,
    ProtagonistAction,
    apply_protagonist_action,
)
from .radio import aod_geometry, received_power

VARIANTS = ("rarl", "no_adversary", "random_adversary")

N_PROTAGONIST_ACTIONS = len(ProtagonistAction)
N_ADVERSARY_ACTIONS = len(AdversaryAction)


@dataclass
class TrainConfig:
    env: EnvConfig = field(default_factory=EnvConfig)
    episodes: int = 400
    epsilon: float = 0.2
    gamma: float = 0.99
    target_period: int = 5
    test_steps: int = 1000
    variant: str = "rarl"
    seed: int = 0
    proxy_checkpoint: object = None  # path or AgentCheckpoint; required for variant="rarl"
    batch_size: int = 32
    replay_capacity: int = 5000  # recency-weighted experience; 100k reproduces the slow full-scale recipe
    learning_rate: float = 1e-3
    hidden: tuple = (32, 32, 32, 32)
    standardize_obs: bool = True  # feed (obs - rest obs) / characteristic scales to the nets
    head_init_scale: float = 0.0  # 0 starts the heads at indifference (greedy = no-op)
    keep_memories: bool = False  # expose replay contents on the result (diagnostics)

    def __post_init__(self):
        if self.episodes < 1:
            raise ValueError("episodes must be >= 1")
        if self.test_steps < 1:
            raise ValueError("test_steps must be >= 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.target_period < 1:
            raise ValueError("target_period must be >= 1")


@dataclass
class EpisodeRecord:
    episode: int
    protagonist_avg_power: float
    adversary_check_avg_power: float
    loss_p: float
    loss_a: float
    wall_clock: float
    p4_seed: int = 0
    p5_seed: int = 0
    target_synced: bool = False


@dataclass
class TrainResult:
    protagonist: AgentCheckpoint
    adversary: AgentCheckpoint | None
    records: list
    memories: tuple | None = None  # (protagonist, adversary) replay memories when kept


class PolicyKind(Enum):
    STAY = "stay"
    UPPER_LIMIT = "upper_limit"
    GREEDY_DQN = "greedy_dqn"
    RANDOM_UNIFORM = "random_uniform"


# characteristic magnitudes of (displacement, velocity, beam-direction delta)
OBS_SCALE = np.array([1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 0.1, 0.1, 0.1])


@dataclass
class ObsNormalizer:
    """Affine input map applied before the Q networks.

    Anchored at the rest observation of the environment the network runs
    in (the station can always calibrate its rest pose in situ), so the
    position inputs mean "displacement from rest" in every environment.
    The beam components are amplified because their excursions (~0.1) are
    tiny next to raw positions (~4 m), which otherwise starves the
    network of steering sensitivity.
    """

    offset: np.ndarray
    scale: np.ndarray

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return (vec - self.offset) / self.scale

    def manifest_entry(self) -> dict:
        return {"anchor": "env_rest", "scale": self.scale.tolist()}


def norm_scale_from_manifest(manifest) -> np.ndarray | None:
    entry = (manifest or {}).get("obs_norm")
    return np.asarray(entry["scale"]) if entry else None


def make_normalizer(env_cfg: EnvConfig, scale=None) -> ObsNormalizer:
    """Normalizer anchored at the rest state of the given environment."""
    rest = BeamTrackingEnv(env_cfg, seed=0).observe().vector()
    return ObsNormalizer(offset=rest, scale=np.asarray(scale) if scale is not None else OBS_SCALE.copy())


def _anchored_norm(env: BeamTrackingEnv, scale) -> "ObsNormalizer | None":
    """Normalizer for a freshly reset environment (its observation is the
    rest observation), or None when no scale is recorded."""
    if scale is None:
        return None
    return ObsNormalizer(offset=env.observe().vector(), scale=np.asarray(scale))


def _apply_norm(norm, vec):
    return norm.apply(vec) if norm is not None else vec


@dataclass
class Policy:
    kind: PolicyKind
    checkpoint: object = None  # path or AgentCheckpoint for GREEDY_DQN

    def __post_init__(self):
        if self.kind is PolicyKind.GREEDY_DQN and self.checkpoint is None:
            raise ValueError("greedy_dqn policy needs a checkpoint")


def config_fingerprint(cfg: TrainConfig) -> str:
    """Stable short hash of the full configuration (numpy fields included)."""

    def default(obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        return str(obj)

    blob = json.dumps(asdict(cfg), sort_keys=True, default=default)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _resolve_agent(obj):
    """(network, input-normalizer scale or None) from a checkpoint path,
    an AgentCheckpoint (scale recorded in its manifest), or a bare net."""
    if isinstance(obj, deepq.QNetwork):
        return obj, None
    if not isinstance(obj, AgentCheckpoint):
        obj = load_checkpoint(obj)
    return obj.net, norm_scale_from_manifest(obj.manifest)


def greedy_action(net: deepq.QNetwork, state_vec: np.ndarray) -> int:
    return int(np.argmax(deepq.forward(net, state_vec)))


def random_adversary_action(rng: np.random.Generator) -> int:
    """Action draw of the untrained random-adversary variant: uniform over
    all seven wind choices."""
    return int(rng.integers(N_ADVERSARY_ACTIONS))


def _eval_streams(seed):
    """Fixed {environment, action} stream split so that every evaluation
    entry point sees identical physics under the same seed."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return ss.spawn(2)


def check_protagonist(net, env_cfg: EnvConfig, test_steps: int, seed) -> float:
    """Average received power of the greedy tracker with the adversary off.

    `net` may be a bare QNetwork or a checkpoint (whose recorded input
    normalizer is then applied).
    """
    if test_steps < 1:
        raise ValueError("test_steps must be >= 1")
    net, scale = _resolve_agent(net)
    cfg = replace(env_cfg, adversary_active=False, horizon=test_steps)
    env_stream, _ = _eval_streams(seed)
    e = BeamTrackingEnv(cfg, seed=env_stream)
    norm = _anchored_norm(e, scale)
    total = 0.0
    for _ in range(test_steps):
        a_p = greedy_action(net, _apply_norm(norm, e.observe().vector()))
        _, _, _, p_r = e.step(ProtagonistAction(a_p), AdversaryAction.STAY)
        total += p_r
    return total / test_steps


def check_adversary(adv_net, proxy_net, env_cfg: EnvConfig, test_steps: int, seed) -> float:
    """Average power the frozen proxy tracker obtains while the greedy
    adversary disturbs it (lower means a stronger adversary)."""
    if test_steps < 1:
        raise ValueError("test_steps must be >= 1")
    adv_net, adv_scale = _resolve_agent(adv_net)
    proxy_net, proxy_scale = _resolve_agent(proxy_net)
    cfg = replace(env_cfg, adversary_active=True, horizon=test_steps)
    env_stream, _ = _eval_streams(seed)
    e = BeamTrackingEnv(cfg, seed=env_stream)
    adv_norm = _anchored_norm(e, adv_scale)
    proxy_norm = _anchored_norm(e, proxy_scale)
    total = 0.0
    for _ in range(test_steps):
        s = e.observe().vector()
        a_p = greedy_action(proxy_net, _apply_norm(proxy_norm, s))
        a_a = greedy_action(adv_net, _apply_norm(adv_norm, s))
        _, _, _, p_r = e.step(ProtagonistAction(a_p), AdversaryAction(a_a))
        total += p_r
    return total / test_steps


def _upper_limit_action(e: BeamTrackingEnv, a_a: AdversaryAction) -> int:
    """One-step lookahead: score all five moves against the true next wire
    state (same noise draw the real step will consume) and take the best."""
    nxt = e.preview_wire(a_a)
    pos = nxt.positions[e.cfg.sbs_index]
    aod = aod_geometry(pos, e.gateway)
    best_a, best_p = 0, -np.inf
    for a in ProtagonistAction:
        beam = apply_protagonist_action(e.beam, a, e.cfg.beta)
        p = received_power(aod, beam.steer_zenith, beam.steer_azimuth, e.cfg.antenna, e.cfg.budget)
        if p > best_p:
            best_a, best_p = int(a), p
    return best_a


def run_policy(policy: Policy, env_cfg: EnvConfig, steps: int, seed):
    """Roll a fixed policy (no adversary) for `steps` decision intervals.

    Returns (average received power in dBm, trajectory rows), each row
    (step, t, p_r_dbm, r_p, a_p, a_a, sbs_x, sbs_y, sbs_z, theta_s, phi_s).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    cfg = replace(env_cfg, adversary_active=False, horizon=steps)
    env_stream, act_stream = _eval_streams(seed)
    e = BeamTrackingEnv(cfg, seed=env_stream)
    rng = np.random.default_rng(act_stream)
    net = norm = None
    if policy.kind is PolicyKind.GREEDY_DQN:
        net, scale = _resolve_agent(policy.checkpoint)
        norm = _anchored_norm(e, scale)

    rows = []
    total = 0.0
    for k in range(steps):
        if policy.kind is PolicyKind.STAY:
            a_p = ProtagonistAction.STAY
        elif policy.kind is PolicyKind.RANDOM_UNIFORM:
            a_p = ProtagonistAction(int(rng.integers(N_PROTAGONIST_ACTIONS)))
        elif policy.kind is PolicyKind.GREEDY_DQN:
            a_p = ProtagonistAction(greedy_action(net, _apply_norm(norm, e.observe().vector())))
        else:
            a_p = ProtagonistAction(_upper_limit_action(e, AdversaryAction.STAY))
        _, r_p, _, p_r = e.step(a_p, AdversaryAction.STAY)
        total += p_r
        pos = e.sbs_position
        rows.append(
            (
                k,
                e.time,
                p_r,
                r_p,
                a_p.name.lower(),
                AdversaryAction.STAY.name.lower(),
                pos[0],
                pos[1],
                pos[2],
                e.beam.steer_zenith,
                e.beam.steer_azimuth,
            )
        )
    return total / steps, rows


def train(cfg: TrainConfig) -> TrainResult:
    """Run the full two-agent training loop and return checkpoints + records.

    Variants: "rarl" trains both agents (and requires a proxy checkpoint
    for the adversary probe), "no_adversary" disables the adversary wind
    entirely, "random_adversary" keeps the wind but picks adversary
    actions uniformly at random without training a network.
    """
    trains_adversary = cfg.variant == "rarl"
    if trains_adversary and cfg.proxy_checkpoint is None:
        raise ValueError('variant "rarl" requires proxy_checkpoint for the adversary probe')
    norm = make_normalizer(cfg.env) if cfg.standardize_obs else None

    # One master seed fans out to fixed streams so that variants sharing a
    # seed see identical physics and protagonist exploration draws.
    streams = np.random.SeedSequence(cfg.seed).spawn(8)
    rng_init_p = np.random.default_rng(streams[0])
    rng_init_a = np.random.default_rng(streams[1])
    rng_phys = np.random.default_rng(streams[2])
    rng_eps_p = np.random.default_rng(streams[3])
    rng_eps_a = np.random.default_rng(streams[4])
    rng_replay_p = np.random.default_rng(streams[5])
    rng_replay_a = np.random.default_rng(streams[6])
    rng_eval = np.random.default_rng(streams[7])

    phys_seeds = rng_phys.integers(0, 2**63, size=cfg.episodes)
    eval_seeds = rng_eval.integers(0, 2**63, size=(cfg.episodes, 2))

    net_p = deepq.init_qnetwork(
        N_PROTAGONIST_ACTIONS, rng_init_p, hidden=cfg.hidden, head_scale=cfg.head_init_scale
    )
    tgt_p = net_p.copy()
    mem_p = deepq.ReplayMemory(cfg.replay_capacity, rng_replay_p)
    adam_p = deepq.AdamState.init_like(net_p, cfg.learning_rate)

    net_a = tgt_a = mem_a = adam_a = None
    if trains_adversary:
        net_a = deepq.init_qnetwork(
            N_ADVERSARY_ACTIONS, rng_init_a, hidden=cfg.hidden, head_scale=cfg.head_init_scale
        )
        tgt_a = net_a.copy()
        mem_a = deepq.ReplayMemory(cfg.replay_capacity, rng_replay_a)
        adam_a = deepq.AdamState.init_like(net_a, cfg.learning_rate)

    env_cfg = replace(cfg.env, adversary_active=cfg.variant != "no_adversary")
    fingerprint = config_fingerprint(cfg)

    records = []
    for ep in range(1, cfg.episodes + 1):
        t0 = time.perf_counter()
        e = BeamTrackingEnv(env_cfg, seed=phys_seeds[ep - 1])
        state = _apply_norm(norm, e.observe().vector())
        losses_p, losses_a = [], []

        for _ in range(env_cfg.horizon):
            a_p = deepq.act_epsilon_greedy(net_p, state, cfg.epsilon, rng_eps_p)
            if cfg.variant == "rarl":
                a_a = deepq.act_epsilon_greedy(net_a, state, cfg.epsilon, rng_eps_a)
            elif cfg.variant == "random_adversary":
                a_a = random_adversary_action(rng_eps_a)
            else:
                a_a = int(AdversaryAction.STAY)

            obs, r_p, r_a, _ = e.step(ProtagonistAction(a_p), AdversaryAction(a_a))
            next_state = _apply_norm(norm, obs.vector())
            mem_p.push(state, a_p, r_p, next_state)
            if trains_adversary:
                mem_a.push(state, a_a, r_a, next_state)

            if len(mem_p) >= cfg.batch_size:
                losses_p.append(
                    deepq.train_batch(net_p, tgt_p, mem_p.sample(cfg.batch_size), cfg.gamma, adam_p)
                )
            if trains_adversary and len(mem_a) >= cfg.batch_size:
                losses_a.append(
                    deepq.train_batch(net_a, tgt_a, mem_a.sample(cfg.batch_size), cfg.gamma, adam_a)
                )
            state = next_state

        synced = ep % cfg.target_period == 0
        if synced:
            deepq.sync_target(net_p, tgt_p)
            if trains_adversary:
                deepq.sync_target(net_a, tgt_a)

        p4_seed, p5_seed = int(eval_seeds[ep - 1, 0]), int(eval_seeds[ep - 1, 1])
        probe_p = AgentCheckpoint(
            net=net_p, manifest={"obs_norm": norm.manifest_entry() if norm else None}
        )
        p4 = check_protagonist(probe_p, cfg.env, cfg.test_steps, p4_seed)
        if trains_adversary:
            probe_a = AgentCheckpoint(net=net_a, manifest=probe_p.manifest)
            p5 = check_adversary(probe_a, cfg.proxy_checkpoint, cfg.env, cfg.test_steps, p5_seed)
        else:
            p5 = float("nan")
        records.append(
            EpisodeRecord(
                episode=ep,
                protagonist_avg_power=p4,
                adversary_check_avg_power=p5,
                loss_p=float(np.mean(losses_p)) if losses_p else float("nan"),
                loss_a=float(np.mean(losses_a)) if losses_a else float("nan"),
                wall_clock=time.perf_counter() - t0,
                p4_seed=p4_seed,
                p5_seed=p5_seed,
                target_synced=synced,
            )
        )

    def _ckpt(net, adam, agent):
        manifest = {
            "agent": agent,
            "n_actions": net.n_actions,
            "variant": cfg.variant,
            "seed": cfg.seed,
            "episodes": cfg.episodes,
            "config_hash": fingerprint,
            "obs_norm": norm.manifest_entry() if norm else None,
        }
        return AgentCheckpoint(net=net, adam=adam, manifest=manifest)

    return TrainResult(
        protagonist=_ckpt(net_p, adam_p, "protagonist"),
        adversary=_ckpt(net_a, adam_a, "adversary") if trains_adversary else None,
        records=records,
        memories=(mem_p, mem_a) if cfg.keep_memories else None,
    )


def pretrain_proxy(cfg: TrainConfig) -> AgentCheckpoint:
    """Train the proxy tracker (no adversary) used by the adversary probe."""
    result = train(replace(cfg, variant="no_adversary", proxy_checkpoint=None))
    return result.protagonist
