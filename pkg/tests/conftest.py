import numpy as np
import pytest
from dataclasses import replace

import wirebeam as wb
from wirebeam.config import train_config_from_text

# Training runs shared by the slow tests: five seeds, 50 episodes each,
# reference parameters otherwise. The no-adversary arm of each seed doubles
# as the proxy tracker for the adversarial arm of the same seed.
STOCK_SEEDS = (11, 12, 13, 14, 15)
STOCK_EPISODES = 50


@pytest.fixture()
def default_cfg():
    """Full reference-default training config (1000-step episodes)."""
    return train_config_from_text("")


@pytest.fixture()
def small_env_cfg():
    """Short-horizon environment for fast behavioral tests."""
    return wb.EnvConfig(horizon=120)


@pytest.fixture()
def frozen_env_cfg():
    """No ambient wind, no pressure noise: a statically aligned link."""
    return wb.EnvConfig(
        phys=wb.PhysParams(wind_cov=np.zeros((3, 3))),
        ambient_wind=False,
        adversary_active=False,
        horizon=100,
    )


@pytest.fixture(scope="session")
def training_stock():
    """Train both variants for every stock seed (shared by criteria 7/8)."""
    base = train_config_from_text("")
    stock = {}
    for seed in STOCK_SEEDS:
        cfg = replace(base, episodes=STOCK_EPISODES, seed=seed, variant="no_adversary")
        no_adv = wb.train(cfg)
        rarl_cfg = replace(cfg, variant="rarl", proxy_checkpoint=no_adv.protagonist)
        stock[seed] = {"no_adversary": no_adv, "rarl": wb.train(rarl_cfg)}
    return stock
