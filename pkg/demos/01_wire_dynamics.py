#!/usr/bin/env python3
"""Wire physics walkthrough: static sag, a gusty minute, and drag decay.

Run: python demos/01_wire_dynamics.py
"""

import numpy as np

from wirebeam import PhysParams, env_wind, equilibrium_shape, mechanical_energy
from wirebeam import wire

params = PhysParams()
print("Wire: 11 points over a 10 m span, 10 kg total, k0 = 100 N/m")

# 1. Static shape: the discrete catenary-like sag under gravity.
eq = equilibrium_shape(params)
print("\nEquilibrium heights along the span:")
for i in range(params.n_points):
    bar = "#" * int(40 * (eq.positions[i, 2] - 3.8) / 1.3)
    print(f"  point {i + 1:2d}: z = {eq.positions[i, 2]:6.3f} m  {bar}")
print(f"Midpoint sag: {5.0 - eq.positions[5, 2]:.4f} m")

# 2. Twenty gusty seconds, sampled every 2 seconds.
state = eq.copy()
rng = np.random.default_rng(42)
print("\nMidpoint displacement under the sinusoidal ambient wind:")
for step in range(2000):
    state = wire.step(state, env_wind(state.time), params, 0.01, 1, rng)
    if (step + 1) % 200 == 0:
        d = np.linalg.norm(state.positions[5] - eq.positions[5])
        print(f"  t = {state.time:5.2f} s   |x_mid - rest| = {d:.3f} m")

# 3. Drag dissipation: kick the wire, watch the energy envelope decay.
params_still = PhysParams(gravity=np.zeros(3), wind_cov=np.zeros((3, 3)))
state = equilibrium_shape(params_still)
state.velocities[5] = [0.0, 0.0, 3.0]
rng = np.random.default_rng(0)
print("\nMechanical energy after a 3 m/s kick (no wind, no gravity):")
for step in range(500):
    state = wire.step(state, np.zeros(3), params_still, 0.01, 10, rng)
    if (step + 1) % 100 == 0:
        print(f"  t = {state.time:4.1f} s   E = {mechanical_energy(state, params_still):9.4f} J")
