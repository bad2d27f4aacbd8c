#!/usr/bin/env python3
"""One full beam-tracking episode: fixed beam vs the one-step-greedy
oracle, on identical wind.

Run: python demos/04_tracking_episode.py
"""

import numpy as np

from wirebeam import EnvConfig, Policy, PolicyKind, run_policy

cfg = EnvConfig()
print("Episode: 1000 decision steps of 10 ms, ambient sinusoidal wind,")
print("beam moves at most 1 degree per step.\n")

stay_avg, stay_rows = run_policy(Policy(PolicyKind.STAY), cfg, 1000, seed=4)
upper_avg, upper_rows = run_policy(Policy(PolicyKind.UPPER_LIMIT), cfg, 1000, seed=4)

print("Received power along the episode (same wind for both policies):")
print(f"{'t [s]':>6} {'stay [dBm]':>12} {'oracle [dBm]':>13} {'oracle steering':>18}")
for k in range(99, 1000, 100):
    t = stay_rows[k][1]
    s_p, u_p = stay_rows[k][2], upper_rows[k][2]
    steer = f"({upper_rows[k][9]:.0f}, {upper_rows[k][10]:.0f})"
    print(f"{t:6.2f} {s_p:12.2f} {u_p:13.2f} {steer:>18}")

print(f"\nEpisode averages: stay {stay_avg:.2f} dBm, one-step oracle {upper_avg:.2f} dBm")
print(f"Tracking recovers {upper_avg - stay_avg:.1f} dB on this seed.")

worst_stay = min(r[2] for r in stay_rows)
worst_upper = min(r[2] for r in upper_rows)
print(f"Worst instants: stay {worst_stay:.1f} dBm vs oracle {worst_upper:.1f} dBm")
