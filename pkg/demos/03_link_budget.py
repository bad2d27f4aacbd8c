#!/usr/bin/env python3
"""Free-space link budget and what misalignment costs.

Run: python demos/03_link_budget.py
"""

import numpy as np

from wirebeam import AntennaConfig, AoD, LinkBudget, aod_geometry, received_power

cfg = AntennaConfig()
budget = LinkBudget()

print("Link: 23 dBm transmit, 8 dBi receive gain, 5 mm wavelength (60 GHz)\n")

print("Received power vs distance (perfectly aligned):")
for d in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0]:
    p = received_power(AoD(d, 90.0, 0.0), 90.0, 0.0, cfg, budget)
    print(f"  d = {d:5.1f} m   P_r = {p:8.3f} dBm")

print("\nReceived power vs beam pointing error at d = 5 m:")
print("(the 32-element array is unforgiving: half a degree costs ~1 dB)")
for err in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.58]:
    p = received_power(AoD(5.0, 90.0, err), 90.0, 0.0, cfg, budget)
    print(f"  error = {err:5.2f} deg   P_r = {p:8.3f} dBm")

print("\nAngle-of-departure geometry (vector from receiver to transmitter):")
for offset in [(5.0, 0.0, 0.0), (3.0, 4.0, 0.0), (0.0, 0.0, 3.0), (-5.0, 0.0, 1.0)]:
    aod = aod_geometry(np.array(offset), np.zeros(3))
    print(
        f"  offset {str(offset):>18}: d = {aod.distance:5.2f} m, "
        f"zenith = {aod.zenith:7.2f} deg, azimuth = {aod.azimuth:7.2f} deg"
    )
