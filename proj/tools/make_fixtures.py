#!/usr/bin/env python3
"""Regenerates the battery capacity fixtures under data/.

The curves emulate the published NASA Ames aging statistics for B0005,
B0006, B0007, and B0018 (cycle counts, start/end capacities, non-monotonic
regeneration upticks); they are synthetic, not the original measurements.
Deterministic: a fixed seed per battery.
"""

import os

import numpy as np

SPECS = {
    # id: (cycles, start Ah, end Ah, regen period, regen size, noise, ar, seed)
    "B0005": (168, 1.856, 1.287, 40, 0.050, 0.010, 0.75, 5),
    "B0006": (168, 2.035, 1.154, 38, 0.060, 0.012, 0.45, 6),
    "B0007": (168, 1.891, 1.400, 44, 0.045, 0.010, 0.85, 7),
    "B0018": (132, 1.855, 1.340, 33, 0.042, 0.012, 0.30, 18),
}


def capacity_curve(cycles, start, end, regen_period, regen_size, noise, ar, seed):
    rng = np.random.default_rng(seed)
    t = np.arange(cycles, dtype=float)
    x = t / (cycles - 1)
    # Aging trend: mild acceleration toward end of life.
    trend = start - (start - end) * (0.55 * x + 0.45 * x**2)
    # Capacity regeneration after rest: a sharp upward jump that decays
    # within a few cycles.
    regen = np.zeros(cycles)
    pos = regen_period + int(rng.integers(-4, 5))
    while pos < cycles:
        size = regen_size * (0.8 + 0.4 * rng.random())
        span = np.arange(pos, cycles)
        regen[pos:] += size * np.exp(-(span - pos) / 4.0)
        pos += regen_period + int(rng.integers(-4, 5))
    # Cycle-to-cycle measurement fluctuation: AR(1) with a battery-specific
    # correlation (thermal drift, regeneration micro-cycles), stationary
    # sd `noise`, plus occasional one-cycle dropouts (incomplete
    # discharge, logging glitches).
    innov = rng.normal(0.0, noise * np.sqrt(1.0 - ar * ar), cycles)
    jitter = np.zeros(cycles)
    for i in range(1, cycles):
        jitter[i] = ar * jitter[i - 1] + innov[i]
    for i in range(cycles):
        if rng.random() < 0.02:
            jitter[i] -= (1.0 + 2.0 * rng.random()) * noise
    return trend + regen + jitter


def main():
    out_dir = os.path.join(os.path.dirname(__file__), "..", "data")
    os.makedirs(out_dir, exist_ok=True)
    for battery, spec in SPECS.items():
        cap = capacity_curve(*spec)
        path = os.path.join(out_dir, battery + ".csv")
        with open(path, "w") as f:
            f.write("cycle,capacity_ah\n")
            for i, c in enumerate(cap):
                f.write(f"{i + 1},{c:.6f}\n")
        print(f"{path}: {len(cap)} cycles, {cap[0]:.3f} -> {cap[-1]:.3f} Ah")


if __name__ == "__main__":
    main()
