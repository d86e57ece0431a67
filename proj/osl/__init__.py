from ._osl import (
    compute_soh,
    emd_decompose,
    envelope_entropy,
    load_battery_csv,
    metrics,
    pso_optimize_vmd,
    run_experiment,
    vmd_decompose,
)

__all__ = [
    "compute_soh",
    "emd_decompose",
    "envelope_entropy",
    "load_battery_csv",
    "metrics",
    "pso_optimize_vmd",
    "run_experiment",
    "vmd_decompose",
]
