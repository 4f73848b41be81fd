"""The tradeoff that governs the configuration parameter.

Larger alpha approximates the maximum better (the approximation bound
falls) but amplifies channel noise (the noise bound grows). The two curves
cross, which is why alpha needs tuning. Shown for three feature
distributions at a 6 dB receive SNR.
"""

import os

from airpool.analysis import tradeoff_curve
from airpool.channel import db_to_linear
from airpool.experiments import ExperimentConfig, run_experiment
from airpool.features import FeatureModel

OUT = os.path.join(os.path.dirname(__file__), "out")
K = 12
ALPHAS = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]

for name, model in [("rectified Gaussian", FeatureModel.rectified_gaussian()),
                    ("uniform(0,1)", FeatureModel.uniform01()),
                    ("unit exponential", FeatureModel.exponential_unit())]:
    rows, diagnostics = tradeoff_curve(model, K, p_rx_w=db_to_linear(6.0),
                                       noise_power_w=1.0, alpha_grid=ALPHAS,
                                       trials=100_000, seed=3)
    assert not diagnostics, diagnostics
    print(f"{name}:")
    print(f"  {'alpha':>6} {'noise bound':>12} {'approx bound':>13} {'sum':>10}")
    for r in rows:
        print(f"  {r['alpha']:>6.0f} {r['noise_bound']:>12.4f} "
              f"{r['approx_bound_max']:>13.4f} {r['bound_sum']:>10.4f}")
    best = min(rows, key=lambda r: r["bound_sum"])
    print(f"  bound sum is smallest near alpha = {best['alpha']:.0f}\n")

cfg = ExperimentConfig(experiment="tradeoff_curve", snr_grid_db=(6.0,),
                       alpha_grid=tuple(ALPHAS), trials=100_000,
                       output_dir=OUT)
_, paths = run_experiment(cfg)
print(f"wrote {paths['csv']} and {paths['svg']}")
