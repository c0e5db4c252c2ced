"""
Training the fusion weights
===========================

The three directional maps are combined with one weight each.  Instead of
fixing the weights they can be learned, voxel by voxel, so that the fused map
tracks a desired map.  LMS, NLMS and RLS are compared on a stream with known
weights, then NLMS is used to steer the fused map toward S_t.
"""

import warnings

import numpy as np

from seisal import DesiredMap, SyntheticSpec, Trainer, adapt_weights, combine, dcs_all, energy_volumes, generate
from seisal.fusion import run_trainer, samples_to_mse, windowed_mse

###############################################################################
# Stream with planted weights (0.5, 0.3, 0.2).

rng = np.random.default_rng(7)
s = rng.uniform(0, 1, (20000, 3))
d = s @ np.array([0.5, 0.3, 0.2])

print("trainer  samples-to-MSE<=1e-6  final weights")
curves = {}
for kind in ("rls", "nlms", "lms"):
    w, e = run_trainer(s, d, Trainer(kind))
    curves[kind] = windowed_mse(e)
    print(f"{kind:8s} {samples_to_mse(e):>10d}            {np.round(w, 6)}")

print("\nwindowed MSE (1000-sample windows), first five windows:")
for kind, c in curves.items():
    print(f"{kind:5s}", " ".join(f"{v:9.2e}" for v in c[:5]))

###############################################################################
# Steering toward one direction.  Training against S_t drives the weights to
# roughly (1, 0, 0), so the fused map reproduces the time-direction map.

vol, mask = generate(SyntheticSpec((64, 64, 64), "layered+fault", noise_sigma=0.05, seed=7))
maps = dcs_all(energy_volumes(vol))
fw = adapt_weights(*maps, DesiredMap("t"))
print("\nweights trained on S_t:", np.round(fw.weights, 5))
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    S = combine(*maps, fw)
print("MSE against S_t:", float(np.mean((S.data - maps[0].data) ** 2)))
