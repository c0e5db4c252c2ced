"""
Directional center-surround windows
===================================

Each voxel is compared with a set of weighted neighbors.  The neighbor set
(the orientation template) decides which discontinuities stand out.
"""

import math

import numpy as np

from seisal import DcsConfig, dcs_saliency, make_window
from seisal.dcs import ORIENTATIONS

###############################################################################
# The built-in templates at radius 2 and sigma 1.

for tag in ORIENTATIONS:
    w = make_window(tag, 2, 1.0)
    print(f"{tag:8s} Q={w.Q:3d}  weights {np.round(np.unique(w.weights), 3)}")

###############################################################################
# Response to a unit impulse with the axis-t template at radius 1: the center
# scores 1 and its two t-neighbors score w/2.

E = np.zeros((7, 7, 7))
E[3, 3, 3] = 1.0
S = dcs_saliency(E, DcsConfig("axis-t", 1, 1.0))
print("impulse response along t:", np.round(S[1:6, 3, 3], 4), " expected w/2 =", round(math.exp(-0.5) / 2, 4))

###############################################################################
# A step in energy across x = 8.  Templates that look across the step light up
# at the step; the axis-t template only sees the flat part of the field.

step = np.zeros((16, 16, 16))
step[:, 8:, :] = 1.0
for tag in ("axis-t", "axis-x", "diag-tx", "full"):
    S = dcs_saliency(step, DcsConfig(tag, 2, 1.0))
    print(f"{tag:8s} x=5..10: {np.round(S[8, 5:11, 8], 3)}")

###############################################################################
# Custom templates are plain text files, one ``i0 j0 r0 w`` line per neighbor.

print("template format example:\n  1 0 0 1.0\n  -1 0 0 1.0\n  0 1 0 0.5\n  0 -1 0 0.5")
