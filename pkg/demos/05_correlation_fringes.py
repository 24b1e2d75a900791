# From decoherence factor to observable: the intensity correlation
# G(t, t') = (1 + p cos(omega_e (t - t'))) / 2 for a balanced detector,
# where p is the weight left in |1_g, 1_e>.

import math

import numpy as np

from soqd.correlate import TwoAtomState, g2_grid, visibility
from soqd.evolve import reduced_density
from soqd.model import MeasurementCoeffs, ModelParams
from soqd.subspace import build_single_mode

balanced = MeasurementCoeffs(1 / math.sqrt(2), 1 / math.sqrt(2))
tau = np.linspace(0, 2 * math.pi, 2001)

params = ModelParams.single_mode(1.0, 1.2, 0.07)
system = build_single_mode(params, 2)
for T in (0.0, 10.0, 20.0, 40.0):
    state = TwoAtomState.from_weights(reduced_density(system, T))
    g = g2_grid(state, balanced, 1.0, tau, [0.0]).g[:, 0]
    print(f"T={T:5.1f}  p_mid {state.p_mid:.4f}  fringe visibility {visibility(g):.4f}")

# For |1_g, 1_e> alone an unbalanced detector only rescales G, so the
# contrast stays at 1. Mixed with the other two states it does not: the
# flat background they add now depends on c1 and c2.
state = TwoAtomState(0.25, 0.5, 0.25)
for c1, c2 in ((1 / math.sqrt(2), 1 / math.sqrt(2)), (0.6, 0.8), (0.3, math.sqrt(0.91))):
    g = g2_grid(state, MeasurementCoeffs(c1, c2), 1.0, tau, [0.0]).g[:, 0]
    print(f"p_mid 0.5, c1={c1:.3f}, c2={c2:.3f}: visibility {visibility(g):.4f}")
