# Two atoms, one excited and one not, next to a single reservoir mode that
# already holds N photons. How quickly do the fringes in the intensity
# correlation come and go?
#
# Run:  python demos/01_single_mode_oscillations.py

import math

import numpy as np

from soqd.evolve import decoherence_factor, default_times
from soqd.experiments import extract_features, fit_single_cosine
from soqd.model import ModelParams
from soqd.subspace import build_single_mode

# omega_e = 1 sets the unit. The mode sits 0.20 above it, coupling 0.07.
params = ModelParams.single_mode(omega_e=1.0, omega_j=1.2, d=0.07)
times = default_times(800.0, 4096)

# Each photon number gives a 3x3 problem (2x2 for the vacuum).
for N in (0, 1, 2, 7):
    system = build_single_mode(params, N)
    curve = decoherence_factor(system, times)
    feats = extract_features(curve, fit=False)
    print(f"N={N}: dim {system.dim}, dominant frequency {feats.dominant_frequency:.4f}, "
          f"lowest factor {curve.factor.min():.3f}")

# More photons, faster oscillation. Off resonance the factor never reaches
# zero, so the fringes are never completely washed out.

# The vacuum case couples to one channel only, so it is an exact cosine
# with the two-level Rabi frequency sqrt(delta^2 + 8 d^2).
vac = decoherence_factor(build_single_mode(params, 0), times)
fit = fit_single_cosine(vac.times, vac.factor)
print(f"\nvacuum cosine fit: frequency {fit.frequency:.10f}, "
      f"expected {math.sqrt(0.2**2 + 8 * 0.07**2):.10f}, rms residual {fit.rms_residual:.1e}")

# A quick look at the first few samples of the N = 7 curve
curve = decoherence_factor(build_single_mode(params, 7), times[:8])
print("\nT, factor for N=7:")
print(np.column_stack([curve.times, curve.factor]))
