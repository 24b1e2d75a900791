# On resonance (omega_j == omega_e) the single-mode factor is a pure
# cos^2. Which frequency? Three candidates are in circulation; the exact
# evolution picks one.

import math

import numpy as np

from soqd.evolve import decoherence_factor
from soqd.model import ModelParams
from soqd.resolvent import resonant_candidates, single_mode_resolvent
from soqd.subspace import build_single_mode

d = 0.07
params = ModelParams.single_mode(1.0, 1.0, d)
T = np.linspace(0, 200, 4001)

for N in (0, 1, 2, 7):
    exact = decoherence_factor(build_single_mode(params, N), T).factor
    errors = {name: np.max(np.abs(f - exact)) for name, f in resonant_candidates(d, N, T).items()}
    line = ", ".join(f"{name}: {err:.1e}" for name, err in errors.items())
    print(f"N={N}  max deviation  {line}")

# The resolvent shows why: its two poles sit at E -+ d*sqrt(4N+2) and the
# residue at E itself vanishes.
res = single_mode_resolvent(params, 2)
print("\npoles for N=2:", res.poles_hint)
print("E -+ d*sqrt(10):", 3.0 - d * math.sqrt(10), 3.0 + d * math.sqrt(10))
