# Weak coupling to a dense comb: the factor decays like exp(-Gamma T) with
# Gamma = 4 pi rho d^2, twice the single-excitation rate.

from soqd.experiments import continuum_check, single_comb_decay
from soqd.model import flat_density
from soqd.resolvent import wigner_weisskopf

point = single_comb_decay(spacing=0.05, coupling=0.02)
print(f"{point.count} modes, spacing {point.spacing}")
print(f"predicted Gamma {point.predicted_rate:.5f}, fitted {point.fit.rate:.5f} "
      f"(R^2 {point.fit.r_squared:.5f}, error {100 * point.relative_error:.2f}%)")
print(f"rate with couplings / sqrt(2): ratio {point.stimulation_ratio:.3f}")

# Denser combs (and wider bands) get closer to the continuum value.
_, points = continuum_check()
for p in points:
    print(f"spacing {p.spacing:<7g} modes {p.count:<4d} error {100 * p.relative_error:.2f}%")

# The frequency shift: zero for a band centred on omega_e, a log otherwise.
for lo, hi in ((0.0, 2.0), (0.5, 1.3)):
    ww = wigner_weisskopf(flat_density(10.0, 0.02, lo, hi), 1.0)
    print(f"support [{lo}, {hi}]: Gamma {ww.gamma_e:.6f}, Delta {ww.delta_e:+.3e}")
