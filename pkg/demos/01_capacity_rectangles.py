"""Two-way capacity rectangles for additive-noise channels.

The rectangle per direction is log2(q) minus the entropy rate of the noise
hitting the opposite receiver. Memory changes nothing beyond the entropy
rate, and for the correlated delayed-copy pair the rectangle collapses to
(0, 0) even though an adaptive scheme moves a full bit per use (see demo 03
and 04 for the pathwise story).
"""

import numpy as np

import twclab as t

print("=== i.i.d. binary noise, flip probability 0.1 ===")
noise = t.IidNoise(t.Pmf.bernoulli(0.1))
r = t.region_2twc(noise, noise)
print(f"entropy rate     : {noise.entropy_rate():.5f} bits")
print(f"capacity region  : R1 <= {r.c1:.5f}, R2 <= {r.c2:.5f}")

print("\n=== Markov noise with the same marginal statistics ===")
markov = t.MarkovNoise([[0.9, 0.1], [0.1, 0.9]])
rm = t.region_2twc(markov, markov)
print(f"entropy rate     : {markov.entropy_rate():.5f} bits (same as i.i.d.)")
print(f"capacity region  : R1 <= {rm.c1:.5f}, R2 <= {rm.c2:.5f}")

path = markov.sample_path(500_000, t.derive_rng(0))
emp = t.empirical_entropy_rate(path, 1)
print(f"plug-in estimate : {emp:.5f} bits from a 5e5-step path")

print("\n=== a chain with asymmetric rows ===")
skew = t.MarkovNoise([[0.9, 0.1], [0.3, 0.7]])
print(f"stationary law   : {skew.stationary.probs}")
print(f"entropy rate     : {skew.entropy_rate():.5f} bits")
print(f"one-direction cap: {t.region_2twc(skew, skew).c1:.5f} bits")

print("\n=== capacity vs noise level ===")
print("p      capacity")
for p in np.arange(0.0, 0.51, 0.1):
    c = t.region_2twc(t.IidNoise(t.Pmf.bernoulli(p)), t.IidNoise(t.Pmf.bernoulli(p))).c1
    print(f"{p:.2f}   {c:.5f}")

print("\n=== correlated delayed-copy pair ===")
pair = t.DelayedCopyPair()
print(f"marginal entropy rates: {pair.marginal_entropy_rates()}")
r0 = t.region_2twc(pair)
print(f"non-adaptive region   : ({r0.c1}, {r0.c2})  <- no rate at all without adaptation")
print("membership checks     :",
      t.region_contains(r0, (0.0, 0.0)),
      t.region_contains(r0, (0.1, 0.0)))
