"""MA/DBC capacity region: sum-rate constraint plus broadcast boundary.

The access direction is capped by a single sum-rate constraint. The
broadcast direction trades the fine rate r31 (decoded by the strong
receiver) against the coarse rate r32 (decodable even after the extra
noise hop). The boundary is traced by weighted maximization over the
auxiliary input and cross-checked against a simplex-grid brute force.

Writes demos/out/boundary.csv and, when matplotlib is available,
demos/out/boundary.png.
"""

import csv
import time
from pathlib import Path

import numpy as np

import twclab as t
from twclab.regions import hull_value, upper_concave_hull

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

z1 = t.Pmf.bernoulli(0.1)
z2 = t.Pmf.bernoulli(0.1)
z3 = t.IidNoise(t.Pmf.bernoulli(0.1))

print(f"sum-rate bound (access direction): {t.sum_rate_mac(2, z3):.5f} bits")

start = time.time()
boundary = t.dbc_boundary(2, z1, z2, seed=0)
print(f"boundary tracing: {len(boundary)} Pareto points in {time.time() - start:.1f}s")
print(f"  right endpoint (all rate to the strong receiver): "
      f"({boundary[-1].r31:.5f}, {boundary[-1].r32:.5f})")
print(f"  left endpoint  (all rate to the weak receiver)  : "
      f"({boundary[0].r31:.5f}, {boundary[0].r32:.5f})")

mid = boundary[len(boundary) // 2]
print(f"  a mid-boundary point: ({mid.r31:.4f}, {mid.r32:.4f}) achieved by")
print(f"    p(u)    = {np.round(mid.aux.p_u, 4).tolist()}")
print(f"    p(x3|u) = {np.round(mid.aux.p_x3_given_u, 4).tolist()}")

start = time.time()
oracle = t.dbc_brute_force_oracle(2, z1, z2, 0.02)
print(f"grid oracle: {len(oracle)} frontier points in {time.time() - start:.1f}s")

hull = upper_concave_hull([[p.r31, p.r32] for p in boundary])
ohull = upper_concave_hull(oracle)
worst = max(abs(hull_value(hull, x) - hull_value(ohull, x)) for x, _ in oracle)
print(f"largest frontier disagreement: {worst:.2e} bits")

with open(OUT / "boundary.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["r31", "r32", "lambda"])
    for p in boundary:
        w.writerow([p.r31, p.r32, p.lam])
print(f"wrote {OUT / 'boundary.csv'}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot([p.r31 for p in boundary], [p.r32 for p in boundary], "b.-", ms=3, lw=1,
            label="traced boundary")
    ax.plot(oracle[:, 0], oracle[:, 1], "r.", ms=2, alpha=0.4, label="grid oracle")
    ax.set_xlabel("r31 (strong receiver, bits/use)")
    ax.set_ylabel("r32 (weak receiver, bits/use)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(OUT / "boundary.png", dpi=120)
    print(f"wrote {OUT / 'boundary.png'}")
except ImportError:
    print("matplotlib not installed; skipping the plot")
