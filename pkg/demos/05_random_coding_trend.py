"""Random-coding behavior on both sides of capacity.

Random coset codebooks with exact ML decoding: below capacity the average
block error shrinks as the blocklength grows; above capacity it is pinned
away from zero. Desk-scale blocklengths cannot reach the asymptotic rates,
so this is a trend check, not a capacity measurement.

Writes demos/out/sweep.csv and, when matplotlib is available,
demos/out/sweep.png.
"""

import csv
from pathlib import Path

import twclab as t

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

noise = t.IidNoise(t.Pmf.bernoulli(0.1))
capacity = t.region_2twc(noise, noise).c1
print(f"one-way capacity: {capacity:.4f} bits/use\n")

rows = t.rate_capacity_sweep(2, noise, [0.25], [4, 8, 12, 16],
                             codebooks_per_point=200, trials_per_codebook=100, seed=0)
rows += t.rate_capacity_sweep(2, noise, [0.9], [4, 8, 12, 16],
                              codebooks_per_point=60, trials_per_codebook=25, seed=1)

print(f"{'rate':>5} {'n':>3} {'M':>6} {'mean block error':>17}")
for r in rows:
    side = "below" if r["rate"] < capacity else "ABOVE"
    print(f"{r['rate']:>5} {r['n']:>3} {r['M']:>6} {r['mean_block_error']:>17.4f}   ({side} capacity)")

with open(OUT / "sweep.csv", "w", newline="") as fh:
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
print(f"\nwrote {OUT / 'sweep.csv'}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    for rate in (0.25, 0.9):
        pts = [(r["n"], r["mean_block_error"]) for r in rows if r["rate"] == rate]
        ax.semilogy(*zip(*pts), "o-", label=f"rate {rate}")
    ax.set_xlabel("blocklength n")
    ax.set_ylabel("mean ML block error")
    ax.legend()
    fig.tight_layout()
    fig.savefig(OUT / "sweep.png", dpi=120)
    print(f"wrote {OUT / 'sweep.png'}")
except ImportError:
    print("matplotlib not installed; skipping the plot")
