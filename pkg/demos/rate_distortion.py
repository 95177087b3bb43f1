"""Rate-distortion sweep and the per-component rate profile.

Early components are cheap because the tolerance is loose. Middle components
carry the most information. The last ones shrink again once most values are
already exact, which gives the rates an inverted-U shape.

Run: python3 demos/rate_distortion.py [out.csv]
"""

import sys

from mcpc import build_schedule, construct, stats
from mcpc.metrics import component_rates, rd_sweep, synth_field, write_csv

x = synth_field("gaussian-mixture", (64, 64, 64), seed=0)

records = rd_sweep(x, "quant", delta=8, n=16)
print(f"{'m':>3} {'R (bits)':>9} {'linf':>10} {'snr dB':>8} {'gain':>7}")
for r in records:
    print(f"{r.m:>3} {r.rate:>9.3f} {r.linf:>10.3e} {r.snr_db:>8.2f} {r.accuracy_gain:>7.3f}")

comps = construct(x, build_schedule(stats(x).range, 8, 16), "quant")
print("\nper-component rate R_i:")
peak = max(component_rates(comps, x.size))
for i, r in enumerate(component_rates(comps, x.size), start=1):
    print(f"{i:>3} {r:6.2f} " + "#" * round(40 * r / peak))

if len(sys.argv) > 1:
    write_csv(records, sys.argv[1])
    print(f"\nwrote {sys.argv[1]}")
