"""How many components a derivative needs compared with the field itself.

Second differences weigh the error with stencil coefficients (1, -2, 1), so
their error runs several times the field error at every prefix. Analyses
that use second derivatives therefore need more components to reach the
same absolute accuracy.

Run: python3 demos/derivative_sensitivity.py
"""

from mcpc import build_schedule, construct, stats
from mcpc.metrics import derivative_error_study, synth_field

x = synth_field("gaussian-mixture", (64, 64, 64), seed=0)
comps = construct(x, build_schedule(stats(x).range, 4, 10), "quant")
first = derivative_error_study(comps, x, order=1, axis=2)
second = derivative_error_study(comps, x, order=2, axis=2)

print(f"{'m':>3} {'field':>10} {'d/dz':>10} {'d2/dz2':>10} {'ratio2':>7}")
for (m, f, d1), (_, _, d2) in zip(first, second):
    print(f"{m:>3} {f:>10.3e} {d1:>10.3e} {d2:>10.3e} {d2 / f:>7.2f}")

threshold = 3e-6
need = [next(r[0] for r in rows if r[col] < threshold) for rows, col in ((first, 1), (first, 2), (second, 2))]
print(f"\ncomponents to get below {threshold:g}: field {need[0]}, first derivative {need[1]}, second {need[2]}")
