"""A double as a sum of single-precision pieces.

Two floats carry about 48 significand bits, so their sum recovers a double
to within 2^-46 of its value. Three floats cover all 53 bits.

Run: python3 demos/mixed_precision_split.py
"""

import math

from mcpc import split_scalar

for x in (math.pi, 1.0 + 2.0**-30, 0.1, 6.02214076e23):
    for n in (1, 2, 3):
        parts = split_scalar(x, n)
        acc = 0.0
        for c in parts:
            acc += c
        rel = abs(x - acc) / abs(x)
        print(f"x={x!r:<22} n={n} parts={[float(f'{c:.9g}') for c in parts]}  rel.err={rel:.2e}")
    print()
