"""Keep adding components until the sum reproduces the input exactly.

Smooth fields and noise both end bit-for-bit exact; the compression ratio
shows what the exactness costs with a simple run-length/varint backend.

Run: python3 demos/lossless_roundtrip.py
"""

from mcpc import construct_lossless, reconstruct
from mcpc.metrics import SYNTH_KINDS, synth_field

print(f"{'field':>18} {'codec':>8} {'comps':>5} {'bits/value':>10} {'ratio':>6} exact")
for kind in SYNTH_KINDS:
    x = synth_field(kind, (32, 32, 32), seed=0)
    for codec in ("quant", "lorenzo"):
        comps = construct_lossless(x, delta=8, codec=codec)
        bits = sum(c.payload_bits for c in comps) / x.size
        exact = reconstruct(comps, len(comps)).bitwise_equal(x)
        print(f"{kind:>18} {codec:>8} {len(comps):>5} {bits:>10.2f} {64 / bits:>6.3f} {exact}")
