"""Store a field once, then pull back only as much of it as an accuracy target needs.

Run: python3 demos/progressive_retrieval.py
"""

import tempfile
from pathlib import Path

from mcpc import Archive, build_schedule, components_needed, construct, read_archive, reconstruct, stats, write_archive
from mcpc.archive import header_size
from mcpc.metrics import synth_field

x = synth_field("gaussian-mixture", (48, 48, 48), seed=3)
st = stats(x)
print(f"field {x.dims}, range {st.range:.4f}")

# Six components, each 2^-6 tighter than the last.
schedule = build_schedule(st.range, delta=6, n=6)
comps = construct(x, schedule, "lorenzo")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "field.mcpc"
    total = write_archive(Archive(x.dims, comps, 6, st.range), path)
    print(f"archive: {total} bytes for {len(comps)} components\n")

    # The header alone is enough to plan a retrieval.
    meta = read_archive(path, prefix=0)
    print(f"{'target':>10} {'m':>2} {'achieved':>12} {'bytes read':>11}")
    for target in (1e-2, 1e-4, 1e-6, 1e-9):
        m, met = components_needed(meta.components, target)
        part = read_archive(path, prefix=m)
        approx = reconstruct(part.components, m)
        err = float(abs(x.values - approx.values).max())
        print(f"{target:>10.0e} {m:>2} {err:>12.3e} {part.bytes_read:>11}")

    print(f"\nheader is {header_size(3, len(comps))} bytes; each tighter target only adds payload bytes.")
