"""Sweep the (alpha, beta) square and export phase maps.

The equal-rates family (omega_a = omega_d = Omega) has up to six phases;
raising Omega makes the low-density/high-density wedges disappear one by
one.  With unequal rates (K = omega_a/omega_d > 1) the diagram splits into
up to eleven regions.  Each sweep writes a raster CSV plus the extracted
boundary polylines, ready for any plotting tool.
"""

from pathlib import Path

from taseplk.phase import phase_sweep

OUT = Path("out/demo_phase_diagrams")
OUT.mkdir(parents=True, exist_ok=True)

for tag, omega_a, omega_d in [
    ("equal_0.25", 0.25, 0.25),
    ("equal_1.0", 1.0, 1.0),
    ("K2", 0.2, 0.1),
    ("K4", 0.4, 0.1),
]:
    pm = phase_sweep(omega_a, omega_d, grid_resolution=200)
    pm.to_csv(OUT / f"map_{tag}.csv")
    pm.segments_to_csv(OUT / f"boundaries_{tag}.csv")
    print(f"{tag}: labels {sorted(pm.label_set())} -> {OUT}/map_{tag}.csv")
