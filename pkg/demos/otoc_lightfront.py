"""Ballistic operator growth read off a correlator grid.

A Z measurement sits on site 1 of an open chain while an X butterfly is
planted at site n and the drive depth m varies. Until the butterfly's
causal cone reaches the measurement the correlator is exactly 1; on the
light front it collapses, and behind the front it rattles around zero.
The printed map makes the front's slope (one site per cycle toward the
measurement) visible directly.
"""

import numpy as np

from scramblesim import FloquetSpec, zero_state
from scramblesim.otoc import otoc_exact, site_pauli

N_SITES = 13
MAX_CYCLES = 20
SPEC = FloquetSpec(N_SITES, jt=np.pi / 2, bxt=np.pi / 2, bzt=1.3 * np.pi / 2, boundary="open")

z1 = site_pauli("Z", 1)
grid = np.zeros((MAX_CYCLES + 1, N_SITES))
for n in range(1, N_SITES + 1):
    xn = site_pauli("X", n)
    for m in range(MAX_CYCLES + 1):
        grid[m, n - 1] = otoc_exact(SPEC, m, z1, xn, zero_state(N_SITES)).real

GLYPHS = " .:-=+*#%@"  # 0 -> scrambled, 9 -> untouched


def glyph(value):
    return GLYPHS[min(9, int(round((value + 1) / 2 * 9)))]


print("correlator map: columns n = 1..13, rows m = 0..20 ('@' = 1, ' ' = -1)")
print("     " + "".join(f"{n:>2}" for n in range(1, N_SITES + 1)))
for m in range(MAX_CYCLES + 1):
    print(f"m={m:>2}  " + " ".join(glyph(v) for v in grid[m]))

print("\nfirst cycle at which each butterfly site has dropped below 0.5:")
for n in range(1, N_SITES + 1):
    dropped = np.nonzero(grid[:, n - 1] < 0.5)[0]
    arrival = f"m = {dropped[0]}" if dropped.size else "beyond the grid"
    print(f"  site {n:>2}: {arrival}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 5))
    im = ax.imshow(grid, origin="lower", aspect="auto", cmap="RdBu",
                   extent=(0.5, N_SITES + 0.5, -0.5, MAX_CYCLES + 0.5),
                   vmin=-1, vmax=1)
    ax.set(xlabel="butterfly site n", ylabel="drive cycles m")
    fig.colorbar(im, label="correlator")
    fig.tight_layout()
    fig.savefig("otoc_lightfront.png", dpi=150)
    print("wrote otoc_lightfront.png")
except ImportError:
    pass
