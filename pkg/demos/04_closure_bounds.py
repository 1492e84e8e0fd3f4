#!/usr/bin/env python3
"""Uniform approximate closure: fitted residuals against analytic bounds.

For a field spanned by the dictionary, the generator's residual on a
held-out grid is compared with the closure bounds at increasing steepness
scales.  Two bound routes are combined: grid maxima of the two
approximation-error sums (bar_B1, tilde_B2) and expectation-based
per-term bounds (bar_B2, tilde_B1); B is the smaller route total.  The
residual decays exponentially while remaining under its budget.
"""

import numpy as np

from sillkoop import (
    ConjLogistic,
    SillDictionary,
    SpannedField,
    closure_experiment,
    half_cell_shift,
    lattice_grid,
)

# centers sit at quarter-cell offsets of the lattice, so both the training
# grid and the held-out half-cell shift keep clearance 0.175; steepness
# times clearance exceeds one, putting the sweep in the decaying regime
d = SillDictionary(
    2,
    (
        ConjLogistic([-1.225, 0.525], [7.0, 7.4]),
        ConjLogistic([0.175, -0.875], [7.6, 6.9]),
        ConjLogistic([-0.525, 1.225], [7.2, 7.8]),
    ),
)
W = np.array([[0.8, -0.5, 0.3], [-0.4, 0.6, 0.7]])
sf = SpannedField(d, W)

box = [(-2.8, 2.8), (-2.8, 2.8)]
train = lattice_grid(box, 9)
held = half_cell_shift(box, 9)
print("training grid: 81 points, held-out grid: half-cell shifted copy")

scales = [1, 2, 4, 8, 16, 32, 64]
reports = closure_experiment(sf, train, scales, holdout_grid=held, delta=0.17)

print("\n scale   residual_max   bar_B1       bar_B2    tilde_B1   tilde_B2     B")
for r in reports:
    print(
        f"  {r.alpha_scale:4.0f}   {r.residual_max:.4e}   {r.bar_B1:.3e} "
        f"{r.bar_B2:9.3f} {r.tilde_B1:10.4f} {r.tilde_B2:10.3e} {r.B:8.3f}"
    )

first, last = reports[0], reports[-1]
print(f"\nresidual drop from scale {first.alpha_scale:.0f} to {last.alpha_scale:.0f}: "
      f"{first.residual_max / last.residual_max:.2e}x")
print("the grid-max bounds (bar_B1, tilde_B2) decay with steepness; the")
print("expectation bounds grow linearly in it, so B eventually tracks them")
