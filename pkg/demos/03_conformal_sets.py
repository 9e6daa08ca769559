"""Level-set prediction sets: the threshold C_k, the exact conformal p-values
it over-covers, and how often clean held-out points get flagged."""

import numpy as np

from bradykde.bandwidth import select_bandwidth
from bradykde.conformal import fit_prediction_set, p_value_field, test_onsets, threshold_rank

rng = np.random.default_rng(3)
cov = [[1.0, 0.5], [0.5, 0.8]]
train = rng.multivariate_normal([0, 0], cov, 400)
val = rng.multivariate_normal([0, 0], cov, 200)

h, _ = select_bandwidth(val, "gaussian")
pset = fit_prediction_set(train, "gaussian", h, p_fa=0.05, grid_size=96)
print(f"h = {h:.3f}, k = {threshold_rank(400, 0.05)}, C_k = {pset.c_k:.5f}")
print(f"{pset.mask.sum()} of {pset.mask.size} grid nodes in the set, hull has {len(pset.hull)} vertices")

# Every node with an exact p-value >= P_FA must already be in the level set.
eta = p_value_field(train, pset.grid, "gaussian", h)
print("nodes with eta >= 0.05 outside the set:", int(np.sum((eta >= 0.05) & ~pset.mask)))
print("nodes in the set with eta < 0.05:      ", int(np.sum((eta < 0.05) & pset.mask)), "(the price of the shortcut)")

held = rng.multivariate_normal([0, 0], cov, 5000)
# Coverage holds on average over training draws; one draw scatters around P_FA.
print(f"\nflagged fraction of clean points: {test_onsets(pset, held).mean():.4f}")
far = np.array([[4.0, -4.0], [0.0, 0.0], [3.0, 3.0]])
for p, f in zip(far, test_onsets(pset, far)):
    print(f"  {p} -> {'onset' if f else 'normal'}")
