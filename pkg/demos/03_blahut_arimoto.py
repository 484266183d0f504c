"""Action-independent costs: the reduced loop against the full solver."""
import numpy as np

from entropic_lp import ba_solve, detect_reducible, full_solve, tile
from entropic_lp.ba import ReducedInstance

rng = np.random.default_rng(1)
red = ReducedInstance(np.full(4, 0.25), np.floor(rng.random((4, 3)) * 101) / 10, num_a=2)
inst = tile(red)
assert detect_reducible(inst) is not None

reduced = ba_solve(red)
full = full_solve(inst)
print(f"reduced value {reduced.value:.12f}  multiplier {reduced.lam:.10f}  phase {reduced.phase.value}")
print(f"full value    {full.value:.12f}  multiplier {full.lam:.10f}  phase {full.phase.value}")
print(f"gap           {abs(reduced.value - full.value):.2e}")
print("reduced policy:\n", np.round(reduced.reduced_policy, 6))
