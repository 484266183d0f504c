"""A seeded 40 x 20 x 40 instance (32,000 variables) with the high-dimensional preset."""
import time

from entropic_lp import BisectionConfig, RandomSpec, full_solve, random_instance

start = time.perf_counter()
inst = random_instance(RandomSpec((20, 40, 40), seed=0, require_not_attainable=True))
report = full_solve(inst, BisectionConfig.high_dimensional())
print(f"shape {inst.shape}, {inst.cost.size} variables")
print(f"phase {report.phase.value}, value {report.value:.8f}, multiplier {report.lam:.8f}, g {report.g_val:.2e}")
print(f"outer {report.outer_iterations}, inner total {report.inner_iterations_total}, "
      f"{time.perf_counter() - start:.1f}s")
