"""Outer bisection counts on the d x d x d family against the bracket bound."""
import math

from entropic_lp import BisectionConfig, extended_instance, full_solve, k0_bound

cfg = BisectionConfig(eps_b=1e-10, eps_f=1e-12)
print(f"{'d':>3} {'outer':>6} {'k0':>4} {'g at limit':>11} {'ln d':>8} {'value':>12}")
for d in range(2, 19):
    inst = extended_instance(d)
    report = full_solve(inst, cfg)
    print(f"{d:3d} {report.outer_iterations:6d} {k0_bound(inst, cfg.eps_b):4d} "
          f"{report.attain.g_at_limit:11.8f} {math.log(d):8.5f} {report.value:12.8f}")
