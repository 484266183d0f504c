"""Solve the 2x2x2 coordination game and compare with its closed form."""
import numpy as np

from entropic_lp import BisectionConfig, full_solve, ghn_analytic, ghn_instance, kkt_residual

inst = ghn_instance()
report = full_solve(inst, BisectionConfig(eps_b=1e-10, eps_f=1e-12))
gamma, q_bar, value = ghn_analytic()

print(f"phase            {report.phase.value}")
print(f"value            {report.value:.10f}   closed form {value:.10f}")
print(f"multiplier       {report.lam:.10f}")
print(f"outer iterations {report.outer_iterations}")
print(f"|q - q_bar|      {np.linalg.norm(report.policy - q_bar):.2e}   gamma = {gamma:.8f}")
print(f"KKT              {kkt_residual(inst, report.policy, report.lam)}")
print("policy, state 0:\n", np.round(report.policy[0], 6))
