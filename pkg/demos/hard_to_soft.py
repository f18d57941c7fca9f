"""Scale the hard-edge systems toward the soft edge as alpha grows and
watch the residuals and pair distances shrink."""

from hardedge import limits

report = limits.sweep_report((1e2, 1e3, 1e4))
for rec in report["records"]:
    d = rec["pair_distance"]
    print(f"alpha={rec['alpha']:8.0f}  ode={rec['ode_residuals']['max']:.3e}  "
          f"beta2 pair={d['thm4']:.3e}  beta4 pair={d['thm5']:.3e}")
print("monotone:", report["monotone"])
