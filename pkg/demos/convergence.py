"""
Joint refinement
================

Refining space and time together. The power function falls quickly with the
fill distance; the Monte-Carlo mean error is dominated by sampling noise
once the exact mean has decayed.
"""

# %%
from kernelspde.cli import RunConfig, convergence_rows

cfg = RunConfig(subcommand="converge", paths=100, levels="9:50,19:100,39:200", workers=1)
print("      h        dt   rmse_mean  rmse_var  max_sigma")
for h, dt, rm, rv, sig in convergence_rows(cfg):
    print(f"{h:8.4f}  {dt:8.4f}  {rm:9.3g}  {rv:8.3g}  {sig:9.2e}")
