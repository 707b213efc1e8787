# %% [markdown]
# # The randomized verification suite
#
# Each trial draws a solvable problem, moves `T`, `S` and `A` to a fixed
# fraction of the hypothesis limits, and checks every formula and bound.
# The same run is available as `outerinv verify`.

# %%
from outerinv import TrialConfig, run_suite

report = run_suite(TrialConfig(seed=42, trials=30, n_x=8, n_y=8, t=3,
                               gap_budget_T=0.9, gap_budget_S=0.9, e_budget=0.9),
                   threads=4)
agg = report.aggregates
print(f"{agg['passed']}/{agg['n_trials']} trials passed")
print("kappa range:", agg["kappa"])

# %%
for name, err in sorted(agg["max_rel_error"].items()):
    print(f"{name:13s} max rel_error {err:.1e}")

# %% [markdown]
# The largest observed `lhs / rhs` per inequality measures how tight each
# bound is on random instances.

# %%
for name, ratio in sorted(agg["max_bound_ratio"].items()):
    print(f"{name:22s} {ratio:.3f}")
