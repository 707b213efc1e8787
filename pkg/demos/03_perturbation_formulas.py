# %% [markdown]
# # Explicit perturbation formulas
#
# Moving `T`, `S` or `A` a little changes the outer inverse in a way that
# can be written in closed form. Each formula is compared with a directly
# computed inverse, and each error bound is evaluated on the instance.

# %%
import numpy as np

from outerinv import (PerturbationScenario, gen_operator_perturbation,
                      gen_problem, gen_subspace_perturbation, outer_inverse,
                      perturb_a, perturb_full, perturb_full_bounds, perturb_s,
                      perturb_t, perturb_ts, perturb_ts_bounds)

rng = np.random.default_rng(1)
A, T, S = gen_problem(rng, 8, 8, 3)
sol = outer_inverse(A, T, S)
k = sol.kappa
print(f"kappa = {k:.2f}")

# half of each hypothesis limit
Tp = gen_subspace_perturbation(rng, T, 0.5 / (1 + k) ** 2)
Sp = gen_subspace_perturbation(rng, S, 0.5 / (3 + k))
E = gen_operator_perturbation(rng, A, sol.G2, 0.5 * 2 * k / ((1 + k) * (4 + k)))
sc = PerturbationScenario(A, E, T, Tp, S, Sp)

# %%
for name, res in [("range moves", perturb_t(A, T, S, Tp)),
                  ("kernel moves", perturb_s(A, T, S, Sp)),
                  ("both move", perturb_ts(A, T, S, Tp, Sp)),
                  ("A moves", perturb_a(A, E, T, S)),
                  ("everything", perturb_full(sc))]:
    print(f"{name:13s} rel_error={res.rel_error:.1e} hypothesis={res.hypothesis.satisfied}")

# %% [markdown]
# ## Bounds
#
# `ratio = lhs / rhs` shows how much room the inequality leaves.

# %%
for r in perturb_ts_bounds(A, T, S, Tp, Sp) + perturb_full_bounds(sc):
    print(f"{r.name:22s} lhs={r.lhs:.3e} rhs={r.rhs:.3e} ratio={r.ratio:.3f}")

# %% [markdown]
# Outside the hypotheses nothing is enforced by default: the report records
# `hypothesis_ok = False` and the numbers are still computed.

# %%
far = gen_subspace_perturbation(rng, T, 0.6)
res = perturb_t(A, T, S, far)
print("hypothesis:", res.hypothesis.satisfied, " rel_error:", f"{res.rel_error:.1e}")
