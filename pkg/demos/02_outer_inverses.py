# %% [markdown]
# # Outer inverses with prescribed range and kernel
#
# `outer_inverse(A, T, S)` returns the unique `G2` with `G2 A G2 = G2`,
# range `T` and kernel `S`. It exists iff `A` is injective on `T` and
# `A T` is complementary to `S`.

# %%
import numpy as np

from outerinv import (Subspace, bott_duffin, drazin, exists_outer_inverse,
                      from_spanning, gen_problem, moore_penrose, outer_inverse,
                      weighted_moore_penrose)

rng = np.random.default_rng(0)
A, T, S = gen_problem(rng, 6, 5, 2)
sol = outer_inverse(A, T, S)
print("kappa                =", sol.kappa)
print("||G2 A G2 - G2||     =", sol.residual_defining_eq)
print("gap(R(G2), T)        =", sol.range_gap)
print("gap(N(G2), S)        =", sol.kernel_gap)
print("two factorizations   =", sol.factorization_diff)

# %% [markdown]
# When the prescription is infeasible the diagnostics say which condition
# failed.

# %%
e1 = from_spanning([1.0, 0.0])
print(exists_outer_inverse(np.eye(2), e1, e1).describe())

# %% [markdown]
# ## Classical inverses as special cases

# %%
B = rng.standard_normal((5, 2)) @ rng.standard_normal((2, 4))
print("Moore-Penrose vs pinv :", np.linalg.norm(moore_penrose(B) - np.linalg.pinv(B)))

W_row = np.diag([1.0, 2.0, 3.0, 4.0, 5.0])
W_col = np.eye(4) * 2.0
X = weighted_moore_penrose(B, W_row, W_col)
print("weighted MP, X B X = X:", np.allclose(X @ B @ X, X))

N = np.array([[2.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
D = drazin(N)
print("Drazin, D N D = D     :", np.allclose(D @ N @ D, D))

L = from_spanning([[1.0], [1.0], [0.0]])
print("Bott-Duffin:\n", bott_duffin(np.diag([1.0, 2.0, 3.0]), L))
print("full-dimensional T gives the inverse:",
      np.allclose(outer_inverse(np.diag([2.0, 4.0]), Subspace.whole(2),
                                Subspace.trivial(2)).G2, np.diag([0.5, 0.25])))
