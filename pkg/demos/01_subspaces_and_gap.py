# %% [markdown]
# # Subspaces, the gap and projectors
#
# A subspace is stored as an orthonormal basis. The one-sided distance
# `delta(M, N)` is the largest distance from a unit vector of `M` to `N`;
# `gap` is the larger of the two directions.

# %%
import numpy as np

from outerinv import Subspace, delta, from_spanning, gap, oblique_projector

e1 = from_spanning([1.0, 0.0])
e2 = from_spanning([0.0, 1.0])
diag = from_spanning([1.0, 1.0])
print("gap(e1, e2)       =", gap(e1, e2))
print("gap(e1, diag)     =", gap(e1, diag), " (sin 45 deg =", np.sin(np.pi / 4), ")")
print("delta(e1, R^2)    =", delta(e1, Subspace.whole(2)))

# %% [markdown]
# The gap is the sine of the largest principal angle when the dimensions
# agree. A line tilted by angle `theta` sits at gap `sin(theta)`.

# %%
for theta in (0.01, 0.1, 0.5):
    tilted = from_spanning([np.cos(theta), np.sin(theta)])
    print(f"theta={theta:<5} gap={gap(e1, tilted):.6f}  sin={np.sin(theta):.6f}")

# %% [markdown]
# ## Oblique projectors
#
# With `R` and `N` complementary, the projector onto `R` along `N` is
# idempotent but not symmetric.

# %%
P = oblique_projector(e1, diag)
print(P)
print("idempotent:", np.allclose(P @ P, P), " symmetric:", np.allclose(P, P.T))
