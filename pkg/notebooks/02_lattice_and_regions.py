# %% [markdown]
# # Where the characteristic function has modulus one
#
# The points of the torus where |Phi| = 1 form a finite group generated by
# one building block per pair (i, j) with i < j < k.  Around each of them
# the integrand looks like a Gaussian; elsewhere it is uniformly small.

# %%
import numpy as np

from diffmat import classify_region, enumerate_lambda0, make_params, phi
from diffmat.lattice import block_pairs
from diffmat.quad import decomposition_check

# %%
p = make_params(3, 4, 1)
pts = enumerate_lambda0(p)
print(len(pts), "points, generators", block_pairs(p))
print("max | |Phi| - 1 | on the group:", np.abs(np.abs(phi(p, pts)) - 1).max())

# %% [markdown]
# Classifying random points: most of the torus is far from the coarse grid.

# %%
q = make_params(2, 3, 1)
rng = np.random.default_rng(0)
kinds = [classify_region(q, th, 0.5).kind for th in rng.uniform(-np.pi, np.pi, (2000, q.d))]
print({k: kinds.count(k) for k in ("primary", "RA", "RB")})

# %% [markdown]
# Tiling the torus by boxes of half-width just under pi/g and folding the
# group boxes onto the origin recovers the exact return probability 3/32.

# %%
print(decomposition_check(make_params(2, 3, 2)))
