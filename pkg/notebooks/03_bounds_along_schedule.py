# %% [markdown]
# # How fast do the correction factors approach 1?
#
# With delta = t^(-5/12) the factors L and U tend to 1, but slowly: the
# Gaussian-mass factor has exponent of order t^(1/6) and the first factor
# of L behaves like (1 + d^6 t^(-1/2))^(-1/2).

# %%
from diffmat import lu_factors, make_params, probability_bounds
from diffmat.bounds import auto_delta

# %%
p = make_params(2, 3, 2)
print(f"{'log2 t':>6} {'L':>8} {'U':>8}")
for e in range(6, 41, 4):
    t = 2**e
    lu = lu_factors(p, t ** (-5 / 12), t)
    print(f"{e:>6} {lu.L:>8.4f} {lu.U:>8.4f}")

# %% [markdown]
# At desk scale the rigorous bounds are loose but they do contain the truth.

# %%
for lam in (1, 2, 4):
    q = make_params(2, 3, lam)
    rep = probability_bounds(q, auto_delta(q))
    print(lam, rep.rigorous, f"[{rep.lower:.4g}, {rep.upper:.4g}]")
