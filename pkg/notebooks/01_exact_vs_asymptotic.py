# %% [markdown]
# # Exact counts against the asymptotic main term
#
# For g = 2 and k = 3 every balanced column multiset is forced to use the
# four normalized columns equally often, so the count has a closed form.
# We compare it with the brute-force counter, the DFT counter and the
# asymptotic main term.

# %%
import math

from diffmat import count_brute, count_dft, make_params
from diffmat.bounds import asymptotic_count_log
from diffmat.exact import count_closed_form_g2k3

# %%
for lam in (2, 4):
    p = make_params(2, 3, lam)
    print(lam, count_brute(p), count_dft(p).count, count_closed_form_g2k3(p))

# %% [markdown]
# The ratio exact / main term climbs towards 1, roughly like 1 - c/lambda.

# %%
print(f"{'lambda':>6} {'log10 count':>12} {'ratio':>8}")
for lam in (2, 4, 8, 16, 32, 64):
    p = make_params(2, 3, lam)
    n = count_brute(p)
    ratio = 10 ** (math.log10(n) - asymptotic_count_log(p))
    print(f"{lam:>6} {math.log10(n):>12.3f} {ratio:>8.4f}")

# %% [markdown]
# Odd lambda with even g gives no matrices at all; both exact routes agree.

# %%
for case in [(2, 3, 1), (2, 3, 3), (4, 3, 1)]:
    p = make_params(*case)
    print(case, count_brute(p), count_dft(p).count, p.advisories[0])
