# %% [markdown]
# # Which Renyi order gives the tightest bound?
#
# Total variation is bounded by sqrt((2/alpha) D_alpha) for alpha in [1/2, 1).
# Minimizing D_alpha over classical states and scanning alpha shows that
# alpha = 1/2 (the fidelity) always wins on these grids.

# %%
import math

from gbs_classicality import alpha_scan, lossy_squeezed_params
from gbs_classicality.renyi import scan_to_csv

r = math.log(10 ** (1 / 20))  # 1 dB
for q_d in (1e-2, 0.0):
    print(f"# q_d = {q_d}")
    for eta in (0.1, 0.5, 0.9):
        rows = alpha_scan(lossy_squeezed_params(r, eta), q_d, [0.5, 0.7, 0.9, 0.999])
        print(f"eta={eta}: " + "  ".join(f"a={row.alpha}:{row.bound:.2e}" for row in rows))

# %% [markdown]
# The same numbers as CSV, ready for plotting elsewhere.

# %%
print(scan_to_csv(alpha_scan(lossy_squeezed_params(r, 0.5), 1e-2, [0.5, 0.6, 0.7, 0.8, 0.9, 0.99])))
