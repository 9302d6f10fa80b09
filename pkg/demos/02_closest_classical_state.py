# %% [markdown]
# # The closest classical state
#
# A lossy squeezed state sigma is a squeezed thermal state (s, n). A state is
# (t)-classical when V - tI is positive semidefinite, i.e. s <= ln((2n+1)/t)/2.
# The best classical stand-in for sigma sits on that boundary.

# %%
import math

import numpy as np

from gbs_classicality import (
    closest_classical_state,
    gaussian_fidelity_1mode,
    lossy_squeezed_params,
    is_t_classical,
)

sigma = lossy_squeezed_params(r=math.log(2), eta=0.5)
print("sigma:", sigma)
print("classical at t=1?", is_t_classical(sigma.state(), 1.0))

tau, F = closest_classical_state(sigma, t=1.0)
print("tau:  ", tau)
print("fidelity", F, "check", gaussian_fidelity_1mode(sigma, tau))

# %% [markdown]
# Brute-force check: sweep the boundary curve and confirm nothing beats tau.

# %%
from gbs_classicality import SqueezedThermalParams, classicality_boundary

ns = np.linspace(0, 1, 2001)
fs = [gaussian_fidelity_1mode(sigma, SqueezedThermalParams(classicality_boundary(n, 1.0), n)) for n in ns]
print("best on grid: n=%.4f F=%.7f" % (ns[int(np.argmax(fs))], max(fs)))
