# %% [markdown]
# # Two experiments, two verdicts
#
# The classicality test needs only five numbers per device: squeezing r,
# overall transmission eta, number of squeezed inputs K, and the detector
# pair (eta_d, p_d). Here we run it on two published parameter sets.

# %%
from gbs_classicality import bundled_config, classicality_test, f_max

for name in ("paesani2018", "zhong2019"):
    cfg = bundled_config(name)
    v = classicality_test(cfg.noise, cfg.detector, cfg.epsilon)
    print(f"{name:12s} F_max={v.f_max:.7f}  eps_min={v.eps_min:.4f}  simulable@{cfg.epsilon}: {v.simulable}")

# %% [markdown]
# The first device is simulable with about 2% total-variation error. For the
# second, eps_min exceeds 1, so the test certifies nothing for any epsilon.
#
# F_max depends on eta only through a_- = eta e^{-2r} + 1 - eta. Scanning eta
# shows where the verdict flips for the first device.

# %%
import numpy as np

cfg = bundled_config("paesani2018")
q_d = cfg.detector.q_d
for eta in np.linspace(0.02, 0.3, 8):
    eps = 2 * np.sqrt(cfg.noise.K * -np.log(f_max(cfg.noise.r, eta, q_d)))
    print(f"eta={eta:.3f}  eps_min={eps:.4f}")
