# %% [markdown]
# # Sampling, and checking the sampler
#
# For a small device we can afford the exact click distribution (2^M
# determinants). The sampler should reproduce the surrogate's distribution,
# and the surrogate should sit within eps_min of the true one.

# %%
import numpy as np

from gbs_classicality import (
    DetectorModel,
    ExperimentConfig,
    InterferometerSpec,
    NoiseParams,
    exact_distribution,
    noisy_output_state,
    sample,
    surrogate_output_covariance,
    total_variation,
)
from gbs_classicality.oracle import empirical_distribution

cfg = ExperimentConfig(
    NoiseParams(r=0.3, eta=0.6, K=2, M=4),
    DetectorModel(eta_d=0.9, p_d=1e-3),
    InterferometerSpec.haar(4, seed=3),
    epsilon=1.0,
)
v = cfg.verdict()
print("eps_min", v.eps_min)

shots = sample(cfg, 100_000, rng_seed=11)
surrogate = exact_distribution(surrogate_output_covariance(cfg), cfg.detector)
truth = exact_distribution(noisy_output_state(cfg), cfg.detector)
emp = empirical_distribution(shots, 4)

print("TV(sampler, surrogate) =", total_variation(emp, surrogate))
print("TV(truth, surrogate)   =", total_variation(truth, surrogate), "<= eps_min:",
      total_variation(truth, surrogate) <= v.eps_min)

# %% [markdown]
# First few patterns: true device, classical surrogate, sampler histogram.

# %%
for pattern, a, b, c in zip(truth.patterns()[:6], truth.probs, surrogate.probs, emp.probs):
    print(pattern, f"{a:.4f} {b:.4f} {c:.4f}")
