"""Classical simulability of noisy Gaussian boson sampling.

Conventions: hbar = 2 (vacuum covariance is the identity), quadratures
interleaved as ``(q1, p1, ..., qM, pM)``, and squeezing with ``phi = 0``
anti-squeezes ``q``.
"""

from importlib.resources import files

from .classicality import (
    ClassicalityVerdict,
    DetectorModel,
    NoiseParams,
    asymptotic_threshold,
    classicality_boundary,
    classicality_test,
    closest_classical_state,
    collision_bound,
    eta_infinity,
    f_max,
    fidelity_cov,
    gaussian_fidelity_1mode,
    lossy_squeezed_params,
    pair_distribution,
    pair_moments,
)
from .gaussian import (
    GaussianState,
    InterferometerSpec,
    SqueezedThermalParams,
    apply_interferometer,
    apply_loss,
    apply_squeezing,
    haar_unitary,
    is_t_classical,
    product_state,
    sts_covariance,
    thermal,
    to_sts,
    vacuum,
)
from .oracle import ExactDistribution, exact_distribution, fock_fidelity, total_variation
from .renyi import (
    RenyiOrder,
    RenyiScanRow,
    alpha_scan,
    renyi_divergence_1mode,
    renyi_min_over_classical,
)
from .sampler import (
    ConfigError,
    ExperimentConfig,
    SimulabilityError,
    detector_no_click_prob,
    noisy_output_state,
    sample,
    sample_phase_space,
    surrogate_output_covariance,
)


def bundled_config(name: str) -> ExperimentConfig:
    """Load one of the shipped case-study configs (``"paesani2018"``, ``"zhong2019"``)."""
    return ExperimentConfig.load(files(__name__) / "configs" / f"{name}.json")


__all__ = [name for name in dir() if not name.startswith("_") and name != "files"]
