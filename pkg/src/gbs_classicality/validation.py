"""Sampler-versus-oracle battery for small random instances.

Each instance draws a random noisy-GBS configuration, then checks

* the empirical click distribution of the sampler against the exact
  distribution of the surrogate state (total variation and chi-square), and
* the error bound: the exact distributions of the true output state and of the
  surrogate differ in total variation by at most ``eps_min``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import chisquare

from .classicality import DetectorModel, NoiseParams
from .gaussian import InterferometerSpec
from .oracle import empirical_distribution, exact_distribution, total_variation
from .sampler import ExperimentConfig, noisy_output_state, sample, surrogate_output_covariance

MAX_VALIDATE_MODES = 6
TV_LIMIT = 0.01
P_LIMIT = 1e-3
MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class InstanceReport:
    K: int
    M: int
    r: float
    eta: float
    eta_d: float
    p_d: float
    haar_seed: int
    eps_min: float
    simulable: bool
    tv_sampler: float
    chi2_pvalue: float
    tv_bound: float
    sampler_ok: bool
    bound_ok: bool

    def to_dict(self) -> dict:
        return asdict(self)


def pattern_chisquare(counts: np.ndarray, probs: np.ndarray, min_expected: float = MIN_EXPECTED) -> float:
    """Chi-square goodness-of-fit p-value with sparse cells pooled.

    Cells with expected count below ``min_expected`` are merged into one; a
    count landing in a zero-probability cell gives ``p = 0``.
    """
    counts = np.asarray(counts, dtype=float)
    expected = np.asarray(probs, dtype=float) * counts.sum()
    if np.any((expected == 0) & (counts > 0)):
        return 0.0
    big = expected >= min_expected
    obs = list(counts[big])
    exp = list(expected[big])
    if (~big).any() and expected[~big].sum() > 0:
        obs.append(counts[~big].sum())
        exp.append(expected[~big].sum())
    if len(obs) < 2:
        return 1.0
    exp = np.array(exp)
    exp *= np.sum(obs) / exp.sum()  # guard against rounding in the totals
    return float(chisquare(obs, exp).pvalue)


def random_config(rng: np.random.Generator, M: int, K: int | None = None) -> ExperimentConfig:
    """Random small configuration that passes the classicality test at ``epsilon = 1``.

    Draws are repeated until the test passes, so the sampler can always run.
    """
    while True:
        k = int(rng.integers(1, min(2, M) + 1)) if K is None else K
        noise = NoiseParams(r=float(rng.uniform(0.05, 0.6)), eta=float(rng.uniform(0.05, 0.9)), K=k, M=M)
        det = DetectorModel(eta_d=float(rng.uniform(0.6, 0.99)), p_d=float(rng.uniform(0.0, 0.02)))
        seed = int(rng.integers(0, 2**31))
        config = ExperimentConfig(noise, det, InterferometerSpec.haar(M, seed), epsilon=1.0)
        if config.verdict().simulable:
            return config


def check_instance(config: ExperimentConfig, shots: int, seed) -> InstanceReport:
    """Run both checks for one configuration (which must pass the classicality test)."""
    verdict = config.verdict()
    surrogate = exact_distribution(surrogate_output_covariance(config, check=False), config.detector)
    truth = exact_distribution(noisy_output_state(config), config.detector)
    tv_bound = total_variation(truth, surrogate)
    if verdict.simulable:
        samples = sample(config, shots, seed)
        emp = empirical_distribution(samples, config.noise.M)
        tv_sampler = total_variation(emp, surrogate)
        pval = pattern_chisquare(emp.probs * shots, surrogate.probs)
    else:
        tv_sampler, pval = float("nan"), float("nan")
    n = config.noise
    return InstanceReport(
        K=n.K, M=n.M, r=n.r, eta=n.eta,
        eta_d=config.detector.eta_d, p_d=config.detector.p_d,
        haar_seed=config.interferometer.haar_seed if config.interferometer.haar_seed is not None else -1,
        eps_min=verdict.eps_min, simulable=verdict.simulable,
        tv_sampler=tv_sampler, chi2_pvalue=pval, tv_bound=tv_bound,
        sampler_ok=bool(verdict.simulable and tv_sampler < TV_LIMIT and pval > P_LIMIT),
        bound_ok=bool(tv_bound <= verdict.eps_min),
    )


def validation_report(M: int, seed: int = 0, shots: int = 100_000, instances: int = 3,
                      vacuum: bool = False) -> dict:
    """Battery of ``instances`` random ``M``-mode checks, as a JSON-ready dict.

    With ``vacuum`` set, every instance has ``r = 0`` and no dark counts, so
    both total-variation distances are exactly zero.
    """
    if not 1 <= M <= MAX_VALIDATE_MODES:
        raise ValueError(f"validate supports 1 <= M <= {MAX_VALIDATE_MODES}, got {M}")
    rng = np.random.default_rng(seed)
    seeds = [int(x) for x in np.random.SeedSequence(seed).generate_state(instances)]
    rows = []
    for i in range(instances):
        config = random_config(rng, M)
        if vacuum:
            n = config.noise
            config = ExperimentConfig(
                NoiseParams(0.0, n.eta, n.K, M), DetectorModel(config.detector.eta_d, 0.0),
                config.interferometer, 1.0,
            )
        rows.append(check_instance(config, shots, seeds[i]).to_dict())
    return {
        "modes": M,
        "seed": seed,
        "shots": shots,
        "tv_limit": TV_LIMIT,
        "p_limit": P_LIMIT,
        "instances": rows,
        "passed": all(r["sampler_ok"] and r["bound_ok"] for r in rows),
    }
