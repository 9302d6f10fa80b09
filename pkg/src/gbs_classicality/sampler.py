"""Approximate GBS sampler built on the closest classical surrogate.

Pipeline per call:

1. Abort unless the device passes the classicality test at ``epsilon``.
2. Replace each lossy squeezed input by its closest ``(t_bar)``-classical
   state and push the product through the interferometer.
3. Draw phase-space points from the ``(t_bar)``-PQD of the surrogate, a normal
   density with covariance ``V - t_bar I``.
4. For every mode, report "no click" with probability ``p0(x_i)``, the
   rescaled detector PQD ``2 pi W_Pi^{(-t_bar)}(0 | x_i)``.

Note on step 3: some write-ups of this algorithm list the covariance as
``(V - t_bar I)^{-1}``. The defining density has exponent
``-x^T (V - t_bar I)^{-1} x / 2``, i.e. covariance ``V - t_bar I``, which is
what is used here.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import block_diag

from .classicality import (
    ClassicalityVerdict,
    DetectorModel,
    NoiseParams,
    classicality_test,
    closest_classical_state,
    lossy_squeezed_params,
)
from .gaussian import GaussianState, InterferometerSpec, apply_interferometer

EIG_FLOOR = 1e-12
NEG_TOL = 1e-9
BATCH = 1 << 16


class ConfigError(ValueError):
    """Malformed experiment configuration; the message names the field."""


class SimulabilityError(RuntimeError):
    """The device fails the classicality test, so the sampler refuses to run."""

    def __init__(self, verdict: ClassicalityVerdict, epsilon: float):
        self.verdict = verdict
        self.epsilon = epsilon
        super().__init__(
            f"classicality test failed: eps_min={verdict.eps_min:.4g} is not below "
            f"epsilon={epsilon:.4g}"
        )

    def to_dict(self) -> dict:
        return {"error": "classicality_test_failed", "epsilon": self.epsilon,
                **self.verdict.to_dict()}


@dataclass(frozen=True)
class ExperimentConfig:
    noise: NoiseParams
    detector: DetectorModel
    interferometer: InterferometerSpec
    epsilon: float

    def __post_init__(self):
        if self.interferometer.modes != self.noise.M:
            raise ConfigError(
                f"unitary: acts on {self.interferometer.modes} modes but M={self.noise.M}"
            )
        if not 0 <= self.epsilon <= 1:
            raise ConfigError(f"epsilon: must lie in [0, 1], got {self.epsilon}")

    def verdict(self) -> ClassicalityVerdict:
        return classicality_test(self.noise, self.detector, self.epsilon)

    def to_dict(self) -> dict:
        return {
            "K": self.noise.K,
            "M": self.noise.M,
            "r": self.noise.r,
            "eta": self.noise.eta,
            "detector": {"eta_d": self.detector.eta_d, "p_d": self.detector.p_d},
            "unitary": self.interferometer.to_dict(),
            "epsilon": self.epsilon,
        }

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        def field(container, key, kind, where=""):
            if not isinstance(container, dict) or key not in container:
                raise ConfigError(f"{where}{key}: missing required field")
            try:
                return kind(container[key])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{where}{key}: {exc}") from None

        K, M = field(d, "K", int), field(d, "M", int)
        r, eta = field(d, "r", float), field(d, "eta", float)
        epsilon = field(d, "epsilon", float)
        det = field(d, "detector", dict)
        eta_d = field(det, "eta_d", float, "detector.")
        p_d = field(det, "p_d", float, "detector.")
        unitary = dict(field(d, "unitary", dict))
        if "haar_seed" in unitary:
            unitary.setdefault("modes", M)
        try:
            noise = NoiseParams(r=r, eta=eta, K=K, M=M)
        except ValueError as exc:
            raise ConfigError(f"K/M/r/eta: {exc}") from None
        try:
            detector = DetectorModel(eta_d=eta_d, p_d=p_d)
        except ValueError as exc:
            raise ConfigError(f"detector: {exc}") from None
        try:
            interferometer = InterferometerSpec.from_dict(unitary)
        except ValueError as exc:
            raise ConfigError(f"unitary: {exc}") from None
        return cls(noise, detector, interferometer, epsilon)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        return cls.from_dict(data)


def _input_covariance(single_mode_cov: np.ndarray, K: int, M: int) -> np.ndarray:
    return block_diag(*([single_mode_cov] * K + [np.eye(2)] * (M - K)))


def noisy_output_state(config: ExperimentConfig) -> GaussianState:
    """``rho_out``: ``K`` lossy squeezed inputs plus vacua through the interferometer."""
    noise = config.noise
    sigma = lossy_squeezed_params(noise.r, noise.eta)
    V = _input_covariance(sigma.covariance(), noise.K, noise.M)
    return apply_interferometer(GaussianState(V), config.interferometer)


def surrogate_output_covariance(config: ExperimentConfig, check: bool = True) -> GaussianState:
    """Output state of the classical surrogate (each input replaced by its closest
    ``(t_bar)``-classical state).

    Raises:
        SimulabilityError: if ``check`` is set and the test fails at ``config.epsilon``.
    """
    if check:
        verdict = config.verdict()
        if not verdict.simulable:
            raise SimulabilityError(verdict, config.epsilon)
    noise = config.noise
    sigma = lossy_squeezed_params(noise.r, noise.eta)
    tau, _ = closest_classical_state(sigma, config.detector.t_bar)
    V = _input_covariance(tau.covariance(), noise.K, noise.M)
    return apply_interferometer(GaussianState(V), config.interferometer)


def pqd_factor(state: GaussianState, t_bar: float) -> np.ndarray:
    """Matrix ``L`` with ``L L^T = V - t_bar I``, dropping null directions."""
    cov = state.cov if isinstance(state, GaussianState) else np.asarray(state)
    sigma = cov - t_bar * np.eye(cov.shape[0])
    lam, U = np.linalg.eigh(sigma)
    if lam[0] < -NEG_TOL:
        raise ValueError(
            f"state is not ({t_bar:.6g})-classical: V - t I has eigenvalue {lam[0]:.3g}"
        )
    keep = lam > EIG_FLOOR
    return U[:, keep] * np.sqrt(lam[keep])


def sample_phase_space(state: GaussianState, t_bar: float, rng_seed, count: int) -> np.ndarray:
    """``count`` draws from the ``(t_bar)``-PQD of ``state``, shape ``(count, 2M)``."""
    L = pqd_factor(state, t_bar)
    rng = np.random.default_rng(rng_seed)
    z = rng.standard_normal((count, L.shape[1]))
    return z @ L.T


def detector_no_click_prob(x_mode: np.ndarray, det: DetectorModel, t_bar: float) -> np.ndarray:
    """``p0(x) = 2 pi W_Pi^{(-t)}(0 | x)`` clipped to ``[0, 1]``.

    ``x_mode`` has trailing dimension 2 (one mode's ``q, p``).
    """
    c = 1 - det.eta_d * (1 - t_bar) / 2
    if c <= 0:
        raise ValueError(f"detector PQD undefined: 1 - eta_d (1 - t)/2 = {c:.3g} <= 0")
    r2 = np.sum(np.asarray(x_mode, dtype=float) ** 2, axis=-1)
    return np.clip((1 - det.p_d) / c * np.exp(-det.eta_d * r2 / (4 * c)), 0.0, 1.0)


def _sample_batch(L: np.ndarray, det: DetectorModel, t_bar: float, seed, count: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    M = L.shape[0] // 2
    x = rng.standard_normal((count, L.shape[1])) @ L.T
    p0 = detector_no_click_prob(x.reshape(count, M, 2), det, t_bar)
    return (rng.random((count, M)) >= p0).astype(np.uint8)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("GBSC_THREADS", "1")))
    except ValueError:
        return 1


def sample(config: ExperimentConfig, shots: int, rng_seed=None, threads: int | None = None) -> np.ndarray:
    """Draw ``shots`` click patterns, shape ``(shots, M)``, entries 0/1.

    Shots are generated in fixed-size batches, each with its own child seed,
    so the output depends only on ``rng_seed`` and not on ``threads``.

    Raises:
        SimulabilityError: if the device fails the classicality test.
    """
    if shots < 0:
        raise ValueError("shots must be non-negative")
    state = surrogate_output_covariance(config)
    t_bar = config.detector.t_bar
    L = pqd_factor(state, t_bar)
    M = config.noise.M
    if shots == 0:
        return np.zeros((0, M), dtype=np.uint8)
    n_batches = math.ceil(shots / BATCH)
    root = rng_seed if isinstance(rng_seed, np.random.SeedSequence) else np.random.SeedSequence(rng_seed)
    seeds = root.spawn(n_batches)
    sizes = [min(BATCH, shots - i * BATCH) for i in range(n_batches)]
    jobs = list(zip(seeds, sizes))
    threads = default_threads() if threads is None else threads
    if threads > 1 and n_batches > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(lambda j: _sample_batch(L, config.detector, t_bar, *j), jobs))
    else:
        parts = [_sample_batch(L, config.detector, t_bar, *j) for j in jobs]
    return np.concatenate(parts)
