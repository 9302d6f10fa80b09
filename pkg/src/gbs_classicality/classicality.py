"""Classical-simulability test for noisy Gaussian boson sampling.

Everything here reduces to single-mode algebra: the lossy squeezed input
``sigma`` is compared against the best ``(t)``-classical squeezed thermal
state ``tau``, and the per-mode fidelity is lifted to ``K`` modes through
additivity of ``-ln F``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import binom

from .gaussian import SqueezedThermalParams


def ramp(x: float) -> float:
    return max(x, 0.0)


@dataclass(frozen=True)
class NoiseParams:
    """Source/interferometer noise: ``K`` squeezers of strength ``r`` in ``M``
    modes, overall transmission ``eta`` (source times interferometer)."""

    r: float
    eta: float
    K: int
    M: int

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"squeezing must be non-negative, got r={self.r}")
        if not 0 <= self.eta <= 1:
            raise ValueError(f"transmission must lie in [0, 1], got eta={self.eta}")
        if self.K < 1 or self.M < self.K:
            raise ValueError(f"need 1 <= K <= M, got K={self.K}, M={self.M}")


@dataclass(frozen=True)
class DetectorModel:
    """Threshold detector with efficiency ``eta_d`` and dark-count probability ``p_d``."""

    eta_d: float
    p_d: float

    def __post_init__(self):
        if not 0 < self.eta_d <= 1:
            raise ValueError(f"detector efficiency must lie in (0, 1], got {self.eta_d}")
        if not 0 <= self.p_d < 0.5:
            raise ValueError(f"dark-count probability must lie in [0, 1/2), got {self.p_d}")
        if self.q_d >= 0.5:
            raise ValueError(f"detector quality p_d/eta_d = {self.q_d:.3g} must be < 1/2")

    @property
    def q_d(self) -> float:
        return self.p_d / self.eta_d

    @property
    def t_bar(self) -> float:
        """Largest ordering at which the detector PQDs stay non-negative."""
        return 1.0 - 2.0 * self.q_d


@dataclass(frozen=True)
class ClassicalityVerdict:
    f_max: float
    eps_min: float
    eta_infinity: float
    simulable: bool

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def lossy_squeezed_params(r: float, eta: float) -> SqueezedThermalParams:
    """STS parameters of a squeezed vacuum sent through loss ``eta``."""
    if r < 0 or not 0 <= eta <= 1:
        raise ValueError(f"need r >= 0 and eta in [0, 1], got r={r}, eta={eta}")
    a_plus = eta * math.exp(2 * r) + 1 - eta
    a_minus = eta * math.exp(-2 * r) + 1 - eta
    s = 0.25 * math.log(a_plus / a_minus)
    n = 0.5 * (math.sqrt(a_plus * a_minus) - 1)
    return SqueezedThermalParams(s=s, n=max(n, 0.0), phi=0.0)


def fidelity_cov(V1: np.ndarray, V2: np.ndarray) -> float:
    """Uhlmann fidelity (squared convention) of two zero-mean single-mode states.

    ``F = 1 / (sqrt(Delta + Lambda) - sqrt(Lambda))`` with
    ``Delta = det(V1 + V2) / 4`` and ``Lambda = (det V1 - 1)(det V2 - 1) / 4``.
    """
    delta = 0.25 * np.linalg.det(np.asarray(V1) + np.asarray(V2))
    lam = 0.25 * max(np.linalg.det(V1) - 1, 0.0) * max(np.linalg.det(V2) - 1, 0.0)
    # 1/(sqrt(D+L) - sqrt(L)) = (sqrt(D+L) + sqrt(L)) / D avoids cancellation
    return float((math.sqrt(delta + lam) + math.sqrt(lam)) / delta)


def gaussian_fidelity_1mode(a: SqueezedThermalParams, b: SqueezedThermalParams) -> float:
    """Fidelity between two squeezed thermal states with aligned squeezing axes."""
    if not math.isclose(a.phi, b.phi, abs_tol=1e-12) and not math.isclose(
        abs(a.phi - b.phi), 2 * math.pi, abs_tol=1e-12
    ):
        raise ValueError(f"squeezing axes are not aligned: phi={a.phi} vs {b.phi}")
    delta = (a.n - b.n) ** 2 + (2 * a.n + 1) * (2 * b.n + 1) * math.cosh(a.s - b.s) ** 2
    lam = 4 * a.n * (a.n + 1) * b.n * (b.n + 1)
    return (math.sqrt(delta + lam) + math.sqrt(lam)) / delta


def classicality_boundary(n: float, t: float) -> float:
    """Largest squeezing a ``(t)``-classical STS with thermal occupation ``n`` may carry."""
    return 0.5 * math.log((2 * n + 1) / t)


def closest_classical_state(
    sigma: SqueezedThermalParams, t: float
) -> tuple[SqueezedThermalParams, float]:
    """Fidelity-maximizing ``(t)``-classical state and the attained fidelity.

    If ``sigma`` is already ``(t)``-classical it is returned unchanged.
    Otherwise the optimum lies on the boundary ``s = ln((2n+1)/t) / 2`` at the
    closed-form occupation ``n* = (sqrt(1 + 2 t sinh(2 s_c) e^{2 s_sigma}) - 1) / 2``
    with ``s_c = ln(2 n_sigma + 1) / 2``.
    """
    if not 0 < t <= 1:
        raise ValueError(f"ordering parameter must lie in (0, 1], got {t}")
    excess = sigma.s - classicality_boundary(sigma.n, t)
    if excess <= 0:
        return sigma, 1.0
    s_c = 0.5 * math.log(2 * sigma.n + 1)
    n_tau = 0.5 * (math.sqrt(1 + 2 * t * math.sinh(2 * s_c) * math.exp(2 * sigma.s)) - 1)
    tau = SqueezedThermalParams(s=classicality_boundary(n_tau, t), n=n_tau, phi=sigma.phi)
    return tau, 1.0 / math.cosh(excess)


def f_max(r: float, eta: float, q_d: float) -> float:
    """Largest fidelity between the lossy squeezed input and any admissible
    classical state, optimized over orderings ``t in [1 - 2 q_d, 1]``."""
    if r < 0 or not 0 <= eta <= 1 or not 0 <= q_d < 0.5:
        raise ValueError(f"parameters out of range: r={r}, eta={eta}, q_d={q_d}")
    a_minus = eta * math.exp(-2 * r) + 1 - eta
    return 1.0 / math.cosh(0.5 * ramp(math.log((1 - 2 * q_d) / a_minus)))


def eta_infinity(r: float, q_d: float) -> float:
    """Transmission below which exact classical sampling is possible.

    For ``r = 0`` the input is vacuum and always simulable; 1 is returned in
    place of the divergent ``coth`` limit.
    """
    if r == 0:
        return 1.0
    return q_d * (1 + 1 / math.tanh(r))


def classicality_test(
    noise: NoiseParams, det: DetectorModel, epsilon: float
) -> ClassicalityVerdict:
    """Decide whether the device is classically simulable up to TV error ``epsilon``.

    Simulable means ``F_max > exp(-epsilon^2 / 4K)`` (strict). ``eps_min`` is
    the smallest error this argument can certify.
    """
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    f = f_max(noise.r, noise.eta, det.q_d)
    neg_log = math.log(1.0 / f)
    eps_min = 2 * math.sqrt(noise.K * neg_log)
    simulable = neg_log < epsilon**2 / (4 * noise.K)
    return ClassicalityVerdict(
        f_max=f,
        eps_min=eps_min,
        eta_infinity=eta_infinity(noise.r, det.q_d),
        simulable=bool(simulable),
    )


def asymptotic_threshold(r: float, q_d: float, K: int, epsilon: float) -> float:
    """First-order large-``K`` transmission threshold.

    ``eta_inf + (1 - 2 q_d) / (1 - e^{-2r}) * epsilon / sqrt(2K)``; not clamped.
    """
    if r <= 0:
        raise ValueError("asymptotic threshold needs r > 0")
    if not 0 <= q_d < 0.5 or K < 1:
        raise ValueError(f"need q_d in [0, 1/2) and K >= 1, got q_d={q_d}, K={K}")
    return eta_infinity(r, q_d) + (1 - 2 * q_d) / (-math.expm1(-2 * r)) * epsilon / math.sqrt(
        2 * K
    )


def pair_distribution(K: int, r: float, S):
    """Probability of ``S`` photon pairs from ``K`` single-mode squeezers.

    Negative binomial with ``K/2`` trials and success weight ``tanh^2 r``:
    ``C(K/2 + S - 1, S) sech^K(r) tanh^{2S}(r)``. Accepts scalar or array ``S``.
    """
    if K < 1 or r < 0:
        raise ValueError(f"need K >= 1 and r >= 0, got K={K}, r={r}")
    S = np.asarray(S)
    if np.any(S < 0):
        raise ValueError("pair count must be non-negative")
    if r == 0:
        out = (S == 0).astype(float)
    else:
        log_p = (
            np.log(binom(K / 2 + S - 1, S))
            - K * np.log(np.cosh(r))
            + 2 * S * np.log(np.tanh(r))
        )
        out = np.exp(log_p)
    return float(out) if out.ndim == 0 else out


def pair_moments(K: int, r: float) -> tuple[float, float]:
    """Mean and variance of :func:`pair_distribution`."""
    mean = 0.5 * K * math.sinh(r) ** 2
    return mean, mean * math.cosh(r) ** 2


def collision_bound(K: int, r: float, M: int) -> float:
    """Haar-averaged collision probability bound ``(32 / M) <S^2>``; may exceed 1."""
    if M < 1:
        raise ValueError("need M >= 1")
    mean, var = pair_moments(K, r)
    return 32.0 / M * (mean**2 + var)
