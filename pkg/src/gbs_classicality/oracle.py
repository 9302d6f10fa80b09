"""Exact (exponential-cost) reference computations for small instances.

Click statistics use the closed form for the probability that every mode in
a subset ``T`` stays dark,

    P0(T) = (1 - p_d)^|T| / sqrt(det(I + eta_d (V_T - I) / 2)),

which is the overlap of the Husimi function of the state (ordering -1, a
proper Gaussian for every physical state) with the dual-order PQD of the
no-click POVM element. Individual patterns follow by inclusion-exclusion
over the click set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import fock
from .classicality import DetectorModel
from .gaussian import GaussianState, SqueezedThermalParams

MAX_MODES = 14
NEG_TOL = 1e-10


@dataclass(frozen=True)
class ExactDistribution:
    """Threshold-detector outcome distribution over all ``2^M`` click patterns.

    ``probs[k]`` is the probability of the pattern whose bits, read with mode 1
    as the most significant, spell ``k``.
    """

    M: int
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (2**self.M,):
            raise ValueError(f"expected {2**self.M} probabilities, got {p.shape}")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    def patterns(self) -> np.ndarray:
        """All click patterns as a ``(2^M, M)`` 0/1 array, in ``probs`` order."""
        return pattern_table(self.M)

    def click_marginals(self) -> np.ndarray:
        return self.patterns().T @ self.probs

    def to_dict(self) -> dict:
        return {"M": self.M, "probs": self.probs.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ExactDistribution":
        return cls(int(d["M"]), np.asarray(d["probs"], dtype=float))


def pattern_table(M: int) -> np.ndarray:
    k = np.arange(2**M)[:, None]
    return ((k >> np.arange(M - 1, -1, -1)) & 1).astype(np.uint8)


def pattern_index(n) -> np.ndarray:
    """Lexicographic index of click pattern(s) ``n`` (last axis = modes)."""
    n = np.asarray(n, dtype=np.int64)
    M = n.shape[-1]
    return n @ (1 << np.arange(M - 1, -1, -1))


def empirical_distribution(samples: np.ndarray, M: int | None = None) -> ExactDistribution:
    samples = np.asarray(samples)
    M = samples.shape[1] if M is None else M
    counts = np.bincount(pattern_index(samples), minlength=2**M) if len(samples) else np.zeros(2**M)
    total = max(len(samples), 1)
    return ExactDistribution(M, counts / total)


def no_click_probability(cov_T: np.ndarray, det: DetectorModel) -> float:
    """Probability that every mode of the marginal ``cov_T`` registers no click."""
    k = cov_T.shape[0] // 2
    if k == 0:
        return 1.0
    A = np.eye(2 * k) + 0.5 * det.eta_d * (cov_T - np.eye(2 * k))
    sign, logdet = np.linalg.slogdet(A)
    return float((1 - det.p_d) ** k * math.exp(-0.5 * logdet))


def exact_distribution(state: GaussianState, det: DetectorModel) -> ExactDistribution:
    """Full click distribution of ``state`` measured by identical threshold detectors.

    Cost is ``2^M`` determinants plus an ``M 2^M`` subset transform.
    """
    M = state.modes
    if M > MAX_MODES:
        raise ValueError(
            f"exact distribution of {M} modes needs 2^{M} determinants; limit is {MAX_MODES}"
        )
    table = pattern_table(M).astype(bool)
    # h[B] = P0(complement of B), B indexed like click patterns
    h = np.empty(2**M)
    for k, free in enumerate(table):
        dark = np.nonzero(~free)[0]
        h[k] = no_click_probability(state.marginal(dark) if dark.size else np.zeros((0, 0)), det)
    # P(C) = sum_{B subset C} (-1)^{|C \ B|} h[B]
    f = h.reshape((2,) * M)
    for ax in range(M):
        f = np.moveaxis(f, ax, 0)
        f = np.stack([f[0], f[1] - f[0]])
        f = np.moveaxis(f, 0, ax)
    p = f.reshape(-1)
    if p.min() < -NEG_TOL:
        raise ArithmeticError(f"inclusion-exclusion produced probability {p.min():.3g}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1) > 1e-8:
        raise ArithmeticError(f"click distribution sums to {total!r}")
    return ExactDistribution(M, p)


def total_variation(p, q) -> float:
    pa = p.probs if isinstance(p, ExactDistribution) else np.asarray(p, dtype=float)
    qa = q.probs if isinstance(q, ExactDistribution) else np.asarray(q, dtype=float)
    if pa.shape != qa.shape:
        raise ValueError(f"distributions differ in size: {pa.shape} vs {qa.shape}")
    return float(0.5 * np.abs(pa - qa).sum())


def detector_pqd_no_click(x: np.ndarray, det: DetectorModel, t: float) -> np.ndarray:
    """``W_Pi^{(-t)}(0 | x)`` for one mode; ``x`` has trailing dimension 2."""
    c = 1 - det.eta_d * (1 - t) / 2
    if c <= 0:
        raise ValueError(f"detector PQD at ordering {-t} is singular for eta_d={det.eta_d}")
    r2 = np.sum(np.asarray(x) ** 2, axis=-1)
    return (1 - det.p_d) / (2 * np.pi * c) * np.exp(-det.eta_d * r2 / (4 * c))


def no_click_quadrature(cov_T: np.ndarray, det: DetectorModel, tol: float = 1e-12) -> float:
    """``P0(T)`` by numerical quadrature of the PQD overlap (``|T| <= 2``).

    Integrates ``(2 pi)^k prod_j W_Pi^{(+1)}(0 | x_j) * Husimi(x)`` with a
    tensor Gauss-Hermite rule whose weight is the narrower of the two Gaussian
    factors; the order is doubled until successive estimates agree to ``tol``.
    Needs ``eta_d < 1`` (otherwise the detector P-function is a delta).
    """
    from numpy.polynomial.hermite_e import hermegauss

    k = cov_T.shape[0] // 2
    if k > 2:
        raise ValueError("quadrature self-test only covers one or two modes")
    if det.eta_d >= 1:
        raise ValueError("quadrature needs eta_d < 1")
    dim = 2 * k
    Q = cov_T + np.eye(dim)  # Husimi covariance
    c = 1 - det.eta_d
    var_det = 2 * c / det.eta_d  # (2 pi) W_Pi = (1 - p_d)(2 pi var / c) N(x; 0, var I)

    def husimi(x):
        Qinv = np.linalg.inv(Q)
        quad = np.einsum("ni,ij,nj->n", x, Qinv, x)
        return np.exp(-0.5 * quad) / ((2 * np.pi) ** k * math.sqrt(np.linalg.det(Q)))

    def detector(x):
        w = np.ones(len(x))
        for j in range(k):
            w *= 2 * np.pi * detector_pqd_no_click(x[:, 2 * j : 2 * j + 2], det, -1.0)
        return w

    use_detector_weight = var_det <= np.linalg.eigvalsh(Q)[0]

    def estimate(order):
        z, w = hermegauss(order)
        w = w / math.sqrt(2 * math.pi)
        Z = np.stack(np.meshgrid(*[z] * dim, indexing="ij"), -1).reshape(-1, dim)
        W = np.prod(np.stack(np.meshgrid(*[w] * dim, indexing="ij"), -1).reshape(-1, dim), 1)
        if use_detector_weight:
            x = Z * math.sqrt(var_det)
            scale = ((1 - det.p_d) * 2 * math.pi * var_det / c) ** k
            return scale * float(W @ husimi(x))
        x = Z @ np.linalg.cholesky(Q).T
        return float(W @ detector(x))

    prev = estimate(8)
    for order in (12, 16, 24, 32, 40):
        cur = estimate(order)
        change = abs(cur - prev)
        if change < tol:
            return cur
        prev = cur
    raise ArithmeticError(f"quadrature did not settle (last change {change:.2e})")


def self_test(state: GaussianState, det: DetectorModel, tol: float = 1e-7) -> float:
    """Compare every closed-form ``P0(T)`` with quadrature for ``M <= 2``.

    Returns the largest absolute deviation and raises if it exceeds ``tol``.
    """
    M = state.modes
    if M > 2:
        raise ValueError("self-test is limited to M <= 2")
    worst = 0.0
    for mask in range(1, 2**M):
        T = [m for m in range(M) if mask >> m & 1]
        cov_T = state.marginal(T)
        diff = abs(no_click_probability(cov_T, det) - no_click_quadrature(cov_T, det))
        worst = max(worst, diff)
    if worst > tol:
        raise ArithmeticError(f"closed form and quadrature disagree by {worst:.3g}")
    return worst


def fock_fidelity(a: SqueezedThermalParams, b: SqueezedThermalParams, cutoff: int) -> float:
    """Fidelity of two squeezed thermal states from truncated density matrices.

    Raises :class:`fock.CutoffError` when either state leaks more than 1e-10
    of its mass past ``cutoff``.
    """
    return fock.fidelity(fock.sts_density(a, cutoff), fock.sts_density(b, cutoff))
