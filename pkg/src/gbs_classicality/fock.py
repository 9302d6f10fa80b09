"""Truncated Fock-space brute force, used only as an independent oracle.

Single-mode squeezers are built by exponentiating a quadratic generator in a
working space well beyond the requested cutoff, then
cropped, so truncation artefacts never reach the retained block.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .gaussian import SqueezedThermalParams

TAIL_TOL = 1e-10
_PAD = 120


class CutoffError(ValueError):
    """Raised when the retained Fock block misses more than the allowed mass."""


def annihilation(D: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, D)), 1)


@lru_cache(maxsize=8)
def _squeeze_generator_eig(D: int):
    a = annihilation(D)
    G = 0.5 * (a.T @ a.T - a @ a)  # real antisymmetric
    w, P = np.linalg.eigh(1j * G)
    return w, P


def squeezer(s: float, phi: float, D: int) -> np.ndarray:
    """Squeezer matching :func:`gaussian.squeezing_symplectic` on ``D`` levels (not cropped).

    This is ``exp[(s/2)(e^{-i phi} a^dag^2 - e^{i phi} a^2)]``: the phase is
    conjugated relative to the textbook operator so that the off-diagonal
    covariance entry comes out as ``-sin(phi) sinh(2s)``.
    """
    w, P = _squeeze_generator_eig(D)
    S0 = (P * np.exp(-1j * s * w)) @ P.conj().T
    # rotate S(s, 0) by R(-phi/2), R(th) = exp(i th N)
    ph = np.exp(-0.5j * phi * np.arange(D))
    return ph[:, None] * S0 * ph.conj()[None, :]


def thermal_diag(n: float, D: int) -> np.ndarray:
    if n == 0:
        p = np.zeros(D)
        p[0] = 1.0
        return p
    q = n / (n + 1)
    return (1 - q) * q ** np.arange(D)


def sts_density(params: SqueezedThermalParams, cutoff: int, check_tail: bool = True) -> np.ndarray:
    """Density matrix of a squeezed thermal state cropped to ``cutoff`` levels."""
    D = cutoff + _PAD
    S = squeezer(params.s, params.phi, D)
    rho = (S * thermal_diag(params.n, D)) @ S.conj().T
    rho = rho[:cutoff, :cutoff]
    tail = 1.0 - np.trace(rho).real
    if check_tail and tail > TAIL_TOL:
        raise CutoffError(f"cutoff {cutoff} leaves Fock tail mass {tail:.2e} > {TAIL_TOL:g}")
    return 0.5 * (rho + rho.conj().T)


def required_cutoff(params: SqueezedThermalParams, start: int = 40) -> int:
    """Smallest cutoff (rounded up to a multiple of 10) passing the tail audit."""
    D = start
    while True:
        p = np.diag(sts_density(params, D, check_tail=False)).real
        tail = 1.0 - np.cumsum(p)
        ok = np.nonzero(tail <= TAIL_TOL / 2)[0]
        if ok.size:
            return max(start, int(np.ceil((ok[0] + 1) / 10) * 10))
        D *= 2


def _psd_power(rho: np.ndarray, p: float) -> np.ndarray:
    w, U = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    wp = np.where(w > 1e-300, w, 0.0) ** p if p > 0 else np.where(w > 1e-14, w, np.inf) ** p
    return (U * wp) @ U.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    r = _psd_power(rho, 0.5)
    ev = np.clip(np.linalg.eigvalsh(r @ sigma @ r), 0.0, None)
    return float(np.sum(np.sqrt(ev)) ** 2)


def sandwiched_renyi(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    """``ln Tr[(sigma^{b/2} rho sigma^{b/2})^alpha] / (alpha - 1)``, ``b = (1-alpha)/alpha``."""
    b = (1 - alpha) / alpha
    s = _psd_power(sigma, b / 2)
    ev = np.clip(np.linalg.eigvalsh(s @ rho @ s), 0.0, None)
    return float(np.log(np.sum(ev**alpha)) / (alpha - 1))


def relative_entropy(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``Tr[rho (ln rho - ln sigma)]`` for full-rank ``sigma``."""
    def logm(m):
        w, U = np.linalg.eigh(m)
        return (U * np.log(np.clip(w, 1e-300, None))) @ U.conj().T

    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-300]
    return float(np.sum(w * np.log(w)) - np.trace(rho @ logm(sigma)).real)


def quadrature_covariance(rho: np.ndarray, modes: int, cutoff: int) -> np.ndarray:
    """Covariance (hbar = 2, interleaved) of a ``modes``-mode Fock density matrix.

    ``rho`` is indexed in C order over ``(n_1, ..., n_modes)``.
    """
    a1 = annihilation(cutoff)
    eye = np.eye(cutoff)
    quads = []
    for k in range(modes):
        a = np.array([[1.0]])
        for j in range(modes):
            a = np.kron(a, a1 if j == k else eye)
        quads.append(a + a.conj().T)
        quads.append(-1j * (a - a.conj().T))
    means = np.array([np.trace(rho @ x).real for x in quads])
    V = np.empty((2 * modes, 2 * modes))
    for i, xi in enumerate(quads):
        for j, xj in enumerate(quads):
            V[i, j] = np.trace(rho @ (xi @ xj + xj @ xi)).real / 2 - means[i] * means[j]
    return V
