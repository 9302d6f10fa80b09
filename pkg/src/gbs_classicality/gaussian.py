"""Zero-mean Gaussian states in the covariance-matrix picture.

Conventions used throughout the package:

* hbar = 2, so the vacuum covariance is the identity.
* Quadratures are interleaved, ``(q_1, p_1, ..., q_M, p_M)``, and the
  symplectic form is ``Omega = I_M kron [[0, -1], [1, 0]]``.
* ``S(s, phi)`` with ``phi = 0`` anti-squeezes ``q``: the squeezed vacuum has
  covariance ``diag(e^{2s}, e^{-2s})``. The squeezed-thermal covariance is
  therefore ``(2n+1) * [[cosh 2s + cos(phi) sinh 2s, -sin(phi) sinh 2s],
  [-sin(phi) sinh 2s, cosh 2s - cos(phi) sinh 2s]]``, which is ``S S^T`` for
  the single-mode symplectic ``cosh(s) I + sinh(s) [[cos phi, -sin phi],
  [-sin phi, -cos phi]]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

SYM_TOL = 1e-10
PHYS_TOL = 1e-9

OMEGA_1 = np.array([[0.0, -1.0], [1.0, 0.0]])


def omega(M: int) -> np.ndarray:
    """Symplectic form for ``M`` modes in interleaved ordering."""
    return np.kron(np.eye(M), OMEGA_1)


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Williamson spectrum of ``cov``, sorted ascending, one value per mode."""
    M = cov.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * omega(M) @ cov))
    return np.sort(ev)[::2]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class GaussianState:
    """Zero-mean ``M``-mode Gaussian state stored by its covariance matrix.

    The mean vector is identically zero and is not stored.

    Raises:
        ValueError: if the covariance is not a symmetric, physical
            ``2M x 2M`` matrix.
    """

    cov: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError(f"covariance must be 2M x 2M, got shape {cov.shape}")
        if not np.allclose(cov, cov.T, atol=SYM_TOL, rtol=0):
            raise ValueError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        nu = symplectic_eigenvalues(cov)
        if not np.all(np.isfinite(cov)) or nu[0] < 1 - PHYS_TOL:
            raise ValueError(
                f"unphysical covariance: smallest symplectic eigenvalue {nu[0]:.3g} < 1"
            )
        object.__setattr__(self, "cov", _freeze(cov))

    @property
    def modes(self) -> int:
        return self.cov.shape[0] // 2

    def marginal(self, modes) -> np.ndarray:
        """Covariance of the reduced state on ``modes`` (an int or a sequence)."""
        idx = _quad_indices(np.atleast_1d(modes))
        return self.cov[np.ix_(idx, idx)]

    def is_pure(self, tol: float = 1e-10) -> bool:
        return bool(np.all(symplectic_eigenvalues(self.cov) < 1 + tol))


@dataclass(frozen=True)
class SqueezedThermalParams:
    """Single-mode squeezed thermal state ``S(s, phi) rho_T(n) S^dagger``."""

    s: float
    n: float
    phi: float = 0.0

    def __post_init__(self):
        if self.s < 0 or self.n < 0:
            raise ValueError(f"need s >= 0 and n >= 0, got s={self.s}, n={self.n}")
        object.__setattr__(self, "phi", float(self.phi) % (2 * np.pi))

    def covariance(self) -> np.ndarray:
        return sts_covariance(self.s, self.n, self.phi)

    def state(self) -> GaussianState:
        return GaussianState(self.covariance())


def sts_covariance(s: float, n: float, phi: float = 0.0) -> np.ndarray:
    """Covariance of the squeezed thermal state ``(s, n, phi)``."""
    c, sh = np.cosh(2 * s), np.sinh(2 * s)
    return (2 * n + 1) * np.array(
        [
            [c + np.cos(phi) * sh, -np.sin(phi) * sh],
            [-np.sin(phi) * sh, c - np.cos(phi) * sh],
        ]
    )


def squeezing_symplectic(s: float, phi: float = 0.0) -> np.ndarray:
    """2x2 symplectic matrix of the squeezer ``S(s, phi)``."""
    ch, sh = np.cosh(s), np.sinh(s)
    return np.array(
        [
            [ch + np.cos(phi) * sh, -np.sin(phi) * sh],
            [-np.sin(phi) * sh, ch - np.cos(phi) * sh],
        ]
    )


def haar_unitary(M: int, seed=None) -> np.ndarray:
    """Haar-random ``M x M`` unitary (QR of a complex Ginibre matrix).

    The phases of ``diag(R)`` are folded back into ``Q`` so the result is
    Haar distributed rather than biased by the QR sign convention.
    """
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class InterferometerSpec:
    """Mode-space unitary of a passive linear interferometer.

    Either construct directly from a unitary, or use :meth:`haar` to draw a
    seeded Haar-random one. ``haar_seed`` is kept so the object serializes back
    to the compact form.
    """

    unitary: np.ndarray
    haar_seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        U = np.array(self.unitary, dtype=complex)
        if U.ndim != 2 or U.shape[0] != U.shape[1]:
            raise ValueError(f"unitary must be square, got shape {U.shape}")
        if not np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-9, rtol=0):
            raise ValueError("interferometer matrix is not unitary")
        U.flags.writeable = False
        object.__setattr__(self, "unitary", U)

    @classmethod
    def haar(cls, M: int, seed: int) -> "InterferometerSpec":
        return cls(haar_unitary(M, seed), haar_seed=int(seed))

    @classmethod
    def identity(cls, M: int) -> "InterferometerSpec":
        return cls(np.eye(M))

    @property
    def modes(self) -> int:
        return self.unitary.shape[0]

    def orthogonal_symplectic(self) -> np.ndarray:
        """Real ``2M x 2M`` matrix acting on interleaved quadratures.

        From ``a_j -> sum_k U_jk a_k`` with ``a = (q + i p) / 2``, each 2x2
        block is ``[[Re U_jk, -Im U_jk], [Im U_jk, Re U_jk]]``.
        """
        return np.kron(self.unitary.real, np.eye(2)) + np.kron(self.unitary.imag, OMEGA_1)

    def to_dict(self) -> dict:
        if self.haar_seed is not None:
            return {"haar_seed": self.haar_seed, "modes": self.modes}
        return {"re": self.unitary.real.tolist(), "im": self.unitary.imag.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "InterferometerSpec":
        if "haar_seed" in d:
            if "modes" not in d:
                raise ValueError("haar_seed interferometer needs 'modes'")
            return cls.haar(int(d["modes"]), int(d["haar_seed"]))
        if "re" in d:
            re = np.asarray(d["re"], dtype=float)
            im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
            if re.shape != im.shape:
                raise ValueError("'re' and 'im' must have the same shape")
            return cls(re + 1j * im)
        raise ValueError("interferometer needs either 're'/'im' or 'haar_seed'/'modes'")

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "InterferometerSpec":
        return cls.from_dict(json.loads(text))


def _quad_indices(modes) -> np.ndarray:
    modes = np.asarray(modes, dtype=int)
    return np.stack([2 * modes, 2 * modes + 1], axis=-1).ravel()


def _check_mode(state: GaussianState, mode: int):
    if not 0 <= mode < state.modes:
        raise IndexError(f"mode {mode} out of range for a {state.modes}-mode state")


def vacuum(M: int) -> GaussianState:
    if M < 1:
        raise ValueError("need at least one mode")
    return GaussianState(np.eye(2 * M))


def thermal(n: float) -> GaussianState:
    return GaussianState((2 * n + 1) * np.eye(2))


def product_state(*covs) -> GaussianState:
    """Tensor product of single- or multi-mode covariance blocks."""
    from scipy.linalg import block_diag

    return GaussianState(block_diag(*[np.asarray(c, dtype=float) for c in covs]))


def _embed(S2: np.ndarray, mode: int, M: int) -> np.ndarray:
    S = np.eye(2 * M)
    S[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = S2
    return S


def apply_squeezing(state: GaussianState, mode: int, s: float, phi: float = 0.0) -> GaussianState:
    _check_mode(state, mode)
    S = _embed(squeezing_symplectic(s, phi), mode, state.modes)
    return GaussianState(S @ state.cov @ S.T)


def apply_loss(state: GaussianState, mode: int, eta: float) -> GaussianState:
    """Pure-loss channel of transmission ``eta`` on one mode.

    ``V -> X V X^T + Y`` with ``X = sqrt(eta)`` and ``Y = (1 - eta) I`` on the
    targeted block, identity elsewhere.
    """
    if not 0 <= eta <= 1:
        raise ValueError(f"transmission must lie in [0, 1], got {eta}")
    _check_mode(state, mode)
    M = state.modes
    X = _embed(np.sqrt(eta) * np.eye(2), mode, M)
    Y = np.zeros((2 * M, 2 * M))
    Y[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = (1 - eta) * np.eye(2)
    return GaussianState(X @ state.cov @ X.T + Y)


def apply_interferometer(state: GaussianState, spec: InterferometerSpec) -> GaussianState:
    if spec.modes != state.modes:
        raise ValueError(
            f"interferometer acts on {spec.modes} modes but state has {state.modes}"
        )
    O = spec.orthogonal_symplectic()
    return GaussianState(O @ state.cov @ O.T)


def sts_from_covariance(V: np.ndarray) -> SqueezedThermalParams:
    """Squeezed-thermal decomposition of a physical 2x2 covariance."""
    V = np.asarray(V, dtype=float)
    det = np.linalg.det(V)
    if V.shape != (2, 2) or V[0, 0] <= 0 or det < 1 - PHYS_TOL:
        raise ValueError("single-mode marginal is not a physical covariance")
    nu = np.sqrt(max(det, 1.0))
    c = 0.5 * (V[0, 0] - V[1, 1]) / nu  # cos(phi) sinh(2s)
    d = -V[0, 1] / nu  # sin(phi) sinh(2s)
    sh = np.hypot(c, d)
    s = 0.5 * np.arcsinh(sh)
    phi = np.arctan2(d, c) % (2 * np.pi) if sh > 1e-15 else 0.0
    return SqueezedThermalParams(s=float(s), n=float((nu - 1) / 2), phi=float(phi))


def to_sts(state: GaussianState, mode: int = 0) -> SqueezedThermalParams:
    _check_mode(state, mode)
    return sts_from_covariance(state.marginal(mode))


def is_t_classical(state: GaussianState, t: float, tol: float = PHYS_TOL) -> bool:
    """True when ``V - t I`` is positive semidefinite up to ``tol``.

    Boundary states (smallest eigenvalue exactly zero) count as classical.
    """
    if not 0 <= t <= 1:
        raise ValueError(f"ordering parameter must lie in [0, 1], got {t}")
    lam = np.linalg.eigvalsh(state.cov - t * np.eye(state.cov.shape[0]))
    return bool(lam[0] >= -tol)
