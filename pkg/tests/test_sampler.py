import json
import math

import numpy as np
import pytest

from gbs_classicality import bundled_config
from gbs_classicality.classicality import DetectorModel, NoiseParams, closest_classical_state, lossy_squeezed_params
from gbs_classicality.gaussian import GaussianState, InterferometerSpec, vacuum
from gbs_classicality.oracle import empirical_distribution, exact_distribution, total_variation
from gbs_classicality.sampler import (
    ConfigError,
    ExperimentConfig,
    SimulabilityError,
    detector_no_click_prob,
    sample,
    sample_phase_space,
    surrogate_output_covariance,
)
from gbs_classicality.validation import pattern_chisquare

from _oracles import no_click_prob_mp


def make_config(K, M, r, eta, eta_d, p_d, seed=None, epsilon=1.0):
    spec = InterferometerSpec.haar(M, seed) if seed is not None else InterferometerSpec.identity(M)
    return ExperimentConfig(NoiseParams(r, eta, K, M), DetectorModel(eta_d, p_d), spec, epsilon)


# --- config -------------------------------------------------------------------

def test_config_round_trip():
    cfg = bundled_config("paesani2018")
    assert cfg.noise == NoiseParams(0.1, 0.088, 4, 12)
    back = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert back.to_dict() == cfg.to_dict()
    assert back.digest() == cfg.digest()


def test_config_field_diagnostics(tmp_path):
    good = bundled_config("zhong2019").to_dict()
    bad = dict(good)
    del bad["eta"]
    with pytest.raises(ConfigError, match="^eta: missing"):
        ExperimentConfig.from_dict(bad)
    bad = dict(good, detector={"eta_d": 0.8})
    with pytest.raises(ConfigError, match="detector.p_d"):
        ExperimentConfig.from_dict(bad)
    bad = dict(good, unitary={"haar_seed": 1, "modes": 3})
    with pytest.raises(ConfigError, match="unitary"):
        ExperimentConfig.from_dict(bad)
    bad = dict(good, r="lots")
    with pytest.raises(ConfigError, match="^r:"):
        ExperimentConfig.from_dict(bad)
    p = tmp_path / "broken.json"
    p.write_text('{"K": 4,\n "M": }')
    with pytest.raises(ConfigError, match="line 2"):
        ExperimentConfig.load(p)


def test_config_accepts_dense_unitary():
    d = bundled_config("paesani2018").to_dict()
    U = InterferometerSpec.haar(12, 3).unitary
    d["unitary"] = {"re": U.real.tolist(), "im": U.imag.tolist()}
    cfg = ExperimentConfig.from_dict(d)
    assert np.allclose(cfg.interferometer.unitary, U)


# --- surrogate ----------------------------------------------------------------

def test_surrogate_vacuum_inputs():
    cfg = make_config(2, 3, 0.0, 0.5, 0.9, 1e-3, seed=1)
    assert np.allclose(surrogate_output_covariance(cfg).cov, np.eye(6), atol=1e-12)


def test_surrogate_identity_interferometer():
    cfg = make_config(1, 2, 0.4, 0.5, 0.9, 1e-3)
    V = surrogate_output_covariance(cfg).cov
    tau, _ = closest_classical_state(lossy_squeezed_params(0.4, 0.5), cfg.detector.t_bar)
    assert np.allclose(V[:2, :2], tau.covariance())
    assert np.allclose(V[2:, 2:], np.eye(2)) and np.allclose(V[:2, 2:], 0)


def test_surrogate_paesani_is_t_bar_classical():
    cfg = bundled_config("paesani2018")
    V = surrogate_output_covariance(cfg).cov
    lam = np.linalg.eigvalsh(V - cfg.detector.t_bar * np.eye(V.shape[0]))
    assert lam[0] >= -1e-9


def test_surrogate_aborts_when_test_fails():
    cfg = bundled_config("zhong2019")
    with pytest.raises(SimulabilityError) as info:
        surrogate_output_covariance(cfg)
    assert info.value.verdict.eps_min > 1
    assert info.value.to_dict()["error"] == "classicality_test_failed"
    surrogate_output_covariance(cfg, check=False)  # unchecked build still works


# --- phase-space sampling -----------------------------------------------------

def test_phase_space_degenerate():
    x = sample_phase_space(vacuum(2), 1.0, 0, 100)
    assert x.shape == (100, 4) and np.all(x == 0)


def test_phase_space_covariance():
    cfg = make_config(2, 3, 0.5, 0.7, 0.9, 1e-2, seed=4)
    st = surrogate_output_covariance(cfg)
    t = cfg.detector.t_bar
    N = 100_000
    x = sample_phase_space(st, t, 9, N)
    Sigma = st.cov - t * np.eye(6)
    emp = x.T @ x / N
    se = np.sqrt((np.outer(np.diag(Sigma), np.diag(Sigma)) + Sigma**2) / N)
    assert np.all(np.abs(emp - Sigma) < 5 * se + 1e-12)
    # single-mode marginal
    m = x[:, 2:4]
    assert np.allclose(np.cov(m.T), Sigma[2:4, 2:4], atol=5 * se[2:4, 2:4].max())


def test_phase_space_rejects_nonclassical():
    sq = GaussianState(np.diag([np.e, 1 / np.e]))
    with pytest.raises(ValueError):
        sample_phase_space(sq, 1.0, 0, 10)


def test_phase_space_deterministic():
    st = GaussianState(np.diag([2.0, 1.5]))
    assert np.array_equal(sample_phase_space(st, 1.0, 3, 50), sample_phase_space(st, 1.0, 3, 50))


# --- detector -----------------------------------------------------------------

def test_no_click_examples():
    det = DetectorModel(0.8, 0.03)
    assert math.isclose(detector_no_click_prob(np.zeros(2), det, 1.0), 0.97)
    assert detector_no_click_prob(np.array([1e3, 0]), det, det.t_bar) == 0.0
    r = np.linspace(0, 5, 20)
    p = detector_no_click_prob(np.stack([r, 0 * r], -1), det, det.t_bar)
    assert np.all(np.diff(p) < 0) and np.all((0 <= p) & (p <= 1))


def test_no_click_high_precision():
    det = DetectorModel(0.78, 1e-4)
    t = det.t_bar
    x = np.array([math.sqrt(2.0), math.sqrt(2.0)])  # |x|^2 = 4
    ref = no_click_prob_mp(4, 0.78, 1e-4, t)
    assert abs(detector_no_click_prob(x, det, t) - float(ref)) < 1e-12


def test_no_click_rejects_singular_order():
    with pytest.raises(ValueError):
        detector_no_click_prob(np.zeros(2), DetectorModel(0.9, 0.0), -3.0)


# --- sampling -----------------------------------------------------------------

def test_vacuum_no_dark_counts_never_clicks():
    cfg = make_config(2, 4, 0.0, 0.5, 0.9, 0.0, seed=2)
    assert not sample(cfg, 10_000, 1).any()


def test_dark_counts_only():
    cfg = make_config(2, 4, 0.0, 0.5, 1.0, 0.1, seed=2)
    n = sample(cfg, 100_000, 5)
    rate = n.mean(axis=0)
    sd = math.sqrt(0.1 * 0.9 / 100_000)
    assert np.all(np.abs(rate - 0.1) < 3 * sd)
    # independent modes
    assert abs(np.corrcoef(n.T)[0, 1]) < 0.01


def test_sampler_matches_oracle_example():
    cfg = make_config(2, 4, 0.3, 0.6, 0.9, 1e-3, seed=3)
    shots = sample(cfg, 100_000, 11)
    exact = exact_distribution(surrogate_output_covariance(cfg), cfg.detector)
    emp = empirical_distribution(shots, 4)
    assert total_variation(emp, exact) < 0.01
    assert pattern_chisquare(emp.probs * len(shots), exact.probs) > 1e-3
    # per-mode marginals within 4 standard errors
    p1 = exact.click_marginals()
    se = np.sqrt(p1 * (1 - p1) / len(shots))
    assert np.all(np.abs(shots.mean(axis=0) - p1) < 4 * se)


def test_sampler_determinism_and_threads():
    cfg = make_config(2, 3, 0.4, 0.5, 0.9, 1e-3, seed=5)
    a = sample(cfg, 150_000, 42, threads=1)
    b = sample(cfg, 150_000, 42, threads=4)
    assert a.dtype == np.uint8 and a.shape == (150_000, 3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample(cfg, 150_000, 43))


def test_sampler_abort_and_empty():
    with pytest.raises(SimulabilityError):
        sample(bundled_config("zhong2019"), 10, 0)
    assert sample(bundled_config("paesani2018"), 0, 0).shape == (0, 12)
    with pytest.raises(ValueError):
        sample(bundled_config("paesani2018"), -1, 0)
