import math

import numpy as np
import pytest

from gbs_classicality import fock
from gbs_classicality.classicality import f_max, fidelity_cov, lossy_squeezed_params
from gbs_classicality.gaussian import (
    GaussianState,
    SqueezedThermalParams,
    apply_loss,
    squeezing_symplectic,
    sts_covariance,
)
from gbs_classicality.renyi import (
    RenyiOrder,
    alpha_scan,
    closest_classical_renyi,
    grid_search_min,
    power_covariance,
    renyi_divergence_1mode,
    renyi_min_over_classical,
    scan_to_csv,
)

ALPHAS = [0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999]


def random_cov(rng, pure=False):
    n = 0.0 if pure else rng.uniform(0, 2)
    return sts_covariance(rng.uniform(0, 1.2), n, rng.uniform(0, 2 * np.pi))


def test_order_validation():
    assert RenyiOrder(0.5).beta == 1.0
    assert math.isclose(RenyiOrder(0.8).beta, 0.25)
    for bad in (0.4, 1.0, 1.5):
        with pytest.raises(ValueError):
            RenyiOrder(bad)


def test_power_covariance_thermal():
    # a thermal state to the power g is thermal with coth-rescaled occupation
    n, g = 0.7, 2.5
    x = math.log((n + 1) / n)
    expect = 1 / math.tanh(g * x / 2)
    assert np.allclose(power_covariance((2 * n + 1) * np.eye(2), g), expect * np.eye(2))


def test_self_divergence_is_zero():
    th = (2 * 0.3 + 1) * np.eye(2)
    for a in ALPHAS:
        assert abs(renyi_divergence_1mode(th, th, a)) < 1e-9
    V = sts_covariance(0.6, 0.4, 1.0)
    assert abs(renyi_divergence_1mode(V, V, 0.75)) < 1e-9


def test_half_order_is_log_fidelity():
    rng = np.random.default_rng(0)
    for i in range(200):
        Vs, Vt = random_cov(rng, pure=i % 10 == 0), random_cov(rng, pure=i % 7 == 0)
        d = renyi_divergence_1mode(Vs, Vt, 0.5)
        assert abs(d + math.log(fidelity_cov(Vs, Vt))) < 1e-8


def test_matches_fock_sandwiched_renyi():
    a = SqueezedThermalParams(0.3, 0.4, 0.7)
    b = SqueezedThermalParams(0.1, 0.9, 0.2)
    D = max(fock.required_cutoff(a), fock.required_cutoff(b))
    rho, sigma = fock.sts_density(a, D), fock.sts_density(b, D)
    for alpha in (0.5, 0.7, 0.9):
        ref = fock.sandwiched_renyi(rho, sigma, alpha)
        assert abs(renyi_divergence_1mode(a.state(), b.state(), alpha) - ref) < 1e-6


def test_near_one_matches_relative_entropy():
    rho = fock.sts_density(SqueezedThermalParams(0, 1.0), 60)
    sig = fock.sts_density(SqueezedThermalParams(0, 2.0), 60, check_tail=False)
    ref = fock.relative_entropy(rho, sig)
    # thermal pair: n1 ln(n1/n2) - (n1 + 1) ln((n1 + 1)/(n2 + 1))
    assert abs(ref - (math.log(1 / 2) - 2 * math.log(2 / 3))) < 1e-6
    d = renyi_divergence_1mode(3 * np.eye(2), 5 * np.eye(2), 0.999)
    assert abs(d - ref) < 1e-4


def test_unitary_invariance():
    rng = np.random.default_rng(3)
    for _ in range(20):
        Vs, Vt = random_cov(rng), random_cov(rng)
        th = rng.uniform(0, 2 * np.pi)
        R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        for a in (0.5, 0.8):
            d0 = renyi_divergence_1mode(Vs, Vt, a)
            d1 = renyi_divergence_1mode(R @ Vs @ R.T, R @ Vt @ R.T, a)
            assert abs(d0 - d1) < 1e-9


def test_squeezing_invariance():
    rng = np.random.default_rng(4)
    S = squeezing_symplectic(0.4, 1.3)
    Vs, Vt = random_cov(rng), random_cov(rng)
    d0 = renyi_divergence_1mode(Vs, Vt, 0.7)
    d1 = renyi_divergence_1mode(S @ Vs @ S.T, S @ Vt @ S.T, 0.7)
    assert abs(d0 - d1) < 1e-8


@pytest.mark.parametrize("eta", [0.3, 0.7])
def test_data_processing(eta):
    rng = np.random.default_rng(5)
    for _ in range(30):
        Vs, Vt = random_cov(rng), random_cov(rng)
        for a in (0.5, 0.75, 0.95):
            before = renyi_divergence_1mode(Vs, Vt, a)
            ls = apply_loss(GaussianState(Vs), 0, eta)
            lt = apply_loss(GaussianState(Vt), 0, eta)
            assert renyi_divergence_1mode(ls, lt, a) <= before + 1e-8


def test_monotone_in_alpha():
    rng = np.random.default_rng(6)
    for _ in range(20):
        Vs, Vt = random_cov(rng), random_cov(rng)
        vals = [renyi_divergence_1mode(Vs, Vt, a) for a in ALPHAS]
        assert np.all(np.diff(vals) >= -1e-10)


def test_min_over_classical_examples():
    assert renyi_min_over_classical(SqueezedThermalParams(0.05, 0.5), 1.0, 0.7) == 0.0
    sigma = lossy_squeezed_params(0.11, 0.1)
    d = renyi_min_over_classical(sigma, 1.0, 0.5)
    assert abs(d + math.log(f_max(0.11, 0.1, 0.0))) < 1e-6
    vals = [renyi_min_over_classical(sigma, 1.0, a) for a in (0.5, 0.6, 0.7, 0.8, 0.9, 0.99)]
    assert np.all(np.diff(vals) >= -1e-12)


def test_closest_classical_renyi_is_feasible():
    sigma = lossy_squeezed_params(0.5, 0.6)
    d, tau = closest_classical_renyi(sigma, 0.95, 0.8)
    assert tau.s <= 0.5 * math.log((2 * tau.n + 1) / 0.95) + 1e-12
    assert math.isclose(renyi_divergence_1mode(sigma.state(), tau.state(), 0.8), d, rel_tol=1e-10)


def test_landscape_spot_check():
    rng = np.random.default_rng(7)
    for _ in range(10):
        sigma = lossy_squeezed_params(rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0))
        t = rng.uniform(0.9, 1.0)
        a = rng.choice([0.5, 0.7, 0.9, 0.99])
        d1 = renyi_min_over_classical(sigma, t, a)
        d2 = grid_search_min(sigma, t, a, n_grid=20)
        assert d2 >= d1 - 1e-9
        assert abs(d1 - d2) < 1e-4


def test_alpha_scan_vacuum_and_csv():
    rows = alpha_scan(SqueezedThermalParams(0, 0), 0.01, ALPHAS)
    assert all(r.bound == 0.0 and r.d_min == 0.0 for r in rows)
    text = scan_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "alpha,d_min,bound"
    assert len(lines) == len(ALPHAS) + 1


def test_alpha_scan_optimum_at_half():
    sigma = lossy_squeezed_params(0.11, 0.1)
    rows = alpha_scan(sigma, 0.0, ALPHAS)
    bounds = [r.bound for r in rows]
    assert int(np.argmin(bounds)) == 0
    for r in rows:
        assert math.isclose(r.bound, 2 / r.alpha * r.d_min)


def test_alpha_scan_t_minimum_at_t_bar():
    sigma = lossy_squeezed_params(0.1151, 0.5)
    for r in alpha_scan(sigma, 1e-2, [0.5, 0.9]):
        assert math.isclose(r.t_star, 0.98)


def test_one_db_curves():
    r = 0.1151
    for eta in np.linspace(0.1, 0.9, 9):
        rows = alpha_scan(lossy_squeezed_params(r, eta), 1e-2, [0.5, 0.999])
        assert rows[0].bound < rows[1].bound
