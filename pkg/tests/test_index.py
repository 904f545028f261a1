import math

import numpy as np
import pytest

from singspect.index_integral import (
    BudgetTooSmall,
    ConstancyViolated,
    MissingTamenessReport,
    compute_index,
    integrand,
    mckean_singer_check,
)
from singspect.poly import parse, gradient
from singspect.weights import milnor_oracle, nondegeneracy_check, solve_weights


def prepared(text, n, seed=11):
    f = parse(text, n)
    wv = solve_weights(f)
    return f, wv, nondegeneracy_check(f, wv, seed=seed)


def test_integrand_examples():
    f = parse("(1/2)*z1^2", 1)
    for z in (0.3 + 0.1j, 1.0, -0.7j):
        got = integrand(f, [z], 1.0)
        assert abs(got - math.exp(-abs(z) ** 2) / math.pi) < 1e-14
    f3 = parse("z1^3", 1)
    assert integrand(f3, [0.0], 1.0) == 0.0  # Hessian 6z vanishes at 0
    z = 0.4 - 0.2j
    expected = (1 / math.pi) * math.exp(-9 * abs(z) ** 4) * 36 * abs(z) ** 2
    assert abs(integrand(f3, [z], 1.0) - expected) < 1e-14


def test_integrand_nonnegative():
    rng = np.random.default_rng(2)
    f = parse("z1^3 + z2^3", 2)
    Z = rng.normal(size=(200, 2)) + 1j * rng.normal(size=(200, 2))
    assert np.all(integrand(f, Z, 0.7) >= 0)


def test_compute_index_requires_report():
    f = parse("z1^3", 1)
    with pytest.raises(MissingTamenessReport):
        compute_index(f, 1.0)


def test_compute_index_known_values():
    f, wv, rep = prepared("(1/2)*z1^2", 1)
    est = compute_index(f, 1.0, budget=200000, seed=5, report=rep)
    assert abs(est.estimate - 1.0) < 4 * est.std_error + 1e-3
    f3, wv3, rep3 = prepared("z1^3", 1)
    est3 = compute_index(f3, 1.0, budget=200000, seed=5, report=rep3)
    assert abs(est3.estimate - 2.0) < 4 * est3.std_error + 2e-3


def test_quadrature_path_is_sharp():
    f, wv, rep = prepared("(1/2)*z1^2", 1)
    est = compute_index(f, 1.0, budget=128, method="quadrature", report=rep)
    assert abs(est.estimate - 1.0) < 1e-10
    f3, _, rep3 = prepared("z1^3", 1)
    est3 = compute_index(f3, 1.0, budget=128, method="quadrature", report=rep3)
    assert abs(est3.estimate - 2.0) < 1e-8
    f33, _, rep33 = prepared("z1^3 + z2^3", 2)
    est33 = compute_index(f33, 1.0, budget=48, method="quadrature", report=rep33)
    assert abs(est33.estimate - 4.0) < 1e-4


def test_budget_too_small():
    f, wv, rep = prepared("z1^3", 1)
    with pytest.raises(BudgetTooSmall):
        compute_index(f, 1.0, budget=2000, seed=1, report=rep, tol=1e-5)


def test_determinism_same_seed():
    f, wv, rep = prepared("z1^3", 1)
    a = compute_index(f, 1.0, budget=50000, seed=42, report=rep)
    b = compute_index(f, 1.0, budget=50000, seed=42, report=rep)
    assert a.estimate == b.estimate and a.std_error == b.std_error
    c = compute_index(f, 1.0, budget=50000, seed=43, report=rep)
    assert c.estimate != a.estimate


def test_mckean_singer_check():
    f, wv, rep = prepared("(1/2)*z1^2 + (1/2)*z2^2", 2)
    res = mckean_singer_check(f, (1.0, 4.0), budget=150000, seed=9, report=rep)
    assert res.mu_rounded == 1 == milnor_oracle(wv)
    f3, wv3, rep3 = prepared("z1^3", 1)
    res3 = mckean_singer_check(f3, (0.5, 1.0, 2.0), budget=150000, seed=9, report=rep3)
    assert res3.mu_rounded == 2
    assert len(res3.estimates) == 3
    json_dict = res3.to_json_dict()
    assert json_dict["mu_rounded"] == 2
    assert "t,estimate,stderr" in res3.to_csv()


def test_constancy_violation_detected():
    # feeding a fake report with an absurd scale starves the proposal at one
    # t and not another only by luck; instead check the exception wiring by
    # comparing deliberately mismatched estimators
    f, wv, rep = prepared("z1^3", 1)
    with pytest.raises(ConstancyViolated):
        # quadrature at wildly different node counts differs far beyond the
        # (tiny) reported errors when one rule is too coarse to resolve
        mckean_singer_check(f, (0.001, 10.0), budget=12, method="quadrature",
                            report=rep)


def test_homogeneity_scaling_identity():
    # |d_i f|^2(z) = t^{-2 dM (1 - q_i)} |d_i f|^2(z_t), z_t,i = t^{dM q_i} z_i
    rng = np.random.default_rng(7)
    for text, n in (("z1^3", 1), ("z1^2 + z1*z2^3", 2), ("z1^3 + z2^3", 2)):
        f = parse(text, n)
        wv = solve_weights(f)
        dM = 1 / (2 * (1 - float(wv.q_max)))
        grads = gradient(f)
        for t in (0.3, 2.0):
            Z = rng.normal(size=(20, n)) + 1j * rng.normal(size=(20, n))
            Zt = Z * np.array([t ** (dM * float(qi)) for qi in wv.q])
            for i, g in enumerate(grads):
                lhs = np.abs(g.evaluate_many(Z)) ** 2
                rhs = t ** (-2 * dM * (1 - float(wv.q[i]))) \
                    * np.abs(g.evaluate_many(Zt)) ** 2
                assert np.allclose(lhs, rhs, rtol=1e-9)


def test_scaled_coordinate_quadrature_invariance():
    # evaluate the index integral in scaled coordinates z = diag(s^{q_i}) z'
    # and compare with the direct quadrature: the Jacobian exactly cancels
    # the homogeneity factors, so both must agree
    f, wv, rep = prepared("z1^3", 1)
    t = 1.0
    direct = compute_index(f, t, budget=128, method="quadrature", report=rep).estimate

    s = 3.0
    q = float(wv.q[0])
    # substitute z = s^{-q} z'; dvol picks up s^{-2q}; |f'(z)|^2 = s^{-2(1-q)}|f'(z')|^2
    x, wts = np.polynomial.hermite.hermgauss(160)
    sigma = math.sqrt(rep.fitted_C / t) * s ** q  # widen nodes to the scaled frame
    xs = sigma * x
    ws = sigma * wts * np.exp(x * x)
    Z = (xs[:, None] + 1j * xs[None, :]).ravel()[:, None]
    W = (ws[:, None] * ws[None, :]).ravel()
    g = f.wirtinger(1)
    h = g.wirtinger(1)
    grad_sq = np.abs(g.evaluate_many(Z * s ** (-q))) ** 2
    det_sq = np.abs(h.evaluate_many(Z * s ** (-q))) ** 2
    vals = (t / math.pi) * np.exp(-t * grad_sq) * det_sq * s ** (-2 * q)
    scaled = float((vals * W).sum())
    assert abs(scaled - direct) < 1e-6


def test_mc_coverage_of_exact_value():
    # polar closed form gives exactly 2 for the cubic; 3 sigma coverage
    f, wv, rep = prepared("z1^3", 1)
    hits = 0
    runs = 40
    for s in range(runs):
        est = compute_index(f, 1.0, budget=20000, seed=1000 + s, report=rep)
        if abs(est.estimate - 2.0) <= 3 * est.std_error:
            hits += 1
    assert hits >= int(0.9 * runs)
