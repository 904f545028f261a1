import pytest
from fractions import Fraction
from hypothesis import given, settings
import hypothesis.strategies as st

from singspect.poly import parse
from singspect.weights import (
    BilinearMonomialPresent,
    GradientVanishesAwayFromOrigin,
    NonIntegerMilnor,
    NotQuasiHomogeneous,
    WeightOutOfRange,
    WeightVector,
    WeightsNotUnique,
    milnor_brute_force,
    milnor_oracle,
    nondegeneracy_check,
    solve_weights,
    tameness_report,
    weight_residuals,
)


def test_known_weight_systems():
    wv = solve_weights(parse("z1^2 + z1*z2^3 + z2*z3^3", 3))
    assert wv.q == (Fraction(1, 2), Fraction(1, 6), Fraction(5, 18))
    wv2 = solve_weights(parse("z1^2 + z1*z2^2 + z2*z3^4", 3))
    assert wv2.q == (Fraction(1, 2), Fraction(1, 4), Fraction(3, 16))
    for r in (1, 2, 3, 4):
        wv_r = solve_weights(parse(f"z1^{r + 1}", 1))
        assert wv_r.q == (Fraction(1, r + 1),)


def test_weight_errors():
    with pytest.raises(WeightsNotUnique):
        solve_weights(parse("z1*z2", 2))
    with pytest.raises(NotQuasiHomogeneous):
        solve_weights(parse("z1^2 + z1^3", 1))
    with pytest.raises(NotQuasiHomogeneous):
        solve_weights(parse("1 + z1^2", 1))
    with pytest.raises(WeightOutOfRange):
        solve_weights(parse("z1^2 + z2", 2))  # linear term forces q2 = 1
    with pytest.raises(ValueError):
        solve_weights(parse("z1*conj(z1)", 1))


def test_reduced_weight_representation():
    wv = solve_weights(parse("z1^2 + z1*z2^3 + z2*z3^3", 3))
    assert wv.d == 18 and wv.k == (9, 3, 5)
    import math
    assert math.gcd(wv.d, *wv.k) == 1


def test_solved_weights_satisfy_system_exactly():
    for text, n in (("z1^2 + z1*z2^3 + z2*z3^3", 3), ("z1^3 + z2^3", 2),
                    ("z1^2 + z2^6", 2), ("z1^3 + z1*z2^4", 2)):
        f = parse(text, n)
        wv = solve_weights(f)
        assert all(r == 0 for r in weight_residuals(f, wv))


def test_tameness_examples():
    wv = solve_weights(parse("z1^2 + z1*z2^3 + z2*z3^3", 3))
    rep = tameness_report(wv)
    assert rep.gap == Fraction(1, 3) and rep.condition_13 is False
    assert rep.delta == 0

    rep2 = tameness_report(WeightVector((Fraction(1, 2), Fraction(1, 2))))
    assert rep2.gap == 0 and rep2.condition_13 is True
    assert rep2.delta == Fraction(2, 3)

    rep3 = tameness_report(WeightVector((Fraction(1, 3),)))
    assert rep3.delta == Fraction(1, 2)
    assert rep3.delta2 == Fraction(3, 4) and rep3.delta3 == Fraction(3, 4)


def test_delta_positive_iff_condition():
    for q in [(Fraction(1,2), Fraction(1,6), Fraction(5,18)),
              (Fraction(1,2), Fraction(1,2)), (Fraction(1,3), Fraction(1,4)),
              (Fraction(1,2), Fraction(1,4), Fraction(3,16))]:
        rep = tameness_report(WeightVector(q))
        assert (rep.delta > 0) == rep.condition_13


@settings(max_examples=80, deadline=None)
@given(st.fractions(min_value=Fraction(1, 30), max_value=Fraction(1, 2)),
       st.fractions(min_value=0, max_value=Fraction(1, 3)))
def test_tameness_monotone_in_gap(qM, shrink):
    # shrinking the gap never flips condition_13 from True to False
    qm = qM - min(shrink, qM - Fraction(1, 60))
    if not (0 < qm <= qM <= Fraction(1, 2)):
        return
    wide = tameness_report(WeightVector((qM, qm)))
    qm2 = qm + (qM - qm) / 2
    narrow = tameness_report(WeightVector((qM, qm2)))
    if wide.condition_13:
        assert narrow.condition_13


def test_milnor_oracle_examples():
    for n in (1, 2, 3):
        assert milnor_oracle(WeightVector((Fraction(1, 2),) * n)) == 1
    assert milnor_oracle(WeightVector((Fraction(1, 3),))) == 2
    assert milnor_oracle(WeightVector((Fraction(1, 3), Fraction(1, 3)))) == 4
    assert milnor_oracle(solve_weights(parse("z1^2 + z1*z2^3 + z2*z3^3", 3))) == 13
    with pytest.raises(NonIntegerMilnor):
        milnor_oracle(WeightVector((Fraction(2, 5), Fraction(1, 2))))


def test_milnor_brute_force_agreement():
    cases = [
        ("z1^3", 1), ("z1^4", 1), ("z1^5", 1), ("z1^6", 1),
        ("z1^3 + z2^3", 2), ("z1^2 + z2^4", 2), ("z1^3 + z2^4", 2),
        ("z1^3 + z1*z2^3", 2), ("z1^4 + z2^4", 2), ("z1^2 + z2^6", 2),
        ("z1^5 + z2^3", 2), ("z1^4 + z1*z2^3", 2),
    ]
    for text, n in cases:
        f = parse(text, n)
        wv = solve_weights(f)
        assert milnor_brute_force(f, wv) == milnor_oracle(wv), text


def test_nondegeneracy_check_paths():
    with pytest.raises(BilinearMonomialPresent):
        nondegeneracy_check(parse("z1*z2", 2), WeightVector((Fraction(1, 2),) * 2))
    f = parse("z1^2", 1)
    rep = nondegeneracy_check(f, solve_weights(f), seed=3)
    assert rep.isolated_witness and rep.no_bilinear and rep.heuristic
    assert rep.samples >= 10 ** 4
    assert rep.fitted_C > 0
    # z1^2 z2 has critical points all along z1 = 0
    with pytest.raises(GradientVanishesAwayFromOrigin) as err:
        nondegeneracy_check(parse("z1^2*z2", 2),
                            WeightVector((Fraction(1, 4), Fraction(1, 2))), seed=3)
    w = err.value.witness
    g = parse("z1^2*z2", 2)
    assert sum(abs(g.wirtinger(i).evaluate(w)) ** 2 for i in (1, 2)) < 1e-12


def test_fitted_constant_bounds_growth_floor():
    # |grad f|^2 >= |z|^2 / C - 1 must hold on fresh sample points
    import numpy as np
    f = parse("(1/2)*z1^2", 1)
    rep = nondegeneracy_check(f, solve_weights(f), seed=5)
    rng = np.random.default_rng(123)
    Z = rng.normal(scale=4.0, size=(500, 1)) + 1j * rng.normal(scale=4.0, size=(500, 1))
    grad_sq = np.abs(f.wirtinger(1).evaluate_many(Z)) ** 2
    floor = (np.abs(Z[:, 0]) ** 2) / rep.fitted_C - 1
    assert np.all(grad_sq >= floor - 1e-9)
