import json
import math

import numpy as np
import pytest

from outerinv import perturbation as pt
from outerinv.errors import DimensionError, HypothesisViolation
from outerinv.geninv import outer_inverse
from outerinv.harness import (gen_operator_perturbation, gen_problem,
                              gen_subspace_perturbation)
from outerinv.subspace import Subspace, from_spanning, gap, oblique_projector

from conftest import closed_form_outer, random_mixing, rel

e1 = Subspace(np.array([[1.0], [0.0]]))
e2 = Subspace(np.array([[0.0], [1.0]]))
I2 = np.eye(2)


def _scenario(rng, n_x=7, n_y=6, t=3, frac=0.5):
    """Random instance with T', S', E at ``frac`` of the full-perturbation limits."""
    A, T, S = gen_problem(rng, n_x, n_y, t)
    sol = outer_inverse(A, T, S)
    k = sol.kappa
    Tp = gen_subspace_perturbation(rng, T, frac / (1 + k) ** 2)
    Sp = gen_subspace_perturbation(rng, S, frac / (3 + k))
    E = gen_operator_perturbation(rng, A, sol.G2, frac * 2 * k / ((1 + k) * (4 + k)))
    return pt.PerturbationScenario(A, E, T, Tp, S, Sp)


# -- hypotheses ---------------------------------------------------------------------

def test_thresholds_table():
    th = pt.thresholds_for("thm35", 1.0)
    assert th == {"delta_T": 0.25, "delta_S": 0.25, "e_product": pytest.approx(0.2)}
    assert pt.thresholds_for("lemma32", 2.0) == {"delta_S": 0.25}
    assert pt.thresholds_for("lemma34", 7.0) == {"e_product": 1.0}
    with pytest.raises(ValueError):
        pt.thresholds_for("nope", 1.0)


def test_check_hypothesis_is_strict_inequality():
    assert pt.check_hypothesis("lemma31", 1.0, delta_T=0.2499).satisfied
    assert not pt.check_hypothesis("lemma31", 1.0, delta_T=0.25).satisfied


def test_make_report_slack_and_denominator():
    hyp = pt.check_hypothesis("lemma34", 1.0)
    assert pt.make_report("x", hyp, 1.0 + 1e-10, 1.0, 1.0).satisfied
    assert not pt.make_report("x", hyp, 1.0 + 1e-6, 1.0, 1.0).satisfied
    r = pt.make_report("x", hyp, 0.0, 0.0, 1.0)
    assert r.satisfied and r.ratio == 0.0
    r = pt.make_report("x", hyp, 0.5, 1.0, -0.1)
    assert r.rhs == math.inf and not r.satisfied


def test_bound_report_json_contract():
    hyp = pt.check_hypothesis("lemma34", 2.0, e_product=0.5)
    d = pt.make_report("lemma34.norm_bound", hyp, 1.0, 1.0, 0.5).to_dict()
    assert set(d) == {"name", "kappa", "delta_T", "delta_S", "e_product", "thresholds",
                      "lhs", "rhs", "ratio", "hypothesis_ok", "satisfied"}
    assert json.loads(json.dumps(d)) == d
    inf = pt.make_report("y", hyp, 1.0, 1.0, 0.0).to_dict()
    assert inf["rhs"] is None


# -- image gap --------------------------------------------------------------------

def test_image_gap_trivial():
    A = np.diag([2.0, 1.0])
    report, injective = pt.image_gap_bound(A, e1, e2, e1)
    assert report.lhs == 0 and report.rhs == 0 and report.satisfied and injective


def test_image_gap_identity():
    Tp = from_spanning(np.array([1.0, 0.1]))
    report, injective = pt.image_gap_bound(I2, e1, e2, Tp)
    dT = gap(e1, Tp)
    assert report.hypothesis.kappa == pytest.approx(1.0)
    assert report.lhs == pytest.approx(dT, abs=1e-14)
    assert report.rhs == pytest.approx(dT / (1 - 2 * dT))
    assert report.satisfied and injective


def test_image_gap_random(rng):
    for _ in range(20):
        A, T, S = gen_problem(rng, 6, 8, 3)
        k = outer_inverse(A, T, S).kappa
        Tp = gen_subspace_perturbation(rng, T, 0.8 / (1 + k))
        report, injective = pt.image_gap_bound(A, T, S, Tp)
        assert report.hypothesis.satisfied and report.satisfied and injective
        assert np.linalg.svd(A @ Tp.basis, compute_uv=False)[-1] > 0


def test_image_gap_strict_violation():
    Tp = from_spanning(np.array([1.0, 1.0]))
    with pytest.raises(HypothesisViolation) as info:
        pt.image_gap_bound(I2, e1, e2, Tp, strict=True)
    assert isinstance(info.value.report, pt.BoundReport)
    report, _ = pt.image_gap_bound(I2, e1, e2, Tp)
    assert not report.hypothesis.satisfied


# -- range perturbation -----------------------------------------------------------

def test_perturb_t_unchanged(rng):
    A, T, S = gen_problem(rng, 5, 5, 2)
    res = pt.perturb_t(A, T, S, T, mixing_G=np.eye(2), mixing_H=np.eye(2))
    assert rel(res.value, outer_inverse(A, T, S).G2) < 1e-14


@pytest.mark.parametrize("eps", [1e-3, 0.05, 0.1])
def test_perturb_t_identity_oblique_projector(eps):
    Tp = from_spanning(np.array([1.0, eps]))
    res = pt.perturb_t(I2, e1, e2, Tp)
    assert res.hypothesis.satisfied
    np.testing.assert_allclose(res.value, oblique_projector(Tp, e2), atol=1e-14)
    np.testing.assert_allclose(res.value, [[1.0, 0.0], [eps, 0.0]], atol=1e-14)


def test_perturb_t_random(rng):
    for _ in range(20):
        sc = _scenario(rng)
        res = pt.perturb_t(sc.A, sc.T, sc.S, sc.T_prime)
        assert res.hypothesis.satisfied
        assert res.rel_error < 1e-8
        assert rel(res.value, closed_form_outer(sc.A, sc.T_prime, sc.S)) < 1e-8
        assert res.checks["alt_form"] < 1e-9


def test_perturb_t_bounds(rng):
    A, T, S = gen_problem(rng, 5, 5, 2)
    diff, norm = pt.perturb_t_bounds(A, T, S, T)
    assert diff.lhs == pytest.approx(0, abs=1e-14) and diff.satisfied
    assert norm.lhs == pytest.approx(np.linalg.norm(outer_inverse(A, T, S).G2, 2))
    for _ in range(20):
        sc = _scenario(rng, frac=0.95)
        assert all(r.satisfied for r in pt.perturb_t_bounds(sc.A, sc.T, sc.S, sc.T_prime))


def test_perturb_t_hypothesis_violated_is_recorded():
    Tp = from_spanning(np.array([1.0, 1.0]))
    reports = pt.perturb_t_bounds(I2, e1, e2, Tp)
    assert all(not r.hypothesis.satisfied for r in reports)
    with pytest.raises(HypothesisViolation):
        pt.perturb_t(I2, e1, e2, Tp, strict=True)
    # measure anyway: the formula still holds off its hypothesis here
    assert pt.perturb_t(I2, e1, e2, Tp).rel_error < 1e-12


# -- kernel perturbation -----------------------------------------------------------

@pytest.mark.parametrize("eps", [1e-3, 0.05, 0.1])
def test_perturb_s_identity_oblique_projector(eps):
    Sp = from_spanning(np.array([eps, 1.0]))
    res = pt.perturb_s(I2, e1, e2, Sp)
    np.testing.assert_allclose(res.value, oblique_projector(e1, Sp), atol=1e-14)
    np.testing.assert_allclose(res.value, [[1.0, -eps], [0.0, 0.0]], atol=1e-14)


def test_perturb_s_unchanged(rng):
    A, T, S = gen_problem(rng, 5, 6, 2)
    assert rel(pt.perturb_s(A, T, S, S).value, outer_inverse(A, T, S).G2) < 1e-12


def test_perturb_s_random(rng):
    for _ in range(20):
        sc = _scenario(rng)
        res = pt.perturb_s(sc.A, sc.T, sc.S, sc.S_prime)
        assert res.hypothesis.satisfied
        assert res.rel_error < 1e-8
        assert rel(res.value, closed_form_outer(sc.A, sc.T, sc.S_prime)) < 1e-8
        assert res.checks["closed_form"] < 1e-9


def test_perturb_s_bounds(rng):
    A, T, S = gen_problem(rng, 5, 5, 2)
    diff, _ = pt.perturb_s_bounds(A, T, S, S)
    assert diff.lhs == pytest.approx(0, abs=1e-14) and diff.satisfied
    for _ in range(20):
        sc = _scenario(rng, frac=0.95)
        assert all(r.satisfied for r in pt.perturb_s_bounds(sc.A, sc.T, sc.S, sc.S_prime))


def test_perturb_s_bounds_near_singular_denominator(rng):
    A, T, S = gen_problem(rng, 5, 5, 2)
    k = outer_inverse(A, T, S).kappa
    Sp = gen_subspace_perturbation(rng, S, min(0.999 / k, 0.9))
    for r in pt.perturb_s_bounds(A, T, S, Sp):
        assert r.rhs > 0
        assert json.dumps(r.to_dict())


# -- both subspaces --------------------------------------------------------------------

def test_perturb_ts_unchanged(rng):
    A, T, S = gen_problem(rng, 6, 5, 2)
    assert rel(pt.perturb_ts(A, T, S, T, S).value, outer_inverse(A, T, S).G2) < 1e-12


def test_perturb_ts_reduces_to_perturb_s(rng):
    for _ in range(10):
        sc = _scenario(rng)
        ts = pt.perturb_ts(sc.A, sc.T, sc.S, sc.T, sc.S_prime)
        s = pt.perturb_s(sc.A, sc.T, sc.S, sc.S_prime)
        assert rel(ts.value, s.value) < 1e-10


def test_perturb_ts_random(rng):
    for _ in range(20):
        sc = _scenario(rng)
        res = pt.perturb_ts(sc.A, sc.T, sc.S, sc.T_prime, sc.S_prime)
        assert res.hypothesis.satisfied
        assert res.rel_error < 1e-8
        assert rel(res.value, closed_form_outer(sc.A, sc.T_prime, sc.S_prime)) < 1e-8
        assert res.checks["composed"] < 1e-9


def test_perturb_ts_bounds(rng):
    for _ in range(20):
        sc = _scenario(rng, frac=0.95)
        reports = pt.perturb_ts_bounds(sc.A, sc.T, sc.S, sc.T_prime, sc.S_prime)
        assert all(r.hypothesis.satisfied and r.satisfied for r in reports)


def test_perturb_ts_bound_weaker_than_range_bound(rng):
    for _ in range(10):
        sc = _scenario(rng)
        ts = pt.perturb_ts_bounds(sc.A, sc.T, sc.S, sc.T_prime, sc.S)
        t = pt.perturb_t_bounds(sc.A, sc.T, sc.S, sc.T_prime)
        assert ts[0].lhs == pytest.approx(t[0].lhs)
        assert ts[0].rhs >= t[0].rhs * (1 - 1e-12)


# -- operator perturbation ---------------------------------------------------------------

def test_perturb_a_zero(rng):
    A, T, S = gen_problem(rng, 5, 5, 2)
    res = pt.perturb_a(A, np.zeros_like(A), T, S)
    assert rel(res.value, outer_inverse(A, T, S).G2) < 1e-14


@pytest.mark.parametrize("eps", [0.01, 0.3, 0.9])
def test_perturb_a_scaled_identity(eps):
    n = 3
    W, Z = Subspace.whole(n), Subspace.trivial(n)
    res = pt.perturb_a(np.eye(n), eps * np.eye(n), W, Z)
    np.testing.assert_allclose(res.value, np.eye(n) / (1 + eps), atol=1e-15)
    norm, diff = pt.perturb_a_bounds(np.eye(n), eps * np.eye(n), W, Z)
    assert diff.lhs == pytest.approx(eps / (1 + eps))
    assert diff.rhs == pytest.approx(eps / (1 - eps))
    assert norm.lhs == pytest.approx(1 / (1 + eps))
    assert norm.rhs == pytest.approx(1 / (1 - eps))
    assert diff.satisfied and norm.satisfied


def test_perturb_a_random(rng):
    for _ in range(20):
        A, T, S = gen_problem(rng, 6, 7, 3)
        E = gen_operator_perturbation(rng, A, outer_inverse(A, T, S).G2, 0.3)
        res = pt.perturb_a(A, E, T, S)
        assert res.hypothesis.e_product == pytest.approx(0.3, abs=1e-10)
        assert res.rel_error < 1e-8
        assert rel(res.value, closed_form_outer(A + E, T, S)) < 1e-8
        assert res.checks["two_sided"] < 1e-10
        assert all(r.satisfied for r in pt.perturb_a_bounds(A, E, T, S))


def test_perturb_a_shape_mismatch():
    with pytest.raises(DimensionError):
        pt.perturb_a(I2, np.eye(3), e1, e2)


# -- everything ------------------------------------------------------------------------------

def test_perturb_full_unperturbed(rng):
    A, T, S = gen_problem(rng, 6, 6, 3)
    res = pt.perturb_full(pt.PerturbationScenario.unperturbed(A, T, S))
    assert rel(res.value, outer_inverse(A, T, S).G2) < 1e-12


def test_perturb_full_without_e_matches_ts(rng):
    for _ in range(10):
        sc = _scenario(rng)
        no_e = pt.PerturbationScenario(sc.A, np.zeros_like(sc.A), sc.T, sc.T_prime, sc.S, sc.S_prime)
        full = pt.perturb_full(no_e)
        ts = pt.perturb_ts(sc.A, sc.T, sc.S, sc.T_prime, sc.S_prime)
        assert rel(full.value, ts.value) < 1e-10


def test_perturb_full_random(rng):
    for _ in range(20):
        sc = _scenario(rng)
        res = pt.perturb_full(sc)
        assert res.hypothesis.satisfied
        assert res.rel_error < 1e-8
        assert rel(res.value, closed_form_outer(sc.A + sc.E, sc.T_prime, sc.S_prime)) < 1e-8
        assert res.checks["via_operator_formula"] < 1e-9
        assert all(r.satisfied for r in pt.perturb_full_bounds(sc))


def test_perturb_full_bounds_degenerate(rng):
    A, T, S = gen_problem(rng, 5, 5, 2)
    norm, rel_diff = pt.perturb_full_bounds(pt.PerturbationScenario.unperturbed(A, T, S))
    assert rel_diff.lhs == pytest.approx(0, abs=1e-14)
    assert norm.lhs == pytest.approx(np.linalg.norm(outer_inverse(A, T, S).G2, 2))
    assert norm.satisfied and rel_diff.satisfied


def test_perturb_full_bounds_e_near_threshold(rng):
    A, T, S = gen_problem(rng, 6, 6, 3)
    sol = outer_inverse(A, T, S)
    k = sol.kappa
    E = gen_operator_perturbation(rng, A, sol.G2, 0.99 * 2 * k / ((1 + k) * (4 + k)))
    sc = pt.PerturbationScenario(A, E, T, T, S, S)
    for r in pt.perturb_full_bounds(sc):
        assert r.hypothesis.satisfied
        assert 0 < r.rhs < math.inf
        assert r.satisfied


def test_perturb_full_strict():
    sc = pt.PerturbationScenario(I2, 0.9 * I2, e1, e1, e2, e2)
    with pytest.raises(HypothesisViolation):
        pt.perturb_full(sc, strict=True)
    with pytest.raises(HypothesisViolation):
        pt.perturb_full_bounds(sc, strict=True)
    assert not pt.perturb_full(sc).hypothesis.satisfied


def test_scenario_dimension_checks():
    with pytest.raises(DimensionError):
        pt.PerturbationScenario(I2, np.eye(3), e1, e1, e2, e2)
    with pytest.raises(DimensionError):
        pt.PerturbationScenario(I2, np.zeros((2, 2)), e1, Subspace.whole(3), e2, e2)


# -- properties ------------------------------------------------------------------------------

def test_denominators_positive_under_hypotheses(rng):
    for _ in range(30):
        sc = _scenario(rng, frac=0.99)
        reports = (pt.perturb_t_bounds(sc.A, sc.T, sc.S, sc.T_prime)
                   + pt.perturb_s_bounds(sc.A, sc.T, sc.S, sc.S_prime)
                   + pt.perturb_ts_bounds(sc.A, sc.T, sc.S, sc.T_prime, sc.S_prime)
                   + pt.perturb_a_bounds(sc.A, sc.E, sc.T, sc.S)
                   + pt.perturb_full_bounds(sc))
        for r in reports:
            assert r.hypothesis.satisfied
            assert math.isfinite(r.rhs) and r.rhs >= 0


def test_mixing_invariance(rng):
    for _ in range(10):
        sc = _scenario(rng, t=3)
        m = [random_mixing(rng, 3) for _ in range(3)]
        base_t = pt.perturb_t(sc.A, sc.T, sc.S, sc.T_prime).value
        assert rel(pt.perturb_t(sc.A, sc.T, sc.S, sc.T_prime, m[0], m[1]).value, base_t) < 1e-9
        base_s = pt.perturb_s(sc.A, sc.T, sc.S, sc.S_prime).value
        assert rel(pt.perturb_s(sc.A, sc.T, sc.S, sc.S_prime, m[0], m[1]).value, base_s) < 1e-9
        base_ts = pt.perturb_ts(sc.A, sc.T, sc.S, sc.T_prime, sc.S_prime).value
        assert rel(pt.perturb_ts(sc.A, sc.T, sc.S, sc.T_prime, sc.S_prime, *m).value,
                   base_ts) < 1e-9
        base_full = pt.perturb_full(sc).value
        assert rel(pt.perturb_full(sc, *m).value, base_full) < 1e-9
