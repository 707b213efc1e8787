"""Explicit perturbation formulas for outer inverses and their error bounds.

Notation used throughout: ``A2 = A^(2)_{T,S}`` is the unperturbed outer
inverse, ``kappa = ||A|| ||A2||`` its condition number, ``dT`` the gap between
``T`` and ``T'``, ``dS`` the gap between ``S`` and ``S'`` and
``p = ||A2|| ||E||``. All norms are spectral norms.

Every formula function returns a :class:`FormulaResult` comparing the formula
with a directly constructed outer inverse. Every bound function returns
:class:`BoundReport` objects. Hypotheses are measured, not enforced, unless
``strict=True`` is passed.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (DimensionError, FormulaSingularityError,
                     HypothesisViolation, SingularMatrixError)
from .geninv import (EXIST_TOL, group_inverse, image_subspace, outer_inverse,
                     prescribed_operator)
from .subspace import Subspace, from_spanning, gap

REL_SLACK = 1e-9
ABS_SLACK = 1e-12

HYPOTHESES = ("lemma23", "lemma31", "lemma32", "thm33", "lemma34", "thm35")


def thresholds_for(name, kappa):
    """Strict upper limits on ``delta_T``, ``delta_S`` and ``e_product``."""
    k = kappa
    t_range = 1.0 / (1.0 + k) ** 2
    t_kernel = 1.0 / (3.0 + k)
    table = {
        "lemma23": {"delta_T": 1.0 / (1.0 + k)},
        "lemma31": {"delta_T": t_range},
        "lemma32": {"delta_S": 1.0 / (2.0 + k)},
        "thm33": {"delta_T": t_range, "delta_S": t_kernel},
        "lemma34": {"e_product": 1.0},
        "thm35": {"delta_T": t_range, "delta_S": t_kernel,
                  "e_product": 2.0 * k / ((1.0 + k) * (4.0 + k))},
    }
    try:
        return table[name]
    except KeyError:
        raise ValueError(f"unknown hypothesis {name!r}; expected one of {HYPOTHESES}") from None


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    kappa: float
    delta_T: float
    delta_S: float
    e_product: float
    thresholds: dict
    satisfied: bool


def check_hypothesis(name, kappa, delta_T=0.0, delta_S=0.0, e_product=0.0):
    thresholds = thresholds_for(name, kappa)
    measured = {"delta_T": delta_T, "delta_S": delta_S, "e_product": e_product}
    ok = all(measured[key] < limit for key, limit in thresholds.items())
    return HypothesisCheck(name, kappa, delta_T, delta_S, e_product, thresholds, ok)


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass(frozen=True)
class BoundReport:
    """One inequality ``lhs <= rhs`` evaluated on a concrete instance."""

    name: str
    hypothesis: HypothesisCheck
    lhs: float
    rhs: float
    ratio: float
    satisfied: bool

    def to_dict(self):
        h = self.hypothesis
        return {
            "name": self.name,
            "kappa": h.kappa,
            "delta_T": h.delta_T,
            "delta_S": h.delta_S,
            "e_product": h.e_product,
            "thresholds": dict(h.thresholds),
            "lhs": _json_float(self.lhs),
            "rhs": _json_float(self.rhs),
            "ratio": _json_float(self.ratio),
            "hypothesis_ok": h.satisfied,
            "satisfied": self.satisfied,
        }


def make_report(name, hypothesis, lhs, numerator, denominator):
    """Build a report for ``lhs <= numerator / denominator``.

    A non-positive denominator means the bound is undefined; the report then
    has ``rhs = inf`` and ``satisfied = False``.
    """
    lhs = float(lhs)
    if denominator <= 0:
        return BoundReport(name, hypothesis, lhs, math.inf, 0.0, False)
    rhs = float(numerator / denominator)
    ok = lhs <= rhs * (1 + REL_SLACK) + ABS_SLACK
    if rhs > 0:
        ratio = lhs / rhs
    else:
        ratio = 0.0 if lhs <= ABS_SLACK else math.inf
    return BoundReport(name, hypothesis, lhs, rhs, ratio, bool(ok))


@dataclass(frozen=True, eq=False)
class FormulaResult:
    """Formula output next to the directly computed inverse.

    ``checks`` maps names of internal consistency comparisons (alternative
    closed forms of the same formula) to relative differences.
    """

    value: np.ndarray
    oracle: np.ndarray
    rel_error: float
    hypothesis: HypothesisCheck
    checks: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class PerturbationScenario:
    """``A`` with ``(T, S)`` and their perturbations ``A + E``, ``T'``, ``S'``."""

    A: np.ndarray
    E: np.ndarray
    T: Subspace
    T_prime: Subspace
    S: Subspace
    S_prime: Subspace

    def __post_init__(self):
        A = linalg.as_matrix(self.A, "A")
        E = linalg.as_matrix(self.E, "E")
        if E.shape != A.shape:
            raise DimensionError(f"E has shape {E.shape}, A has {A.shape}")
        n_Y, n_X = A.shape
        for name, V, n in (("T", self.T, n_X), ("T_prime", self.T_prime, n_X),
                           ("S", self.S, n_Y), ("S_prime", self.S_prime, n_Y)):
            if V.ambient_dim != n:
                raise DimensionError(f"{name} lives in R^{V.ambient_dim}, expected R^{n}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "E", E)

    @classmethod
    def unperturbed(cls, A, T, S):
        return cls(A, np.zeros_like(np.asarray(A, dtype=float)), T, T, S, S)


# -- shared pieces -----------------------------------------------------------

def _base(A, T, S):
    """``(A2, kappa, ||A2||)`` for the unperturbed triple."""
    sol = outer_inverse(A, T, S)
    return sol.G2, sol.kappa, linalg.spectral_norm(sol.G2)


def _inv_solve(K, B, what):
    try:
        return linalg.solve_square(K, B)
    except SingularMatrixError as exc:
        raise FormulaSingularityError(f"{what} is not invertible: {exc}", exc.rcond) from exc


def _inv_right(B, K, what):
    try:
        return linalg.solve_right(B, K)
    except SingularMatrixError as exc:
        raise FormulaSingularityError(f"{what} is not invertible: {exc}", exc.rcond) from exc


def _enforce(strict, hyp, payload=None):
    if strict and not hyp.satisfied:
        raise HypothesisViolation(
            f"hypothesis {hyp.name} fails: measured "
            f"(delta_T={hyp.delta_T:.3e}, delta_S={hyp.delta_S:.3e}, "
            f"e_product={hyp.e_product:.3e}) vs limits {hyp.thresholds}",
            payload if payload is not None else hyp)


class _RangeStep:
    """Pieces of the range-perturbation formula shared by several results.

    ``G`` has range ``T`` and kernel ``S``; ``H`` has range ``T'`` and
    kernel ``S``. ``value`` is ``A^(2)_{T',S}``.
    """

    def __init__(self, A, G, H, t):
        n_X, n_Y = G.shape
        self.F = H - G
        self.AGg = group_inverse(A @ G, rank=t)
        self.A2 = G @ self.AGg
        self.K = np.eye(n_Y) + self.AGg @ A @ self.F
        self.KinvAGg = _inv_solve(self.K, self.AGg, "I + (AG)^g A F")
        self.left = np.eye(n_X) - self.A2 @ A
        self.value = self.A2 + self.left @ self.F @ self.KinvAGg
        # I + A F (AG)^g, whose inverse closes the composite formula
        self.L = np.eye(n_Y) + A @ self.F @ self.AGg


def _kernel_step(A, Gt, Ht, t):
    """Correction ``(I + (AGt)^g A Ft)^{-1} (AGt)^g A Ft`` for a kernel move."""
    n_Y = Gt.shape[1]
    Ft = Ht - Gt
    AGtg = group_inverse(A @ Gt, rank=t)
    Kt = np.eye(n_Y) + AGtg @ A @ Ft
    return _inv_solve(Kt, AGtg @ A @ Ft, "I + (AG~)^g A F~"), Kt, AGtg


# -- image gap ----------------------------------------------------------------

def _image(A, V):
    s = linalg.svd(A @ V.basis).singular_values if V.dim else np.array([np.inf])
    injective = bool(V.dim == 0 or s[-1] > EXIST_TOL * linalg.spectral_norm(A))
    if injective:
        return image_subspace(A, V), injective
    return from_spanning(A @ V.basis), injective


def image_gap_bound(A, T, S, T_prime, strict=False):
    """Gap between ``A T`` and ``A T'`` against ``kappa dT / (1 - (1+kappa) dT)``.

    Returns ``(report, injective)`` where ``injective`` tells whether ``A``
    is injective on ``T'`` (``N(A) & T' = {0}``).
    """
    A = linalg.as_matrix(A, "A")
    _, kappa, _ = _base(A, T, S)
    dT = gap(T, T_prime)
    hyp = check_hypothesis("lemma23", kappa, delta_T=dT)
    AT, _ = _image(A, T)
    ATp, injective = _image(A, T_prime)
    report = make_report("lemma23.image_gap", hyp, gap(AT, ATp),
                         kappa * dT, 1.0 - (1.0 + kappa) * dT)
    _enforce(strict, hyp, report)
    return report, injective


# -- perturbation of T ---------------------------------------------------------

def perturb_t(A, T, S, T_prime, mixing_G=None, mixing_H=None, strict=False):
    """``A^(2)_{T',S}`` from ``A^(2)_{T,S}`` by the range-perturbation formula

        A2 + (I - A2 A) F (I + (AG)^g A F)^{-1} (AG)^g,   F = H - G,

    with ``R(G) = T``, ``R(H) = T'`` and ``N(G) = N(H) = S``. The variant
    ending in ``(AG)^g A A2`` is reported in ``checks["alt_form"]``.
    """
    A = linalg.as_matrix(A, "A")
    _, kappa, _ = _base(A, T, S)
    hyp = check_hypothesis("lemma31", kappa, delta_T=gap(T, T_prime))
    _enforce(strict, hyp)

    t = T.dim
    G = prescribed_operator(T, S, mixing_G)
    H = prescribed_operator(T_prime, S, mixing_H)
    step = _RangeStep(A, G, H, t)
    alt = step.A2 + step.left @ step.F @ _inv_solve(
        step.K, step.AGg @ A @ step.A2, "I + (AG)^g A F")

    oracle = outer_inverse(A, T_prime, S).G2
    return FormulaResult(step.value, oracle, linalg.rel_diff(step.value, oracle), hyp,
                         {"alt_form": linalg.rel_diff(step.value, alt)})


def perturb_t_bounds(A, T, S, T_prime, strict=False):
    A = linalg.as_matrix(A, "A")
    A2, kappa, nA2 = _base(A, T, S)
    dT = gap(T, T_prime)
    hyp = check_hypothesis("lemma31", kappa, delta_T=dT)
    _enforce(strict, hyp)
    A2p = outer_inverse(A, T_prime, S).G2
    den = 1.0 - (1.0 + kappa) * dT
    return [
        make_report("lemma31.diff_bound", hyp, linalg.spectral_norm(A2p - A2),
                    (1.0 + kappa) * dT * nA2, den),
        make_report("lemma31.norm_bound", hyp, linalg.spectral_norm(A2p), nA2, den),
    ]


# -- perturbation of S ---------------------------------------------------------

def perturb_s(A, T, S, S_prime, mixing_G=None, mixing_H=None, strict=False):
    """``A^(2)_{T,S'}`` from ``A^(2)_{T,S}`` by the kernel-perturbation formula

        A2 + A2 (I + (AG)^g A F)^{-1} (AG)^g A F (I - A A2),   F = H - G,

    with ``R(G) = R(H) = T``, ``N(G) = S``, ``N(H) = S'``. The equivalent form
    ``A2 (I + (AG)^g A F)^{-1} (AG)^g A H`` is reported in
    ``checks["closed_form"]``.
    """
    A = linalg.as_matrix(A, "A")
    _, kappa, _ = _base(A, T, S)
    hyp = check_hypothesis("lemma32", kappa, delta_S=gap(S, S_prime))
    _enforce(strict, hyp)

    t = T.dim
    n_Y = A.shape[0]
    G = prescribed_operator(T, S, mixing_G)
    H = prescribed_operator(T, S_prime, mixing_H)
    F = H - G
    AGg = group_inverse(A @ G, rank=t)
    A2 = G @ AGg
    K = np.eye(n_Y) + AGg @ A @ F
    value = A2 + A2 @ _inv_solve(K, AGg @ A @ F @ (np.eye(n_Y) - A @ A2), "I + (AG)^g A F")
    closed = A2 @ _inv_solve(K, AGg @ A @ H, "I + (AG)^g A F")

    oracle = outer_inverse(A, T, S_prime).G2
    return FormulaResult(value, oracle, linalg.rel_diff(value, oracle), hyp,
                         {"closed_form": linalg.rel_diff(value, closed)})


def perturb_s_bounds(A, T, S, S_prime, strict=False):
    A = linalg.as_matrix(A, "A")
    A2, kappa, nA2 = _base(A, T, S)
    dS = gap(S_prime, S)
    hyp = check_hypothesis("lemma32", kappa, delta_S=dS)
    _enforce(strict, hyp)
    A2p = outer_inverse(A, T, S_prime).G2
    den = 1.0 - kappa * dS
    return [
        make_report("lemma32.diff_bound", hyp, linalg.spectral_norm(A2 - A2p),
                    (1.0 + kappa) * dS * nA2, den),
        make_report("lemma32.norm_bound", hyp, linalg.spectral_norm(A2p),
                    (1.0 + dS) * nA2, den),
    ]


# -- simultaneous perturbation of T and S --------------------------------------

def _composite(A, T, S, T_prime, S_prime, mixing_G, mixing_Gt, mixing_Ht):
    t = T.dim
    n_Y = A.shape[0]
    G = prescribed_operator(T, S, mixing_G)
    Gt = prescribed_operator(T_prime, S, mixing_Gt)
    Ht = prescribed_operator(T_prime, S_prime, mixing_Ht)
    step = _RangeStep(A, G, Gt, t)
    corr, _, _ = _kernel_step(A, Gt, Ht, t)
    right = _inv_right((np.eye(n_Y) - A @ step.A2), step.L, "I + A F (AG)^g")
    value = step.value + step.value @ corr @ right
    # kernel formula applied directly on top of A^(2)_{T',S}
    X1 = step.value
    composed = X1 + X1 @ corr @ (np.eye(n_Y) - A @ X1)
    return value, composed


def perturb_ts(A, T, S, T_prime, S_prime, mixing_G=None, mixing_Gt=None,
               mixing_Ht=None, strict=False):
    """``A^(2)_{T',S'}`` from ``A^(2)_{T,S}`` when both range and kernel move.

    ``G``, ``G~``, ``H~`` have ranges ``T``, ``T'``, ``T'`` and kernels ``S``,
    ``S``, ``S'``; ``F = G~ - G`` and ``F~ = H~ - G~``. ``checks["composed"]``
    compares with applying the range formula and then the kernel formula.
    """
    A = linalg.as_matrix(A, "A")
    _, kappa, _ = _base(A, T, S)
    hyp = check_hypothesis("thm33", kappa, delta_T=gap(T, T_prime),
                           delta_S=gap(S, S_prime))
    _enforce(strict, hyp)
    value, composed = _composite(A, T, S, T_prime, S_prime, mixing_G, mixing_Gt, mixing_Ht)
    oracle = outer_inverse(A, T_prime, S_prime).G2
    return FormulaResult(value, oracle, linalg.rel_diff(value, oracle), hyp,
                         {"composed": linalg.rel_diff(value, composed)})


def perturb_ts_bounds(A, T, S, T_prime, S_prime, strict=False):
    A = linalg.as_matrix(A, "A")
    A2, kappa, nA2 = _base(A, T, S)
    dT = gap(T, T_prime)
    dS = gap(S_prime, S)
    hyp = check_hypothesis("thm33", kappa, delta_T=dT, delta_S=dS)
    _enforce(strict, hyp)
    A2p = outer_inverse(A, T_prime, S_prime).G2
    den = 1.0 - (1.0 + kappa) * dT - kappa * dS
    return [
        make_report("thm33.diff_bound", hyp, linalg.spectral_norm(A2p - A2),
                    (1.0 + kappa) * (dT + dS) * nA2, den),
        make_report("thm33.norm_bound", hyp, linalg.spectral_norm(A2p),
                    (1.0 + dS) * nA2, den),
    ]


# -- perturbation of A -----------------------------------------------------------

def perturb_a(A, E, T, S, strict=False):
    """``(A + E)^(2)_{T,S} = (I + A2 E)^{-1} A2 = A2 (I + E A2)^{-1}``.

    ``checks["two_sided"]`` compares the two factorizations.
    """
    A = linalg.as_matrix(A, "A")
    E = linalg.as_matrix(E, "E")
    if E.shape != A.shape:
        raise DimensionError(f"E has shape {E.shape}, A has {A.shape}")
    A2, kappa, nA2 = _base(A, T, S)
    hyp = check_hypothesis("lemma34", kappa, e_product=nA2 * linalg.spectral_norm(E))
    _enforce(strict, hyp)
    n_Y, n_X = A.shape
    left = _inv_solve(np.eye(n_X) + A2 @ E, A2, "I + A2 E")
    right = _inv_right(A2, np.eye(n_Y) + E @ A2, "I + E A2")
    oracle = outer_inverse(A + E, T, S).G2
    return FormulaResult(left, oracle, linalg.rel_diff(left, oracle), hyp,
                         {"two_sided": linalg.rel_diff(left, right)})


def perturb_a_bounds(A, E, T, S, strict=False):
    A = linalg.as_matrix(A, "A")
    E = linalg.as_matrix(E, "E")
    A2, kappa, nA2 = _base(A, T, S)
    nE = linalg.spectral_norm(E)
    p = nA2 * nE
    hyp = check_hypothesis("lemma34", kappa, e_product=p)
    _enforce(strict, hyp)
    A2bar = outer_inverse(A + E, T, S).G2
    den = 1.0 - p
    return [
        make_report("lemma34.norm_bound", hyp, linalg.spectral_norm(A2bar), nA2, den),
        make_report("lemma34.diff_bound", hyp, linalg.spectral_norm(A2bar - A2),
                    nA2 * nA2 * nE, den),
    ]


# -- everything at once ------------------------------------------------------------

def _full_hypothesis(sc):
    _, kappa, nA2 = _base(sc.A, sc.T, sc.S)
    dT = gap(sc.T, sc.T_prime)
    dS = gap(sc.S_prime, sc.S)
    p = nA2 * linalg.spectral_norm(sc.E)
    return check_hypothesis("thm35", kappa, delta_T=dT, delta_S=dS, e_product=p)


def perturb_full(scenario, mixing_G=None, mixing_Gt=None, mixing_Ht=None, strict=False):
    """``(A + E)^(2)_{T',S'} = [I + X E]^{-1} X`` where ``X`` is the composite
    range-and-kernel formula for ``A^(2)_{T',S'}``.

    ``checks["via_operator_formula"]`` compares with the operator-perturbation formula
    applied to a directly computed ``A^(2)_{T',S'}``.
    """
    sc = scenario
    hyp = _full_hypothesis(sc)
    _enforce(strict, hyp)
    X, _ = _composite(sc.A, sc.T, sc.S, sc.T_prime, sc.S_prime,
                      mixing_G, mixing_Gt, mixing_Ht)
    n_X = sc.A.shape[1]
    value = _inv_solve(np.eye(n_X) + X @ sc.E, X, "I + A^(2)_{T',S'} E")

    direct = outer_inverse(sc.A, sc.T_prime, sc.S_prime).G2
    via = _inv_solve(np.eye(n_X) + direct @ sc.E, direct, "I + A^(2)_{T',S'} E")
    oracle = outer_inverse(sc.A + sc.E, sc.T_prime, sc.S_prime).G2
    return FormulaResult(value, oracle, linalg.rel_diff(value, oracle), hyp,
                         {"via_operator_formula": linalg.rel_diff(value, via)})


def perturb_full_bounds(scenario, strict=False):
    sc = scenario
    A2, kappa, nA2 = _base(sc.A, sc.T, sc.S)
    hyp = _full_hypothesis(sc)
    _enforce(strict, hyp)
    dT, dS, p = hyp.delta_T, hyp.delta_S, hyp.e_product
    A2bar = outer_inverse(sc.A + sc.E, sc.T_prime, sc.S_prime).G2
    den = 1.0 - (1.0 + kappa) * dT - kappa * dS - (1.0 + dS) * p
    rel = linalg.spectral_norm(A2bar - A2) / nA2 if nA2 > 0 else 0.0
    return [
        make_report("thm35.norm_bound", hyp, linalg.spectral_norm(A2bar),
                    (1.0 + dS) * nA2, den),
        make_report("thm35.rel_diff_bound", hyp, rel,
                    (1.0 + kappa) * (dT + dS + (1.0 + dS) * p), den),
    ]
