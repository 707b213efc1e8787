"""Randomized verification of the perturbation formulas and bounds.

Each trial draws a solvable ``(A, T, S)``, perturbs ``T``, ``S`` and ``A``
to a fixed fraction ("budget") of the corresponding hypothesis threshold, and
evaluates every formula against its direct oracle and every bound. Trial
``i`` of a run with seed ``s`` uses the random stream
``SeedSequence(s, spawn_key=(i,))``, so results do not depend on how trials
are scheduled.
"""

import csv
import datetime
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import linalg
from .errors import GenerationError, OuterInverseError
from .geninv import exists_outer_inverse, image_subspace, outer_inverse
from .perturbation import (PerturbationScenario, image_gap_bound, perturb_a,
                           perturb_a_bounds, perturb_full, perturb_full_bounds,
                           perturb_s, perturb_s_bounds, perturb_t,
                           perturb_t_bounds, perturb_ts, perturb_ts_bounds)
from .subspace import Subspace, delta, from_spanning, gap, is_complementary

FORMULAS = ("perturb_t", "perturb_s", "perturb_ts", "perturb_a", "perturb_full")

MAX_REJECTIONS = 100
GAP_TARGET_TOL = 1e-6


@dataclass(frozen=True)
class TrialConfig:
    seed: int = 42
    trials: int = 100
    n_x: int = 8
    n_y: int = 8
    t: int = 3
    gap_budget_T: float = 0.5
    gap_budget_S: float = 0.5
    e_budget: float = 0.5
    formula_tol: float = 1e-8
    independent_s: bool = False

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        for name in ("n_x", "n_y"):
            if not 2 <= getattr(self, name) <= 20:
                raise ValueError(f"{name} must lie in [2, 20]")
        if not 1 <= self.t <= min(self.n_x, self.n_y):
            raise ValueError("t must satisfy 1 <= t <= min(n_x, n_y)")
        for name in ("gap_budget_T", "gap_budget_S", "e_budget"):
            if not 0 <= getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in [0, 1)")


def trial_rng(seed, trial_id):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial_id,)))


# -- generators ---------------------------------------------------------------

def gen_problem(rng, n_x, n_y, t, independent_s=False):
    """Draw a Gaussian ``A`` and subspaces ``T``, ``S`` with ``A^(2)_{T,S}``
    existing.

    By default ``S`` is a perturbed orthogonal complement of ``A T``; with
    ``independent_s`` it is an independent Gaussian subspace, kept only if
    complementary to ``A T``.
    """
    if not 0 <= t <= min(n_x, n_y):
        raise ValueError(f"need 0 <= t <= min(n_x, n_y), got t={t}")
    for _ in range(MAX_REJECTIONS):
        A = rng.standard_normal((n_y, n_x))
        T = Subspace(np.linalg.qr(rng.standard_normal((n_x, t)))[0])
        if t and linalg.svd(A @ T.basis).singular_values[-1] < 1e-6 * linalg.spectral_norm(A):
            continue
        AT = image_subspace(A, T)
        if independent_s:
            S = from_spanning(rng.standard_normal((n_y, n_y - t)))
        else:
            Z = AT.complement().basis
            if Z.shape[1]:
                S = from_spanning(Z + 0.5 * rng.standard_normal(Z.shape))
            else:
                S = Subspace.trivial(n_y)
        if S.dim == n_y - t and is_complementary(AT, S) and exists_outer_inverse(A, T, S):
            return A, T, S
    raise GenerationError(f"no solvable instance after {MAX_REJECTIONS} draws "
                          f"(n_x={n_x}, n_y={n_y}, t={t})")


def gen_subspace_perturbation(rng, V, target_gap):
    """A subspace ``V'`` of the same dimension with ``gap(V, V') ~= target_gap``.

    ``V' = span(U + eps W)`` where ``W = (I - P_V) K U`` for a Gaussian ``K``;
    the gap increases monotonically from 0 to 1 in ``eps``, which is found by
    a bracketing root search to within ``1e-6`` of the target.
    """
    if not 0 <= target_gap < 1:
        raise ValueError(f"target_gap must lie in [0, 1), got {target_gap}")
    n, k = V.ambient_dim, V.dim
    K = rng.standard_normal((n, n))
    if target_gap == 0:
        return V
    if k == 0 or k == n:
        raise ValueError(f"a {k}-dimensional subspace of R^{n} admits no perturbation")
    U = V.basis
    W = K @ U
    W -= U @ (U.T @ W)

    def moved(eps):
        return Subspace(np.linalg.qr(U + eps * W)[0])

    def excess(eps):
        return gap(V, moved(eps)) - target_gap

    hi = 1.0
    while excess(hi) <= 0:
        hi *= 2.0
        if hi > 1e12:
            raise ValueError(f"cannot reach gap {target_gap}")
    eps = brentq(excess, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    Vp = moved(eps)
    if abs(gap(V, Vp) - target_gap) >= GAP_TARGET_TOL:
        raise ValueError(f"root search missed target gap {target_gap}")
    return Vp


def gen_operator_perturbation(rng, A, G2, target_product):
    """Gaussian ``E`` scaled so that ``||G2|| ||E|| == target_product``."""
    if target_product < 0:
        raise ValueError("target_product must be non-negative")
    E = rng.standard_normal(np.shape(A))
    if target_product == 0:
        return np.zeros_like(E)
    norm_G2 = linalg.spectral_norm(G2)
    if norm_G2 == 0:
        raise ValueError("G2 is zero; no E reaches a positive product")
    return E * (target_product / (norm_G2 * linalg.spectral_norm(E)))


# -- trial records -------------------------------------------------------------

@dataclass
class TrialRecord:
    trial_id: int
    kappa: float
    norm_A2: float
    delta_T: float
    delta_S: float
    e_product: float
    one_sided: dict
    rel_errors: dict
    checks: dict
    bounds: list
    errors: list = field(default_factory=list)
    injective_on_T_prime: bool = True
    passed: bool = False

    def to_dict(self):
        d = asdict(self)
        d["bounds"] = [b.to_dict() for b in self.bounds]
        return d


def _record_passes(rel_errors, bounds, errors, tol):
    if errors:
        return False
    if any(e is None or not e < tol for e in rel_errors.values()):
        return False
    return all(b.satisfied for b in bounds if b.hypothesis.satisfied)


def run_trial(config, trial_id):
    rng = trial_rng(config.seed, trial_id)
    A, T, S = gen_problem(rng, config.n_x, config.n_y, config.t, config.independent_s)
    sol = outer_inverse(A, T, S)
    kappa = sol.kappa
    norm_A2 = linalg.spectral_norm(sol.G2)

    def perturb(V, budget, threshold):
        if 0 < V.dim < V.ambient_dim:
            return gen_subspace_perturbation(rng, V, budget * threshold)
        return V

    T_p = perturb(T, config.gap_budget_T, 1.0 / (1.0 + kappa) ** 2)
    S_p = perturb(S, config.gap_budget_S, 1.0 / (3.0 + kappa))
    e_target = config.e_budget * 2.0 * kappa / ((1.0 + kappa) * (4.0 + kappa))
    E = gen_operator_perturbation(rng, A, sol.G2, e_target)
    scenario = PerturbationScenario(A, E, T, T_p, S, S_p)

    rel_errors, checks, bounds, errors = {}, {}, [], []
    formula_calls = {
        "perturb_t": lambda: perturb_t(A, T, S, T_p),
        "perturb_s": lambda: perturb_s(A, T, S, S_p),
        "perturb_ts": lambda: perturb_ts(A, T, S, T_p, S_p),
        "perturb_a": lambda: perturb_a(A, E, T, S),
        "perturb_full": lambda: perturb_full(scenario),
    }
    for name, call in formula_calls.items():
        try:
            res = call()
        except OuterInverseError as exc:
            rel_errors[name] = None
            errors.append(f"{name}: {type(exc).__name__}: {exc}")
            continue
        rel_errors[name] = res.rel_error
        for key, value in res.checks.items():
            checks[f"{name}.{key}"] = value

    injective = True
    bound_calls = [
        lambda: [image_gap_bound(A, T, S, T_p)],
        lambda: perturb_t_bounds(A, T, S, T_p),
        lambda: perturb_s_bounds(A, T, S, S_p),
        lambda: perturb_ts_bounds(A, T, S, T_p, S_p),
        lambda: perturb_a_bounds(A, E, T, S),
        lambda: perturb_full_bounds(scenario),
    ]
    for call in bound_calls:
        try:
            out = call()
        except OuterInverseError as exc:
            errors.append(f"bounds: {type(exc).__name__}: {exc}")
            continue
        for item in out:
            if isinstance(item, tuple):
                item, injective = item
            bounds.append(item)

    record = TrialRecord(
        trial_id=trial_id,
        kappa=kappa,
        norm_A2=norm_A2,
        delta_T=gap(T, T_p),
        delta_S=gap(S, S_p),
        e_product=norm_A2 * linalg.spectral_norm(E),
        one_sided={
            "delta_T_Tp": delta(T, T_p), "delta_Tp_T": delta(T_p, T),
            "delta_S_Sp": delta(S, S_p), "delta_Sp_S": delta(S_p, S),
        },
        rel_errors=rel_errors,
        checks=checks,
        bounds=bounds,
        errors=errors,
        injective_on_T_prime=injective,
    )
    record.passed = _record_passes(rel_errors, bounds, errors, config.formula_tol) and injective
    return record


# -- suite -----------------------------------------------------------------------

def aggregate(records):
    """Summary statistics; a pure function of ``records``."""
    max_rel = {}
    max_check = {}
    max_ratio = {}
    hyp_counts = {}
    bound_violations = 0
    formula_errors = 0
    for rec in records:
        for name, err in rec.rel_errors.items():
            if err is None:
                formula_errors += 1
                continue
            max_rel[name] = max(max_rel.get(name, 0.0), err)
        for name, diff in rec.checks.items():
            max_check[name] = max(max_check.get(name, 0.0), diff)
        for b in rec.bounds:
            counts = hyp_counts.setdefault(b.name, {"hypothesis_ok": 0, "hypothesis_violated": 0})
            if b.hypothesis.satisfied:
                counts["hypothesis_ok"] += 1
                if math.isfinite(b.ratio):
                    max_ratio[b.name] = max(max_ratio.get(b.name, 0.0), b.ratio)
                if not b.satisfied:
                    bound_violations += 1
            else:
                counts["hypothesis_violated"] += 1
    kappas = [rec.kappa for rec in records]
    failed = [rec.trial_id for rec in records if not rec.passed]
    return {
        "n_trials": len(records),
        "passed": len(records) - len(failed),
        "failures": len(failed),
        "failed_trials": failed,
        "formula_errors": formula_errors,
        "bound_violations": bound_violations,
        "max_rel_error": max_rel,
        "max_check_diff": max_check,
        "max_bound_ratio": max_ratio,
        "hypothesis_counts": hyp_counts,
        "kappa": {
            "min": min(kappas) if kappas else None,
            "median": float(np.median(kappas)) if kappas else None,
            "max": max(kappas) if kappas else None,
        },
    }


@dataclass
class SuiteReport:
    config: TrialConfig
    records: list
    aggregates: dict
    generated_at: str = ""

    @property
    def passed(self):
        return self.aggregates["failures"] == 0

    def to_dict(self, timestamp=True):
        d = {
            "config": asdict(self.config),
            "trials": [rec.to_dict() for rec in self.records],
            "aggregates": self.aggregates,
        }
        if timestamp:
            d["generated_at"] = self.generated_at
        return d

    def to_json(self, timestamp=True):
        return json.dumps(self.to_dict(timestamp), indent=2, sort_keys=True)

    def to_csv(self):
        """One row per bound report."""
        cols = ["trial_id", "name", "kappa", "delta_T", "delta_S", "e_product",
                "lhs", "rhs", "ratio", "hypothesis_ok", "satisfied"]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for rec in self.records:
            for b in rec.bounds:
                writer.writerow({"trial_id": rec.trial_id, **b.to_dict()})
        return buf.getvalue()


def run_suite(config, threads=1):
    """Run ``config.trials`` independent trials, optionally on a thread pool."""
    ids = range(config.trials)
    if threads > 1 and config.trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda i: run_trial(config, i), ids))
    else:
        records = [run_trial(config, i) for i in ids]
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return SuiteReport(config, records, aggregate(records), stamp)
