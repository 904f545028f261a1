"""The Gaussian-type index integral and the Milnor-number check.

For a non-degenerate quasi-homogeneous f,

    mu(f) = (t^n / pi^n) int exp(-t |grad f|^2) |det d^2 f|^2 dvol,

independent of t > 0.  The module evaluates the integral either by
importance-sampled Monte Carlo (complex Gaussian proposal whose scale comes
from the fitted quadratic growth floor |grad f|^2 >= |z|^2 / C - 1, which
keeps the weights bounded) or by tensor Gauss-Hermite quadrature (n <= 2),
and checks the t-independence across a grid.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .poly import MixedPolynomial, gradient, hessian
from .weights import NondegeneracyReport


class BudgetTooSmall(RuntimeError):
    """Standard error exceeded the requested tolerance."""


class MissingTamenessReport(ValueError):
    """compute_index needs the non-degeneracy report for its sampling scale."""


class ConstancyViolated(RuntimeError):
    """Two estimates on the t-grid disagree beyond 3 combined sigma."""

    def __init__(self, t1, t2, zscore):
        super().__init__(f"estimates at t={t1} and t={t2} differ at z={zscore:.2f}")
        self.pair = (t1, t2)
        self.zscore = zscore


@dataclass(frozen=True)
class IndexEstimate:
    t: float
    estimate: float
    std_error: float
    method: str
    budget: int
    seed: Optional[int]


@dataclass(frozen=True)
class IndexResult:
    t_values: Tuple[float, ...]
    estimates: Tuple[IndexEstimate, ...]
    mu_pooled: float
    mu_rounded: int
    method: str
    budget: int
    seed: Optional[int]

    def to_json_dict(self) -> dict:
        return {
            "t_values": list(self.t_values),
            "estimates": [
                {"t": e.t, "estimate": e.estimate, "stderr": e.std_error}
                for e in self.estimates
            ],
            "mu_pooled": self.mu_pooled,
            "mu_rounded": self.mu_rounded,
            "method": self.method,
            "budget": self.budget,
            "seed": self.seed,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["t", "estimate", "stderr"])
        for e in self.estimates:
            w.writerow([e.t, e.estimate, e.std_error])
        return buf.getvalue()


class _Compiled:
    """Gradient and Hessian of f prepared for vectorized evaluation."""

    def __init__(self, f: MixedPolynomial):
        self.n = f.n
        self.grads = gradient(f)
        self.hess = hessian(f)

    def grad_sq(self, Z: np.ndarray) -> np.ndarray:
        out = np.zeros(Z.shape[0])
        for g in self.grads:
            out += np.abs(g.evaluate_many(Z)) ** 2
        return out

    def det_hess_sq(self, Z: np.ndarray) -> np.ndarray:
        n = self.n
        if n == 1:
            return np.abs(self.hess[0][0].evaluate_many(Z)) ** 2
        if n == 2:
            d = (self.hess[0][0].evaluate_many(Z) * self.hess[1][1].evaluate_many(Z)
                 - self.hess[0][1].evaluate_many(Z) * self.hess[1][0].evaluate_many(Z))
            return np.abs(d) ** 2
        m = Z.shape[0]
        H = np.empty((m, n, n), dtype=complex)
        for i in range(n):
            for j in range(n):
                H[:, i, j] = self.hess[i][j].evaluate_many(Z)
        return np.abs(np.linalg.det(H)) ** 2


def integrand(f: MixedPolynomial, z, t: float) -> np.ndarray:
    """(t^n / pi^n) exp(-t |grad f|^2) |det d^2 f|^2, vectorized over points."""
    if t <= 0:
        raise ValueError("t must be positive")
    comp = _Compiled(f)
    Z = np.asarray(z, dtype=complex)
    single = Z.ndim == 1
    if single:
        Z = Z[None, :]
    vals = (t ** f.n / math.pi ** f.n) * np.exp(-t * comp.grad_sq(Z)) * comp.det_hess_sq(Z)
    return float(vals[0]) if single else vals


def _mc_estimate(
    comp: _Compiled, t: float, budget: int, seed: int, growth_c: float, strata: int = 64
) -> Tuple[float, float]:
    """Importance-sampled mean and standard error, reduced in stratum order."""
    n = comp.n
    var_real = growth_c / (2 * t)        # per real coordinate; complex variance C/t
    sigma = math.sqrt(var_real)
    per = budget // strata
    counts = [per + (1 if i < budget - per * strata else 0) for i in range(strata)]
    total = 0.0
    total_sq = 0.0
    m_total = 0
    log_norm = n * math.log(math.pi * 2 * var_real)  # log of proposal normalizer
    for idx, m in enumerate(counts):
        if m == 0:
            continue
        rng = np.random.default_rng(np.random.SeedSequence([seed, idx]))
        X = rng.normal(scale=sigma, size=(m, n))
        Y = rng.normal(scale=sigma, size=(m, n))
        Z = X + 1j * Y
        r2 = (X * X + Y * Y).sum(axis=1)
        log_p = -r2 / (2 * var_real) - log_norm
        log_h = (n * math.log(t / math.pi) - t * comp.grad_sq(Z))
        det_sq = comp.det_hess_sq(Z)
        w = det_sq * np.exp(log_h - log_p)
        # tail guard: clip at the top 1e-12 quantile (a no-op at sane budgets)
        w = np.minimum(w, np.quantile(w, 1.0 - 1e-12))
        total += float(w.sum())
        total_sq += float((w * w).sum())
        m_total += m
    mean = total / m_total
    var = max(total_sq / m_total - mean * mean, 0.0)
    return mean, math.sqrt(var / m_total)


def _quadrature_estimate(
    comp: _Compiled, t: float, nodes: int, growth_c: float
) -> Tuple[float, float]:
    """Tensor Gauss-Hermite after the Gaussian change of variables.

    The reported error is the difference against the half-node rule.
    """

    def run(npts: int) -> float:
        x, wts = np.polynomial.hermite.hermgauss(npts)
        sigma = math.sqrt(growth_c / t)
        xs = sigma * x
        ws = sigma * wts * np.exp(x * x)
        n = comp.n
        if n == 1:
            Z = (xs[:, None] + 1j * xs[None, :]).ravel()[:, None]
            W = (ws[:, None] * ws[None, :]).ravel()
            vals = (t / math.pi) * np.exp(-t * comp.grad_sq(Z)) * comp.det_hess_sq(Z)
            return float((vals * W).sum())
        if n == 2:
            total = 0.0
            x2, y2 = np.meshgrid(xs, xs, indexing="ij")
            z2 = (x2 + 1j * y2).ravel()
            w2 = (ws[:, None] * ws[None, :]).ravel()
            for i in range(npts):
                # chunk over the first complex coordinate's real node
                z1 = xs[i] + 1j * xs
                w1 = ws[i] * ws
                Z = np.empty((npts * z2.size, 2), dtype=complex)
                Z[:, 0] = np.repeat(z1, z2.size)
                Z[:, 1] = np.tile(z2, npts)
                W = np.repeat(w1, z2.size) * np.tile(w2, npts)
                vals = (t ** 2 / math.pi ** 2) * np.exp(-t * comp.grad_sq(Z)) \
                    * comp.det_hess_sq(Z)
                total += float((vals * W).sum())
            return total
        raise ValueError("quadrature path supports n <= 2")

    full = run(nodes)
    half = run(max(nodes // 2, 8))
    return full, abs(full - half)


def compute_index(
    f: MixedPolynomial,
    t: float,
    budget: int = 10 ** 6,
    seed: int = 0,
    method: str = "mc",
    report: Optional[NondegeneracyReport] = None,
    tol: Optional[float] = None,
) -> IndexEstimate:
    """One estimate of the index integral at time t.

    `report` must be the weights-module non-degeneracy report; its fitted
    growth constant sets the proposal scale.  `budget` is the sample count
    (Monte Carlo) or nodes per axis (quadrature).
    """
    if report is None:
        raise MissingTamenessReport("attach the non-degeneracy report (fitted growth scale)")
    if t <= 0:
        raise ValueError("t must be positive")
    comp = _Compiled(f)
    if method == "mc":
        est, err = _mc_estimate(comp, t, budget, seed, report.fitted_C)
    elif method == "quadrature":
        est, err = _quadrature_estimate(comp, t, budget if budget < 10 ** 4 else 128,
                                        report.fitted_C)
    else:
        raise ValueError("method must be 'mc' or 'quadrature'")
    if tol is not None and err > tol:
        raise BudgetTooSmall(f"standard error {err:.3g} exceeds tolerance {tol:.3g}")
    return IndexEstimate(t=t, estimate=est, std_error=err, method=method,
                         budget=budget, seed=seed)


def mckean_singer_check(
    f: MixedPolynomial,
    t_grid: Sequence[float] = (0.5, 1.0, 2.0),
    budget: int = 10 ** 6,
    seed: int = 0,
    method: str = "mc",
    report: Optional[NondegeneracyReport] = None,
) -> IndexResult:
    """Estimates across the t-grid with pairwise 3-sigma constancy enforced."""
    if len(t_grid) < 2:
        raise ValueError("need at least two grid points")
    ests: List[IndexEstimate] = []
    for i, t in enumerate(t_grid):
        ests.append(compute_index(f, t, budget=budget, seed=seed + 977 * i,
                                  method=method, report=report))
    floor = 1e-12
    for i in range(len(ests)):
        for j in range(i + 1, len(ests)):
            se = math.hypot(max(ests[i].std_error, floor), max(ests[j].std_error, floor))
            zscore = abs(ests[i].estimate - ests[j].estimate) / se
            if zscore > 3.0:
                raise ConstancyViolated(ests[i].t, ests[j].t, zscore)
    wts = [1.0 / max(e.std_error, floor) ** 2 for e in ests]
    pooled = sum(w * e.estimate for w, e in zip(wts, ests)) / sum(wts)
    return IndexResult(
        t_values=tuple(float(t) for t in t_grid),
        estimates=tuple(ests),
        mu_pooled=pooled,
        mu_rounded=int(round(pooled)),
        method=method,
        budget=budget,
        seed=seed,
    )
