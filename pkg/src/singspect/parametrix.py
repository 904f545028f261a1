"""Exact parametrix of the heat operator d_t + (-Delta + V + B).

The parametrix is P_k(z, w, t) = E0 E1 sum_{j<=k} t^j U_j(z, w) with
E0 the Euclidean heat kernel, E1 = exp(-t g(z, w)), g the segment average
of the potential V = |grad f|^2, and operator-valued polynomial coefficients
U_j determined by U_0 = I, U_1 = -int_0^1 B(s(z-w)+w) ds and, for j >= 1,

  (j+1) U_{j+1} + (z-w).grad_z U_{j+1}
      = Delta_z U_j - B U_j - Delta_z g U_{j-1}
        - 2 grad_z g . grad_z U_{j-1} + (grad_z g)^2 U_{j-2},

solved exactly by the tau-weighted segment average of the right-hand side.
All real-gradient expressions are translated to Wirtinger form once:
Delta = 4 sum d dbar, grad.grad = 2 sum (d (x) dbar + dbar (x) d),
(grad g)^2 = 4 sum dg dbar g.

An operator-valued polynomial is stored as a map from canonicalized
ExteriorOperator symbols to scalar TwoPointPolynomial coefficients, so all
polynomial calculus stays in the scalar factors and matrix products happen
once per distinct symbol pair (cached).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .clifford import ExteriorOperator, hessian_atoms
from .gaussian_rational import GaussianRational
from .poly import (
    MixedPolynomial,
    TwoPointPolynomial,
    grad_dot_z,
    grad_square_z,
    gradient,
    hermitian_gradient_square,
    hessian,
    segment_average,
)

_matmul_cache: Dict[tuple, ExteriorOperator] = {}


def _cached_matmul(a: ExteriorOperator, b: ExteriorOperator) -> ExteriorOperator:
    key = (a.canon_key(), b.canon_key())
    out = _matmul_cache.get(key)
    if out is None:
        out = a @ b
        _matmul_cache[key] = out
    return out


def _normalize_symbol(op: ExteriorOperator, poly: TwoPointPolynomial):
    """Scale op so its first (sorted) entry is 1, folding the factor into poly."""
    if op.is_zero() or poly.is_zero():
        return None
    k0 = min(op.entries)
    c0 = op.entries[k0]
    if c0 != GaussianRational(1):
        op = op.scale(GaussianRational(1) / c0)
        poly = poly * c0
    return op, poly


class OperatorPolynomial:
    """Two-point polynomial with ExteriorOperator coefficients."""

    __slots__ = ("n", "parts")

    def __init__(self, n: int, parts: Dict[ExteriorOperator, TwoPointPolynomial] | None = None):
        self.n = n
        self.parts: Dict[ExteriorOperator, TwoPointPolynomial] = {}
        if parts:
            for op, poly in parts.items():
                self._accumulate(op, poly)

    def _accumulate(self, op: ExteriorOperator, poly: TwoPointPolynomial) -> None:
        norm = _normalize_symbol(op, poly)
        if norm is None:
            return
        op, poly = norm
        cur = self.parts.get(op)
        s = poly if cur is None else cur + poly
        if s.is_zero():
            self.parts.pop(op, None)
        else:
            self.parts[op] = s

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "OperatorPolynomial":
        return cls(n, {})

    @classmethod
    def identity(cls, n: int) -> "OperatorPolynomial":
        return cls(n, {ExteriorOperator.identity(n): TwoPointPolynomial.constant(n, 1)})

    @classmethod
    def from_scalar(cls, n: int, poly: TwoPointPolynomial) -> "OperatorPolynomial":
        return cls(n, {ExteriorOperator.identity(n): poly})

    # -- linear structure ---------------------------------------------------

    def __add__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        out = OperatorPolynomial(self.n)
        for op, poly in self.parts.items():
            out._accumulate(op, poly)
        for op, poly in other.parts.items():
            out._accumulate(op, poly)
        return out

    def __sub__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return self + other.scalar_mul(-1)

    def __neg__(self) -> "OperatorPolynomial":
        return self.scalar_mul(-1)

    def scalar_mul(self, c) -> "OperatorPolynomial":
        out = OperatorPolynomial(self.n)
        for op, poly in self.parts.items():
            out._accumulate(op, poly * c)
        return out

    def poly_mul(self, p: TwoPointPolynomial) -> "OperatorPolynomial":
        out = OperatorPolynomial(self.n)
        for op, poly in self.parts.items():
            out._accumulate(op, poly * p)
        return out

    def __matmul__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        out = OperatorPolynomial(self.n)
        for op1, p1 in self.parts.items():
            for op2, p2 in other.parts.items():
                out._accumulate(_cached_matmul(op1, op2), p1 * p2)
        return out

    def is_zero(self) -> bool:
        return not self.parts

    def __eq__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        return self.n == other.n and self.parts == other.parts

    # -- z-direction calculus, applied to the scalar factors -----------------

    def map_polys(self, fn) -> "OperatorPolynomial":
        out = OperatorPolynomial(self.n)
        for op, poly in self.parts.items():
            out._accumulate(op, fn(poly))
        return out

    def laplacian_z(self) -> "OperatorPolynomial":
        return self.map_polys(lambda p: p.laplacian_z())

    def u_euler(self) -> "OperatorPolynomial":
        return self.map_polys(lambda p: p.u_euler())

    def tau_weighted(self, j: int) -> "OperatorPolynomial":
        return self.map_polys(lambda p: p.tau_weighted(j))

    def grad_dot_with(self, g: TwoPointPolynomial) -> "OperatorPolynomial":
        """grad_z g . grad_z self, scalar-gradient against each coefficient."""
        return self.map_polys(lambda p: grad_dot_z(g, p))

    # -- reductions ----------------------------------------------------------

    def supertrace(self) -> TwoPointPolynomial:
        out = TwoPointPolynomial.zero(self.n)
        for op, poly in self.parts.items():
            s = op.supertrace()
            if s:
                out = out + poly * s
        return out

    def diagonal_supertrace(self) -> MixedPolynomial:
        """str of the operator polynomial restricted to z = w."""
        return self.supertrace().at_u_zero()

    def swap_points(self) -> "OperatorPolynomial":
        return self.map_polys(lambda p: p.swap_points())

    def evaluate(self, z: Sequence[complex], w: Sequence[complex]) -> np.ndarray:
        dim = 4 ** self.n
        out = np.zeros((dim, dim), dtype=complex)
        for op, poly in self.parts.items():
            out += poly.evaluate(z, w) * op.to_numpy()
        return out

    def dump(self) -> str:
        """Canonical text dump: sorted symbols as triplets with their polys."""
        lines = []
        items = sorted(self.parts.items(), key=lambda kv: kv[0].canon_key())
        for op, poly in items:
            trip = "; ".join(f"({r},{c})={_fmt_coeff(v)}" for r, c, v in op.triplets())
            lines.append(f"[{trip}] * ({poly})")
        return "\n".join(lines) if lines else "0"

    def __repr__(self):
        return f"OperatorPolynomial(n={self.n}, symbols={len(self.parts)})"


def _fmt_coeff(v) -> str:
    if isinstance(v, GaussianRational):
        return f"{v.re}{'+' if v.im >= 0 else ''}{v.im}i" if v.im else str(v.re)
    return repr(v)


# -- bundle construction ---------------------------------------------------------


@dataclass
class ParametrixBundle:
    f: MixedPolynomial
    k: int
    V: MixedPolynomial
    g: TwoPointPolynomial
    B: OperatorPolynomial
    U: List[OperatorPolynomial]
    q: Optional[tuple] = None


def build_g(V: MixedPolynomial) -> TwoPointPolynomial:
    """Mean value of V along the segment, with both invariants verified."""
    if not V.is_real():
        raise ValueError("potential must be a real polynomial")
    g = segment_average(V, 0)
    if not (g.swap_points() - g).is_zero():
        raise AssertionError("mean-value function is not point-symmetric")
    if not (g.u_euler() + g - TwoPointPolynomial.from_single_point(V)).is_zero():
        raise AssertionError("Euler identity (z-w).grad g + g = V failed")
    return g


def build_B(f: MixedPolynomial) -> OperatorPolynomial:
    """The Hessian coupling operator as a polynomial in z = u + w."""
    n = f.n
    holo, anti = hessian_atoms(n)
    H = hessian(f)
    out = OperatorPolynomial.zero(n)
    minus_two = GaussianRational(-2)
    for m in range(n):
        for l in range(n):
            h = H[m][l]
            if h.is_zero():
                continue
            h2 = TwoPointPolynomial.from_single_point(h) * minus_two
            hc2 = TwoPointPolynomial.from_single_point(h.conjugate()) * minus_two
            out = out + OperatorPolynomial(n, {holo[m][l]: h2}) \
                      + OperatorPolynomial(n, {anti[m][l]: hc2})
    return out


def _recursion_rhs(B, g, lap_g, grad_sq_g, U, j) -> OperatorPolynomial:
    """Delta U_j - B U_j - Delta g U_{j-1} - 2 grad g . grad U_{j-1} + (grad g)^2 U_{j-2}."""
    n = B.n
    rhs = U[j].laplacian_z() - (B @ U[j])
    if j >= 1:
        rhs = rhs - U[j - 1].poly_mul(lap_g) - U[j - 1].grad_dot_with(g).scalar_mul(2)
    if j >= 2:
        rhs = rhs + U[j - 2].poly_mul(grad_sq_g)
    return rhs


def build_U(f: MixedPolynomial, k: int) -> ParametrixBundle:
    """U_0..U_k exactly, with the defining identities re-verified after the fact."""
    if k < 0:
        raise ValueError("truncation order must be non-negative")
    n = f.n
    V = hermitian_gradient_square(f)
    g = build_g(V)
    B = build_B(f)
    lap_g = g.laplacian_z()
    grad_sq_g = grad_square_z(g)

    U = [OperatorPolynomial.identity(n)]
    if k >= 1:
        U.append(B.tau_weighted(0).scalar_mul(-1))
    for j in range(1, k):
        rhs = _recursion_rhs(B, g, lap_g, grad_sq_g, U, j)
        U.append(rhs.tau_weighted(j))

    bundle = ParametrixBundle(f=f, k=k, V=V, g=g, B=B, U=U)

    if k >= 1:
        res = U[1] + U[1].u_euler() + B
        if not res.is_zero():
            raise AssertionError("U_1 defining equation failed")
        if not (U[1].swap_points() - U[1]).is_zero():
            raise AssertionError("U_1 is not symmetric in z and w")
    for j in range(1, k):
        if not recursion_residual(bundle, j).is_zero():
            raise AssertionError(f"recursion identity failed at j={j}")
    return bundle


def recursion_residual(bundle: ParametrixBundle, j: int) -> OperatorPolynomial:
    """Left-hand side of the order-j recursion identity; zero when satisfied.

    (j+1) U_{j+1} + (z-w).grad U_{j+1} - Delta U_j + B U_j
        + Delta g U_{j-1} + 2 grad g . grad U_{j-1} - (grad g)^2 U_{j-2}
    """
    if not 1 <= j <= bundle.k - 1:
        raise ValueError("recursion index out of range")
    U, B, g = bundle.U, bundle.B, bundle.g
    lap_g = g.laplacian_z()
    grad_sq_g = grad_square_z(g)
    lhs = U[j + 1].scalar_mul(j + 1) + U[j + 1].u_euler()
    return lhs - _recursion_rhs(B, g, lap_g, grad_sq_g, U, j)


def default_order(n: int) -> int:
    return 2 * n + 2


def build_bundle(f: MixedPolynomial, k: int | None = None) -> ParametrixBundle:
    return build_U(f, default_order(f.n) if k is None else k)


# -- evaluation -------------------------------------------------------------------


def evaluate_Pk(
    bundle: ParametrixBundle, z: Sequence[complex], w: Sequence[complex], t: float
) -> np.ndarray:
    """P_k(z, w, t) = E0 E1 sum t^j U_j as a dense complex matrix."""
    if t <= 0:
        raise ValueError("t must be positive")
    n = bundle.f.n
    z = [complex(v) for v in np.atleast_1d(z)]
    w = [complex(v) for v in np.atleast_1d(w)]
    d2 = sum(abs(a - b) ** 2 for a, b in zip(z, w))
    e0 = (4 * math.pi * t) ** (-n) * math.exp(-d2 / (4 * t))
    e1 = math.exp(-t * bundle.g.evaluate(z, w).real)
    dim = 4 ** n
    acc = np.zeros((dim, dim), dtype=complex)
    for j, Uj in enumerate(bundle.U):
        acc += t ** j * Uj.evaluate(z, w)
    return e0 * e1 * acc


# -- remainder ---------------------------------------------------------------------


def residual_polynomials(bundle: ParametrixBundle) -> Tuple[OperatorPolynomial, ...]:
    """The three t-groups of the divided remainder R~ = R / (E0 E1).

    R~ = T_k t^k + T_{k+1} t^{k+1} + T_{k+2} t^{k+2} with

        T_k     = -Delta U_k + B U_k + Delta g U_{k-1}
                  + 2 grad g . grad U_{k-1} - (grad g)^2 U_{k-2}
        T_{k+1} = Delta g U_k + 2 grad g . grad U_k - (grad g)^2 U_{k-1}
        T_{k+2} = -(grad g)^2 U_k
    """
    k = bundle.k
    if k < 2:
        raise ValueError("residual groups need k >= 2")
    U, B, g = bundle.U, bundle.B, bundle.g
    lap_g = g.laplacian_z()
    grad_sq_g = grad_square_z(g)
    t_k = _recursion_rhs(B, g, lap_g, grad_sq_g, U, k).scalar_mul(-1)
    t_k1 = U[k].poly_mul(lap_g) + U[k].grad_dot_with(g).scalar_mul(2) \
        - U[k - 1].poly_mul(grad_sq_g)
    t_k2 = U[k].poly_mul(grad_sq_g).scalar_mul(-1)
    return t_k, t_k1, t_k2


def evaluate_residual(
    bundle: ParametrixBundle,
    z: Sequence[complex],
    w: Sequence[complex],
    t: float,
    include_gaussian: bool = False,
) -> np.ndarray:
    """R~(z, w, t) (or the full R when include_gaussian is set)."""
    groups = residual_polynomials(bundle)
    k = bundle.k
    acc = sum(
        t ** (k + i) * grp.evaluate(z, w) for i, grp in enumerate(groups)
    )
    if include_gaussian:
        n = bundle.f.n
        z = [complex(v) for v in np.atleast_1d(z)]
        w = [complex(v) for v in np.atleast_1d(w)]
        d2 = sum(abs(a - b) ** 2 for a, b in zip(z, w))
        acc = acc * (4 * math.pi * t) ** (-n) * math.exp(-d2 / (4 * t)) \
            * math.exp(-t * bundle.g.evaluate(z, w).real)
    return acc


@dataclass(frozen=True)
class ResidualReport:
    k: int
    t_grid: Tuple[float, ...]
    fitted_exponents: Tuple[float, ...]
    min_exponent: float
    samples: int


def residual_order_check(
    bundle: ParametrixBundle,
    samples: int = 8,
    t_grid: Sequence[float] = (0.001, 0.002, 0.005, 0.01, 0.02, 0.05),
    seed: int = 0,
) -> ResidualReport:
    """Fit the leading t-exponent of |R~| at random points.

    The exponent is the log-log slope over the smallest decade of the grid;
    it should match the residual's leading group t^k (coefficients of the
    lower groups vanish by the recursion identity).
    """
    if bundle.k < 2:
        raise ValueError("residual check needs k >= 2")
    rng = np.random.default_rng(seed)
    n = bundle.f.n
    exps = []
    for _ in range(samples):
        z = rng.normal(scale=0.7, size=n) + 1j * rng.normal(scale=0.7, size=n)
        w = rng.normal(scale=0.7, size=n) + 1j * rng.normal(scale=0.7, size=n)
        norms = np.array([
            np.linalg.norm(evaluate_residual(bundle, z, w, t)) for t in t_grid
        ])
        if np.any(norms == 0):
            continue
        lt = np.log(np.asarray(t_grid))
        slope = np.polyfit(lt, np.log(norms), 1)[0]
        exps.append(float(slope))
    return ResidualReport(
        k=bundle.k,
        t_grid=tuple(float(t) for t in t_grid),
        fitted_exponents=tuple(exps),
        min_exponent=min(exps) if exps else float("nan"),
        samples=len(exps),
    )


def dump_bundle(bundle: ParametrixBundle) -> str:
    """Canonical text snapshot of g and each U_j for regression diffs."""
    lines = [f"# parametrix bundle k={bundle.k} f={bundle.f}"]
    lines.append(f"V = {bundle.V}")
    lines.append(f"g = {bundle.g}")
    for j, Uj in enumerate(bundle.U):
        lines.append(f"-- U_{j} --")
        lines.append(Uj.dump())
    return "\n".join(lines)
