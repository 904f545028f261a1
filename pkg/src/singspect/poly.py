"""Exact sparse polynomial algebra in z_1..z_n and their conjugates.

A mixed polynomial is a finite map from exponent pairs (a, b) to Gaussian
rational coefficients, where a gives the powers of z_1..z_n and b the powers
of conj(z_1)..conj(z_n):

    terms : {(a, b): coeff}   a, b tuples of non-negative ints, coeff != 0

The zero polynomial has an empty term map.  A polynomial is holomorphic when
every b is zero, and real when the coefficient at (a, b) is the conjugate of
the coefficient at (b, a).

Text grammar (whitespace insignificant):

    expr     := term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := atom ('^' uint)?
    atom     := rational | 'i' | 'z' uint | 'conj(z' uint ')' | '(' expr ')'
    rational := int ('/' uint)?

The canonical printer emits terms in lexicographic exponent order and its
output parses back to the same polynomial.

Real-gradient contractions used downstream are defined through Wirtinger
calculus with the conventions

    lap p        = 4 sum_i d_i dbar_i p
    grad_dot p q = 2 sum_i (d_i p dbar_i q + dbar_i p d_i q)
    grad_sq p    = 4 sum_i d_i p dbar_i p

which agree with the real 2n-dimensional gradient and Laplacian.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .gaussian_rational import GaussianRational

ExponentPair = Tuple[Tuple[int, ...], Tuple[int, ...]]
Terms = Dict[ExponentPair, GaussianRational]


class ParseError(ValueError):
    """Syntax error in polynomial text; carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


def _as_coeff(value) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    return GaussianRational(Fraction(value))


class MixedPolynomial:
    """Sparse polynomial in z_1..z_n and conj(z_1)..conj(z_n)."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Terms | None = None):
        if n < 1:
            raise ValueError("need at least one variable")
        clean: Terms = {}
        if terms:
            for (a, b), c in terms.items():
                a = tuple(a)
                b = tuple(b)
                if len(a) != n or len(b) != n:
                    raise ValueError("exponent tuple length mismatch")
                if any(e < 0 or not isinstance(e, int) for e in a + b):
                    raise ValueError("exponents must be non-negative integers")
                c = _as_coeff(c)
                if c:
                    clean[(a, b)] = c
        self.n = n
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "MixedPolynomial":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "MixedPolynomial":
        z = (0,) * n
        return cls(n, {(z, z): _as_coeff(c)})

    @classmethod
    def variable(cls, n: int, i: int, conjugated: bool = False) -> "MixedPolynomial":
        if not 1 <= i <= n:
            raise ValueError(f"variable index {i} out of range 1..{n}")
        e = [0] * n
        e[i - 1] = 1
        a, b = ((0,) * n, tuple(e)) if conjugated else (tuple(e), (0,) * n)
        return cls(n, {(a, b): GaussianRational(1)})

    @classmethod
    def monomial(cls, n: int, a: Sequence[int], b: Sequence[int], c=1) -> "MixedPolynomial":
        return cls(n, {(tuple(a), tuple(b)): _as_coeff(c)})

    # -- ring operations --------------------------------------------------

    def __add__(self, other: "MixedPolynomial") -> "MixedPolynomial":
        self._check_compat(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return MixedPolynomial._raw(self.n, out)

    def __sub__(self, other: "MixedPolynomial") -> "MixedPolynomial":
        return self + (-other)

    def __neg__(self) -> "MixedPolynomial":
        return MixedPolynomial._raw(self.n, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, MixedPolynomial):
            self._check_compat(other)
            out: Terms = {}
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    k = (
                        tuple(x + y for x, y in zip(a1, a2)),
                        tuple(x + y for x, y in zip(b1, b2)),
                    )
                    s = out.get(k)
                    s = c1 * c2 if s is None else s + c1 * c2
                    if s:
                        out[k] = s
                    elif k in out:
                        del out[k]
            return MixedPolynomial._raw(self.n, out)
        c = _as_coeff(other)
        if not c:
            return MixedPolynomial.zero(self.n)
        return MixedPolynomial._raw(self.n, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MixedPolynomial":
        if k < 0:
            raise ValueError("negative power")
        out = MixedPolynomial.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    @classmethod
    def _raw(cls, n: int, terms: Terms) -> "MixedPolynomial":
        p = object.__new__(cls)
        object.__setattr__(p, "n", n)
        object.__setattr__(p, "terms", terms)
        return p

    def _check_compat(self, other: "MixedPolynomial") -> None:
        if self.n != other.n:
            raise ValueError("variable count mismatch")

    def __eq__(self, other):
        if not isinstance(other, MixedPolynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    # -- structure --------------------------------------------------------

    def is_holomorphic(self) -> bool:
        return all(not any(b) for (_, b) in self.terms)

    def is_real(self) -> bool:
        for (a, b), c in self.terms.items():
            if self.terms.get((b, a)) != c.conjugate():
                return False
        return True

    def conjugate(self) -> "MixedPolynomial":
        return MixedPolynomial._raw(
            self.n, {(b, a): c.conjugate() for (a, b), c in self.terms.items()}
        )

    def total_degree(self) -> int:
        return max((sum(a) + sum(b) for a, b in self.terms), default=0)

    def sorted_terms(self) -> List[Tuple[ExponentPair, GaussianRational]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    # -- calculus ----------------------------------------------------------

    def wirtinger(self, i: int, conjugated: bool = False) -> "MixedPolynomial":
        """Formal d/dz_i (or d/dconj(z_i)) derivative."""
        if not 1 <= i <= self.n:
            raise ValueError(f"variable index {i} out of range 1..{self.n}")
        j = i - 1
        out: Terms = {}
        for (a, b), c in self.terms.items():
            e = b[j] if conjugated else a[j]
            if e == 0:
                continue
            if conjugated:
                nb = b[:j] + (e - 1,) + b[j + 1:]
                k = (a, nb)
            else:
                na = a[:j] + (e - 1,) + a[j + 1:]
                k = (na, b)
            s = out.get(k)
            s = c * e if s is None else s + c * e
            if s:
                out[k] = s
            elif k in out:
                del out[k]
        return MixedPolynomial._raw(self.n, out)

    def laplacian(self) -> "MixedPolynomial":
        """4 sum_i d_i dbar_i (the real 2n-dimensional Laplacian)."""
        out = MixedPolynomial.zero(self.n)
        for i in range(1, self.n + 1):
            out = out + self.wirtinger(i).wirtinger(i, conjugated=True) * 4
        return out

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, z: Sequence[complex]) -> complex:
        if len(z) != self.n:
            raise ValueError("point dimension mismatch")
        zc = [complex(v) for v in z]
        total = 0j
        for (a, b), c in self.terms.items():
            m = complex(c)
            for x, e in zip(zc, a):
                if e:
                    m *= x ** e
            for x, e in zip(zc, b):
                if e:
                    m *= x.conjugate() ** e
            total += m
        return total

    def evaluate_many(self, Z: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at rows of a complex (m, n) array."""
        Z = np.asarray(Z, dtype=complex)
        if Z.ndim == 1:
            Z = Z[None, :]
        if Z.shape[1] != self.n:
            raise ValueError("point dimension mismatch")
        Zc = np.conj(Z)
        total = np.zeros(Z.shape[0], dtype=complex)
        for (a, b), c in self.terms.items():
            m = np.full(Z.shape[0], complex(c))
            for j, e in enumerate(a):
                if e:
                    m = m * Z[:, j] ** e
            for j, e in enumerate(b):
                if e:
                    m = m * Zc[:, j] ** e
            total += m
        return total

    # -- printing and parsing ---------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: List[str] = []
        for (a, b), c in self.sorted_terms():
            mono = _monomial_str(a, b)
            sign, body = _coeff_str(c, bool(mono))
            text = body + ("*" + mono if body and mono else mono)
            if not pieces:
                pieces.append(("-" if sign < 0 else "") + text)
            else:
                pieces.append(("- " if sign < 0 else "+ ") + text)
        return " ".join(pieces)

    __repr__ = __str__

    @staticmethod
    def parse(text: str, n: int) -> "MixedPolynomial":
        return _Parser(text, n).parse()


def _monomial_str(a: Tuple[int, ...], b: Tuple[int, ...]) -> str:
    factors = []
    for j, e in enumerate(a):
        if e == 1:
            factors.append(f"z{j + 1}")
        elif e > 1:
            factors.append(f"z{j + 1}^{e}")
    for j, e in enumerate(b):
        if e == 1:
            factors.append(f"conj(z{j + 1})")
        elif e > 1:
            factors.append(f"conj(z{j + 1})^{e}")
    return "*".join(factors)


def _coeff_str(c: GaussianRational, has_mono: bool) -> Tuple[int, str]:
    """Return (sign, text); text may be empty for a unit coefficient."""
    if c.im == 0:
        sign = 1 if c.re > 0 else -1
        mag = abs(c.re)
        if mag == 1 and has_mono:
            return sign, ""
        return sign, str(mag)
    if c.re == 0:
        sign = 1 if c.im > 0 else -1
        mag = abs(c.im)
        return sign, ("i" if mag == 1 else f"{mag}*i")
    im_sign = "+" if c.im > 0 else "-"
    return 1, f"({c.re} {im_sign} {abs(c.im)}*i)"


class _Parser:
    """Recursive-descent parser for the grammar in the module docstring."""

    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.pos = 0

    def parse(self) -> MixedPolynomial:
        p = self._expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise ParseError("unexpected trailing input", self.pos)
        return p

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expr(self) -> MixedPolynomial:
        sign = 1
        if self._peek() in "+-":  # unary sign on the leading term
            if self.text[self.pos] == "-":
                sign = -1
            self.pos += 1
        p = self._term() * sign
        while True:
            ch = self._peek()
            if ch == "+":
                self.pos += 1
                p = p + self._term()
            elif ch == "-":
                self.pos += 1
                p = p - self._term()
            else:
                return p

    def _term(self) -> MixedPolynomial:
        p = self._factor()
        while self._peek() == "*":
            self.pos += 1
            p = p * self._factor()
        return p

    def _factor(self) -> MixedPolynomial:
        p = self._atom()
        if self._peek() == "^":
            self.pos += 1
            e = self._uint()
            p = p ** e
        return p

    def _atom(self) -> MixedPolynomial:
        ch = self._peek()
        start = self.pos
        if ch == "(":
            self.pos += 1
            p = self._expr()
            if self._peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return p
        if ch == "i":
            self.pos += 1
            return MixedPolynomial.constant(self.n, GaussianRational(0, 1))
        if ch == "c":
            if not self.text.startswith("conj(z", self.pos):
                raise ParseError("expected conj(zK)", start)
            self.pos += len("conj(z")
            k = self._uint()
            if k < 1 or k > self.n:
                raise ParseError(f"variable index {k} out of range 1..{self.n}", start)
            if self._peek() != ")":
                raise ParseError("expected ')'", self.pos)
            self.pos += 1
            return MixedPolynomial.variable(self.n, k, conjugated=True)
        if ch == "z":
            self.pos += 1
            k = self._uint()
            if k < 1 or k > self.n:
                raise ParseError(f"variable index {k} out of range 1..{self.n}", start)
            return MixedPolynomial.variable(self.n, k)
        if ch.isdigit() or ch == "-":
            return MixedPolynomial.constant(self.n, self._rational())
        raise ParseError("expected atom", self.pos)

    def _uint(self) -> int:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected unsigned integer", start)
        return int(self.text[start:self.pos])

    def _rational(self) -> Fraction:
        self._skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            raise ParseError("expected integer", start)
        num = int(self.text[start:self.pos])
        if self._peek() == "/":
            self.pos += 1
            den = self._uint()
            if den == 0:
                raise ParseError("zero denominator", self.pos)
            return Fraction(num, den)
        return Fraction(num)


parse = MixedPolynomial.parse


def infer_variable_count(text: str) -> int:
    """Largest variable index mentioned in the text (at least 1)."""
    best = 1
    i = 0
    while i < len(text):
        if text[i] == "z" and i + 1 < len(text) and text[i + 1].isdigit():
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            best = max(best, int(text[i + 1:j]))
            i = j
        else:
            i += 1
    return best


# -- derived objects -------------------------------------------------------


def gradient(f: MixedPolynomial) -> List[MixedPolynomial]:
    return [f.wirtinger(i) for i in range(1, f.n + 1)]


def hessian(f: MixedPolynomial) -> List[List[MixedPolynomial]]:
    g = gradient(f)
    return [[gi.wirtinger(j) for j in range(1, f.n + 1)] for gi in g]


def hermitian_gradient_square(f: MixedPolynomial) -> MixedPolynomial:
    """The potential sum_i d_i f * conj(d_i f); rejects non-holomorphic input."""
    if not f.is_holomorphic():
        raise ValueError("hermitian_gradient_square requires a holomorphic polynomial")
    out = MixedPolynomial.zero(f.n)
    for gi in gradient(f):
        out = out + gi * gi.conjugate()
    return out


# -- two-point polynomials --------------------------------------------------


class TwoPointPolynomial:
    """Polynomial in (u, w) and conjugates, with u = z - w.

    Internally a MixedPolynomial over 2n variables: slots 1..n hold u and
    slots n+1..2n hold w.  Derivatives in z act on the u slots only.
    """

    __slots__ = ("n", "poly")

    def __init__(self, n: int, poly: MixedPolynomial):
        if poly.n != 2 * n:
            raise ValueError("two-point polynomial needs 2n variable slots")
        self.n = n
        self.poly = poly

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "TwoPointPolynomial":
        return cls(n, MixedPolynomial.zero(2 * n))

    @classmethod
    def constant(cls, n: int, c) -> "TwoPointPolynomial":
        return cls(n, MixedPolynomial.constant(2 * n, c))

    @classmethod
    def from_single_point(cls, p: MixedPolynomial) -> "TwoPointPolynomial":
        """Substitute z_i = u_i + w_i (conjugates along the conjugate path)."""
        n = p.n
        out = MixedPolynomial.zero(2 * n)
        for (a, b), c in p.terms.items():
            term = MixedPolynomial.constant(2 * n, c)
            for j, e in enumerate(a):
                if e:
                    binom = MixedPolynomial.variable(2 * n, j + 1) + \
                        MixedPolynomial.variable(2 * n, n + j + 1)
                    term = term * binom ** e
            for j, e in enumerate(b):
                if e:
                    binom = MixedPolynomial.variable(2 * n, j + 1, conjugated=True) + \
                        MixedPolynomial.variable(2 * n, n + j + 1, conjugated=True)
                    term = term * binom ** e
            out = out + term
        return cls(n, out)

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "TwoPointPolynomial") -> "TwoPointPolynomial":
        return TwoPointPolynomial(self.n, self.poly + other.poly)

    def __sub__(self, other: "TwoPointPolynomial") -> "TwoPointPolynomial":
        return TwoPointPolynomial(self.n, self.poly - other.poly)

    def __neg__(self) -> "TwoPointPolynomial":
        return TwoPointPolynomial(self.n, -self.poly)

    def __mul__(self, other):
        if isinstance(other, TwoPointPolynomial):
            return TwoPointPolynomial(self.n, self.poly * other.poly)
        return TwoPointPolynomial(self.n, self.poly * other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TwoPointPolynomial):
            return NotImplemented
        return self.n == other.n and self.poly == other.poly

    def __hash__(self):
        return hash((self.n, self.poly))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def __str__(self) -> str:
        return str(self.poly)

    __repr__ = __str__

    # -- structure ------------------------------------------------------------

    def _u_degree(self, key: ExponentPair) -> int:
        a, b = key
        return sum(a[: self.n]) + sum(b[: self.n])

    def tau_weighted(self, j: int) -> "TwoPointPolynomial":
        """Apply int_0^1 p(tau*u, w) tau^j dtau: weight 1/(d_u + j + 1)."""
        if j < 0:
            raise ValueError("tau weight must be non-negative")
        out: Terms = {}
        for k, c in self.poly.terms.items():
            out[k] = c * Fraction(1, self._u_degree(k) + j + 1)
        return TwoPointPolynomial(self.n, MixedPolynomial._raw(2 * self.n, out))

    def u_euler(self) -> "TwoPointPolynomial":
        """(z - w) . grad_z, the Euler operator in u: multiply by u-degree."""
        out: Terms = {}
        for k, c in self.poly.terms.items():
            d = self._u_degree(k)
            if d:
                out[k] = c * d
        return TwoPointPolynomial(self.n, MixedPolynomial._raw(2 * self.n, out))

    def at_u_zero(self) -> MixedPolynomial:
        """Set u = 0, returning a single-point polynomial in w."""
        n = self.n
        out: Terms = {}
        for (a, b), c in self.poly.terms.items():
            if any(a[:n]) or any(b[:n]):
                continue
            out[(a[n:], b[n:])] = c
        return MixedPolynomial._raw(n, out)

    def swap_points(self) -> "TwoPointPolynomial":
        """The z <-> w substitution: u -> -u, w -> u + w."""
        n = self.n
        out = MixedPolynomial.zero(2 * n)
        for (a, b), c in self.poly.terms.items():
            sign = (-1) ** (sum(a[:n]) + sum(b[:n]))
            term = MixedPolynomial.constant(2 * n, c * sign)
            for j in range(n):
                if a[j]:
                    term = term * MixedPolynomial.variable(2 * n, j + 1) ** a[j]
                if b[j]:
                    term = term * MixedPolynomial.variable(2 * n, j + 1, conjugated=True) ** b[j]
                if a[n + j]:
                    s = MixedPolynomial.variable(2 * n, j + 1) + \
                        MixedPolynomial.variable(2 * n, n + j + 1)
                    term = term * s ** a[n + j]
                if b[n + j]:
                    s = MixedPolynomial.variable(2 * n, j + 1, conjugated=True) + \
                        MixedPolynomial.variable(2 * n, n + j + 1, conjugated=True)
                    term = term * s ** b[n + j]
            out = out + term
        return TwoPointPolynomial(n, out)

    def conjugate(self) -> "TwoPointPolynomial":
        return TwoPointPolynomial(self.n, self.poly.conjugate())

    # -- z-direction calculus ---------------------------------------------

    def dz(self, i: int, conjugated: bool = False) -> "TwoPointPolynomial":
        """d/dz_i acting through the u slot (w held fixed)."""
        return TwoPointPolynomial(self.n, self.poly.wirtinger(i, conjugated=conjugated))

    def laplacian_z(self) -> "TwoPointPolynomial":
        out = TwoPointPolynomial.zero(self.n)
        for i in range(1, self.n + 1):
            out = out + TwoPointPolynomial(
                self.n, self.poly.wirtinger(i).wirtinger(i, conjugated=True) * 4
            )
        return out

    # -- evaluation ------------------------------------------------------------

    def evaluate(self, z: Sequence[complex], w: Sequence[complex]) -> complex:
        u = [complex(a) - complex(b) for a, b in zip(z, w)]
        return self.poly.evaluate(list(u) + [complex(b) for b in w])


def grad_dot_z(p: TwoPointPolynomial, q: TwoPointPolynomial) -> TwoPointPolynomial:
    """grad_z p . grad_z q = 2 sum_i (d_i p dbar_i q + dbar_i p d_i q)."""
    out = TwoPointPolynomial.zero(p.n)
    for i in range(1, p.n + 1):
        out = out + 2 * (p.dz(i) * q.dz(i, conjugated=True) +
                         p.dz(i, conjugated=True) * q.dz(i))
    return out


def grad_square_z(p: TwoPointPolynomial) -> TwoPointPolynomial:
    """(grad_z p)^2 = 4 sum_i d_i p dbar_i p."""
    out = TwoPointPolynomial.zero(p.n)
    for i in range(1, p.n + 1):
        out = out + 4 * (p.dz(i) * p.dz(i, conjugated=True))
    return out


def segment_average(p, j: int = 0) -> TwoPointPolynomial:
    """int_0^1 p(tau*(z-w) + w) tau^j dtau, exactly.

    Accepts either a single-point MixedPolynomial (substituted to (u, w)
    first) or a TwoPointPolynomial already in (u, w) form.
    """
    if isinstance(p, MixedPolynomial):
        p = TwoPointPolynomial.from_single_point(p)
    return p.tau_weighted(j)
