"""Exact polynomial arithmetic underlying the bound pipeline.

Two polynomial types are provided. ``UniPoly`` is a dense univariate
polynomial, a tuple of coefficients in ascending degree order. ``TriPoly``
is a sparse polynomial in the three variables ``u``, ``v``, ``t``, stored
as a mapping from exponent triples ``(a, b, c)`` (for ``u^a v^b t^c``) to
coefficients. Coefficients are ``fractions.Fraction`` throughout the exact
pipeline; the same containers also accept floats for verification-grade
data (normalized zonal entries, solved certificates), and arithmetic then
degrades to floating point the way Python numerics do.

The zero polynomial has degree -1 by convention. Stored coefficients are
never zero; operations strip cancelled terms.

Monomials are ordered graded lexicographically with ``u > v > t``. Sorted
term lists and the JSON serialization use this order, descending, so equal
polynomials always serialize to identical bytes.

``gegenbauer(n, k)`` returns the Gegenbauer polynomial of degree ``k`` for
dimension ``n``, normalized to take value 1 at 1. It is generated by the
three-term recurrence

    t P_k = ((k + n - 2) P_{k+1} + k P_{k-1}) / (2k + n - 2)

with ``P_0 = 1`` and ``P_1 = t``; for ``n = 2`` this degenerates into the
Chebyshev recurrence, which the closed form handles without a special case
beyond seeding ``P_1`` directly.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

Rational = Fraction

Coeff = Union[Fraction, int, float]


def rational(value) -> Fraction:
    """Coerce ints, strings like "3/4", floats, and Fractions to Fraction.

    Floats convert exactly (binary value), which is what certificate dumps
    rely on; human-entered data should prefer strings or ints.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def _is_exact(c) -> bool:
    return isinstance(c, (Fraction, int))


# ---------------------------------------------------------------------------
# univariate polynomials


class UniPoly:
    """Dense univariate polynomial, immutable, ascending coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Coeff] = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("UniPoly is immutable")

    @staticmethod
    def constant(c: Coeff) -> "UniPoly":
        return UniPoly((c,))

    @staticmethod
    def x() -> "UniPoly":
        return UniPoly((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading_coefficient(self) -> Coeff:
        if not self.coeffs:
            return Fraction(0)
        return self.coeffs[-1]

    def coefficient(self, k: int) -> Coeff:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __eq__(self, other) -> bool:
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return UniPoly(out)

    def __neg__(self) -> "UniPoly":
        return UniPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    def scale(self, c: Coeff) -> "UniPoly":
        if c == 0:
            return UniPoly()
        return UniPoly(tuple(c * a for a in self.coeffs))

    def __pow__(self, k: int) -> "UniPoly":
        if k < 0:
            raise ValueError("negative power")
        result = UniPoly.constant(Fraction(1))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __call__(self, x):
        acc = 0 * x if not self.coeffs else None
        if acc is not None:
            return acc
        # Horner, works on scalars and numpy arrays alike
        acc = self.coeffs[-1] + 0 * x
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        return f"UniPoly({list(self.coeffs)!r})"


@lru_cache(maxsize=None)
def gegenbauer(n: int, k: int) -> UniPoly:
    """Normalized Gegenbauer polynomial P_k^n with P_k^n(1) = 1.

    Requires n >= 2 and k >= 0. For n = 2 these are the Chebyshev
    polynomials of the first kind.
    """
    if n < 2:
        raise ValueError(f"dimension must be at least 2, got {n}")
    if k < 0:
        raise ValueError(f"degree must be nonnegative, got {k}")
    if k == 0:
        return UniPoly.constant(Fraction(1))
    if k == 1:
        return UniPoly((Fraction(0), Fraction(1)))
    prev = gegenbauer(n, k - 2)
    cur = gegenbauer(n, k - 1)
    # rearranged recurrence: P_{k+1} = ((2k+n-2) t P_k - k P_{k-1}) / (k+n-2)
    j = k - 1
    t_cur = UniPoly((Fraction(0), Fraction(1))) * cur
    num = t_cur.scale(Fraction(2 * j + n - 2)) - prev.scale(Fraction(j))
    return num.scale(Fraction(1, j + n - 2))


def gegenbauer_expand(p: UniPoly, n: int) -> list:
    """Coefficients g_i with p = sum_i g_i P_i^n, exact back-substitution."""
    rem = p
    out = [Fraction(0)] * (p.degree + 1 if p.degree >= 0 else 0)
    for i in range(p.degree, -1, -1):
        basis = gegenbauer(n, i)
        g = rem.coefficient(i) / basis.leading_coefficient()
        if g != 0:
            out[i] = g
            rem = rem - basis.scale(g)
    if not rem.is_zero():
        raise ArithmeticError("Gegenbauer expansion left a nonzero remainder")
    return out


# ---------------------------------------------------------------------------
# trivariate polynomials


def _term_sort_key(exp):
    a, b, c = exp
    return (-(a + b + c), -a, -b, -c)


class TriPoly:
    """Sparse polynomial in u, v, t keyed by exponent triples."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, Coeff] = ()):
        clean = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for exp, c in items:
            key = (int(exp[0]), int(exp[1]), int(exp[2]))
            s = clean.get(key, 0) + c
            if s == 0:
                clean.pop(key, None)
            else:
                clean[key] = s
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("TriPoly is immutable")

    # constructors

    @staticmethod
    def zero() -> "TriPoly":
        return TriPoly({})

    @staticmethod
    def constant(c: Coeff) -> "TriPoly":
        return TriPoly({(0, 0, 0): c})

    @staticmethod
    def monomial(a: int, b: int, c: int, coeff: Coeff = Fraction(1)) -> "TriPoly":
        return TriPoly({(a, b, c): coeff})

    @staticmethod
    def variable(name: str) -> "TriPoly":
        idx = {"u": (1, 0, 0), "v": (0, 1, 0), "t": (0, 0, 1)}[name]
        return TriPoly({idx: Fraction(1)})

    @staticmethod
    def from_unipoly(p: UniPoly, var: str) -> "TriPoly":
        pos = {"u": 0, "v": 1, "t": 2}[var]
        terms = {}
        for k, c in enumerate(p.coeffs):
            if c != 0:
                exp = [0, 0, 0]
                exp[pos] = k
                terms[tuple(exp)] = c
        return TriPoly(terms)

    # structure

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, a: int, b: int, c: int) -> Coeff:
        return self.terms.get((a, b, c), Fraction(0))

    @property
    def deg_u(self) -> int:
        return max((e[0] for e in self.terms), default=-1)

    @property
    def deg_v(self) -> int:
        return max((e[1] for e in self.terms), default=-1)

    @property
    def deg_t(self) -> int:
        return max((e[2] for e in self.terms), default=-1)

    @property
    def deg_total(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def deg_ut(self) -> int:
        """Total degree in u and t jointly, the R_d filtration degree."""
        return max((e[0] + e[2] for e in self.terms), default=-1)

    def sorted_terms(self):
        """Terms in descending graded-lex order with u > v > t."""
        return [(e, self.terms[e]) for e in sorted(self.terms, key=_term_sort_key)]

    def __eq__(self, other) -> bool:
        return isinstance(other, TriPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.sorted_terms()))

    # arithmetic

    def __add__(self, other: "TriPoly") -> "TriPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return TriPoly(out)

    def __neg__(self) -> "TriPoly":
        return TriPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "TriPoly") -> "TriPoly":
        return self + (-other)

    def __mul__(self, other: "TriPoly") -> "TriPoly":
        out = {}
        for (a1, b1, c1), x in self.terms.items():
            for (a2, b2, c2), y in other.terms.items():
                e = (a1 + a2, b1 + b2, c1 + c2)
                s = out.get(e, 0) + x * y
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return TriPoly(out)

    def scale(self, c: Coeff) -> "TriPoly":
        if c == 0:
            return TriPoly.zero()
        return TriPoly({e: c * x for e, x in self.terms.items()})

    def __pow__(self, k: int) -> "TriPoly":
        if k < 0:
            raise ValueError("negative power")
        result = TriPoly.constant(Fraction(1))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # maps

    def swap_uv(self) -> "TriPoly":
        return TriPoly({(b, a, c): x for (a, b, c), x in self.terms.items()})

    def is_symmetric(self) -> bool:
        for (a, b, c), x in self.terms.items():
            if self.terms.get((b, a, c), 0) != x:
                return False
        return True

    def coefficient_of_t(self, k: int) -> "TriPoly":
        """The coefficient of t^k, a polynomial in u and v."""
        return TriPoly({(a, b, 0): x for (a, b, c), x in self.terms.items() if c == k})

    def restrict_diagonal(self) -> UniPoly:
        """Substitute v = u, t = 1, producing a univariate polynomial in u."""
        deg = max((a + b for (a, b, c) in self.terms), default=-1)
        out = [Fraction(0)] * (deg + 1)
        for (a, b, c), x in self.terms.items():
            out[a + b] = out[a + b] + x
        return UniPoly(out)

    def __call__(self, u, v, t):
        total = None
        for (a, b, c), x in self.terms.items():
            term = x * u**a * v**b * t**c
            total = term if total is None else total + term
        if total is None:
            return 0 * (u + v + t)
        return total

    def evaluate(self, u, v, t):
        """Evaluate with shared power tables; u, v, t may be numpy arrays."""
        pu = _powers(u, self.deg_u)
        pv = _powers(v, self.deg_v)
        pt = _powers(t, self.deg_t)
        total = 0 * (u + v + t)
        for (a, b, c), x in self.terms.items():
            total = total + x * pu[a] * pv[b] * pt[c]
        return total

    def sup_norm_estimate(self) -> float:
        """Sum of |coefficients|: bounds |F| on the cube [-1, 1]^3."""
        return float(sum(abs(Fraction(c) if _is_exact(c) else Fraction(float(c)))
                         for c in self.terms.values()))

    def __repr__(self) -> str:
        parts = []
        for (a, b, c), x in self.sorted_terms()[:8]:
            parts.append(f"({a},{b},{c}):{x}")
        suffix = ", ..." if len(self.terms) > 8 else ""
        return f"TriPoly({{{', '.join(parts)}{suffix}}})"


def _powers(x, deg):
    out = [1 + 0 * x]
    for _ in range(max(deg, 0)):
        out.append(out[-1] * x)
    return out


# ---------------------------------------------------------------------------
# serialization

_FORMAT = "capbound.tripoly.v1"


def tripoly_to_json(p: TriPoly) -> str:
    """Serialize with exact "num/den" coefficients in fixed monomial order.

    Float coefficients are converted to their exact binary fractions, so
    the round trip is always lossless.
    """
    terms = []
    for (a, b, c), x in p.sorted_terms():
        frac = x if _is_exact(x) else Fraction(float(x))
        frac = Fraction(frac)
        terms.append([a, b, c, f"{frac.numerator}/{frac.denominator}"])
    return json.dumps({"format": _FORMAT, "terms": terms}, sort_keys=True)

def tripoly_from_json(text: str) -> TriPoly:
    data = json.loads(text)
    if data.get("format") != _FORMAT:
        raise ValueError(f"not a {_FORMAT} document")
    terms = {}
    for a, b, c, frac in data["terms"]:
        terms[(int(a), int(b), int(c))] = Fraction(frac)
    return TriPoly(terms)
