"""Zonal matrix polynomial families and matrix-coefficient decomposition.

For a dimension ``n >= 3`` and a degree cap ``d``, the family consists of
``d + 1`` matrix polynomials indexed by ``k = 0..d``; block ``k`` is a
``(d - k + 1)`` square matrix whose ``(i, j)`` entry is, in raw form,

    P_i^{n+2k}(u) P_j^{n+2k}(v) Q_k^{n-1}(u, v, t)

where ``P`` is the normalized Gegenbauer polynomial and

    Q_k^{n-1}(u, v, t)
        = ((1-u^2)(1-v^2))^{k/2} P_k^{n-1}((t - uv) / sqrt((1-u^2)(1-v^2)))

is a genuine polynomial because Gegenbauer polynomials have fixed parity.
The normalized family multiplies entry ``(i, j)`` by

    lambda_{i,j} = (omega_n / omega_{n-1}) (omega_{n+2k-1} / omega_{n+2k})
                   sqrt(h_i^{n+2k} h_j^{n+2k})

with ``omega_m = 2 pi^{m/2} / Gamma(m/2)`` the surface area of the unit
sphere in m dimensions and ``h_k^m`` the dimension of degree-k spherical
harmonics in m variables. The omega ratios are evaluated through log-Gamma
in floating point; they only matter for verification-grade computations
(orthogonality, the reproducing kernel). Everything the SDP pipeline
consumes uses the raw family, which is exact over the rationals.

Symmetrized entries are bar Y_k = (Y_k(u,v,t) + Y_k(v,u,t)) / 2; entrywise
this averages the ``(i, j)`` and ``(j, i)`` raw entries.

Every symmetric polynomial whose monomials ``u^a v^b t^c`` all satisfy
``a + c <= d`` and ``b + c <= d`` (the space R_d) has a unique expansion
``F = sum_k <F_k, bar Y_k>`` with symmetric matrix coefficients ``F_k``;
``decompose`` computes it by peeling the top t-degree with ``Q_k`` and then
changing to the Gegenbauer product basis in u and v, all in exact
arithmetic for the raw family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence

import numpy as np

from .polyalg import Fraction as Rational
from .polyalg import TriPoly, UniPoly, gegenbauer, gegenbauer_expand


class DecompositionError(ValueError):
    """Input polynomial is outside the family's span."""


def harm_dim(m: int, k: int) -> int:
    """Dimension of degree-k spherical harmonics in m variables."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    first = math.comb(m + k - 1, k)
    second = math.comb(m + k - 3, k - 2) if k >= 2 else 0
    return first - second


@lru_cache(maxsize=None)
def q_poly(n: int, k: int) -> TriPoly:
    """The polynomial Q_k^{n-1}(u, v, t); requires n >= 3."""
    if n < 3:
        raise ValueError(f"zonal families need n >= 3, got {n}")
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    base = gegenbauer(n - 1, k)
    t_minus_uv = TriPoly({(0, 0, 1): Rational(1), (1, 1, 0): Rational(-1)})
    # (1-u^2)(1-v^2)
    disc = TriPoly({(0, 0, 0): Rational(1), (2, 0, 0): Rational(-1)}) * TriPoly(
        {(0, 0, 0): Rational(1), (0, 2, 0): Rational(-1)}
    )
    total = TriPoly.zero()
    for j in range(k % 2, k + 1, 2):
        c = base.coefficient(j)
        if c == 0:
            continue
        total = total + (t_minus_uv**j * disc ** ((k - j) // 2)).scale(c)
    return total


def _log_omega(m: int) -> float:
    return math.log(2.0) + (m / 2.0) * math.log(math.pi) - math.lgamma(m / 2.0)


def _lambda_factor(n: int, k: int, i: int, j: int) -> float:
    log_ratio = _log_omega(n) - _log_omega(n - 1) + _log_omega(n + 2 * k - 1) - _log_omega(n + 2 * k)
    h = harm_dim(n + 2 * k, i) * harm_dim(n + 2 * k, j)
    return math.exp(log_ratio) * math.sqrt(h)


@dataclass(frozen=True)
class ZonalFamily:
    """Blocks of zonal matrix polynomials for one (n, d) pair."""

    n: int
    d: int
    normalized: bool
    _raw: tuple = field(repr=False)
    _lam: tuple = field(repr=False)

    def block_size(self, k: int) -> int:
        return self.d - k + 1

    @property
    def blocks(self) -> range:
        return range(self.d + 1)

    def lam(self, k: int, i: int, j: int) -> float:
        if not self.normalized:
            return 1.0
        return self._lam[k][i][j]

    def entry(self, k: int, i: int, j: int) -> TriPoly:
        """Raw or normalized entry (i, j) of block k, unsymmetrized."""
        e = self._raw[k][i][j]
        if self.normalized:
            return e.scale(self._lam[k][i][j])
        return e

    def sym_entry(self, k: int, i: int, j: int) -> TriPoly:
        """Entry (i, j) of the symmetrized block bar Y_k."""
        half = Rational(1, 2) if not self.normalized else 0.5
        return (self.entry(k, i, j) + self.entry(k, j, i)).scale(half)


def zonal_family(n: int, d: int, normalized: bool = False) -> ZonalFamily:
    if n < 3:
        raise ValueError(f"zonal families need n >= 3, got {n}")
    if d < 0:
        raise ValueError(f"need d >= 0, got {d}")
    return _zonal_family_cached(n, d, normalized)


@lru_cache(maxsize=64)
def _zonal_family_cached(n: int, d: int, normalized: bool) -> ZonalFamily:
    raw = []
    lam = []
    for k in range(d + 1):
        size = d - k + 1
        q = q_poly(n, k)
        pu = [TriPoly.from_unipoly(gegenbauer(n + 2 * k, i), "u") for i in range(size)]
        pv = [TriPoly.from_unipoly(gegenbauer(n + 2 * k, j), "v") for j in range(size)]
        block = [[pu[i] * pv[j] * q for j in range(size)] for i in range(size)]
        raw.append(tuple(tuple(row) for row in block))
        lam.append(
            tuple(
                tuple(_lambda_factor(n, k, i, j) for j in range(size))
                for i in range(size)
            )
        )
    return ZonalFamily(n=n, d=d, normalized=normalized, _raw=tuple(raw), _lam=tuple(lam))


@dataclass
class MatrixCoefficients:
    """The F_k of an expansion F = sum_k <F_k, bar Y_k>."""

    n: int
    d: int
    matrices: List[List[List]]

    def as_float(self, k: int) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.matrices[k]], dtype=float)

    def block_size(self, k: int) -> int:
        return len(self.matrices[k])


def membership_degree(F: TriPoly) -> int:
    """Smallest d with F in R_d, ignoring symmetry; -1 for the zero poly."""
    return max((max(a + c, b + c) for (a, b, c) in F.terms), default=-1)


def decompose(F: TriPoly, family: ZonalFamily) -> MatrixCoefficients:
    """Unique matrix coefficients of F against the family's blocks.

    Raises DecompositionError if F is not symmetric under the u <-> v swap
    or some monomial u^a v^b t^c has a + c > d (membership in R_d fails).
    """
    n, d = family.n, family.d
    if not F.is_symmetric():
        raise DecompositionError("polynomial is not symmetric under swapping u and v")
    if membership_degree(F) > d:
        raise DecompositionError(
            f"polynomial lies outside R_{d}: a monomial has degree in (u, t) above {d}"
        )

    # peel t-degrees from the top: the t^k coefficient can only come from Q_k
    remainder = F
    layer = [TriPoly.zero()] * (d + 1)
    for k in range(d, -1, -1):
        tk = remainder.coefficient_of_t(k)
        if tk.is_zero():
            continue
        lead = gegenbauer(n - 1, k).leading_coefficient()
        qk = tk.scale(Rational(1) / lead)
        layer[k] = qk
        remainder = remainder - qk * q_poly(n, k)
    if not remainder.is_zero():
        raise DecompositionError("peeling left a nonzero remainder")

    matrices = []
    for k in range(d + 1):
        size = d - k + 1
        qk = layer[k]
        if qk.deg_u >= size or qk.deg_v >= size:
            raise DecompositionError(
                f"layer {k} has degree {max(qk.deg_u, qk.deg_v)} in u, limit {size - 1}"
            )
        # coefficient matrix C[a][b] of u^a v^b, then convert both axes to
        # the Gegenbauer basis for dimension n + 2k
        C = [[Rational(0)] * size for _ in range(size)]
        for (a, b, c), x in qk.terms.items():
            C[a][b] = x
        m = n + 2 * k
        half = [gegenbauer_expand(UniPoly([C[a][b] for a in range(size)]), m) for b in range(size)]
        G = [[Rational(0)] * size for _ in range(size)]
        for i in range(size):
            row = UniPoly([half[b][i] if i < len(half[b]) else Rational(0) for b in range(size)])
            expanded = gegenbauer_expand(row, m)
            for j, g in enumerate(expanded):
                G[i][j] = g
        if family.normalized:
            G = [
                [float(G[i][j]) / family.lam(k, i, j) for j in range(size)]
                for i in range(size)
            ]
        matrices.append(G)
    return MatrixCoefficients(n=n, d=d, matrices=matrices)


def reconstruct(coeffs: MatrixCoefficients, family: ZonalFamily) -> TriPoly:
    """Expand sum_k <F_k, bar Y_k> back into a trivariate polynomial."""
    if coeffs.d != family.d:
        raise ValueError("matrix coefficients and family have different d")
    total = TriPoly.zero()
    for k in family.blocks:
        size = family.block_size(k)
        mat = coeffs.matrices[k]
        for i in range(size):
            for j in range(size):
                c = mat[i][j]
                if c == 0:
                    continue
                total = total + family.entry(k, i, j).scale(c)
    return total


@dataclass
class PositivityReport:
    verdict: bool
    min_eigenvalues: List[float]
    tolerance: float


def is_positive_definite(F: TriPoly, family: ZonalFamily, tol: float = 1e-9) -> PositivityReport:
    """Check whether all matrix coefficients of F are PSD up to tol."""
    coeffs = decompose(F, family)
    mins = []
    for k in family.blocks:
        eigs = np.linalg.eigvalsh(coeffs.as_float(k))
        mins.append(float(eigs[0]))
    return PositivityReport(verdict=all(m >= -tol for m in mins), min_eigenvalues=mins, tolerance=tol)


def reproducing_kernel(family: ZonalFamily, point: Sequence[float]) -> TriPoly:
    """K_d(., p) = sum_k h_k^{n-1} <bar Y_k, bar Y_k(p)>, normalized family.

    Satisfies [K_d(., p), F] = F(p) for every F in R_d, with [.,.] the
    inner product realized by harness quadrature.
    """
    if not family.normalized:
        raise ValueError("the reproducing kernel needs the normalized family")
    u0, v0, t0 = (float(x) for x in point)
    total = TriPoly.zero()
    for k in family.blocks:
        h = harm_dim(family.n - 1, k)
        size = family.block_size(k)
        for i in range(size):
            for j in range(size):
                e = family.sym_entry(k, i, j)
                val = e.evaluate(u0, v0, t0)
                if val == 0:
                    continue
                total = total + e.scale(h * val)
    return total
