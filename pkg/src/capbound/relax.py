"""Assembly of the semidefinite relaxation for cap codes.

The decision variables are symmetric matrices: one block ``F_k`` per zonal
block of the (n, d) family, one Gram matrix per sum-of-squares multiplier,
plus the free scalar ``M``. Writing ``bar Y_k`` for the symmetrized zonal
blocks and ``p, p_1..p_5`` for the domain inequalities, the two polynomial
identities

    sum_k <F_k, bar Y_k(u, u, 1)> = M - q_0(u) - p(u) q_1(u)
    sum_k <F_k, bar Y_k(u, v, t)> = -1 - r_0 - p_1 r_1 - p_2 r_2
                                       - p_3 r_3 - p_4 r_4 - p_5 r_5

are imposed coefficient by coefficient, against every monomial the two
sides can reach. Each ``q``/``r`` is a Gram matrix over a monomial basis
capped at degree N: basis degree ``N`` for ``q_0`` and ``r_0``, ``N - 1``
for ``q_1`` and ``r_1..r_5``. Block ``F_k`` carries a radial basis of
size ``d - k + 1 + radial_margin``; the default margin of 1 tightens the
bound noticeably at no real extra cost (calibration at n=3,
cos(theta)=1/2, cos(phi)=0, d=N=4: optimum 9.5173 with the default,
9.6682 with ``radial_margin=0``). Minimizing ``M`` over this feasible
set yields the bound ``1 + M*`` on the number of points in the cap code.

All constraint data is exact rational; floats appear only inside solver
backends. Constraint coefficients are stored against matrix entries with
``i <= j``, with off-diagonal coefficients already carrying the factor 2
from the symmetric inner product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .polyalg import TriPoly, UniPoly, gegenbauer
from .zonal import zonal_family

BlockKey = Tuple[str, str, int, int]  # ("b", label, i, j) with i <= j
ScalarKey = Tuple[str, str]  # ("s", name)


@dataclass(frozen=True)
class CapParams:
    """Geometry (n, theta, phi) and relaxation size (d, N)."""

    n: int
    cos_theta: Fraction
    cos_phi: Fraction
    d: int
    N: int
    radial_margin: int = 1

    def __post_init__(self):
        object.__setattr__(self, "cos_theta", Fraction(self.cos_theta))
        object.__setattr__(self, "cos_phi", Fraction(self.cos_phi))
        if self.n < 3:
            raise ValueError(f"cap relaxations need n >= 3, got n={self.n}")
        if not (-1 <= self.cos_theta < 1):
            raise ValueError(f"need -1 <= cos(theta) < 1, got {self.cos_theta}")
        if not (-1 < self.cos_phi <= 1):
            raise ValueError(f"need -1 < cos(phi) <= 1, got {self.cos_phi}")
        if self.d < 1:
            raise ValueError(f"need d >= 1, got {self.d}")
        if self.N < 2:
            raise ValueError(f"need N >= 2, got {self.N}")
        if self.radial_margin < 0:
            raise ValueError(f"need radial_margin >= 0, got {self.radial_margin}")

    def describe(self) -> dict:
        return {
            "n": self.n,
            "cos_theta": str(self.cos_theta),
            "cos_phi": str(self.cos_phi),
            "d": self.d,
            "N": self.N,
            "radial_margin": self.radial_margin,
        }


@dataclass(frozen=True)
class DomainSystem:
    """Inequality generators of the cap domain Delta and its diagonal."""

    p: UniPoly  # -(u - cos phi)(u - 1), nonnegative on [cos phi, 1]
    p1: TriPoly
    p2: TriPoly
    p3: TriPoly  # -(t + 1)(t - cos theta)
    p4: TriPoly  # 1 + 2uvt - u^2 - v^2 - t^2
    p5: TriPoly  # v - u, the ordering half of Delta


def domain_system(params: CapParams) -> DomainSystem:
    cp, ct = params.cos_phi, params.cos_theta
    p = UniPoly([-cp, 1 + cp, Fraction(-1)])
    p1 = TriPoly.from_unipoly(p, "u")
    p2 = TriPoly.from_unipoly(p, "v")
    p3 = TriPoly({(0, 0, 0): ct, (0, 0, 1): ct - 1, (0, 0, 2): Fraction(-1)})
    p4 = TriPoly(
        {
            (0, 0, 0): Fraction(1),
            (1, 1, 1): Fraction(2),
            (2, 0, 0): Fraction(-1),
            (0, 2, 0): Fraction(-1),
            (0, 0, 2): Fraction(-1),
        }
    )
    p5 = TriPoly({(0, 1, 0): Fraction(1), (1, 0, 0): Fraction(-1)})
    return DomainSystem(p=p, p1=p1, p2=p2, p3=p3, p4=p4, p5=p5)


def monomial_basis(num_vars: int, max_degree: int) -> List[tuple]:
    """Monomial exponents of total degree <= max_degree, graded lex, u > v > t."""
    if max_degree < 0:
        return []
    if num_vars == 1:
        return [(m,) for m in range(max_degree + 1)]
    if num_vars != 3:
        raise ValueError("only univariate and trivariate bases are used")
    out = []
    for total in range(max_degree + 1):
        grade = []
        for a in range(total + 1):
            for b in range(total - a + 1):
                grade.append((a, b, total - a - b))
        grade.sort(key=lambda e: (-e[0], -e[1], -e[2]))
        out.extend(grade)
    return out


@dataclass
class LinearConstraint:
    coeffs: Dict[tuple, Fraction]
    rhs: Fraction
    tag: str = ""

    def max_abs_coeff(self) -> Fraction:
        return max((abs(c) for c in self.coeffs.values()), default=Fraction(0))


@dataclass
class SdpProblem:
    """min <objective, variables> + offset over PSD blocks and free scalars."""

    blocks: List[Tuple[str, int]]
    scalars: List[str]
    objective: Dict[tuple, Fraction]
    objective_offset: Fraction
    constraints: List[LinearConstraint]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        labels = [lbl for lbl, _ in self.blocks]
        if len(labels) != len(set(labels)):
            raise ValueError("duplicate block labels")
        if len(self.scalars) != len(set(self.scalars)):
            raise ValueError("duplicate scalar names")
        sizes = dict(self.blocks)
        names = set(self.scalars)
        for con in self.constraints:
            for key in con.coeffs:
                self._check_key(key, sizes, names)
        for key in self.objective:
            self._check_key(key, sizes, names)

    @staticmethod
    def _check_key(key, sizes, names):
        if key[0] == "b":
            _, label, i, j = key
            if label not in sizes:
                raise ValueError(f"constraint references unknown block {label!r}")
            if not (0 <= i <= j < sizes[label]):
                raise ValueError(f"entry ({i},{j}) outside block {label!r}")
        elif key[0] == "s":
            if key[1] not in names:
                raise ValueError(f"constraint references unknown scalar {key[1]!r}")
        else:
            raise ValueError(f"bad variable key {key!r}")

    def block_sizes(self) -> Dict[str, int]:
        return dict(self.blocks)

    def num_constraints(self) -> int:
        return len(self.constraints)


def _accumulate(row: Dict[tuple, Fraction], key: tuple, c: Fraction):
    s = row.get(key, Fraction(0)) + c
    if s == 0:
        row.pop(key, None)
    else:
        row[key] = s


def _gram_blocks_for(N: int) -> List[Tuple[str, str, int]]:
    """(label, identity, basis degree) of each SOS multiplier present."""
    out = [("Gram(q_0)", "uni", N)]
    if N - 1 >= 0:
        out.append(("Gram(q_1)", "uni", N - 1))
    out.append(("Gram(r_0)", "tri", N))
    if N - 1 >= 0:
        out.extend(("Gram(r_%d)" % i, "tri", N - 1) for i in (1, 2, 3, 4, 5))
    return out


def _zonal_layout(d: int, margin: int = 1) -> List[Tuple[int, int]]:
    """(harmonic index k, radial block size) pairs spanning the degree-d family."""
    return [(k, d - k + 1 + margin) for k in range(d + 1)]


def radial_scales(params: CapParams) -> List[List[int]]:
    """Power-of-two exponents e[k][i] rescaling the radial basis per block.

    The solver variables are G_k = 2^{-e_i} F_k 2^{-e_j} entrywise, chosen
    so every constraint coefficient is O(1); zonal coefficient growth would
    otherwise spread the rows over many orders of magnitude. Powers of two
    keep the change of basis exact for both Fractions and floats.
    """
    layout = _zonal_layout(params.d, params.radial_margin)
    family = zonal_family(params.n, max(k + size - 1 for k, size in layout))
    out = []
    for k, size in layout:
        exps = []
        for i in range(size):
            g = max(abs(c) for c in family.sym_entry(k, i, i).terms.values())
            exps.append(-round(math.log2(float(g)) / 2.0))
        out.append(exps)
    return out


def build_cap_sdp(params: CapParams) -> SdpProblem:
    """Assemble the relaxation; minimizing M gives the bound 1 + M*."""
    n, d, N = params.n, params.d, params.N
    layout = _zonal_layout(d, params.radial_margin)
    family = zonal_family(n, max(k + size - 1 for k, size in layout))
    dom = domain_system(params)
    gram_specs = _gram_blocks_for(N)
    multipliers = {
        "Gram(q_0)": UniPoly.constant(Fraction(1)),
        "Gram(q_1)": dom.p,
        "Gram(r_0)": TriPoly.constant(Fraction(1)),
        "Gram(r_1)": dom.p1,
        "Gram(r_2)": dom.p2,
        "Gram(r_3)": dom.p3,
        "Gram(r_4)": dom.p4,
        "Gram(r_5)": dom.p5,
    }
    # ceilings cover every product that can appear, so no coefficient is dropped
    lhs_deg = max(2 * (size - 1) + 2 * k for k, size in layout)
    uni_ceil = lhs_deg
    tri_ceil = lhs_deg
    for label, identity, deg in gram_specs:
        if identity == "uni":
            uni_ceil = max(uni_ceil, 2 * deg + multipliers[label].degree)
        else:
            tri_ceil = max(tri_ceil, 2 * deg + multipliers[label].deg_total)

    uni_rows: List[Dict[tuple, Fraction]] = [dict() for _ in range(uni_ceil + 1)]
    tri_rows: Dict[tuple, Dict[tuple, Fraction]] = {}

    def add_uni(m: int, key: tuple, c: Fraction):
        if c != 0 and m <= uni_ceil:
            _accumulate(uni_rows[m], key, c)

    def add_tri(mono: tuple, key: tuple, c: Fraction):
        if c != 0 and sum(mono) <= tri_ceil:
            _accumulate(tri_rows.setdefault(mono, {}), key, c)

    # zonal blocks, both identities; coefficients carry the basis rescaling
    scales = radial_scales(params)
    for (k, size), exps in zip(layout, scales):
        for i in range(size):
            for j in range(i, size):
                mult = Fraction(2) ** (exps[i] + exps[j]) * (1 if i == j else 2)
                key = ("b", f"F_{k}", i, j)
                entry = family.sym_entry(k, i, j)
                for mono, c in entry.terms.items():
                    add_tri(mono, key, mult * c)
                diag = entry.restrict_diagonal()
                for m, c in enumerate(diag.coeffs):
                    add_uni(m, key, mult * c)

    # the scalar M enters the diagonal identity's constant coefficient
    add_uni(0, ("s", "M"), Fraction(-1))

    # SOS multipliers
    gram_bases: Dict[str, List[tuple]] = {}
    for label, identity, deg in gram_specs:
        if identity == "uni":
            basis = monomial_basis(1, deg)
            gram_bases[label] = basis
            mult_poly: UniPoly = multipliers[label]
            for pi in range(len(basis)):
                for qi in range(pi, len(basis)):
                    mult = Fraction(1) if pi == qi else Fraction(2)
                    key = ("b", label, pi, qi)
                    base_pow = basis[pi][0] + basis[qi][0]
                    for m, c in enumerate(mult_poly.coeffs):
                        add_uni(base_pow + m, key, mult * c)
        else:
            basis = monomial_basis(3, deg)
            gram_bases[label] = basis
            mult_tri: TriPoly = multipliers[label]
            for pi in range(len(basis)):
                for qi in range(pi, len(basis)):
                    mult = Fraction(1) if pi == qi else Fraction(2)
                    key = ("b", label, pi, qi)
                    bp, bq = basis[pi], basis[qi]
                    base = (bp[0] + bq[0], bp[1] + bq[1], bp[2] + bq[2])
                    for mono, c in mult_tri.terms.items():
                        add_tri(
                            (base[0] + mono[0], base[1] + mono[1], base[2] + mono[2]),
                            key,
                            mult * c,
                        )

    constraints: List[LinearConstraint] = []
    for m, row in enumerate(uni_rows):
        if row:
            constraints.append(
                LinearConstraint(coeffs=row, rhs=Fraction(0), tag=f"diag:u^{m}")
            )
    for mono in monomial_basis(3, tri_ceil):
        row = tri_rows.get(mono)
        if row:
            rhs = Fraction(-1) if mono == (0, 0, 0) else Fraction(0)
            constraints.append(
                LinearConstraint(coeffs=row, rhs=rhs, tag=f"full:u^{mono[0]}v^{mono[1]}t^{mono[2]}")
            )

    blocks = [(f"F_{k}", size) for k, size in layout]
    blocks += [(label, len(gram_bases[label])) for label, _, _ in gram_specs]

    return SdpProblem(
        blocks=blocks,
        scalars=["M"],
        objective={("s", "M"): Fraction(1)},
        objective_offset=Fraction(0),
        constraints=constraints,
        metadata={
            "kind": "cap_sdp",
            **params.describe(),
            "uni_ceiling": uni_ceil,
            "tri_ceiling": tri_ceil,
            "gram_bases": {lbl: [list(e) for e in b] for lbl, b in gram_bases.items()},
            "radial_scale": scales,
            "bound": "1 + M",
        },
    )


def fix_variables(
    problem: SdpProblem,
    block_values: Optional[Dict[str, list]] = None,
    scalar_values: Optional[Dict[str, Fraction]] = None,
) -> SdpProblem:
    """Substitute exact values for some blocks/scalars, returning the rest.

    Rows whose variables are all fixed must balance exactly, otherwise the
    substitution is inconsistent and a ValueError is raised. Used to test
    feasibility of hand-built certificates by completing their SOS parts.
    """
    block_values = block_values or {}
    scalar_values = scalar_values or {}
    fixed_blocks = set(block_values)
    fixed_scalars = set(scalar_values)

    def value_of(key):
        if key[0] == "b":
            _, label, i, j = key
            return Fraction(block_values[label][i][j])
        return Fraction(scalar_values[key[1]])

    new_constraints = []
    for con in problem.constraints:
        kept: Dict[tuple, Fraction] = {}
        moved = Fraction(0)
        for key, c in con.coeffs.items():
            if (key[0] == "b" and key[1] in fixed_blocks) or (
                key[0] == "s" and key[1] in fixed_scalars
            ):
                moved += c * value_of(key)
            else:
                kept[key] = c
        rhs = con.rhs - moved
        if not kept:
            if rhs != 0:
                raise ValueError(
                    f"substitution inconsistent at {con.tag or 'constraint'}: residual {rhs}"
                )
            continue
        new_constraints.append(LinearConstraint(coeffs=kept, rhs=rhs, tag=con.tag))

    offset = problem.objective_offset
    new_objective = {}
    for key, c in problem.objective.items():
        if (key[0] == "b" and key[1] in fixed_blocks) or (
            key[0] == "s" and key[1] in fixed_scalars
        ):
            offset += c * value_of(key)
        else:
            new_objective[key] = c

    return SdpProblem(
        blocks=[(lbl, s) for lbl, s in problem.blocks if lbl not in fixed_blocks],
        scalars=[s for s in problem.scalars if s not in fixed_scalars],
        objective=new_objective,
        objective_offset=offset,
        constraints=new_constraints,
        metadata={**problem.metadata, "fixed": sorted(fixed_blocks | fixed_scalars)},
    )


def lp_formula_bound(n: int, cos_theta: Fraction) -> Optional[Fraction]:
    """Bound from the fixed degree-2 polynomial (t+1)(t - cos theta).

    Its expansion in the P_k^n basis has constant coefficient
    1/n - cos theta, so the classical argument gives
    2 (1 - cos theta) / (1/n - cos theta) whenever that constant is
    positive; otherwise the fixed polynomial is inadmissible and None is
    returned (one must optimize over admissible polynomials instead).
    """
    ct = Fraction(cos_theta)
    f0 = Fraction(1, n) - ct
    if f0 <= 0:
        return None
    return 2 * (1 - ct) / f0


def assemble_distance_lp_comparison(params: CapParams) -> SdpProblem:
    """Classical univariate relaxation for codes with min angle theta.

    Optimizes f(t) = 1 + sum_{k>=1} f_k P_k^n(t) with f_k >= 0 and
    f <= 0 on [-1, cos theta], the latter certified by
    -f = s_0 + (t+1)(cos theta - t) s_1 with s_0, s_1 sums of squares.
    The optimum f(1) bounds codes on the whole sphere, hence is always at
    least the cap bound for the same (n, theta).
    """
    n, N = params.n, params.N
    ct = params.cos_theta
    degree = 2 * N
    blocks = [(f"f_{k}", 1) for k in range(1, degree + 1)]
    s0_basis = monomial_basis(1, N)
    s1_basis = monomial_basis(1, N - 1)
    blocks.append(("Gram(s_0)", len(s0_basis)))
    if s1_basis:
        blocks.append(("Gram(s_1)", len(s1_basis)))
    # g(t) = (t+1)(cos theta - t)
    g = UniPoly([ct, ct - 1, Fraction(-1)])

    rows: List[Dict[tuple, Fraction]] = [dict() for _ in range(degree + 1)]
    for k in range(1, degree + 1):
        pk = gegenbauer(n, k)
        for m, c in enumerate(pk.coeffs):
            if c != 0:
                _accumulate(rows[m], ("b", f"f_{k}", 0, 0), c)
    for pi in range(len(s0_basis)):
        for qi in range(pi, len(s0_basis)):
            mult = Fraction(1) if pi == qi else Fraction(2)
            _accumulate(rows[s0_basis[pi][0] + s0_basis[qi][0]], ("b", "Gram(s_0)", pi, qi), mult)
    for pi in range(len(s1_basis)):
        for qi in range(pi, len(s1_basis)):
            mult = Fraction(1) if pi == qi else Fraction(2)
            base = s1_basis[pi][0] + s1_basis[qi][0]
            for m, c in enumerate(g.coeffs):
                if c != 0 and base + m <= degree:
                    _accumulate(rows[base + m], ("b", "Gram(s_1)", pi, qi), mult * c)

    constraints = []
    for m, row in enumerate(rows):
        if row:
            rhs = Fraction(-1) if m == 0 else Fraction(0)
            constraints.append(LinearConstraint(coeffs=row, rhs=rhs, tag=f"lp:t^{m}"))

    objective = {("b", f"f_{k}", 0, 0): Fraction(1) for k in range(1, degree + 1)}
    return SdpProblem(
        blocks=blocks,
        scalars=[],
        objective=objective,
        objective_offset=Fraction(1),
        constraints=constraints,
        metadata={"kind": "distance_lp", **params.describe(), "degree": degree},
    )
