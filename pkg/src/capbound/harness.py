"""Numerical verification harness: quadrature, orthogonality, sampling.

Inner products of trivariate polynomials against the two-point measure on
the sphere are computed by a factorized Gauss-Jacobi product rule. For
x, y uniform on S^{n-1} and a fixed pole e, the triple
(u, v, t) = (e.x, e.y, x.y) has density proportional to

    (1 - u^2 - v^2 - t^2 + 2uvt)^{(n-4)/2}

on the solid Omega where that expression is nonnegative. Substituting
t = uv + sqrt((1-u^2)(1-v^2)) a factors the measure into three independent
one-dimensional Jacobi weights,

    (1-u^2)^{(n-3)/2} du  x  (1-v^2)^{(n-3)/2} dv  x  (1-a^2)^{(n-4)/2} da,

each normalized here to total mass one so that [1, 1] = 1. Nodes and
weights come from the Golub-Welsch eigenvalue method applied to the
symmetric Jacobi recurrence. Odd powers of the auxiliary variable a
integrate to zero by node symmetry, which is what makes the substitution
exact for polynomials in (u, v, t).

The module also hosts the sampling checks used by the test suite and the
CLI verify command: Monte Carlo cross-checks of the quadrature, the
reproducing-kernel property, and positive semidefiniteness of zonal sums
over random point configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polyalg import TriPoly
from .zonal import ZonalFamily, harm_dim, zonal_family


def jacobi_rule(exponent: float, num_nodes: int, normalized: bool = True):
    """Gauss rule for the weight (1-x^2)^exponent on [-1, 1].

    Returns (nodes, weights); exact for polynomials of degree up to
    2*num_nodes - 1. With normalized=True the weights sum to one, i.e.
    the rule integrates against the probability version of the weight.
    """
    if exponent <= -1:
        raise ValueError("weight exponent must exceed -1")
    if num_nodes < 1:
        raise ValueError("need at least one node")
    e = float(exponent)
    # monic three-term recurrence x p_k = p_{k+1} + beta_k p_{k-1}
    betas = np.zeros(num_nodes - 1)
    for k in range(1, num_nodes):
        if k == 1:
            betas[0] = 1.0 / (2.0 * e + 3.0)
        else:
            betas[k - 1] = k * (k + 2.0 * e) / ((2.0 * k + 2.0 * e) ** 2 - 1.0)
    J = np.diag(np.sqrt(betas), 1)
    J = J + J.T
    vals, vecs = np.linalg.eigh(J)
    weights = vecs[0, :] ** 2
    # the weight is even, so enforce the node symmetry the matrix has
    nodes = 0.5 * (vals - vals[::-1])
    weights = 0.5 * (weights + weights[::-1])
    weights = weights / weights.sum()
    if not normalized:
        log_mass = (
            0.5 * math.log(math.pi)
            + math.lgamma(e + 1.0)
            - math.lgamma(e + 1.5)
        )
        weights = weights * math.exp(log_mass)
    return nodes, weights


@dataclass(frozen=True)
class QuadratureRule:
    """Product rule exact for F*G with per-variable degrees up to `degree`."""

    n: int
    degree: int
    nodes_uv: np.ndarray
    weights_uv: np.ndarray
    nodes_a: np.ndarray
    weights_a: np.ndarray

    def grid(self):
        """Broadcastable (U, V, T, W) arrays covering the product rule."""
        U = self.nodes_uv[:, None, None]
        V = self.nodes_uv[None, :, None]
        A = self.nodes_a[None, None, :]
        T = U * V + np.sqrt((1.0 - U**2) * (1.0 - V**2)) * A
        W = (
            self.weights_uv[:, None, None]
            * self.weights_uv[None, :, None]
            * self.weights_a[None, None, :]
        )
        return U, V, T, W

    def integrate(self, values: np.ndarray) -> float:
        _, _, _, W = self.grid()
        return float(np.sum(W * values))


def quadrature_rule(n: int, degree: int) -> QuadratureRule:
    """Rule for dimension n handling products with deg_u, deg_v, deg_t <= degree.

    After the substitution the u-integrand degree can reach deg_u + deg_t,
    hence degree + 1 nodes in u and v; the auxiliary variable needs only
    deg_t, hence degree // 2 + 1 nodes.
    """
    if n < 3:
        raise ValueError(f"the two-point measure needs n >= 3, got {n}")
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    nodes_uv, weights_uv = jacobi_rule((n - 3) / 2.0, degree + 1)
    nodes_a, weights_a = jacobi_rule((n - 4) / 2.0, degree // 2 + 1)
    return QuadratureRule(
        n=n,
        degree=degree,
        nodes_uv=nodes_uv,
        weights_uv=weights_uv,
        nodes_a=nodes_a,
        weights_a=weights_a,
    )


def total_mass(rule: QuadratureRule) -> float:
    """Total quadrature weight; equals the measure's mass, which is one."""
    return float(
        np.sum(rule.weights_uv) ** 2 * np.sum(rule.weights_a)
    )


def inner_product(F: TriPoly, G: TriPoly, n: int, rule: QuadratureRule | None = None) -> float:
    """[F, G] against the normalized two-point measure in dimension n."""
    need = max(
        F.deg_u + G.deg_u,
        F.deg_v + G.deg_v,
        F.deg_t + G.deg_t,
        0,
    )
    if rule is None:
        rule = quadrature_rule(n, need)
    elif rule.degree < need:
        raise ValueError(
            f"rule degree {rule.degree} below required product degree {need}"
        )
    U, V, T, W = rule.grid()
    return float(np.sum(W * F.evaluate(U, V, T) * G.evaluate(U, V, T)))


def sphere_integral_crosscheck(
    P: TriPoly, n: int, samples: int = 200_000, seed: int = 0
) -> dict:
    """Monte Carlo estimate of the two-point average of P versus quadrature."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, n))
    y = rng.standard_normal((samples, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    u = x[:, 0]
    v = y[:, 0]
    t = np.sum(x * y, axis=1)
    vals = P.evaluate(u, v, t)
    mc = float(np.mean(vals))
    stderr = float(np.std(vals) / math.sqrt(samples))
    quad = inner_product(P, TriPoly.constant(Fraction(1)), n)
    return {
        "mc_value": mc,
        "quad_value": quad,
        "stderr": stderr,
        "agrees": abs(mc - quad) <= 5.0 * stderr + 1e-12,
    }


def orthogonality_report(n: int, d: int) -> dict:
    """Gram matrix of normalized zonal entries against the expected deltas.

    Entry pairs ((k,i,j), (k',i',j')) should produce delta / h_k^{n-1}.
    Returns the maximum absolute deviation and the labels realizing it.
    """
    family = zonal_family(n, d, normalized=True)
    labels = []
    entries = []
    for k in family.blocks:
        for i in range(family.block_size(k)):
            for j in range(family.block_size(k)):
                labels.append((k, i, j))
                entries.append(family.entry(k, i, j))
    rule = quadrature_rule(n, 2 * d)
    U, V, T, W = rule.grid()
    values = np.stack([e.evaluate(U, V, T) for e in entries])
    flat = values.reshape(len(entries), -1)
    gram = flat @ (W.reshape(-1)[:, None] * flat.T)
    worst = 0.0
    worst_pair = None
    for a, la in enumerate(labels):
        for b, lb in enumerate(labels):
            expected = 1.0 / harm_dim(n - 1, la[0]) if la == lb else 0.0
            dev = abs(gram[a, b] - expected)
            if dev > worst:
                worst = dev
                worst_pair = (la, lb)
    return {"max_deviation": worst, "worst_pair": worst_pair, "entries": len(labels)}


def random_symmetric_poly(d: int, rng: np.random.Generator) -> TriPoly:
    """Random float-coefficient element of R_d (symmetric, a+c and b+c <= d)."""
    terms = {}
    for a in range(d + 1):
        for b in range(a + 1):
            for c in range(d + 1 - a):
                coeff = rng.uniform(-1.0, 1.0)
                terms[(a, b, c)] = terms.get((a, b, c), 0.0) + coeff
                if a != b:
                    terms[(b, a, c)] = terms.get((b, a, c), 0.0) + coeff
    return TriPoly(terms)


def random_interior_point(rng: np.random.Generator):
    u = rng.uniform(-0.9, 0.9)
    v = rng.uniform(-0.9, 0.9)
    a = rng.uniform(-0.9, 0.9)
    t = u * v + math.sqrt((1.0 - u * u) * (1.0 - v * v)) * a
    return (u, v, t)


def kernel_reproduce_test(n: int, d: int, trials: int = 50, seed: int = 0) -> float:
    """Max |[K_d(., p), F] - F(p)| over random F in R_d and points p."""
    from .zonal import reproducing_kernel

    rng = np.random.default_rng(seed)
    family = zonal_family(n, d, normalized=True)
    rule = quadrature_rule(n, 2 * d)
    worst = 0.0
    for _ in range(trials):
        F = random_symmetric_poly(d, rng)
        p = random_interior_point(rng)
        K = reproducing_kernel(family, p)
        lhs = inner_product(K, F, n, rule)
        rhs = float(F.evaluate(*p))
        worst = max(worst, abs(lhs - rhs))
    return worst


def positivity_sample_test(
    n: int, d: int, code_size: int = 12, trials: int = 100, seed: int = 0
) -> float:
    """Min eigenvalue of sum_{c,c'} w_c w_{c'} Y_k(e.c, e.c', c.c') over trials.

    The zonal blocks are positive semidefinite kernels on the sphere, so
    every such sum must be PSD up to floating error, for every k <= d.
    """
    rng = np.random.default_rng(seed)
    family = zonal_family(n, d, normalized=False)
    overall = math.inf
    for _ in range(trials):
        pts = rng.standard_normal((code_size, n))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        pole = rng.standard_normal(n)
        pole /= np.linalg.norm(pole)
        u = pts @ pole
        T = pts @ pts.T
        np.clip(T, -1.0, 1.0, out=T)
        U = u[:, None] * np.ones_like(T)
        V = u[None, :] * np.ones_like(T)
        w = rng.uniform(-1.0, 1.0, size=code_size)
        for k in family.blocks:
            size = family.block_size(k)
            M = np.empty((size, size))
            for i in range(size):
                for j in range(size):
                    vals = family.entry(k, i, j).evaluate(U, V, T)
                    M[i, j] = w @ vals @ w
            M = 0.5 * (M + M.T)
            overall = min(overall, float(np.linalg.eigvalsh(M)[0]))
    return overall


def mass_report(n_values=range(3, 11), degree: int = 12) -> dict:
    """Total quadrature mass per dimension; the measure integrates to one."""
    out = {}
    for n in n_values:
        rule = quadrature_rule(n, degree)
        out[n] = abs(total_mass(rule) - 1.0)
    return out
