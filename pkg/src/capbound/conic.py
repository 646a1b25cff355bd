"""Self-contained semidefinite solver and text-format interchange.

The reference backend is an infeasible-start primal-dual interior-point
method with Nesterov-Todd scaling and a Mehrotra predictor-corrector.
It solves

    min <C, X> + c_f' z   s.t.   <A_l, X> + B_l' z = b_l,  X >= 0, z free

where X ranges over a direct sum of symmetric blocks and z over free
scalars. The Schur complement is formed densely and factored by Cholesky
with an escalating ridge; the free scalars are pinned through a small
bordered system so they never enter a cone. A final least-squares polish
projects the returned primal point back onto the affine constraints,
which is what downstream certificate checking cares about.

Everything is plain numpy; runs are deterministic for fixed inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .relax import LinearConstraint, SdpProblem


@dataclass
class SolverConfig:
    tolerance: float = 1e-8
    max_iterations: int = 200
    backend: str = "reference"
    verbose: bool = False
    step_fraction: float = 0.98


@dataclass
class SdpSolution:
    status: str  # optimal | near-optimal | infeasible | numerical-failure
    objective_value: float
    dual_objective: float
    block_values: Dict[str, np.ndarray]
    scalars: Dict[str, float]
    residuals: Dict[str, float]
    iterations: int
    backend: str
    log: List[dict] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status in ("optimal", "near-optimal")


class _Numeric:
    """Dense float image of an SdpProblem, with row equilibration."""

    def __init__(self, problem: SdpProblem):
        if not problem.blocks:
            raise ValueError("problem has no matrix blocks")
        if not problem.constraints:
            raise ValueError("problem has no constraints")
        self.labels = [lbl for lbl, _ in problem.blocks]
        self.sizes = [s for _, s in problem.blocks]
        if min(self.sizes) < 1:
            raise ValueError("blocks must have positive size")
        self.offsets = []
        off = 0
        for s in self.sizes:
            self.offsets.append(off)
            off += s * s
        self.dim = off
        self.scalar_names = list(problem.scalars)
        self.nfree = len(self.scalar_names)
        m = len(problem.constraints)
        self.m = m

        A = np.zeros((m, self.dim))
        B = np.zeros((m, self.nfree))
        b = np.zeros(m)
        pos = {lbl: (self.offsets[i], self.sizes[i]) for i, lbl in enumerate(self.labels)}
        spos = {name: i for i, name in enumerate(self.scalar_names)}
        for row, con in enumerate(problem.constraints):
            b[row] = float(con.rhs)
            for key, c in con.coeffs.items():
                v = float(c)
                if key[0] == "b":
                    _, lbl, i, j = key
                    o, s = pos[lbl]
                    A[row, o + i * s + j] += 0.5 * v
                    A[row, o + j * s + i] += 0.5 * v
                else:
                    B[row, spos[key[1]]] += v

        C = np.zeros(self.dim)
        cf = np.zeros(self.nfree)
        for key, c in problem.objective.items():
            v = float(c)
            if key[0] == "b":
                _, lbl, i, j = key
                o, s = pos[lbl]
                C[o + i * s + j] += 0.5 * v
                C[o + j * s + i] += 0.5 * v
            else:
                cf[spos[key[1]]] += v

        # columns scale by a diagonal congruence per block, rows by their
        # largest coefficient; two rounds keep both within a sane range
        col_scale = np.ones(self.dim)
        row_scale = np.ones(m)
        for _ in range(2):
            scale = np.maximum(
                np.abs(A).max(axis=1, initial=0.0),
                np.abs(B).max(axis=1, initial=0.0) if self.nfree else 0.0,
            )
            scale[scale == 0] = 1.0
            row_scale *= scale
            A /= scale[:, None]
            if self.nfree:
                B /= scale[:, None]
            b /= scale
            for o, s in zip(self.offsets, self.sizes):
                view = A[:, o : o + s * s].reshape(m, s, s)
                diag_cols = view[:, np.arange(s), np.arange(s)]
                g = np.abs(diag_cols).max(axis=0, initial=0.0)
                dvec = 1.0 / np.sqrt(np.clip(g, 1e-6, 1e6))
                dvec[g == 0] = 1.0
                view *= dvec[None, :, None] * dvec[None, None, :]
                col_scale[o : o + s * s] *= np.outer(dvec, dvec).ravel()
        self.row_scale = row_scale
        self.col_scale = col_scale
        self.block_scale = [
            col_scale[o : o + s * s].reshape(s, s)[np.arange(s), np.arange(s)] ** 0.5
            for o, s in zip(self.offsets, self.sizes)
        ]
        self.A = A
        self.B = B
        self.b = b
        self.C = C * col_scale
        self.c_free = cf
        self.offset = float(problem.objective_offset)
        self.block_view = [
            self.A[:, o : o + s * s].reshape(m, s, s) for o, s in zip(self.offsets, self.sizes)
        ]

    def split(self, flat: np.ndarray) -> List[np.ndarray]:
        return [
            flat[o : o + s * s].reshape(s, s) for o, s in zip(self.offsets, self.sizes)
        ]

    def flatten(self, blocks: List[np.ndarray]) -> np.ndarray:
        return np.concatenate([blk.ravel() for blk in blocks])


def _sym(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.T)


def _chol_ridge(H: np.ndarray) -> Tuple[np.ndarray, float]:
    base = max(np.trace(H) / H.shape[0], 1.0)
    ridge = 0.0
    for _ in range(8):
        try:
            L = np.linalg.cholesky(H + ridge * np.eye(H.shape[0]))
            return L, ridge
        except np.linalg.LinAlgError:
            ridge = base * 1e-14 if ridge == 0.0 else ridge * 100.0
    raise np.linalg.LinAlgError("Schur complement not positive definite")


def _chol_solve(L: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    y = np.linalg.solve(L, rhs)
    return np.linalg.solve(L.T, y)


def _refined_solve(
    L: np.ndarray,
    H: np.ndarray,
    rhs: np.ndarray,
    passes: int = 2,
    H_hi: np.ndarray = None,
) -> np.ndarray:
    # extended-precision residuals push the attainable accuracy from
    # cond(H) * eps64 down to cond(H) * eps80, which is what keeps late
    # iterations from reinjecting the error the factorization loses
    u = _chol_solve(L, rhs)
    if H_hi is not None:
        rhs = np.asarray(rhs, dtype=np.longdouble)
    for _ in range(passes):
        if H_hi is not None:
            r = np.asarray(rhs - H_hi @ u.astype(np.longdouble), dtype=np.float64)
        else:
            r = rhs - H @ u
        u = u + _chol_solve(L, r)
    return u


def _max_step(L: np.ndarray, delta: np.ndarray) -> float:
    """sup {a : X + a*delta psd} for X = L L'."""
    half = np.linalg.solve(L, delta)
    inner = np.linalg.solve(L, half.T)
    w = np.linalg.eigvalsh(_sym(inner))
    lo = w[0]
    if lo >= -1e-14:
        return math.inf
    return 1.0 / (-lo)


def _nt_scaling(X: np.ndarray, S: np.ndarray):
    Lx = np.linalg.cholesky(X)
    Ls = np.linalg.cholesky(S)
    U, sig, Vt = np.linalg.svd(Ls.T @ Lx)
    root = np.sqrt(sig)
    R = (Lx @ Vt.T) / root
    Rinv = ((Ls @ U) / root).T
    W = R @ R.T
    return R, Rinv, W, sig


def _solve_reference(problem: SdpProblem, config: SolverConfig) -> SdpSolution:
    data = _Numeric(problem)
    m, nb = data.m, len(data.sizes)
    nu = float(sum(data.sizes))
    ftb = config.step_fraction

    beta_p = 10.0 * max(1.0, np.abs(data.b).max(initial=0.0))
    beta_d = 10.0 * max(
        1.0, np.abs(data.C).max(initial=0.0), np.abs(data.c_free).max(initial=0.0)
    )
    X = [beta_p * np.eye(s) for s in data.sizes]
    S = [beta_d * np.eye(s) for s in data.sizes]
    z = np.zeros(data.nfree)
    y = np.zeros(m)

    norm_b = 1.0 + np.linalg.norm(data.b)
    norm_c = 1.0 + math.hypot(np.linalg.norm(data.C), np.linalg.norm(data.c_free))

    def residuals(Xb, Sb, yv, zv):
        xf = data.flatten(Xb)
        sf = data.flatten(Sb)
        rp = data.b - data.A @ xf
        if data.nfree:
            rp -= data.B @ zv
        rd = data.C - sf - data.A.T @ yv
        rg = data.c_free - (data.B.T @ yv if data.nfree else 0.0)
        return rp, rd, rg, xf, sf

    def measures(rp, rd, rg, xf, sf, zv, yv):
        pobj = float(data.C @ xf + data.c_free @ zv)
        dobj = float(data.b @ yv)
        pinf = np.linalg.norm(rp) / norm_b
        dinf = math.hypot(np.linalg.norm(rd), np.linalg.norm(rg)) / norm_c
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        return pobj, dobj, pinf, dinf, gap

    # feasibility restoration: project the primal back onto the equality
    # rows along the scaled geometry. Weighting the least-squares step by
    # W x W spends the correction in directions where the iterate is large,
    # so near-zero eigenvalues that block a plain projection are left
    # alone. Damped retries keep partial progress when the full step would
    # dip below the cone. Used both inside the loop (each late step loses
    # a slice of primal feasibility to rounding in the W-congruences) and
    # as polish on the final iterate.
    def _restore(Xc, zc, Ws, dip, passes=6):
        Hw = np.zeros((m, m))
        for j, (o, s) in enumerate(zip(data.offsets, data.sizes)):
            Tj = np.matmul(Ws[j], np.matmul(data.block_view[j], Ws[j])).reshape(m, -1)
            Hw += data.A[:, o : o + s * s] @ Tj.T
        Hw = _sym(Hw) + (data.B @ data.B.T if data.nfree else 0.0)
        try:
            LHw, _ = _chol_ridge(Hw)
        except np.linalg.LinAlgError:
            return Xc, zc
        Hw_hi = Hw.astype(np.longdouble)
        for _ in range(passes):
            rp_w = data.b - data.A @ data.flatten(Xc) - (data.B @ zc if data.nfree else 0.0)
            if np.linalg.norm(rp_w) <= 0.1 * config.tolerance * norm_b:
                break
            lam = _refined_solve(LHw, Hw, rp_w, H_hi=Hw_hi)
            step = data.split(data.A.T @ lam)
            applied = False
            for alpha in (1.0, 0.5, 0.25, 0.125):
                Xw = [
                    _sym(Xc[j] + alpha * (Ws[j] @ step[j] @ Ws[j])) for j in range(nb)
                ]
                if min(np.linalg.eigvalsh(blk)[0] for blk in Xw) >= dip:
                    Xc = Xw
                    if data.nfree:
                        zc = zc + alpha * (data.B.T @ lam)
                    applied = True
                    break
            if not applied:
                break
        return Xc, zc

    log: List[dict] = []
    status = "numerical-failure"
    best = None
    infeasible = False
    stalled = 0
    blowback = 0
    best_pinf = math.inf
    it = 0

    for it in range(1, config.max_iterations + 1):
        rp, rd, rg, xf, sf = residuals(X, S, y, z)
        mu = float(xf @ sf) / nu
        pobj, dobj, pinf, dinf, gap = measures(rp, rd, rg, xf, sf, z, y)
        score = max(pinf, dinf, gap)
        if best is None or score < best[0]:
            best = (score, [x.copy() for x in X], [s.copy() for s in S], y.copy(), z.copy())
        if config.verbose:
            print(
                f"  it {it:3d}  mu {mu:9.2e}  pinf {pinf:9.2e}  dinf {dinf:9.2e}  gap {gap:9.2e}"
            )
        log.append({"iteration": it, "mu": mu, "pinf": pinf, "dinf": dinf, "gap": gap})
        if pinf <= config.tolerance and dinf <= config.tolerance and gap <= config.tolerance:
            status = "optimal"
            break
        best_pinf = min(best_pinf, pinf)
        # once the dual side has converged, a climb of the primal residual
        # is rounding error from the step recovery, not progress; project
        # it back out before it compounds
        if (
            mu < 1e-3
            and dinf <= 100 * config.tolerance
            and pinf > 3 * max(best_pinf, 0.1 * config.tolerance)
        ):
            floor_eig = min(np.linalg.eigvalsh(blk)[0] for blk in X)
            if floor_eig > 0:
                try:
                    Wc = [_nt_scaling(X[j], S[j])[2] for j in range(nb)]
                except np.linalg.LinAlgError:
                    Wc = None
                if Wc is not None:
                    X, z = _restore(X, z, Wc, 0.1 * floor_eig, passes=4)
                    rp, rd, rg, xf, sf = residuals(X, S, y, z)
                    mu = float(xf @ sf) / nu
                    pobj, dobj, pinf, dinf, gap = measures(rp, rd, rg, xf, sf, z, y)
                    log[-1].update({"pinf_restored": pinf})
                    score = max(pinf, dinf, gap)
                    if best is None or score < best[0]:
                        best = (
                            score,
                            [x.copy() for x in X],
                            [s.copy() for s in S],
                            y.copy(),
                            z.copy(),
                        )
                    if (
                        pinf <= config.tolerance
                        and dinf <= config.tolerance
                        and gap <= config.tolerance
                    ):
                        status = "optimal"
                        break
                    best_pinf = min(best_pinf, pinf)
        # if restoration cannot hold the line, stop and let the endgame
        # repair the best iterate instead of compounding the drift
        if dinf <= 100 * config.tolerance and pinf > 10 * max(best_pinf, config.tolerance):
            blowback += 1
            if blowback >= 3:
                break
        else:
            blowback = 0
        ynorm = np.linalg.norm(y)
        if ynorm > 1e7:
            u = y / ynorm
            farkas = np.linalg.norm(data.A.T @ u + sf / ynorm) + (
                np.linalg.norm(data.B.T @ u) if data.nfree else 0.0
            )
            if data.b @ u > 1e-6 and farkas <= 1e-6:
                infeasible = True
                status = "infeasible"
                break

        try:
            scalings = [_nt_scaling(X[j], S[j]) for j in range(nb)]
        except np.linalg.LinAlgError:
            break
        Lx = [np.linalg.cholesky(X[j]) for j in range(nb)]
        Ls = [np.linalg.cholesky(S[j]) for j in range(nb)]

        H = np.zeros((m, m))
        for j, (o, s) in enumerate(zip(data.offsets, data.sizes)):
            W = scalings[j][2]
            Tj = np.matmul(W, np.matmul(data.block_view[j], W)).reshape(m, -1)
            H += data.A[:, o : o + s * s] @ Tj.T
        H = _sym(H)
        try:
            LH, _ = _chol_ridge(H)
        except np.linalg.LinAlgError:
            break
        H_hi = H.astype(np.longdouble)

        rd_blocks = data.split(rd)
        WrdW = data.flatten(
            [scalings[j][2] @ rd_blocks[j] @ scalings[j][2] for j in range(nb)]
        )

        if data.nfree:
            V = _refined_solve(LH, H, data.B, H_hi=H_hi)
            Mz = data.B.T @ V
        else:
            V = None
            Mz = None

        def direction(G_blocks):
            rgr = data.flatten(
                [scalings[j][0] @ G_blocks[j] @ scalings[j][0].T for j in range(nb)]
            )
            g = rp - data.A @ rgr + data.A @ WrdW
            u = _refined_solve(LH, H, g, H_hi=H_hi)
            if data.nfree:
                rhs_z = data.B.T @ u - rg
                dz = np.linalg.solve(Mz + 1e-300 * np.eye(data.nfree), rhs_z)
                dy = u - V @ dz
            else:
                dz = np.zeros(0)
                dy = u
            ds_flat = rd - data.A.T @ dy
            dS = [_sym(blk) for blk in data.split(ds_flat)]
            dX = []
            for j in range(nb):
                R, _, W, _ = scalings[j]
                dX.append(_sym(R @ G_blocks[j] @ R.T - W @ dS[j] @ W))
            return dX, dS, dy, dz

        # predictor
        G_aff = [-np.diag(scalings[j][3]) for j in range(nb)]
        dXa, dSa, dya, dza = direction(G_aff)
        ap = min(1.0, ftb * min(_max_step(Lx[j], dXa[j]) for j in range(nb)))
        ad = min(1.0, ftb * min(_max_step(Ls[j], dSa[j]) for j in range(nb)))
        xa = data.flatten([X[j] + ap * dXa[j] for j in range(nb)])
        sa = data.flatten([S[j] + ad * dSa[j] for j in range(nb)])
        mu_aff = max(float(xa @ sa) / nu, 0.0)
        sigma = min(1.0, max((mu_aff / mu) ** 3 if mu > 0 else 0.0, 1e-8))
        if stalled >= 2:
            # recenter when step lengths collapse instead of shrinking mu further
            sigma = 1.0

        # corrector
        G_cc = []
        for j in range(nb):
            R, Rinv, W, lam = scalings[j]
            dxb = Rinv @ dXa[j] @ Rinv.T
            dsb = R.T @ dSa[j] @ R
            Rc = (
                sigma * mu * np.eye(len(lam))
                - np.diag(lam * lam)
                - 0.5 * (dxb @ dsb + dsb @ dxb)
            )
            G_cc.append(2.0 * Rc / (lam[:, None] + lam[None, :]))
        dX, dS, dy, dz = direction(G_cc)
        ap = min(1.0, ftb * min(_max_step(Lx[j], dX[j]) for j in range(nb)))
        ad = min(1.0, ftb * min(_max_step(Ls[j], dS[j]) for j in range(nb)))
        if ap < 1e-12 and ad < 1e-12:
            break
        stalled = stalled + 1 if min(ap, ad) < 1e-3 else 0
        if stalled > 8:
            break
        for j in range(nb):
            X[j] = _sym(X[j] + ap * dX[j])
            S[j] = _sym(S[j] + ad * dS[j])
        z = z + ap * dz
        y = y + ad * dy
        log[-1].update({"alpha_p": ap, "alpha_d": ad, "sigma": sigma})

    if status not in ("optimal", "infeasible") and best is not None:
        _, Xb, Sb, yb, zb = best
        rp, rd, rg, xf, sf = residuals(Xb, Sb, yb, zb)
        _, _, pinf, dinf, gap = measures(rp, rd, rg, xf, sf, zb, yb)
        if max(pinf, dinf) <= 1e3 * config.tolerance and gap <= 1e4 * config.tolerance:
            status = "near-optimal"
            X, S, y, z = Xb, Sb, yb, zb
        elif not infeasible:
            X, S, y, z = Xb, Sb, yb, zb

    # polish phase 0: one more restoration pass on whatever the loop left
    eig_slack = -10.0 * config.tolerance

    if status != "infeasible":
        try:
            Ws = [_nt_scaling(X[j], S[j])[2] for j in range(nb)]
        except np.linalg.LinAlgError:
            Ws = [np.eye(s) for s in data.sizes]
        X, z = _restore(X, z, Ws, -1e-9)

    # then alternating projection: least squares onto the equality
    # constraints, an eigenvalue floor back into the cone
    if status != "infeasible":
        J = _sym(data.A @ data.A.T + (data.B @ data.B.T if data.nfree else 0.0))
        try:
            LJ, _ = _chol_ridge(J)
            J_hi = J.astype(np.longdouble)
        except np.linalg.LinAlgError:
            LJ = None
        # Dykstra: corrections only on the cone step, plain projection on the
        # affine step, converging to the nearest point of the intersection
        xf = data.flatten(X)
        zp = z.copy()
        corr = np.zeros_like(xf)
        proj_state = None
        rounds = 0
        drift = math.inf
        for rounds in range(1, 251 if LJ is not None else 1):
            rp_cur = data.b - data.A @ xf - (data.B @ zp if data.nfree else 0.0)
            lam = _refined_solve(LJ, J, rp_cur, H_hi=J_hi)
            xf = xf + data.A.T @ lam
            if data.nfree:
                zp = zp + data.B.T @ lam
            proj_state = (xf.copy(), zp.copy())
            drift = np.linalg.norm(rp_cur)
            work = xf + corr
            floored = []
            for jb, blk in enumerate(data.split(work)):
                w, V = np.linalg.eigh(_sym(blk))
                drift = max(drift, -w[0] if w[0] < 0.0 else 0.0)
                floored.append(_sym(V @ np.diag(np.maximum(w, 0.0)) @ V.T))
            proj = data.flatten(floored)
            corr = work - proj
            xf = proj
            if drift <= 1e-12 * norm_b:
                break

        # two candidates: the cone-exact point carries the last affine drift,
        # the row-exact point carries the last eigenvalue floor; pick by the
        # combined defect they leave for certification
        def defect(xc, zc):
            rp_c = data.b - data.A @ xc - (data.B @ zc if data.nfree else 0.0)
            eig_c = min(np.linalg.eigvalsh(_sym(blk))[0] for blk in data.split(xc))
            return float(np.linalg.norm(rp_c) / norm_b + max(0.0, -eig_c)), eig_c

        candidates = [(data.flatten(X), z)]
        if LJ is not None:
            candidates.append((xf, zp))
            if proj_state is not None:
                candidates.append(proj_state)
        scored = []
        for xc, zc in candidates:
            metric, eig_c = defect(xc, zc)
            scored.append((metric, eig_c, xc, zc))
        # candidate 0 is the incoming iterate, which the interior point
        # keeps strictly positive, so the eligible list is never empty
        eligible = [i for i in range(len(scored)) if scored[i][1] >= eig_slack] or [0]
        pick = min(eligible, key=lambda i: scored[i][0])
        metric0, _, xc, zc = scored[pick]
        Xp = [_sym(blk) for blk in data.split(xc)]

        # a second restoration in the metric of the picked point itself,
        # with near-zero eigenvalues floored so the weights stay invertible
        Wf = []
        for blk in Xp:
            w, V = np.linalg.eigh(blk)
            floor = 1e-9 * max(1.0, float(w[-1]) if w.size else 1.0)
            Wf.append(_sym(V @ np.diag(np.sqrt(np.maximum(w, floor))) @ V.T))
        Xr, zr = _restore(Xp, zc, Wf, eig_slack)
        metric_r, _ = defect(data.flatten(Xr), zr)
        log.append(
            {
                "polish_rounds": rounds,
                "polish_drift": float(drift),
                "polish_metrics": [s[0] for s in scored],
                "polish_eigs": [s[1] for s in scored],
                "polish_pick": pick,
                "polish_restored": metric_r,
            }
        )
        if metric_r <= metric0:
            X, z = Xr, zr
        else:
            X, z = Xp, zc

    rp, rd, rg, xf, sf = residuals(X, S, y, z)
    pobj, dobj, pinf, dinf, gap = measures(rp, rd, rg, xf, sf, z, y)
    if status != "infeasible":
        if pinf <= 5 * config.tolerance and dinf <= 5 * config.tolerance and gap <= 5 * config.tolerance:
            status = "optimal"
        elif max(pinf, dinf) <= 1e3 * config.tolerance and gap <= 1e4 * config.tolerance:
            # a loose gap costs optimality of the value, never feasibility
            status = "near-optimal"

    X_true = [
        X[j] * np.outer(data.block_scale[j], data.block_scale[j]) for j in range(nb)
    ]
    unscaled_rp = rp * data.row_scale
    residual_report = {
        "primal_infeasibility": float(np.linalg.norm(unscaled_rp, ord=np.inf)),
        "primal_infeasibility_scaled": float(pinf),
        "dual_infeasibility": float(dinf),
        "duality_gap": float(gap),
        "complementarity": float(xf @ sf) / nu,
        "min_eigenvalue": float(
            min(np.linalg.eigvalsh(blk)[0] for blk in X_true)
        ),
    }
    return SdpSolution(
        status=status,
        objective_value=pobj + data.offset,
        dual_objective=dobj + data.offset,
        block_values={lbl: X_true[j] for j, lbl in enumerate(data.labels)},
        scalars={name: float(z[i]) for i, name in enumerate(data.scalar_names)},
        residuals=residual_report,
        iterations=it,
        backend="reference",
        log=log,
    )


BACKENDS: Dict[str, Callable[[SdpProblem, SolverConfig], SdpSolution]] = {
    "reference": _solve_reference,
}


def solve(problem: SdpProblem, config: Optional[SolverConfig] = None) -> SdpSolution:
    config = config or SolverConfig()
    if config.backend not in BACKENDS:
        raise ValueError(
            f"unknown backend {config.backend!r}; available: {sorted(BACKENDS)}"
        )
    return BACKENDS[config.backend](problem, config)


# ---------------------------------------------------------------------------
# sparse SDPA text format


def export_sdpa(problem: SdpProblem, path: str) -> None:
    """Write the problem so the file's dual is our minimization.

    Free scalars are split into positive and negative parts living in a
    diagonal block, so the file is a pure cone program. The objective
    offset travels in a comment and is restored on import.
    """
    labels = [lbl for lbl, _ in problem.blocks]
    sizes = dict(problem.blocks)
    nfree = len(problem.scalars)
    block_sizes = [sizes[lbl] for lbl in labels]
    if nfree:
        block_sizes.append(-2 * nfree)
    block_of = {lbl: i + 1 for i, lbl in enumerate(labels)}
    scalar_of = {name: i for i, name in enumerate(problem.scalars)}
    free_block = len(labels) + 1

    def entries_of(coeffs) -> List[Tuple[int, int, int, float]]:
        out = []
        for key, c in sorted(coeffs.items(), key=repr):
            v = float(c)
            if v == 0.0:
                continue
            if key[0] == "b":
                _, lbl, i, j = key
                out.append((block_of[lbl], i + 1, j + 1, v if i == j else 0.5 * v))
            else:
                k = scalar_of[key[1]]
                out.append((free_block, 2 * k + 1, 2 * k + 1, v))
                out.append((free_block, 2 * k + 2, 2 * k + 2, -v))
        return out

    lines = [
        "* cap code relaxation data",
        f"* offset {repr(float(problem.objective_offset))}",
        f"{len(problem.constraints)} = mDIM",
        f"{len(block_sizes)} = nBLOCK",
        " ".join(str(s) for s in block_sizes) + " = bLOCKsTRUCT",
        " ".join(repr(float(c.rhs)) for c in problem.constraints),
    ]
    for blk, i, j, v in entries_of({k: -v for k, v in problem.objective.items()}):
        lines.append(f"0 {blk} {i} {j} {repr(v)}")
    for row, con in enumerate(problem.constraints, start=1):
        for blk, i, j, v in entries_of(con.coeffs):
            lines.append(f"{row} {blk} {i} {j} {repr(v)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def import_sdpa(path: str) -> SdpProblem:
    """Read a sparse SDPA file back into an SdpProblem.

    Diagonal blocks become runs of 1x1 blocks; the original free-scalar
    structure is not reconstructed, which leaves an equivalent problem.
    """
    offset = Fraction(0)
    body: List[str] = []
    with open(path) as fh:
        for line in fh:
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith(("*", '"')):
                if stripped.startswith("* offset "):
                    offset = Fraction(float(stripped.split()[2]))
                continue
            body.append(stripped)

    def tokens(s: str) -> List[str]:
        for ch in ",{}()=":
            s = s.replace(ch, " ")
        return s.split()

    mdim = int(tokens(body[0])[0])
    nblock = int(tokens(body[1])[0])
    struct = [int(t) for t in tokens(body[2])[:nblock]]
    rhs = [Fraction(float(t)) for t in tokens(body[3])[:mdim]]

    blocks: List[Tuple[str, int]] = []
    # (sdpa block, 1-based row) -> (label, local index)
    place: Dict[Tuple[int, int], Tuple[str, int]] = {}
    for bi, s in enumerate(struct, start=1):
        if s > 0:
            label = f"B{bi}"
            blocks.append((label, s))
            for i in range(1, s + 1):
                place[(bi, i)] = (label, i - 1)
        else:
            for i in range(1, -s + 1):
                label = f"B{bi}_{i}"
                blocks.append((label, 1))
                place[(bi, i)] = (label, 0)

    objective: Dict[tuple, Fraction] = {}
    rows: List[Dict[tuple, Fraction]] = [dict() for _ in range(mdim)]
    for line in body[4:]:
        t = tokens(line)
        matno, bi, i, j = int(t[0]), int(t[1]), int(t[2]), int(t[3])
        v = Fraction(float(t[4]))
        if v == 0:
            continue
        lbl_i, li = place[(bi, i)]
        lbl_j, lj = place[(bi, j)]
        if lbl_i != lbl_j:
            raise ValueError(f"entry ({i},{j}) straddles split diagonal block {bi}")
        a, b2 = min(li, lj), max(li, lj)
        coeff = v if a == b2 else 2 * v
        key = ("b", lbl_i, a, b2)
        if matno == 0:
            objective[key] = objective.get(key, Fraction(0)) - coeff
        else:
            row = rows[matno - 1]
            row[key] = row.get(key, Fraction(0)) + coeff

    constraints = [
        LinearConstraint(coeffs=row, rhs=rhs[i], tag=f"sdpa:{i + 1}")
        for i, row in enumerate(rows)
        if row
    ]
    return SdpProblem(
        blocks=blocks,
        scalars=[],
        objective={k: v for k, v in objective.items() if v != 0},
        objective_offset=offset,
        constraints=constraints,
        metadata={"kind": "sdpa_import", "path": path},
    )
