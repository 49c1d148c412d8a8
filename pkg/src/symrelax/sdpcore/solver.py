"""Dense primal-dual interior-point method for small SDPs.

The problem is kept in "dual" (LMI) form::

    minimize   c @ y + c0
    subject to S_b = F0_b + sum_i y_i F_bi  PSD for each block b,
               A y + a0 = 0.

Its Lagrangian dual is ``max -sum <F0_b, X_b> - a0 @ lam`` subject to
``A*(X) + A^T lam = c`` and ``X PSD``.  Iterates follow the NT (or HKM) search
direction with a Mehrotra predictor-corrector, starting from an infeasible
point.  Equalities are eliminated first: dependent rows are dropped and
``y = y0 + N z`` parametrizes the affine set with an orthonormal ``N``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .problem import PsdBlock, SdpError, SdpProblem, SdpSolution

log = logging.getLogger(__name__)

__all__ = ["SolverOptions", "solve"]


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-7
    gap_tol: float = 1e-6
    max_iter: int = 200
    max_psd_dim: int = 200
    divergence: float = 1e8
    step_fraction: float = 0.98
    stall_iter: int = 15
    direction: str = "hkm"  # hkm | nt
    near_factor: float = 100.0  # stalled within this multiple of the tolerances: near_optimal


def _independent_rows(A: np.ndarray, a0: np.ndarray, tol: float = 1e-10):
    if A.shape[0] == 0:
        return A, a0, 0.0
    aug = np.hstack([A, a0[:, None]])
    _, R, piv = sla.qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R)) if R.size else np.zeros(0)
    scale = diag[0] if diag.size and diag[0] > 0 else 1.0
    rank = int(np.sum(diag > tol * scale))
    keep = np.sort(piv[:rank])
    Ak, ak = A[keep], a0[keep]
    # consistency of the discarded rows
    if rank < A.shape[0]:
        y0, *_ = np.linalg.lstsq(Ak, -ak, rcond=None) if rank else (np.zeros(A.shape[1]),)
        resid = float(np.max(np.abs(A @ y0 + a0)))
        scale_aug = 1.0 + float(np.max(np.abs(aug)))
        return Ak, ak, resid / scale_aug
    return Ak, ak, 0.0


def _max_step(M: np.ndarray, dM: np.ndarray) -> float:
    """Largest alpha with M + alpha dM PSD (M positive definite)."""
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return 0.0
    Li = sla.solve_triangular(L, np.eye(M.shape[0]), lower=True)
    W = Li @ dM @ Li.T
    lam = np.linalg.eigvalsh((W + W.T) / 2)[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _nt_scaling(Ls: np.ndarray, Lx: np.ndarray) -> np.ndarray:
    """``W`` with ``W S W = X`` from Cholesky factors ``S = Ls Ls^T``, ``X = Lx Lx^T``."""
    _, d, Vt = np.linalg.svd(Ls.T @ Lx)
    G = Lx @ Vt.T / np.sqrt(d)
    return _sym(G @ G.T)


def _farkas(X, adj, F0s, normF: float, tol: float) -> bool:
    """``X PSD`` with ``A*(X) ~ 0`` and ``<F0, X> < 0`` proves the LMI infeasible."""
    tr = sum(float(np.trace(Xb)) for Xb in X)
    if not np.isfinite(tr) or tr <= 0:
        return False
    Xn = [Xb / tr for Xb in X]
    resid = float(np.linalg.norm(adj(Xn))) / normF
    value = sum(float(np.sum(F0 * Xb)) for F0, Xb in zip(F0s, Xn))
    return resid < tol * 1e-2 * max(1.0, -value) and value < -max(1e3 * resid, tol)


def _solve_spd(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        cf = sla.cho_factor(M, lower=True, check_finite=False)
        return sla.cho_solve(cf, rhs, check_finite=False)
    except (np.linalg.LinAlgError, ValueError):
        reg = 1e-12 * max(1.0, float(np.max(np.abs(np.diag(M))))) if M.size else 0.0
        return np.linalg.lstsq(M + reg * np.eye(M.shape[0]), rhs, rcond=None)[0]


def _sym(Z: np.ndarray) -> np.ndarray:
    return (Z + Z.T) / 2


def solve(problem: SdpProblem, options: SolverOptions | None = None, **overrides) -> SdpSolution:
    """Solve ``problem``; deterministic for fixed options.

    Keyword overrides (``feas_tol=...``) replace fields of ``options``.
    """
    opts = options or SolverOptions()
    if overrides:
        opts = SolverOptions(**{**opts.__dict__, **overrides})
    if problem.total_psd_dim > opts.max_psd_dim:
        raise SdpError(f"total PSD dimension {problem.total_psd_dim} exceeds the cap "
                       f"{opts.max_psd_dim}; export to SDPA for larger instances")

    nvar = problem.var_count
    A, a0, inconsistency = _independent_rows(problem.eq_A, problem.eq_a0)
    if inconsistency > opts.feas_tol:
        return _finish(problem, "infeasible", np.zeros(nvar), None, np.zeros(0), 0,
                       "linear equalities are inconsistent")
    if A.shape[0] == 0:
        return _solve_lmi(problem, opts)
    # eliminate the equalities: y = y0 + N z
    y0, *_ = np.linalg.lstsq(A, -a0, rcond=None)
    N = sla.null_space(A)
    nz = N.shape[1]
    blocks = []
    for b in problem.blocks:
        F0 = b.F0 + np.tensordot(y0, b.F, axes=1)
        F = np.tensordot(N.T, b.F, axes=1) if nz else np.zeros((0,) + b.F0.shape)
        F = (F + F.transpose(0, 2, 1)) / 2
        blocks.append(PsdBlock(_sym(F0), F, b.label))
    reduced = SdpProblem(N.T @ problem.c, blocks, np.zeros((0, nz)), np.zeros(0),
                         problem.c0 + float(problem.c @ y0), [f"z{i}" for i in range(nz)])
    sub = _solve_lmi(reduced, opts)
    y = y0 + (N @ sub.values if nz else 0.0)
    # multipliers from A^T lam = c - A*(X)
    live = [b for b in problem.blocks if b.dim > 0]
    if sub.dual_matrices:
        resid = problem.c - sum(b.F.reshape(nvar, -1) @ Xb.reshape(-1)
                                for b, Xb in zip(live, sub.dual_matrices))
    else:
        resid = problem.c.copy()
    lam = np.linalg.lstsq(A.T, resid, rcond=None)[0]
    out = _finish(problem, sub.status, y, sub.dual_matrices or None, lam, sub.iterations,
                  sub.message, sub.duality_gap, sub.primal_infeasibility, sub.dual_infeasibility,
                  a0=a0)
    return out


def _finish(problem, status, y, X, lam, it, msg, gap=np.nan, pinf=np.nan, dinf=np.nan, a0=None):
    live = [b for b in problem.blocks if b.dim > 0]
    a0 = np.zeros(0) if a0 is None else a0
    mats = [b.evaluate(y) for b in problem.blocks]
    pobj = problem.objective(y)
    if X is not None:
        dobj = (-sum(float(np.sum(b.F0 * Xb)) for b, Xb in zip(live, X))
                - float(a0 @ lam) + problem.c0)
    else:
        dobj = np.nan
    return SdpSolution(status, y, mats, pobj, float(gap), dobj, float(pinf), float(dinf),
                       it, list(X) if X is not None else [], msg, problem.var_names)


def _solve_lmi(problem: SdpProblem, opts: SolverOptions) -> SdpSolution:
    """Interior-point loop for a problem without linear equalities."""
    nvar = problem.var_count
    c = problem.c
    blocks = [b for b in problem.blocks if b.dim > 0]
    A, a0 = np.zeros((0, nvar)), np.zeros(0)

    def finish(status, y, X, lam, it, msg, gap=np.nan, pinf=np.nan, dinf=np.nan):
        return _finish(problem, status, y, X, lam, it, msg, gap, pinf, dinf)

    if nvar == 0:
        ok = all(np.linalg.eigvalsh(b.F0)[0] >= -opts.feas_tol for b in blocks)
        return finish("optimal" if ok else "infeasible", np.zeros(0), None, np.zeros(0), 0,
                      "no variables", gap=0.0, pinf=0.0, dinf=0.0)

    if not blocks:
        if np.max(np.abs(c)) > opts.feas_tol:
            return finish("unbounded", np.zeros(nvar), None, np.zeros(0), 0,
                          "objective unbounded on the affine set")
        return finish("optimal", np.zeros(nvar), [], np.zeros(0), 0, "affine problem",
                      gap=0.0, pinf=0.0, dinf=0.0)

    Fs = [b.F for b in blocks]
    F0s = [b.F0 for b in blocks]
    dims = [b.dim for b in blocks]
    N_total = sum(dims)
    Fflat = [F.reshape(nvar, -1) for F in Fs]

    def opA(y):
        return [F0 + np.tensordot(y, F, axes=1) for F0, F in zip(F0s, Fs)]

    def adj(Xs):
        out = np.zeros(nvar)
        for Ff, Xb in zip(Fflat, Xs):
            out += Ff @ Xb.reshape(-1)
        return out

    # Gram matrix of the F_i, used to keep adj(dX) = Rd exact despite roundoff
    gram = sum(Ff @ Ff.T for Ff in Fflat)
    gram_cf = sla.cho_factor(gram + 1e-14 * np.trace(gram) / nvar * np.eye(nvar), lower=True)

    def project(dX, target):
        z = sla.cho_solve(gram_cf, target - adj(dX))
        return [_sym(d + np.tensordot(z, F, axes=1)) for d, F in zip(dX, Fs)]

    normF = max(1.0, max(float(np.linalg.norm(F)) for F in Fs))
    normF0 = max(float(np.linalg.norm(F0)) for F0 in F0s)
    normc = float(np.linalg.norm(c))
    # SDPT3-style starting point
    xi = max(10.0, np.sqrt(N_total), N_total * (1.0 + np.max(np.abs(c))) / (1.0 + normF))
    eta = max(10.0, np.sqrt(N_total), normF0, normF)
    y = np.zeros(nvar)
    X = [xi * np.eye(d) for d in dims]
    S = [eta * np.eye(d) for d in dims]
    lam = np.zeros(A.shape[0])
    neq = A.shape[0]

    status, msg = "max_iter", "iteration limit reached"
    it = 0
    gap = pinf = dinf = np.inf
    best = None  # (merit, y, X, lam, gap, pinf, dinf)
    best_it = 0
    for it in range(1, opts.max_iter + 1):
        Fy = opA(y)
        Rp = [Fb - Sb for Fb, Sb in zip(Fy, S)]
        Rd = c - adj(X) - (A.T @ lam if neq else 0.0)
        Re = -(A @ y + a0) if neq else np.zeros(0)
        mu = sum(float(np.sum(Xb * Sb)) for Xb, Sb in zip(X, S)) / N_total
        pobj = float(c @ y)
        dobj = -sum(float(np.sum(F0 * Xb)) for F0, Xb in zip(F0s, X)) - float(a0 @ lam)
        pinf = max([float(np.linalg.norm(r)) for r in Rp] + [float(np.linalg.norm(Re))]) / (1.0 + normF0)
        dinf = float(np.linalg.norm(Rd)) / (1.0 + normc)
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        merit = max(pinf / opts.feas_tol, dinf / opts.feas_tol, gap / opts.gap_tol)
        log.debug("it %3d pobj %.10g dobj %.10g pinf %.2e dinf %.2e gap %.2e mu %.2e",
                  it, pobj, dobj, pinf, dinf, gap, mu)
        if best is None or merit < best[0]:
            best = (merit, y.copy(), [x.copy() for x in X], lam.copy(), gap, pinf, dinf)
            best_it = it
        elif it - best_it >= opts.stall_iter:
            msg = "no progress"
            break
        if pinf < opts.feas_tol and dinf < opts.feas_tol and gap < opts.gap_tol:
            status, msg = "optimal", "converged"
            break
        if dobj > opts.divergence and dinf < 1e-3:
            status, msg = "infeasible", "dual objective diverges (primal infeasible)"
            break
        xnorm = max(float(np.linalg.norm(Xb)) for Xb in X)
        if xnorm > opts.divergence and pinf < 1e-3:
            status, msg = "infeasible", "dual iterates diverge (primal infeasible)"
            break
        if pobj < -opts.divergence and pinf < 1e-3:
            status, msg = "unbounded", "primal objective diverges"
            break

        try:
            Sinv, P, Q = [], [], []
            for Sb, Xb in zip(S, X):
                Ls = np.linalg.cholesky(Sb)
                Si = _sym(sla.cho_solve((Ls, True), np.eye(Sb.shape[0])))
                Sinv.append(Si)
                if opts.direction == "nt":
                    W = _nt_scaling(Ls, np.linalg.cholesky(Xb))
                    P.append(W)
                    Q.append(W)
                else:
                    P.append(Xb)
                    Q.append(Si)
        except np.linalg.LinAlgError:
            msg = "iterate lost definiteness"
            break
        # Schur complement M_ij = sum_b tr(F_i P F_j Q)
        M = np.zeros((nvar, nvar))
        for Ff, F, Pb, Qb in zip(Fflat, Fs, P, Q):
            PFQ = np.matmul(np.matmul(Pb, F), Qb)  # (nvar, d, d)
            M += Ff @ PFQ.transpose(0, 2, 1).reshape(nvar, -1).T
        M = (M + M.T) / 2

        def direction(G):
            h = adj([Gb - Pb @ Rb @ Qb for Gb, Pb, Rb, Qb in zip(G, P, Rp, Q)]) - Rd
            dy = _solve_spd(M, h)
            r = h - M @ dy  # one step of iterative refinement
            dy = dy + _solve_spd(M, r)
            dS = [Fb - F0 + Rb for Fb, F0, Rb in zip(opA(dy), F0s, Rp)]
            dX = [_sym(Gb - Pb @ dSb @ Qb) for Gb, Pb, dSb, Qb in zip(G, P, dS, Q)]
            return dy, dS, project(dX, Rd)

        def steps(dS, dX):
            ap = min([_max_step(Sb, d) for Sb, d in zip(S, dS)] + [np.inf])
            ad = min([_max_step(Xb, d) for Xb, d in zip(X, dX)] + [np.inf])
            return ap, ad

        # predictor
        G = [-Xb for Xb in X]
        dy, dS, dX = direction(G)
        ap, ad = steps(dS, dX)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = sum(float(np.sum((Xb + ad * a) * (Sb + ap * b)))
                     for Xb, a, Sb, b in zip(X, dX, S, dS)) / N_total
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
        # corrector
        G = [sigma * mu * Si - Xb - a @ b @ Si for Si, Xb, a, b in zip(Sinv, X, dX, dS)]
        dy, dS, dX = direction(G)
        ap, ad = steps(dS, dX)
        tau = opts.step_fraction
        ap = min(1.0, tau * ap)
        ad = min(1.0, tau * ad)
        if not np.isfinite(ap + ad) or (ap < 1e-12 and ad < 1e-12):
            msg = "step length collapsed"
            break
        y = y + ap * dy
        S = [_sym(Sb + ap * b) for Sb, b in zip(S, dS)]
        X = [_sym(Xb + ad * a) for Xb, a in zip(X, dX)]
        if not np.all(np.isfinite(y)):
            msg = "numerical breakdown"
            break
    else:
        it = opts.max_iter

    if status == "max_iter" and _farkas(X, adj, F0s, normF, opts.feas_tol):
        status, msg = "infeasible", f"{msg}; dual iterate is an infeasibility certificate"
    if status == "max_iter" and best is not None:
        # fall back to the most accurate iterate seen
        merit, y, X, lam, gap, pinf, dinf = best
        if merit < 1.0:
            status = "optimal"
        elif merit < opts.near_factor:
            status = "near_optimal"
            msg = f"{msg}; residuals within {merit:.3g} x tolerance"
        log.debug("solver stopped: %s (best merit %.3g)", msg, merit)
    result = finish(status, y, X, lam, it, msg, gap, pinf, dinf)
    if status in ("optimal", "near_optimal"):
        worst = result.min_eigenvalue()
        allowed = opts.feas_tol * (1.0 if status == "optimal" else opts.near_factor)
        if worst < -allowed:
            # slack iterate and realized blocks disagree; report honestly
            result.status = "max_iter"
            result.message = f"realized block eigenvalue {worst:.3e} below tolerance"
    return result
