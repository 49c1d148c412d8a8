"""Sum-of-squares feasibility via Gram matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..polyring import Monomial, Polynomial, monomials_of_degree, monomials_up_to
from .problem import LinearForm, lower_to_sdp
from .solver import SolverOptions, solve

__all__ = ["GramCertificate", "SosResult", "is_sos", "NOT_SOS_MESSAGE"]

NOT_SOS_MESSAGE = "no SOS certificate found (SDP infeasible to tolerance)"


@dataclass
class GramCertificate:
    """``p = z^T Q z = sum_i q_i^2`` over the monomial vector ``z``."""

    basis: list[Polynomial]
    gram: np.ndarray
    sos_terms: list[Polynomial]
    error: float

    def reconstruct(self) -> Polynomial:
        n = self.basis[0].n if self.basis else 0
        acc = Polynomial.zero(n)
        for q in self.sos_terms:
            acc = acc + q * q
        return acc


@dataclass
class SosResult:
    feasible: bool
    certificate: GramCertificate | None
    margin: float  # largest t with Q - t I PSD (scaled problem)
    message: str = ""
    status: str = ""

    def __bool__(self) -> bool:
        return self.feasible


def _max_coeff_error(p: Polynomial, q: Polynomial) -> float:
    diff = p - q
    return max((abs(float(c)) for _, c in diff.items()), default=0.0)


def _embed(m: tuple[int, ...], used: list[int], n: int) -> Monomial:
    e = [0] * n
    for pos, k in zip(used, m):
        e[pos - 1] = k
    return tuple(e)


def is_sos(p: Polynomial, tol: float = 1e-7, recon_tol: float = 1e-6,
           options: SolverOptions | None = None) -> SosResult:
    """Decide numerically whether ``p`` is a sum of squares.

    Solves ``max t`` subject to ``Q - t I PSD``, ``z^T Q z = p`` (after
    scaling ``p`` to unit max coefficient) and ``t <= 1``.  The verdict is
    "feasible" when ``t* >= -tol`` and the PSD-projected Gram matrix
    reconstructs ``p`` to ``recon_tol``.  An infeasible verdict is numerical,
    not a proof.
    """
    n = p.n
    if p.is_zero():
        return SosResult(True, GramCertificate([], np.zeros((0, 0)), [], 0.0), np.inf, "zero polynomial")
    deg = p.degree
    if deg % 2:
        return SosResult(False, None, -np.inf, f"odd degree {deg}; {NOT_SOS_MESSAGE}")
    used = p.variables_used()
    half = deg // 2
    sub = len(used)
    if p.is_homogeneous():
        local = monomials_of_degree(sub, half)
    else:
        local = monomials_up_to(sub, half)
    basis = [_embed(m, used, n) for m in local]
    size = len(basis)
    scale = max(abs(float(c)) for _, c in p.items())

    # Gram variables q_ij (i <= j) and the margin t
    products: dict[Monomial, list[tuple[int, int]]] = {}
    for i in range(size):
        for j in range(i, size):
            key = tuple(a + b for a, b in zip(basis[i], basis[j]))
            products.setdefault(key, []).append((i, j))
    support = set(m for m, _ in p.items())
    if not support <= set(products):
        return SosResult(False, None, -np.inf, f"monomials outside the Gram support; {NOT_SOS_MESSAGE}")

    t = LinearForm.var("t")
    block = [[None] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            entry = LinearForm.var(("q", i, j))
            if i == j:
                entry = entry - t
            block[i][j] = entry
            block[j][i] = entry
    eqs = []
    for key in sorted(products):
        form = LinearForm({("q", i, j): (1 if i == j else 2) for i, j in products[key]},
                          -float(p.coefficient(key)) / scale)
        eqs.append(form)
    order = [("q", i, j) for i in range(size) for j in range(i, size)] + ["t"]
    prob = lower_to_sdp(-t, [("gram", block), ("cap", [[1 - t]])], eqs, order)
    opts = options or SolverOptions(feas_tol=1e-9, gap_tol=1e-9)
    sol = solve(prob, opts)
    if sol.status not in ("optimal", "near_optimal", "max_iter"):
        return SosResult(False, None, -np.inf, f"solver status {sol.status}; {NOT_SOS_MESSAGE}", sol.status)
    vals = sol.values
    t_star = float(vals[-1])
    Q = np.zeros((size, size))
    idx = 0
    for i in range(size):
        for j in range(i, size):
            Q[i, j] = Q[j, i] = vals[idx]
            idx += 1
    Q *= scale
    if t_star < -tol:
        return SosResult(False, None, t_star, NOT_SOS_MESSAGE, sol.status)
    w, V = np.linalg.eigh(Q)
    w = np.clip(w, 0.0, None)
    mons = [Polynomial.monomial(b) for b in basis]
    terms = []
    for k in range(size):
        if w[k] <= 0:
            continue
        coeffs = np.sqrt(w[k]) * V[:, k]
        q = Polynomial(n, {basis[i]: float(coeffs[i]) for i in range(size) if coeffs[i] != 0})
        terms.append(q)
    cert = GramCertificate(mons, Q, terms, 0.0)
    err = _max_coeff_error(p, cert.reconstruct())
    cert.error = err
    if err >= recon_tol:
        return SosResult(False, None, t_star,
                         f"Gram reconstruction error {err:.2e}; {NOT_SOS_MESSAGE}", sol.status)
    return SosResult(True, cert, t_star, "SOS certificate found", sol.status)
