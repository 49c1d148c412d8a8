"""Plain (non-symmetric) moment relaxations and PMI localizing matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

import numpy as np

from ..polyring import Monomial, Polynomial, monomials_up_to
from .problem import LinearForm, SdpError, SdpProblem, SdpSolution, lower_to_sdp
from .solver import SolverOptions, solve

__all__ = [
    "MomentRelaxation",
    "RelaxationOrderError",
    "RelaxationResult",
    "dense_relaxation",
    "localizing_matrix",
    "minimal_order",
    "moment_matrix",
    "pmi_localizing_blocks",
    "riesz",
]

Matrix = list[list[LinearForm]]


class RelaxationOrderError(ValueError):
    def __init__(self, k: int, k0: int):
        super().__init__(f"relaxation order k={k} is below the minimal order k0={k0}")
        self.k = k
        self.k0 = k0


def half_ceil(d: int) -> int:
    return max(0, math.ceil(d / 2))


def minimal_order(f: Polynomial, constraints: Sequence[Polynomial] = ()) -> int:
    return max([half_ceil(f.degree)] + [half_ceil(g.degree) for g in constraints] + [0])


def riesz(p: Polynomial) -> LinearForm:
    """The Riesz functional ``L(p) = sum_a p_a y_a`` with ``y_0 = 1``."""
    zero = (0,) * p.n
    terms = {m: c for m, c in p.items() if m != zero}
    return LinearForm(terms, p.constant_term())


def _shifted(basis: Sequence[Monomial], g: Polynomial, indexer: Callable[[Polynomial], LinearForm]) -> Matrix:
    n = g.n
    mons = [Polynomial.monomial(b) for b in basis]
    size = len(basis)
    mat: Matrix = [[None] * size for _ in range(size)]  # type: ignore[list-item]
    for i in range(size):
        for j in range(i, size):
            entry = indexer(mons[i] * mons[j] * g)
            mat[i][j] = entry
            mat[j][i] = entry
    return mat


def moment_matrix(n: int, k: int, indexer=riesz) -> tuple[list[Monomial], Matrix]:
    basis = monomials_up_to(n, k)
    return basis, _shifted(basis, Polynomial.constant(n, 1), indexer)


def localizing_matrix(g: Polynomial, k: int, indexer=riesz) -> Matrix | None:
    """``M_{k - ceil(deg g / 2)}(g y)``; ``None`` when that order is negative."""
    order = k - half_ceil(g.degree)
    if order < 0:
        return None
    return _shifted(monomials_up_to(g.n, order), g, indexer)


def pmi_localizing_blocks(G: Sequence[Sequence[Polynomial]], k: int,
                          moment_indexing: Callable[[Polynomial], LinearForm] = riesz) -> Matrix:
    """Localizing matrix of a polynomial matrix ``G``.

    Rows and columns are indexed by pairs (basis monomial ``u``, row of ``G``)
    with the basis monomial as the outer index; entry is ``L(u v G_ij)``.
    """
    p = len(G)
    for row in G:
        if len(row) != p:
            raise SdpError("polynomial matrix is not square")
    for i in range(p):
        for j in range(p):
            if G[i][j] != G[j][i]:
                raise SdpError("polynomial matrix is not symmetric")
    n = G[0][0].n
    d = max(half_ceil(G[i][j].degree) for i in range(p) for j in range(p))
    if k < d:
        raise RelaxationOrderError(k, d)
    basis = [Polynomial.monomial(b) for b in monomials_up_to(n, k - d)]
    size = len(basis) * p
    mat: Matrix = [[None] * size for _ in range(size)]  # type: ignore[list-item]
    for a, u in enumerate(basis):
        for b in range(a, len(basis)):
            uv = u * basis[b]
            for i in range(p):
                for j in range(p):
                    r, c = a * p + i, b * p + j
                    entry = moment_indexing(uv * G[i][j])
                    mat[r][c] = entry
                    mat[c][r] = entry
    return mat


@dataclass
class RelaxationResult:
    value: float
    status: str
    solution: SdpSolution
    moments: dict

    @property
    def optimal(self) -> bool:
        return self.status in ("optimal", "near_optimal")


@dataclass
class MomentRelaxation:
    """Objective, PSD blocks and equalities over moment variables."""

    objective: LinearForm
    moment_blocks: list[tuple[str, Matrix]]
    localizing_blocks: list[tuple[str, Matrix]] = field(default_factory=list)
    equalities: list[LinearForm] = field(default_factory=list)
    order: int = 0
    meta: dict = field(default_factory=dict)

    def all_blocks(self) -> list[tuple[str, Matrix]]:
        return list(self.moment_blocks) + list(self.localizing_blocks)

    def variables(self) -> list[Hashable]:
        return list(self.to_sdp().var_names)

    def to_sdp(self) -> SdpProblem:
        return lower_to_sdp(self.objective, self.all_blocks(), self.equalities,
                            self.meta.get("var_order"))

    def block_sizes(self) -> list[int]:
        return [len(m) for _, m in self.moment_blocks]

    def solve(self, options: SolverOptions | None = None, **kw) -> RelaxationResult:
        prob = self.to_sdp()
        sol = solve(prob, options, **kw)
        moments = dict(zip(prob.var_names, map(float, sol.values)))
        return RelaxationResult(sol.objective_value, sol.status, sol, moments)


def dense_relaxation(f: Polynomial, inequalities: Sequence[Polynomial] = (),
                     equalities: Sequence[Polynomial] = (), k: int | None = None) -> MomentRelaxation:
    """Lasserre relaxation of order ``k`` of ``min f  s.t.  g >= 0, h = 0``.

    An equality ``h`` contributes ``L(x^a h) = 0`` for all monomials of
    degree at most ``2(k - ceil(deg h / 2))``.
    """
    k0 = minimal_order(f, list(inequalities) + list(equalities))
    if k is None:
        k = k0
    if k < k0:
        raise RelaxationOrderError(k, k0)
    n = f.n
    _, M = moment_matrix(n, k)
    loc = []
    for idx, g in enumerate(inequalities):
        L = localizing_matrix(g, k)
        if L is not None:
            loc.append((f"g{idx + 1}", L))
    eqs = []
    for h in equalities:
        deg = 2 * (k - half_ceil(h.degree))
        for m in monomials_up_to(n, deg):
            form = riesz(Polynomial.monomial(m) * h)
            if not form.is_zero():
                eqs.append(form)
    var_order = [m for m in monomials_up_to(n, 2 * k) if any(m)]
    return MomentRelaxation(riesz(f), [("moment", M)], loc, eqs, k,
                            {"route": "dense", "n": n, "var_order": var_order})


def first_moments(result: RelaxationResult, n: int) -> np.ndarray:
    """``(L(x_1), ..., L(x_n))`` from a dense relaxation result."""
    out = np.zeros(n)
    for i in range(n):
        e = [0] * n
        e[i] = 1
        out[i] = result.moments.get(tuple(e), 0.0)
    return out
