"""Orbit-space relaxations in power sums, and bounds for power-sum problems.

The power-sum problem ``P(n, m, q, gamma)`` minimizes ``sum x_i^q`` subject
to ``sum x_i^j = gamma_j`` for ``j < m``.  Its lower bound ``L`` comes from
a single Hankel matrix ``H_n(s)`` with the known power sums pinned; its
upper bound ``U`` is a one-variable SDP in the constant coefficient ``p0`` of
a monic degree-``m`` polynomial whose roots realize the power sums.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .polyring import Polynomial, is_invariant, power_sum, to_power_sums
from .sdpcore.moments import (
    MomentRelaxation,
    RelaxationOrderError,
    half_ceil,
    localizing_matrix,
    moment_matrix,
    pmi_localizing_blocks,
    riesz,
)
from .sdpcore.problem import LinearForm, lower_to_sdp
from .sdpcore.solver import SolverOptions, solve
from .polyring import monomials_up_to
from .symadapt import InvarianceError, as_constraints

__all__ = [
    "BoundResult",
    "NewtonState",
    "PowerSumProblem",
    "RecoveryError",
    "RegimeError",
    "affine_Q",
    "closed_form_lower",
    "d4_fixture",
    "gradient_gram",
    "hankel_J",
    "lower_bound_L",
    "newton_p_from_s",
    "newton_s_from_p",
    "orbit_pmi_relaxation",
    "recover_point",
    "upper_bound_U",
]

_TIGHT = SolverOptions(feas_tol=1e-10, gap_tol=1e-10)


class RegimeError(ValueError):
    pass


class RecoveryError(ArithmeticError):
    pass


def _exact(vals):
    if all(isinstance(v, (int, Rational)) and not isinstance(v, bool) for v in vals):
        return [Fraction(v) for v in vals]
    return [float(v) for v in vals]


@dataclass(frozen=True)
class PowerSumProblem:
    n: int
    m: int
    q: int
    gamma: tuple

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(_exact(self.gamma)))
        if len(self.gamma) != self.m - 1:
            raise RegimeError(f"need m-1 = {self.m - 1} prescribed power sums, got {len(self.gamma)}")
        if self.m < 1 or self.n < 1:
            raise RegimeError("need n >= 1 and m >= 1")

    @property
    def lower_regime(self) -> bool:
        return self.m <= self.n + 1 and self.m <= self.q <= 2 * self.n - 2

    @property
    def upper_regime(self) -> bool:
        return self.m <= self.n and self.m <= self.q <= 2 * self.m - 2

    def check(self) -> None:
        if not (self.lower_regime or self.upper_regime):
            raise RegimeError(
                f"(n, m, q) = ({self.n}, {self.m}, {self.q}) is outside both regimes: "
                f"lower bound needs m <= n+1 and m <= q <= 2n-2, "
                f"upper bound needs m <= n and m <= q <= 2m-2")

    def pinned(self, s0) -> dict[int, object]:
        out = {0: s0}
        for j, g in enumerate(self.gamma, start=1):
            out[j] = g
        return out


# ---------------------------------------------------------------------------
# Newton identities

def newton_p_from_s(s: Sequence, m: int | None = None, include_p0: bool = False) -> list:
    """Coefficients ``[p_{m-1}, ..., p_1]`` of the monic polynomial from ``s_1..s_{m-1}``.

    Uses ``s_k + p_{m-1} s_{k-1} + ... + p_{m-k+1} s_1 = -k p_{m-k}``.  With
    ``include_p0`` the list continues with ``p_0``, which needs ``s_m`` as well.
    """
    s = _exact(list(s))
    m = len(s) + 1 if m is None else m
    top = m if include_p0 else m - 1
    if len(s) < top:
        raise ValueError(f"need {top} power sums, got {len(s)}")
    p: dict[int, object] = {}
    for k in range(1, top + 1):
        acc = s[k - 1]
        for i in range(1, k):
            acc = acc + p[m - i] * s[k - i - 1]
        p[m - k] = -acc / k
    return [p[j] for j in range(m - 1, m - 1 - top, -1)]


def newton_s_from_p(p: Sequence, upto: int | None = None) -> list:
    """Power sums ``[s_1, ..., s_upto]`` of the roots of ``X^m + sum_j p_j X^j``.

    ``p`` lists ``p_0, ..., p_{m-1}``; the default ``upto`` is ``2m - 2``.
    """
    p = _exact(list(p))
    m = len(p)
    upto = 2 * m - 2 if upto is None else upto
    s = {0: m}
    for k in range(1, upto + 1):
        if k < m:
            acc = k * p[m - k]
            for i in range(1, k):
                acc = acc + p[m - i] * s[k - i]
        else:
            acc = 0
            for i in range(1, m + 1):
                acc = acc + p[m - i] * s[k - i]
        s[k] = -acc
    return [s[k] for k in range(1, upto + 1)]


@dataclass
class NewtonState:
    """Known power sums, derived coefficients and affine ``Q_j(p0)``."""

    m: int
    s: list  # s_1 .. s_{m-1}
    p: dict = field(default_factory=dict)  # p_1 .. p_{m-1}
    Q: dict = field(default_factory=dict)  # j -> (slope, intercept), m <= j <= 2m-1

    @classmethod
    def from_gamma(cls, gamma: Sequence, m: int | None = None) -> NewtonState:
        gamma = _exact(list(gamma))
        m = len(gamma) + 1 if m is None else m
        coeffs = newton_p_from_s(gamma, m)
        p = {m - 1 - i: c for i, c in enumerate(coeffs)}
        state = cls(m, list(gamma), p)
        # affine recurrence in p0: every s_j is (slope, intercept)
        zero = gamma[0] * 0 if gamma else Fraction(0)
        aff = {0: (zero, zero + m)}
        for j in range(1, m):
            aff[j] = (zero, gamma[j - 1])
        for k in range(m, 2 * m):
            slope, icpt = zero, zero
            for i in range(1, m):  # known coefficients p_{m-i}
                a, b = aff[k - i]
                slope -= p[m - i] * a
                icpt -= p[m - i] * b
            a, b = aff[k - m]  # the p0 term; s_{k-m} is constant for k <= 2m-1
            if a != 0:
                raise ArithmeticError("Q_j is not affine beyond 2m-1")
            slope -= b
            aff[k] = (slope, icpt)
        state.Q = {j: aff[j] for j in range(m, 2 * m)}
        state._aff = aff
        return state

    def s_affine(self, j: int):
        return self._aff[j]

    def coefficients(self, p0) -> list:
        """``[p_0, ..., p_{m-1}]``."""
        return [p0] + [self.p[j] for j in range(1, self.m)]


def affine_Q(j: int, state: NewtonState):
    """``(slope, intercept)`` of ``s_j = Q_j(p0)`` for ``m <= j <= 2m-1``."""
    if not state.m <= j <= 2 * state.m - 1:
        raise ValueError(f"j={j} outside [{state.m}, {2 * state.m - 1}]")
    return state.Q[j]


# ---------------------------------------------------------------------------
# bounds

@dataclass
class BoundResult:
    value: float
    status: str
    feasible: bool
    p0: float | None = None
    detail: object = None

    def __float__(self) -> float:
        return float(self.value)


def _hankel_problem(dim: int, known: dict, objective_index: int):
    """``min s_q`` over ``H_dim(s) PSD`` with ``known`` pinned entries."""
    def entry(j):
        if j in known:
            return LinearForm({}, float(known[j]))
        return LinearForm.var(j)

    mat = [[entry(i + j) for j in range(dim)] for i in range(dim)]
    return lower_to_sdp(entry(objective_index), [("hankel", mat)], [])


def _hankel_margin(dim: int, known: dict, options: SolverOptions) -> float:
    """Largest ``t <= 1`` with ``H_dim(s) - t I`` PSD over the pinned entries."""
    t = LinearForm.var("t")
    mat = [[(LinearForm({}, float(known[i + j])) if i + j in known else LinearForm.var(i + j))
            - (t if i == j else 0) for j in range(dim)] for i in range(dim)]
    sdp = lower_to_sdp(-t, [("hankel", mat), ("cap", [[1 - t]])], [])
    sol = solve(sdp, options)
    return -sol.objective_value if sol.optimal else -math.inf


def lower_bound_L(prob: PowerSumProblem, hankel_dim: int | None = None,
                  options: SolverOptions | None = None) -> BoundResult:
    """``min s_q  s.t.  H_d(s) PSD, s_0 = n, s_j = gamma_j``; ``d = n`` by default."""
    if not prob.lower_regime:
        raise RegimeError(f"lower bound needs m <= n+1 and m <= q <= 2n-2 (got n={prob.n}, "
                          f"m={prob.m}, q={prob.q})")
    d = prob.n if hankel_dim is None else hankel_dim
    if prob.q > 2 * d - 2:
        raise RegimeError(f"s_{prob.q} does not occur in a {d}x{d} Hankel matrix")
    known = prob.pinned(prob.n)
    opts = options or _TIGHT
    if prob.q % 2 and _hankel_margin(d, known, opts) > 1e-7:
        # an atom of mass eps at -R moves s_q by -eps R^q but the pinned moments only
        # by O(eps R^(m-1)); with an interior point the bound is -inf
        return BoundResult(-math.inf, "unbounded", True,
                           detail="odd objective power with a strictly feasible Hankel matrix")
    sdp = _hankel_problem(d, known, prob.q)
    sol = solve(sdp, opts)
    if sol.optimal:
        return BoundResult(sol.objective_value, sol.status, True, detail=sol)
    if sol.status == "infeasible":
        return BoundResult(math.inf, "infeasible", False, detail=sol)
    return BoundResult(sol.objective_value, sol.status, False, detail=sol)


def _solve_exact(H, u):
    """Solve ``H x = u`` exactly (any solution); ``None`` if inconsistent."""
    r = len(H)
    A = [list(row) + [u[i]] for i, row in enumerate(H)]
    piv_cols, row = [], 0
    for col in range(r):
        pr = next((i for i in range(row, r) if A[i][col] != 0), None)
        if pr is None:
            continue
        A[row], A[pr] = A[pr], A[row]
        inv = 1 / A[row][col]
        A[row] = [v * inv for v in A[row]]
        for i in range(r):
            if i != row and A[i][col] != 0:
                fac = A[i][col]
                A[i] = [a - fac * b for a, b in zip(A[i], A[row])]
        piv_cols.append(col)
        row += 1
    for i in range(row, r):
        if A[i][r] != 0:
            return None
    x = [A[0][0] * 0] * r
    for i, col in enumerate(piv_cols):
        x[col] = A[i][r]
    return x


def closed_form_lower(prob: PowerSumProblem) -> BoundResult:
    """``u_r^T H_r(gamma)^+ u_r`` for ``q = m = 2r``: the Schur complement of ``H_{r+1}``.

    Returns ``+inf`` when ``H_r(gamma)`` is not PSD or ``u_r`` is outside its range.
    """
    if prob.q != prob.m or prob.m % 2:
        raise RegimeError(f"closed form needs q = m = 2r, got m={prob.m}, q={prob.q}")
    r = prob.m // 2
    g = {0: prob.gamma[0] * 0 + prob.n if prob.gamma else Fraction(prob.n)}
    for j, v in enumerate(prob.gamma, start=1):
        g[j] = v
    H = [[g[i + j] for j in range(r)] for i in range(r)]
    u = [g[r + i] for i in range(r)]
    eig = np.linalg.eigvalsh(np.array(H, dtype=float))
    if eig[0] < -1e-12 * max(1.0, abs(eig[-1])):
        return BoundResult(math.inf, "infeasible", False)
    x = _solve_exact(H, u)
    if x is None:
        return BoundResult(math.inf, "infeasible", False)
    val = sum(a * b for a, b in zip(u, x))
    return BoundResult(val, "exact", True)


def upper_bound_U(prob: PowerSumProblem, options: SolverOptions | None = None) -> BoundResult:
    """``min Q_q(p0)  s.t.  H_m(s(p0)) PSD`` with ``s_0 = m``; a one-variable SDP."""
    if not prob.upper_regime:
        raise RegimeError(f"upper bound needs m <= n and m <= q <= 2m-2 (got n={prob.n}, "
                          f"m={prob.m}, q={prob.q})")
    m = prob.m
    state = NewtonState.from_gamma(prob.gamma, m)
    p0 = LinearForm.var("p0")

    def entry(j):
        a, b = state.s_affine(j)
        return p0 * float(a) + float(b) if a != 0 else LinearForm({}, float(b))

    mat = [[entry(i + j) for j in range(m)] for i in range(m)]
    obj = entry(prob.q)
    sdp = lower_to_sdp(obj, [("hankel", mat)], [], ["p0"])
    if sdp.var_count == 0:
        # nothing depends on p0 (m == 1): the objective is a constant
        val = float(obj.constant)
        ok = bool(np.linalg.eigvalsh(np.array([[float(e.constant) for e in row] for row in mat]))[0] >= -1e-9)
        return BoundResult(val if ok else math.inf, "optimal" if ok else "infeasible", ok, 0.0, state)
    sol = solve(sdp, options or _TIGHT)
    if sol.status == "infeasible":
        return BoundResult(math.inf, "infeasible", False, None, state)
    p0_star = float(sol.values[0])
    slope, icpt = (float(v) for v in state.s_affine(prob.q))
    if sol.status in ("near_optimal", "max_iter") and slope != 0:
        # the feasible p0 form an interval and the objective is linear, so the optimum is
        # the endpoint in the descent direction; the interior-point iterate stalls near it
        end = _interval_endpoint(sdp.blocks[0], p0_star, -math.copysign(1.0, slope))
        if end is not None:
            return BoundResult(slope * end + icpt, "optimal", True, end, state)
    return BoundResult(sol.objective_value, sol.status, sol.optimal, p0_star, state)


def _interval_endpoint(block, start: float, direction: float, rel_tol: float = 1e-12):
    """Boundary of ``{p : F0 + p F1 PSD}`` from feasible ``start`` along ``direction``."""
    F0, F1 = block.F0, block.F[0]

    def feasible(p):
        H = F0 + p * F1
        return np.linalg.eigvalsh(H)[0] >= -rel_tol * max(1.0, float(np.max(np.abs(H))))

    if not feasible(start):
        return None
    lo, h = start, max(1e-10, 1e-8 * abs(start))
    for _ in range(80):
        hi = start + direction * h
        if not feasible(hi):
            break
        lo, h = hi, 2 * h
    else:
        return None  # no boundary found: leave the solver's answer alone
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def recover_point(p0_star: float, state: NewtonState, n: int, tol: float = 1e-6,
                  imag_tol: float = 1e-5) -> list[float]:
    """Roots of ``X^m + p_{m-1} X^{m-1} + ... + p0``, padded with zeros to length ``n``.

    An optimal ``p0`` usually sits where two roots merge; a double root computed in floating
    point splits by about ``sqrt(eps)``, so small imaginary parts are expected and dropped.
    """
    m = state.m
    if m > n:
        raise RecoveryError(f"{m} roots do not fit into {n} coordinates")
    coeffs = [1.0] + [float(state.p[j]) for j in range(m - 1, 0, -1)] + [float(p0_star)]
    roots = np.roots(coeffs) if m > 0 else np.zeros(0)
    if roots.size and np.max(np.abs(roots.imag)) > imag_tol:
        warnings.warn(f"roots have imaginary parts up to {np.max(np.abs(roots.imag)):.2e}; "
                      "projecting to real parts", RuntimeWarning, stacklevel=2)
    real = np.sort(roots.real)[::-1]
    point = [float(v) for v in real] + [0.0] * (n - m)
    for j, g in enumerate(state.s, start=1):
        got = sum(v ** j for v in point)
        if abs(got - float(g)) > tol * max(1.0, abs(float(g))):
            raise RecoveryError(f"recovered point has power sum s_{j} = {got}, expected {float(g)}")
    return point


# ---------------------------------------------------------------------------
# orbit-space relaxation

def _in_power_sums(p: Polynomial, n: int) -> Polynomial:
    gamma = to_power_sums(p)
    return gamma.rename(n, list(range(1, gamma.n + 1)))


def hankel_J(n: int) -> list[list[Polynomial]]:
    """``J = (s_{i+j-2})`` written in ``z_j = s_j`` (entries beyond ``s_n`` via Newton)."""
    cache = {0: Polynomial.constant(n, n)}
    for j in range(1, 2 * n - 1):
        cache[j] = Polynomial.variable(n, j) if j <= n else _in_power_sums(power_sum(n, j), n)
    return [[cache[i + j] for j in range(n)] for i in range(n)]


def gradient_gram(invariants: Sequence[Polynomial]) -> list[list[Polynomial]]:
    """``(<d pi_i, d pi_j>)`` in the original variables."""
    n = invariants[0].n
    grads = [[p.derivative(v + 1) for v in range(n)] for p in invariants]
    out = []
    for gi in grads:
        row = []
        for gj in grads:
            acc = Polynomial.zero(n)
            for a, b in zip(gi, gj):
                acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def d4_fixture() -> dict:
    """The dihedral group of the square acting on the plane.

    Invariants ``f1 = x^2 + y^2`` and ``f2 = x^2 y^2``; the matrix ``J`` in the
    orbit coordinates and its principal minors.
    """
    x, y = Polynomial.variable(2, 1), Polynomial.variable(2, 2)
    f1 = x * x + y * y
    f2 = x * x * y * y
    z1, z2 = Polynomial.variable(2, 1), Polynomial.variable(2, 2)
    J = [[z1 * 4, z2 * 8], [z2 * 8, z1 * z2 * 4]]
    minors = [z1 * 4, z1 * z2 * 4, (z1 * 4) * (z1 * z2 * 4) - (z2 * 8) * (z2 * 8)]
    return {"invariants": [f1, f2], "J": J, "minors": minors}


def orbit_pmi_relaxation(f: Polynomial, constraints=(), n: int | None = None,
                         k: int | None = None) -> MomentRelaxation:
    """Relaxation in the orbit coordinates ``z_j = p_j`` with the Hankel PMI ``J(z) PSD``.

    Inequalities give scalar localizing matrices, equalities ``h = 0`` give
    ``L(z^a h) = 0``; the power sums are algebraically independent so there
    is no relation ideal.
    """
    n = f.n if n is None else n
    cons = as_constraints(constraints)
    for poly in [f] + [c.poly for c in cons]:
        if poly.n != n or not is_invariant(poly, "sn"):
            raise InvarianceError(f"{poly} is not symmetric in {n} variables")
    ft = _in_power_sums(f, n)
    gt = [(_in_power_sums(c.poly, n), c.kind) for c in cons]
    J = hankel_J(n)
    d = max(half_ceil(J[i][j].degree) for i in range(n) for j in range(n))
    k0 = max([half_ceil(ft.degree), d] + [half_ceil(g.degree) for g, _ in gt])
    if k is None:
        k = k0
    if k < k0:
        raise RelaxationOrderError(k, k0)
    _, M = moment_matrix(n, k)
    loc = [("J", pmi_localizing_blocks(J, k))]
    eqs = []
    for idx, (g, kind) in enumerate(gt):
        if kind == "ge0":
            L = localizing_matrix(g, k)
            if L is not None:
                loc.append((f"g{idx + 1}", L))
        else:
            deg = 2 * (k - half_ceil(g.degree))
            for mono in monomials_up_to(n, deg):
                form = riesz(Polynomial.monomial(mono) * g)
                if not form.is_zero():
                    eqs.append(form)
    order = [mono for mono in monomials_up_to(n, 2 * k) if any(mono)]
    return MomentRelaxation(riesz(ft), [("moment", M)], loc, eqs, k,
                            {"route": "orbit", "n": n, "var_order": order, "J": J})
