"""Degree-principle reduction for symmetric problems.

A symmetric problem of degree ``d`` with constraints of degree at most
``deg g`` attains its infimum on points with at most
``r = max(2, floor(d / 2), deg g)`` distinct coordinates.  Each r-partition
``omega`` of ``n`` gives an r-variable problem ``f^omega`` by repeating the
variable ``T_i`` exactly ``omega_i`` times; the original value is the minimum
over ``omega``.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polyring import Polynomial, is_invariant, lift_rpartition, substitute_rpartition
from .sdpcore.moments import dense_relaxation, first_moments
from .sdpcore.solver import SolverOptions
from .sdpcore.sos import GramCertificate, is_sos
from .symadapt import Constraint, InvarianceError, as_constraints
from .symcomb import partitions

__all__ = [
    "NonnegativityResult",
    "QuadraticDecomposition",
    "ReducedProblem",
    "ReductionReport",
    "decompose_symmetric_quadratic",
    "degree4_nonnegativity",
    "degree_bound",
    "r_partitions",
    "reduce",
    "solve_reduced",
]


def _check_symmetric(polys: Sequence[Polynomial]) -> None:
    for p in polys:
        if not is_invariant(p, "sn"):
            raise InvarianceError(f"{p} is not symmetric")


def degree_bound(f: Polynomial, constraints=()) -> int:
    """``r = max(2, floor(deg f / 2), deg g_1, ..., deg g_m)``."""
    cons = as_constraints(constraints)
    _check_symmetric([f] + [c.poly for c in cons])
    return max([2, max(f.degree, 0) // 2] + [c.poly.degree for c in cons])


def r_partitions(n: int, r: int) -> list[tuple[int, ...]]:
    """Partitions of ``n`` into exactly ``r`` positive parts, reverse-lex order."""
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r}, n={n}")
    return [p for p in partitions(n, r) if len(p) == r]


@dataclass(frozen=True)
class ReducedProblem:
    omega: tuple[int, ...]
    objective: Polynomial
    constraints: tuple[Constraint, ...]

    @property
    def r(self) -> int:
        return len(self.omega)


def reduce(f: Polynomial, constraints=(), n: int | None = None) -> list[ReducedProblem]:
    """One r-variable problem per r-partition, ``r`` capped at ``n``."""
    n = f.n if n is None else n
    cons = as_constraints(constraints)
    r = min(degree_bound(f, cons), n)
    out = []
    for omega in r_partitions(n, r):
        obj = substitute_rpartition(f, omega)
        red = tuple(Constraint(substitute_rpartition(c.poly, omega), c.kind) for c in cons)
        out.append(ReducedProblem(omega, obj, red))
    return out


@dataclass
class OmegaOutcome:
    omega: tuple[int, ...]
    values: dict[int, float]
    statuses: dict[int, str]
    candidate: np.ndarray | None


@dataclass
class ReductionReport:
    r: int
    omegas: list[tuple[int, ...]]
    outcomes: list[OmegaOutcome]
    value: float
    best_omega: tuple[int, ...] | None
    point: list[float] | None
    partial: bool
    orders: list[int] = field(default_factory=list)

    def per_omega(self) -> dict[tuple[int, ...], dict[int, float]]:
        return {o.omega: dict(o.values) for o in self.outcomes}


def _solve_one(args) -> OmegaOutcome:
    prob, orders, opts = args
    values, statuses, cand = {}, {}, None
    ineq = [c.poly for c in prob.constraints if c.kind == "ge0"]
    eq = [c.poly for c in prob.constraints if c.kind == "eq0"]
    for k in orders:
        try:
            res = dense_relaxation(prob.objective, ineq, eq, k).solve(opts)
        except Exception as exc:  # reported per omega, never fatal
            values[k], statuses[k] = math.nan, f"error: {exc}"
            continue
        statuses[k] = res.status
        values[k] = res.value if res.optimal else math.nan
        if res.optimal:
            cand = _candidate(prob, res)
    return OmegaOutcome(prob.omega, values, statuses, cand)


def _candidate(prob: ReducedProblem, res) -> np.ndarray:
    """Best feasible point among the first moments and sign patterns of sqrt(L(t_i^2)).

    First moments alone average symmetric minimizers (``t`` and ``-t`` give 0).
    """
    r = prob.r
    first = first_moments(res, r)
    roots = []
    for i in range(r):
        e = [0] * r
        e[i] = 2
        roots.append(math.sqrt(max(res.moments.get(tuple(e), 0.0), 0.0)))
    cands = [first] + [np.array(sg) * roots for sg in itertools.product((1.0, -1.0), repeat=r)]

    def score(t):
        pt = [float(v) for v in t]
        viol = 0.0
        for c in prob.constraints:
            v = float(c.poly(pt))
            viol = max(viol, -v if c.kind == "ge0" else abs(v))
        return (viol > 1e-6, float(prob.objective(pt)))

    return min(cands, key=score)


def solve_reduced(problems: Sequence[ReducedProblem], k, options: SolverOptions | None = None,
                  jobs: int = 1) -> ReductionReport:
    """Plain relaxations of every reduced problem; aggregate the minimum.

    ``k`` is an order or a list of orders; the reported value uses the
    largest.  Failed solves are skipped and mark the report partial.  Ties
    between equal values go to the lexicographically smallest ``omega``.
    """
    orders = sorted([k] if isinstance(k, int) else list(k))
    opts = options or SolverOptions(feas_tol=1e-8, gap_tol=1e-8)
    work = [(p, orders, opts) for p in problems]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_solve_one, work))
    else:
        outcomes = [_solve_one(w) for w in work]
    top = orders[-1]
    best_val, best = math.inf, None
    partial = False
    for o in outcomes:
        v = o.values.get(top, math.nan)
        if math.isnan(v):
            partial = True
            continue
        if v < best_val or (v == best_val and best is not None and o.omega < best.omega):
            best_val, best = v, o
    point = None
    if best is not None and best.candidate is not None:
        point = lift_rpartition(best.omega, [float(t) for t in best.candidate])
    r = problems[0].r if problems else 0
    return ReductionReport(r, [p.omega for p in problems], outcomes, best_val,
                           best.omega if best else None, point, partial, orders)


# ---------------------------------------------------------------------------
# degree four

@dataclass
class NonnegativityResult:
    verdict: str  # certified_nonnegative | not_nonnegative | undecided
    certificates: dict[tuple[int, ...], GramCertificate]
    reduced: dict[tuple[int, ...], Polynomial]
    witness: dict | None = None

    def summary(self) -> str:
        if self.verdict == "certified_nonnegative":
            return f"certified nonnegative ({len(self.certificates)} SOS certificates)"
        if self.verdict == "not_nonnegative":
            w = self.witness or {}
            return f"not nonnegative (witness omega={w.get('omega')}, value {w.get('value'):.6g})"
        return "undecided: no SOS certificate found (SDP infeasible to tolerance) and no witness"


def _grad(p: Polynomial) -> list[Polynomial]:
    return [p.derivative(i + 1) for i in range(p.n)]


def _descent_witness(p: Polynomial, rng, starts: int = 20, steps: int = 200,
                     tol: float = 1e-9) -> np.ndarray | None:
    """Multistart gradient descent with backtracking; returns ``t`` with ``p(t) < -tol``."""
    grad = _grad(p)
    homogeneous = p.is_homogeneous() and p.constant_term() == 0
    for _ in range(starts):
        t = rng.normal(size=p.n)
        if homogeneous:
            t /= np.linalg.norm(t) or 1.0
        val = float(p(list(t)))
        for _ in range(steps):
            if val < -tol:
                return t
            g = np.array([float(q(list(t))) for q in grad])
            if not np.all(np.isfinite(g)) or np.linalg.norm(g) < 1e-14:
                break
            step = 1.0
            while step > 1e-12:
                cand = t - step * g
                if homogeneous:
                    cand /= np.linalg.norm(cand) or 1.0
                cv = float(p(list(cand)))
                if cv < val - 1e-4 * step * float(g @ g) or (homogeneous and cv < val):
                    t, val = cand, cv
                    break
                step /= 2
            else:
                break
        if val < -tol:
            return t
    return None


def degree4_nonnegativity(f: Polynomial, seed: int = 0) -> NonnegativityResult:
    """Decide nonnegativity of a symmetric polynomial of degree at most 4.

    Every ``f^omega`` over 2-partitions is a binary quartic, which is
    nonnegative exactly when it is a sum of squares.
    """
    _check_symmetric([f])
    if f.degree > 4:
        raise ValueError(f"degree {f.degree} exceeds 4")
    n = f.n
    r = min(2, n)
    certs: dict = {}
    reduced: dict = {}
    failed = []
    for omega in r_partitions(n, r):
        fw = substitute_rpartition(f, omega)
        reduced[omega] = fw
        res = is_sos(fw)
        if res.feasible:
            certs[omega] = res.certificate
        else:
            failed.append(omega)
    if not failed:
        return NonnegativityResult("certified_nonnegative", certs, reduced)
    rng = np.random.default_rng(seed)
    for omega in failed:
        t = _descent_witness(reduced[omega], rng)
        if t is not None:
            x = lift_rpartition(omega, [float(v) for v in t])
            witness = {"omega": omega, "t": [float(v) for v in t], "point": x,
                       "value": float(f(x))}
            return NonnegativityResult("not_nonnegative", certs, reduced, witness)
    return NonnegativityResult("undecided", certs, reduced)


# ---------------------------------------------------------------------------
# quadratics

@dataclass(frozen=True)
class QuadraticDecomposition:
    """``f = alpha (sum x_i)^2 + beta sum_{i<j} (x_j - x_i)^2``."""

    alpha: Fraction
    beta: Fraction
    n: int

    @property
    def nonnegative(self) -> bool:
        return self.alpha >= 0 and self.beta >= 0

    def reconstruct(self) -> Polynomial:
        n = self.n
        xs = [Polynomial.variable(n, i + 1) for i in range(n)]
        total = Polynomial.zero(n)
        for x in xs:
            total = total + x
        spread = Polynomial.zero(n)
        for i in range(n):
            for j in range(i + 1, n):
                d = xs[j] - xs[i]
                spread = spread + d * d
        return total * total * self.alpha + spread * self.beta


def decompose_symmetric_quadratic(f: Polynomial, n: int | None = None) -> QuadraticDecomposition:
    n = f.n if n is None else n
    if f.n != n:
        raise ValueError(f"polynomial has {f.n} variables, expected {n}")
    if not f.is_zero() and (f.degree != 2 or not f.is_homogeneous()):
        raise ValueError("expected a homogeneous quadratic")
    _check_symmetric([f])
    sq = [0] * n
    sq[0] = 2
    a = Fraction(f.coefficient(sq))
    if n == 1:
        return QuadraticDecomposition(a, Fraction(0), 1)
    cross = [0] * n
    cross[0] = cross[1] = 1
    b = Fraction(f.coefficient(cross))
    beta = (a - b / 2) / n
    alpha = beta + b / 2
    return QuadraticDecomposition(alpha, beta, n)
