"""Symmetry-adapted moment and localizing matrices for S_n and C_n.

Moment variables are indexed by orbit representatives of monomials: for the
symmetric group ``y_lam = L(x^lam)`` for a partition ``lam``; for the cyclic
group ``y_a = L(x^a)`` with ``a`` the lexicographically largest rotation.
Because the functional ``L`` is invariant, this is the value of ``L`` on any
monomial of the orbit, so block entries come out with the integer
coefficients of the textbook examples (``L((x1+x2+x3)^2) = 3 y_2 + 6 y_11``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence


from .polyring import Monomial, Partition, Polynomial, is_invariant, monomials_up_to
from .sdpcore.moments import MomentRelaxation, RelaxationOrderError, half_ceil, minimal_order
from .sdpcore.problem import LinearForm
from .symcomb import (
    dominates,
    exponent_classes,
    generalized_specht,
    hook_length_count,
    kostka,
    partitions,
    semistandard_tableaux,
    superstandard,
)

__all__ = [
    "BlockRelaxation",
    "BlockStructure",
    "Constraint",
    "InvarianceError",
    "SymBlock",
    "block_sizes",
    "build_relaxation",
    "cyclic_basis",
    "cyclic_key",
    "cyclic_riesz",
    "localizing_block",
    "moment_block",
    "moment_variable_count",
    "sym_basis",
    "symmetric_riesz",
]

Matrix = list[list[LinearForm]]


class InvarianceError(ValueError):
    pass


@dataclass(frozen=True)
class SymBlock:
    label: object
    reps: tuple[Polynomial, ...]
    sources: tuple = ()

    @property
    def size(self) -> int:
        return len(self.reps)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(r.degree for r in self.reps)

    @property
    def dimension(self) -> int:
        """Dimension of the irreducible representation carried by the block."""
        if isinstance(self.label, tuple):
            return hook_length_count(self.label)
        return 1


@dataclass(frozen=True)
class BlockStructure:
    group: str
    n: int
    k: int
    blocks: tuple[SymBlock, ...]

    def sizes(self) -> dict:
        return {b.label: b.size for b in self.blocks}

    @property
    def variable_count(self) -> int:
        return moment_variable_count(self.n, self.k, self.group)


# ---------------------------------------------------------------------------
# moment indexing

def _partition_key(m: Sequence[int]) -> Partition:
    return tuple(sorted((e for e in m if e), reverse=True))


def symmetric_riesz(p: Polynomial) -> LinearForm:
    """``L(p)`` for an S_n-invariant functional, in the variables ``y_lam``."""
    terms: dict[Partition, object] = {}
    const = Fraction(0)
    for m, c in p.items():
        key = _partition_key(m)
        if key:
            terms[key] = terms.get(key, 0) + c
        else:
            const += c
    return LinearForm(terms, const)


def cyclic_key(m: Sequence[int]) -> tuple[int, ...]:
    m = tuple(m)
    return max(m[j:] + m[:j] for j in range(len(m))) if m else m


def cyclic_riesz(p: Polynomial) -> LinearForm:
    """``L(p)`` for a C_n-invariant functional, keyed by canonical rotations."""
    terms: dict = {}
    const = 0
    for m, c in p.items():
        if any(m):
            key = cyclic_key(m)
            terms[key] = terms.get(key, 0) + c
        else:
            const += c
    return LinearForm(terms, const)


def _indexer(group: str) -> Callable[[Polynomial], LinearForm]:
    group = group.lower()
    if group == "sn":
        return symmetric_riesz
    if group == "cn":
        return cyclic_riesz
    raise InvarianceError(f"unknown group {group!r}")


def moment_variable_count(n: int, k: int, group: str = "sn") -> int:
    """Number of non-constant moment variables of order ``k``."""
    if group.lower() == "sn":
        return sum(len(partitions(d, n)) for d in range(1, 2 * k + 1))
    return len({cyclic_key(m) for m in monomials_up_to(n, 2 * k) if any(m)})


# ---------------------------------------------------------------------------
# symmetric group

def block_sizes(n: int, k: int) -> dict[Partition, int]:
    """``kappa_lam = sum_{d <= k} sum_{beta} K_{lam, mu(beta)}``; zero blocks dropped."""
    sizes: dict[Partition, int] = {}
    for lam in partitions(n, n):
        total = 0
        for d in range(k + 1):
            for cls in exponent_classes(n, d):
                mu = cls.shape_mu
                if dominates(lam, mu):
                    total += kostka(lam, mu)
        if total:
            sizes[lam] = total
    return sizes


def sym_basis(n: int, k: int) -> BlockStructure:
    """Generalized Specht representatives, one per irreducible copy in ``R[X]_{<=k}``.

    Ordered by degree, then exponent class (reverse-lex), then tableau.
    """
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    lams = partitions(n, n)
    reps: dict[Partition, list] = {lam: [] for lam in lams}
    srcs: dict[Partition, list] = {lam: [] for lam in lams}
    for d in range(k + 1):
        for cls in exponent_classes(n, d):
            mu = cls.shape_mu
            for lam in lams:
                if not dominates(lam, mu):
                    continue
                t = superstandard(lam)
                for T in semistandard_tableaux(lam, mu):
                    reps[lam].append(generalized_specht(t, T, cls.parts_b))
                    srcs[lam].append((cls.beta, str(T)))
    blocks = tuple(SymBlock(lam, tuple(reps[lam]), tuple(srcs[lam])) for lam in lams if reps[lam])
    return BlockStructure("sn", n, k, blocks)


def moment_block(reps: Sequence[Polynomial], n: int | None = None, group: str = "sn") -> Matrix:
    """Entries ``L(s_v s_w)`` in the invariant moment variables."""
    return localizing_block(None, reps, n, group)


def localizing_block(g: Polynomial | None, reps: Sequence[Polynomial], n: int | None = None,
                     group: str = "sn", k: int | None = None) -> Matrix:
    """Entries ``L(s_v s_w g)`` over representatives of degree ``<= k - ceil(deg g / 2)``."""
    index = _indexer(group)
    if g is not None and not is_invariant(g, group):
        raise InvarianceError(f"constraint {g} is not {group}-invariant")
    if k is not None and g is not None:
        cap = k - half_ceil(g.degree)
        reps = [r for r in reps if r.degree <= cap]
    size = len(reps)
    mat: Matrix = [[None] * size for _ in range(size)]  # type: ignore[list-item]
    for i in range(size):
        for j in range(i, size):
            prod = reps[i] * reps[j]
            if g is not None:
                prod = prod * g
            entry = index(prod)
            if group == "cn":
                entry = _clean(entry)
            mat[i][j] = entry
            mat[j][i] = entry
    return mat


def _clean(form: LinearForm, tol: float = 1e-12) -> LinearForm:
    terms = {k: v for k, v in form.terms.items() if not (isinstance(v, float) and abs(v) < tol)}
    c = form.constant
    if isinstance(c, float) and abs(c) < tol:
        c = 0
    return LinearForm(terms, c)


# ---------------------------------------------------------------------------
# cyclic group

_EXACT_COS = {
    1: [Fraction(1)],
    2: [Fraction(1), Fraction(-1)],
    3: [Fraction(1), Fraction(-1, 2), Fraction(-1, 2)],
    4: [Fraction(1), Fraction(0), Fraction(-1), Fraction(0)],
    6: [Fraction(1), Fraction(1, 2), Fraction(-1, 2), Fraction(-1), Fraction(-1, 2), Fraction(1, 2)],
}
# sine values, rescaled by 2/sqrt(3) for n in {3, 6} so they stay rational
_EXACT_SIN = {
    1: [Fraction(0)],
    2: [Fraction(0), Fraction(0)],
    3: [Fraction(0), Fraction(1), Fraction(-1)],
    4: [Fraction(0), Fraction(1), Fraction(0), Fraction(-1)],
    6: [Fraction(0), Fraction(1), Fraction(1), Fraction(0), Fraction(-1), Fraction(-1)],
}


def _trig(n: int, a: int):
    a %= n
    if n in _EXACT_COS:
        return _EXACT_COS[n][a], _EXACT_SIN[n][a]
    ang = 2 * math.pi * a / n
    return math.cos(ang), math.sin(ang)


def _rotate(m: Monomial, j: int) -> Monomial:
    # x^m under x_i -> x_{i+j}: exponent of x_{i+j} becomes m_i
    n = len(m)
    j %= n
    return m[-j:] + m[:-j] if j else m


def _cyclic_orbits(n: int, k: int) -> list[Monomial]:
    reps = []
    seen = set()
    for m in monomials_up_to(n, k):
        key = cyclic_key(m)
        if key not in seen:
            seen.add(key)
            reps.append(key)
    return sorted(reps, key=lambda m: (sum(m), tuple(-e for e in m)))


def _projection(m: Monomial, l: int, part: str) -> Polynomial:
    n = len(m)
    stab = sum(1 for j in range(n) if _rotate(m, j) == m)
    terms: dict[Monomial, object] = {}
    for j in range(n):
        cs, sn = _trig(n, l * j)
        w = cs if part == "re" else sn
        if w != 0:
            mm = _rotate(m, j)
            terms[mm] = terms.get(mm, 0) + w
    scale = Fraction(1, stab) if n in _EXACT_COS else 1.0 / stab
    return Polynomial(n, terms) * scale


def cyclic_basis(n: int, k: int) -> BlockStructure:
    """Real symmetry-adapted basis of ``R[X]_{<=k}`` under the cyclic group.

    Characters ``l`` with ``2l = 0 mod n`` give real blocks.  A complex pair
    ``(l, n-l)`` contributes the real and imaginary parts of the projections;
    when their cross Gram block vanishes identically they become two separate
    blocks (always the case at multiplicity one), otherwise one joint block.
    """
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    orbits = _cyclic_orbits(n, k)
    blocks: list[SymBlock] = []
    for l in range(n // 2 + 1):
        real_char = (2 * l) % n == 0
        res, ims, srcs = [], [], []
        for m in orbits:
            size = len({_rotate(m, j) for j in range(n)})
            if (l * size) % n:
                continue
            re = _projection(m, l, "re")
            if not re.is_zero():
                res.append(re)
            if not real_char:
                im = _projection(m, l, "im")
                ims.append(im)
            srcs.append(m)
        if not res and not ims:
            continue
        if real_char:
            blocks.append(SymBlock(f"chi{l}", tuple(res), tuple(srcs)))
            continue
        cross = localizing_block(None, [*res, *ims], n, "cn")
        m_l = len(res)
        zero = all(cross[i][m_l + j].is_zero() for i in range(m_l) for j in range(len(ims)))
        if zero:
            blocks.append(SymBlock(f"chi{l}.re", tuple(res), tuple(srcs)))
            blocks.append(SymBlock(f"chi{l}.im", tuple(ims), tuple(srcs)))
        else:
            blocks.append(SymBlock(f"chi{l}", tuple(res + ims), tuple(srcs + srcs)))
    _check_orthogonal(blocks)
    return BlockStructure("cn", n, k, tuple(blocks))


def _check_orthogonal(blocks: Sequence[SymBlock], tol: float = 1e-12) -> None:
    # representatives of different blocks must be orthogonal coefficient vectors
    flat = [(bi, r) for bi, b in enumerate(blocks) for r in b.reps]
    for a in range(len(flat)):
        for b in range(a + 1, len(flat)):
            if flat[a][0] == flat[b][0]:
                continue
            pa, pb = flat[a][1], flat[b][1]
            dot = sum(float(c) * float(pb.coefficient(m)) for m, c in pa.items())
            if abs(dot) > tol:
                raise ArithmeticError("cyclic basis lost orthogonality")


# ---------------------------------------------------------------------------
# relaxation

@dataclass(frozen=True)
class Constraint:
    poly: Polynomial
    kind: str = "ge0"  # "ge0" or "eq0"

    def __post_init__(self):
        if self.kind not in ("ge0", "eq0"):
            raise ValueError(f"constraint kind must be 'ge0' or 'eq0', not {self.kind!r}")


def as_constraints(items) -> list[Constraint]:
    out = []
    for it in items or ():
        if isinstance(it, Constraint):
            out.append(it)
        elif isinstance(it, Polynomial):
            out.append(Constraint(it))
        else:
            poly, kind = it
            out.append(Constraint(poly, kind))
    return out


@dataclass
class BlockRelaxation(MomentRelaxation):
    structure: BlockStructure | None = None

    @property
    def variable_count(self) -> int:
        return len(self.variables())


def _equality_moments(h: Polynomial, n: int, k: int, group: str) -> list[LinearForm]:
    index = _indexer(group)
    deg = 2 * (k - half_ceil(h.degree))
    if deg < 0:
        return []
    if group == "sn":
        mults = [Polynomial.monomial(lam + (0,) * (n - len(lam)))
                 for d in range(deg + 1) for lam in partitions(d, n)]
    else:
        mults = [Polynomial.monomial(m) for m in _cyclic_orbits(n, deg)]
    forms = []
    for u in mults:
        form = index(u * h)
        if group == "cn":
            form = _clean(form)
        if not form.is_zero():
            forms.append(form)
    return forms


def build_relaxation(f: Polynomial, constraints=(), n: int | None = None, k: int | None = None,
                     group: str = "sn") -> BlockRelaxation:
    """Symmetry-adapted relaxation of ``min f`` over ``g >= 0`` / ``h = 0`` constraints.

    Inequalities become localizing blocks (same representatives, truncated
    by degree); an equality ``h`` becomes ``L(u h) = 0`` for invariant
    monomial classes ``u`` of degree ``<= 2(k - ceil(deg h / 2))``.
    """
    group = group.lower()
    n = f.n if n is None else n
    cons = as_constraints(constraints)
    for poly in [f] + [c.poly for c in cons]:
        if poly.n != n:
            raise InvarianceError(f"polynomial in {poly.n} variables, expected {n}")
        if not is_invariant(poly, group):
            raise InvarianceError(f"{poly} is not {group}-invariant")
    k0 = minimal_order(f, [c.poly for c in cons])
    if k is None:
        k = k0
    if k < k0:
        raise RelaxationOrderError(k, k0)
    structure = sym_basis(n, k) if group == "sn" else cyclic_basis(n, k)
    index = _indexer(group)
    moment_blocks = [(str(b.label), moment_block(b.reps, n, group)) for b in structure.blocks]
    loc, eqs = [], []
    for idx, c in enumerate(cons):
        if c.kind == "eq0":
            eqs.extend(_equality_moments(c.poly, n, k, group))
            continue
        for b in structure.blocks:
            mat = localizing_block(c.poly, b.reps, n, group, k)
            if mat:
                loc.append((f"g{idx + 1}:{b.label}", mat))
    return BlockRelaxation(index(f), moment_blocks, loc, eqs, k,
                           {"route": "symadapt", "group": group, "n": n}, structure)
