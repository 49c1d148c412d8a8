"""Partitions, Young tableaux, Kostka numbers and Specht polynomials."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Iterator, Sequence

from .polyring import Monomial, Partition, Polynomial, _multiset_permutations, grlex_key

__all__ = [
    "ExponentShape",
    "GeneralizedTableau",
    "Tableau",
    "TableauError",
    "conjugate",
    "dominates",
    "exponent_classes",
    "generalized_specht",
    "hook_length_count",
    "kostka",
    "partitions",
    "primitive",
    "row_symmetrize",
    "semistandard_tableaux",
    "shape_of",
    "specht_polynomial",
    "standard_tableaux",
    "superstandard",
]


class TableauError(ValueError):
    pass


def _check_partition(lam: Sequence[int]) -> Partition:
    lam = tuple(int(x) for x in lam)
    if any(x <= 0 for x in lam) or any(a < b for a, b in zip(lam, lam[1:])):
        raise TableauError(f"{lam} is not a partition")
    return lam


def partitions(d: int, max_parts: int | None = None) -> list[Partition]:
    """Partitions of ``d`` with at most ``max_parts`` parts, reverse-lex order.

    >>> partitions(4, 2)
    [(4,), (3, 1), (2, 2)]
    """
    if max_parts is None:
        max_parts = d
    out: list[Partition] = []

    def rec(left: int, cap: int, prefix: tuple[int, ...]) -> None:
        if left == 0:
            out.append(prefix)
            return
        if len(prefix) == max_parts:
            return
        for part in range(min(left, cap), 0, -1):
            rec(left - part, part, prefix + (part,))

    rec(d, d, ())
    return out


def dominates(lam: Sequence[int], mu: Sequence[int]) -> bool:
    """``lam`` dominates ``mu``: every prefix sum of ``lam`` is at least that of ``mu``."""
    if sum(lam) != sum(mu):
        raise TableauError(f"weights differ: {sum(lam)} vs {sum(mu)}")
    a = b = 0
    for i in range(max(len(lam), len(mu))):
        a += lam[i] if i < len(lam) else 0
        b += mu[i] if i < len(mu) else 0
        if a < b:
            return False
    return True


def conjugate(lam: Sequence[int]) -> Partition:
    lam = tuple(lam)
    if not lam:
        return ()
    return tuple(sum(1 for x in lam if x > j) for j in range(lam[0]))


def hook_length_count(lam: Sequence[int]) -> int:
    """Number of standard tableaux of shape ``lam`` (hook length formula)."""
    lam = tuple(lam)
    conj = conjugate(lam)
    hooks = 1
    for i, row in enumerate(lam):
        for j in range(row):
            hooks *= row - j + conj[j] - i - 1
    return math.factorial(sum(lam)) // hooks


@dataclass(frozen=True)
class ExponentShape:
    """Grouping of an exponent vector by equal entries.

    ``parts_b[j]`` is the value occurring ``shape_mu[j]`` times.
    """

    beta: Monomial
    parts_b: tuple[int, ...]
    shape_mu: Partition

    def index_sets(self) -> list[tuple[int, ...]]:
        """The 1-based positions holding each value of ``parts_b``."""
        return [tuple(i + 1 for i, e in enumerate(self.beta) if e == b) for b in self.parts_b]


def shape_of(beta: Sequence[int], n: int | None = None) -> ExponentShape:
    beta = tuple(beta)
    if n is not None:
        if len(beta) > n:
            raise TableauError(f"{beta} has more than {n} components")
        beta = beta + (0,) * (n - len(beta))
    counts = Counter(beta)
    # most frequent value first, ties to the smaller value
    order = sorted(counts, key=lambda b: (-counts[b], b))
    return ExponentShape(beta, tuple(order), tuple(counts[b] for b in order))


@dataclass(frozen=True)
class Tableau:
    """A filling of a Young diagram by ``1..n``, each used once."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        _check_partition([len(r) for r in rows])
        flat = sorted(x for r in rows for x in r)
        if flat != list(range(1, len(flat) + 1)):
            raise TableauError(f"{list(map(list, rows))} does not use 1..n exactly once")

    @property
    def shape(self) -> Partition:
        return tuple(len(r) for r in self.rows)

    @property
    def n(self) -> int:
        return sum(self.shape)

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(r[j] for r in self.rows if j < len(r)) for j in range(len(self.rows[0]))] \
            if self.rows else []

    def is_standard(self) -> bool:
        rows_ok = all(all(a < b for a, b in zip(r, r[1:])) for r in self.rows)
        cols_ok = all(all(a < b for a, b in zip(c, c[1:])) for c in self.columns())
        return rows_ok and cols_ok

    def reading_word(self) -> tuple[int, ...]:
        return tuple(x for r in self.rows for x in r)

    def __str__(self) -> str:
        return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in self.rows) + "]"


@dataclass(frozen=True)
class GeneralizedTableau:
    """A filling with repeats allowed; ``content[i-1]`` entries equal ``i``."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        _check_partition([len(r) for r in rows])
        if any(x <= 0 for r in rows for x in r):
            raise TableauError("entries must be positive")

    @property
    def shape(self) -> Partition:
        return tuple(len(r) for r in self.rows)

    @property
    def content(self) -> tuple[int, ...]:
        c = Counter(x for r in self.rows for x in r)
        top = max(c, default=0)
        return tuple(c.get(i, 0) for i in range(1, top + 1))

    def columns(self) -> list[tuple[int, ...]]:
        if not self.rows:
            return []
        return [tuple(r[j] for r in self.rows if j < len(r)) for j in range(len(self.rows[0]))]

    def is_semistandard(self) -> bool:
        rows_ok = all(all(a <= b for a, b in zip(r, r[1:])) for r in self.rows)
        cols_ok = all(all(a < b for a, b in zip(c, c[1:])) for c in self.columns())
        return rows_ok and cols_ok

    def reading_word(self) -> tuple[int, ...]:
        return tuple(x for r in self.rows for x in r)

    def __str__(self) -> str:
        return "[" + ",".join("[" + ",".join(map(str, r)) + "]" for r in self.rows) + "]"


def _ssyt_rows(lam: Partition, mu: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    # place value v as a horizontal strip of size mu[v-1] on top of the current shape
    depth = len(lam)

    def strips(inner: list[int], size: int) -> Iterator[list[int]]:
        # new row lengths: inner[i] <= new[i] <= min(lam[i], inner[i-1]) with sum increase = size
        def rec(i: int, left: int, acc: list[int]) -> Iterator[list[int]]:
            if i == depth:
                if left == 0:
                    yield list(acc)
                return
            hi = lam[i] if i == 0 else min(lam[i], inner[i - 1])
            for new in range(inner[i], hi + 1):
                add = new - inner[i]
                if add > left:
                    break
                acc.append(new)
                yield from rec(i + 1, left - add, acc)
                acc.pop()

        yield from rec(0, size, [])

    def fill(v: int, inner: list[int], rows: list[list[int]]) -> Iterator[tuple[tuple[int, ...], ...]]:
        if v > len(mu):
            if inner == list(lam):
                yield tuple(tuple(r) for r in rows)
            return
        for new in strips(inner, mu[v - 1]):
            added = [rows[i] + [v] * (new[i] - inner[i]) for i in range(depth)]
            yield from fill(v + 1, new, added)

    yield from fill(1, [0] * depth, [[] for _ in range(depth)])


def semistandard_tableaux(lam: Sequence[int], mu: Sequence[int]) -> list[GeneralizedTableau]:
    """Semistandard tableaux of shape ``lam`` and content ``mu``, ordered by reading word."""
    lam = _check_partition(lam)
    mu = tuple(mu)
    if sum(lam) != sum(mu):
        raise TableauError(f"weights differ: {sum(lam)} vs {sum(mu)}")
    found = [GeneralizedTableau(rows) for rows in _ssyt_rows(lam, mu)]
    return sorted(found, key=lambda t: t.reading_word())


@lru_cache(maxsize=None)
def _kostka(lam: Partition, mu: tuple[int, ...]) -> int:
    return sum(1 for _ in _ssyt_rows(lam, mu))


def kostka(lam: Sequence[int], mu: Sequence[int]) -> int:
    lam = _check_partition(lam)
    if sum(lam) != sum(mu):
        raise TableauError(f"weights differ: {sum(lam)} vs {sum(mu)}")
    return _kostka(lam, tuple(mu))


def superstandard(lam: Sequence[int]) -> Tableau:
    """Row-wise filling of ``lam`` by ``1..n``."""
    lam = _check_partition(lam)
    rows, nxt = [], 1
    for part in lam:
        rows.append(tuple(range(nxt, nxt + part)))
        nxt += part
    return Tableau(tuple(rows))


def standard_tableaux(lam: Sequence[int]) -> list[Tableau]:
    """All standard tableaux of shape ``lam``; the first is the row-wise filling."""
    lam = _check_partition(lam)
    n = sum(lam)
    found: list[Tableau] = []

    def rec(v: int, rows: list[list[int]]) -> None:
        if v > n:
            found.append(Tableau(tuple(tuple(r) for r in rows)))
            return
        for i in range(len(lam)):
            if len(rows[i]) < lam[i] and (i == 0 or len(rows[i - 1]) > len(rows[i])):
                rows[i].append(v)
                rec(v + 1, rows)
                rows[i].pop()

    rec(1, [[] for _ in lam])
    return sorted(found, key=lambda t: t.reading_word())


def _vandermonde(n: int, idx: Sequence[int]) -> Polynomial:
    out = Polynomial.constant(n, 1)
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            out = out * (Polynomial.variable(n, idx[b]) - Polynomial.variable(n, idx[a]))
    return out


def specht_polynomial(t: Tableau) -> Polynomial:
    """Product over the columns of ``t`` of the Vandermonde ``prod_{i<l} (X_{C(l)} - X_{C(i)})``."""
    if not isinstance(t, Tableau):
        t = Tableau(t)
    out = Polynomial.constant(t.n, 1)
    for col in t.columns():
        out = out * _vandermonde(t.n, col)
    return out


def _sign(perm: Sequence[int]) -> int:
    seen, sgn = [False] * len(perm), 1
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sgn = -sgn
    return sgn


def _alternant(n: int, idx: Sequence[int], expos: Sequence[int]) -> dict[Monomial, int]:
    """``det[X_{idx[c]}^{expos[r]}]`` as a term dictionary."""
    out: dict[Monomial, int] = {}
    if len(set(expos)) < len(expos):
        return out
    k = len(idx)
    for perm in permutations(range(k)):
        e = [0] * n
        for r in range(k):
            e[idx[perm[r]] - 1] += expos[r]
        key = tuple(e)
        out[key] = out.get(key, 0) + _sign(perm)
    return {m: c for m, c in out.items() if c}


def _row_rearrangements(T: GeneralizedTableau) -> Iterator[tuple[tuple[int, ...], ...]]:
    def rec(i: int, acc: list[tuple[int, ...]]) -> Iterator[tuple[tuple[int, ...], ...]]:
        if i == len(T.rows):
            yield tuple(acc)
            return
        for row in _multiset_permutations(T.rows[i]):
            acc.append(row)
            yield from rec(i + 1, acc)
            acc.pop()

    yield from rec(0, [])


def row_symmetrize(p: Polynomial, blocks: Sequence[Sequence[int]]) -> Polynomial:
    """Average ``p`` over the Young subgroup permuting each index block.

    Works per orbit of exponent vectors, so the group is never enumerated.
    """
    blocks = [tuple(b) for b in blocks]
    per: dict[tuple, Fraction] = defaultdict(Fraction)
    for m, c in p.items():
        key = tuple(tuple(sorted((m[i - 1] for i in b), reverse=True)) for b in blocks)
        per[key] += c
    out: dict[Monomial, Fraction] = {}
    for key, c in per.items():
        if c == 0:
            continue
        choices = [list(_multiset_permutations(vals)) for vals in key]
        size = math.prod(len(ch) for ch in choices)

        def rec(bi: int, e: list[int]) -> None:
            if bi == len(blocks):
                out[tuple(e)] = c / size
                return
            for vals in choices[bi]:
                for pos, v in zip(blocks[bi], vals):
                    e[pos - 1] = v
                rec(bi + 1, e)

        rec(0, [0] * p.n)
    return Polynomial(p.n, out)


def primitive(p: Polynomial) -> Polynomial:
    """Scale an exact polynomial to coprime integers with a positive last grlex term."""
    if p.is_zero():
        return p
    coeffs = [Fraction(c) for _, c in p.items()]
    den = math.lcm(*(c.denominator for c in coeffs))
    nums = [int(c * den) for c in coeffs]
    g = math.gcd(*nums)
    scale = Fraction(den, g)
    if coeffs[-1] < 0:
        scale = -scale
    return p * scale


def generalized_specht(t: Tableau, T: GeneralizedTableau, parts_b: Sequence[int],
                       symmetrize: bool = True, normalize: bool = True) -> Polynomial:
    """Generalized Specht polynomial of the pair ``(t, T)``.

    For each row-rearrangement ``S`` of ``T`` the column alternants
    ``det[X_{C_j(i')}^{b_{S(i, j)}}]`` are multiplied; the products are summed.
    With ``symmetrize`` the sum is then averaged over the row group of ``t``
    (this picks the same fixed vector of the Specht module for every ``T``,
    so the representatives of one isotypic block are directly comparable),
    and ``normalize`` rescales to a primitive integer polynomial.
    """
    if not isinstance(t, Tableau):
        t = Tableau(t)
    if not isinstance(T, GeneralizedTableau):
        T = GeneralizedTableau(T)
    if t.shape != T.shape:
        raise TableauError(f"shape mismatch: {t.shape} vs {T.shape}")
    content = T.content
    if len(parts_b) < len(content):
        raise TableauError("not enough exponent values for the content of T")
    n = t.n
    cols = t.columns()
    total: dict[Monomial, int] = defaultdict(int)
    for rows in _row_rearrangements(T):
        prod: dict[Monomial, int] = {(0,) * n: 1}
        for j, col in enumerate(cols):
            expos = [parts_b[rows[i][j] - 1] for i in range(len(col))]
            alt = _alternant(n, col, expos)
            if not alt:
                prod = {}
                break
            nxt: dict[Monomial, int] = defaultdict(int)
            for m1, c1 in prod.items():
                for m2, c2 in alt.items():
                    nxt[tuple(a + b for a, b in zip(m1, m2))] += c1 * c2
            prod = nxt
        for m, c in prod.items():
            total[m] += c
    p = Polynomial(n, {m: c for m, c in total.items() if c})
    if symmetrize:
        p = row_symmetrize(p, t.rows)
    if normalize:
        p = primitive(p)
    return p


def exponent_classes(n: int, d: int) -> list[ExponentShape]:
    """Exponent vectors of weight ``d`` up to permutation, as partitions padded to ``n``.

    Ordered reverse-lex, matching :func:`partitions`.
    """
    return [shape_of(lam + (0,) * (n - len(lam)), n) for lam in partitions(d, n)]
