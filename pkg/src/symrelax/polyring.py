"""Exact multivariate polynomials with permutation actions.

Polynomials live in ``Q[x1, ..., xn]`` and keep their coefficients as
:class:`fractions.Fraction`.  Floating point coefficients are tolerated (the
cyclic-group bases of :mod:`symrelax.symadapt` need them for general ``n``) but
every operation used by the symmetric-group machinery stays exact.

Terms are iterated in graded lexicographic order with ``x1 > x2 > ... > xn``,
which is also the printing order.
"""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from numbers import Rational as _RationalABC
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

Monomial = tuple[int, ...]
Partition = tuple[int, ...]
Coeff = Union[Fraction, float]

__all__ = [
    "Coeff",
    "Monomial",
    "OrbitBasisPolynomial",
    "Partition",
    "Polynomial",
    "PolynomialError",
    "Shift",
    "act",
    "elementary_symmetric",
    "expand",
    "grlex_key",
    "is_invariant",
    "monomial_orbit",
    "orbit_size",
    "orbit_sum",
    "parse_polynomial",
    "power_sum",
    "reynolds",
    "substitute_rpartition",
    "to_orbit_basis",
    "to_power_sums",
]


class PolynomialError(ValueError):
    """Raised for malformed polynomial input or incompatible operands."""


def _coerce(c) -> Coeff:
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int) or isinstance(c, _RationalABC):
        return Fraction(c)
    if isinstance(c, float):
        return c
    raise TypeError(f"unsupported coefficient type {type(c).__name__}")


def grlex_key(m: Monomial) -> tuple:
    """Sort key; larger keys come first in graded-lex order."""
    return (sum(m), m)


class Polynomial:
    """Immutable sparse polynomial in ``n`` variables.

    >>> p = Polynomial.variable(2, 1) + Polynomial.variable(2, 2)
    >>> str(p ** 2)
    'x1^2 + 2*x1*x2 + x2^2'
    """

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Monomial, object] | None = None):
        if n < 0:
            raise PolynomialError("number of variables must be nonnegative")
        clean: dict[Monomial, Coeff] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n or any(e < 0 for e in mono):
                raise PolynomialError(f"bad exponent vector {mono} for n={n}")
            c = _coerce(c)
            if c != 0:
                clean[mono] = clean.get(mono, 0) + c
                if clean[mono] == 0:
                    del clean[mono]
        self.n = n
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict[Monomial, Coeff]) -> Polynomial:
        # trusted constructor: caller guarantees clean terms
        obj = cls.__new__(cls)
        obj.n = n
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, n: int, c=1) -> Polynomial:
        return cls(n, {(0,) * n: c})

    @classmethod
    def zero(cls, n: int) -> Polynomial:
        return cls._raw(n, {})

    @classmethod
    def variable(cls, n: int, i: int) -> Polynomial:
        """The variable ``x_i`` (1-based) in ``n`` variables."""
        if not 1 <= i <= n:
            raise PolynomialError(f"variable x{i} out of range for n={n}")
        e = [0] * n
        e[i - 1] = 1
        return cls._raw(n, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exponents: Sequence[int], c=1) -> Polynomial:
        return cls(len(exponents), {tuple(exponents): c})

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> Polynomial:
        return parse_polynomial(text, n)

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[Monomial, Coeff]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, Coeff]]:
        """Terms in graded-lex order (leading term first)."""
        for m in sorted(self._terms, key=grlex_key, reverse=True):
            yield m, self._terms[m]

    def monomials(self) -> list[Monomial]:
        return [m for m, _ in self.items()]

    def coefficient(self, mono: Sequence[int]) -> Coeff:
        return self._terms.get(tuple(mono), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._terms.values())

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(m) for m in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def constant_term(self) -> Coeff:
        return self._terms.get((0,) * self.n, Fraction(0))

    def variables_used(self) -> list[int]:
        """1-based indices of the variables that occur."""
        used = set()
        for m in self._terms:
            used.update(i + 1 for i, e in enumerate(m) if e)
        return sorted(used)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: Polynomial) -> None:
        if self.n != other.n:
            raise PolynomialError(f"variable-count mismatch: {self.n} vs {other.n}")

    def _lift(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.n, other)

    def __add__(self, other) -> Polynomial:
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v == 0:
                out.pop(m, None)
            else:
                out[m] = v
        return Polynomial._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw(self.n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> Polynomial:
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        return (-self) + other

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            try:
                c = _coerce(other)
            except TypeError:
                return NotImplemented
            if c == 0:
                return Polynomial.zero(self.n)
            return Polynomial._raw(self.n, {m: v * c for m, v in self._terms.items()})
        self._check(other)
        out: dict[Monomial, Coeff] = defaultdict(int)
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                out[tuple(a + b for a, b in zip(m1, m2))] += c1 * c2
        return Polynomial._raw(self.n, {m: c for m, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __truediv__(self, other) -> Polynomial:
        c = _coerce(other)
        if isinstance(c, Fraction):
            return self * (1 / c)
        return self * (1.0 / c)

    def __pow__(self, k: int) -> Polynomial:
        if not isinstance(k, int) or k < 0:
            raise PolynomialError("exponent must be a nonnegative integer")
        result = Polynomial.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.n == other.n and self._terms == other._terms
        try:
            return self == Polynomial.constant(self.n, other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    # -- evaluation and substitution -------------------------------------
    def __call__(self, point: Sequence) -> Coeff:
        if len(point) != self.n:
            raise PolynomialError(f"expected {self.n} coordinates, got {len(point)}")
        total = 0
        for m, c in self._terms.items():
            t = c
            for x, e in zip(point, m):
                if e:
                    t = t * x**e
            total = total + t
        return total

    def compose(self, subs: Sequence[Polynomial]) -> Polynomial:
        """Substitute ``x_i -> subs[i-1]``; all substitutes share one ring."""
        if len(subs) != self.n:
            raise PolynomialError(f"need {self.n} substitutes, got {len(subs)}")
        if not subs:
            return self
        target = subs[0].n
        for s in subs:
            if s.n != target:
                raise PolynomialError("substitutes live in different rings")
        powers: dict[tuple[int, int], Polynomial] = {}

        def pw(i: int, e: int) -> Polynomial:
            if (i, e) not in powers:
                powers[(i, e)] = subs[i] ** e
            return powers[(i, e)]

        out = Polynomial.zero(target)
        for m, c in self._terms.items():
            t = Polynomial.constant(target, c)
            for i, e in enumerate(m):
                if e:
                    t = t * pw(i, e)
            out = out + t
        return out

    def derivative(self, i: int) -> Polynomial:
        """Partial derivative with respect to ``x_i`` (1-based)."""
        out: dict[Monomial, Coeff] = {}
        for m, c in self._terms.items():
            e = m[i - 1]
            if e:
                mm = list(m)
                mm[i - 1] -= 1
                out[tuple(mm)] = c * e
        return Polynomial._raw(self.n, out)

    def map_coefficients(self, fn: Callable[[Coeff], Coeff]) -> Polynomial:
        return Polynomial(self.n, {m: fn(c) for m, c in self._terms.items()})

    def rename(self, n: int, mapping: Sequence[int]) -> Polynomial:
        """Move variable ``x_i`` to ``x_{mapping[i-1]}`` in an ``n``-variable ring."""
        out: dict[Monomial, Coeff] = {}
        for m, c in self._terms.items():
            e = [0] * n
            for i, k in enumerate(m):
                if k:
                    e[mapping[i] - 1] += k
            out[tuple(e)] = out.get(tuple(e), 0) + c
        return Polynomial(n, out)

    # -- printing ---------------------------------------------------------
    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self.n}, {format_polynomial(self)!r})"


# ---------------------------------------------------------------------------
# text grammar

def _format_coeff(c: Coeff) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return format(c, ".17g")


def _format_monomial(m: Monomial, names: Sequence[str] | None = None) -> str:
    parts = []
    for i, e in enumerate(m):
        if e:
            name = names[i] if names else f"x{i + 1}"
            parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial, names: Sequence[str] | None = None) -> str:
    """Canonical text: graded-lex order, reduced fractions, ``*`` and ``^``."""
    if p.is_zero():
        return "0"
    out = []
    for k, (m, c) in enumerate(p.items()):
        neg = c < 0
        mag = -c if neg else c
        mono = _format_monomial(m, names)
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+)|x(\d+)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, toks = 0, []
    text = text.rstrip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise PolynomialError(f"cannot parse polynomial at {text[pos:]!r}")
        num, var, op = mt.groups()
        if num is not None:
            toks.append(("num", num))
        elif var is not None:
            toks.append(("var", var))
        else:
            toks.append(("op", "^" if op == "**" else op))
        pos = mt.end()
    return toks


class _Parser:
    def __init__(self, toks: list[tuple[str, str]], n: int):
        self.toks = toks
        self.i = 0
        self.n = n

    def peek(self) -> tuple[str, str] | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise PolynomialError("unexpected end of polynomial")
        self.i += 1
        return tok

    def expr(self) -> Polynomial:
        acc = self.term()
        while (tok := self.peek()) and tok in (("op", "+"), ("op", "-")):
            self.take()
            rhs = self.term()
            acc = acc + rhs if tok[1] == "+" else acc - rhs
        return acc

    def term(self) -> Polynomial:
        acc = self.unary()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                acc = acc * self.unary()
            elif tok == ("op", "/"):
                self.take()
                d = self.unary()
                if d.degree > 0 or d.is_zero():
                    raise PolynomialError("division only by nonzero constants")
                acc = acc / d.constant_term()
            elif tok is not None and (tok[0] in ("num", "var") or tok == ("op", "(")):
                acc = acc * self.unary()
            else:
                return acc

    def unary(self) -> Polynomial:
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            return -self.unary()
        if tok == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num" or not val.isdigit():
                raise PolynomialError("exponents must be nonnegative integers")
            base = base ** int(val)
        return base

    def atom(self) -> Polynomial:
        kind, val = self.take()
        if kind == "num":
            return Polynomial.constant(self.n, Fraction(val))
        if kind == "var":
            return Polynomial.variable(self.n, int(val))
        if val == "(":
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise PolynomialError("unbalanced parentheses")
            return inner
        raise PolynomialError(f"unexpected token {val!r}")


def parse_polynomial(text: str, n: int | None = None) -> Polynomial:
    """Parse text such as ``"3/2*x1^2*x2 - x3 + 7"``.

    If ``n`` is omitted the ring is sized by the largest variable index.
    """
    toks = _tokenize(text)
    if not toks:
        raise PolynomialError("empty polynomial")
    used = max((int(v) for k, v in toks if k == "var"), default=0)
    if n is None:
        n = max(used, 1)
    elif used > n:
        raise PolynomialError(f"x{used} used but ring has only {n} variables")
    parser = _Parser(toks, n)
    result = parser.expr()
    if parser.peek() is not None:
        raise PolynomialError(f"trailing input near {parser.peek()[1]!r}")
    return result


# ---------------------------------------------------------------------------
# group actions

@dataclass(frozen=True)
class Shift:
    """Cyclic shift ``x_i -> x_{i+k mod n}``."""

    k: int = 1

    def images(self, n: int) -> tuple[int, ...]:
        return tuple((i + self.k) % n + 1 for i in range(n))


def _images(sigma, n: int) -> tuple[int, ...]:
    if isinstance(sigma, Shift):
        return sigma.images(n)
    imgs = tuple(int(s) for s in sigma)
    if sorted(imgs) != list(range(1, n + 1)):
        raise PolynomialError(f"{imgs} is not a permutation of 1..{n}")
    return imgs


def act(sigma, p: Polynomial) -> Polynomial:
    """Apply ``p -> p^sigma``, sending ``x_i`` to ``x_{sigma(i)}``.

    ``sigma`` is a one-line permutation (``sigma[i-1]`` is the image of ``i``)
    or a :class:`Shift`.
    """
    if not isinstance(sigma, Shift) and len(sigma) != p.n:
        raise PolynomialError(f"permutation of {len(sigma)} points acting on {p.n} variables")
    imgs = _images(sigma, p.n)
    out: dict[Monomial, Coeff] = {}
    for m, c in p._terms.items():
        e = [0] * p.n
        for i, k in enumerate(m):
            e[imgs[i] - 1] = k
        out[tuple(e)] = c
    return Polynomial._raw(p.n, out)


def _multiset_permutations(values: Sequence[int]) -> Iterator[tuple[int, ...]]:
    counts = Counter(values)
    keys = sorted(counts, reverse=True)
    n = len(values)
    buf = [0] * n

    def rec(pos: int) -> Iterator[tuple[int, ...]]:
        if pos == n:
            yield tuple(buf)
            return
        for k in keys:
            if counts[k]:
                counts[k] -= 1
                buf[pos] = k
                yield from rec(pos + 1)
                counts[k] += 1

    yield from rec(0)


def monomial_orbit(m: Monomial) -> list[Monomial]:
    """All distinct rearrangements of an exponent vector, in decreasing lex order."""
    return list(_multiset_permutations(m))


def orbit_size(m: Sequence[int]) -> int:
    """Size of the S_n-orbit of ``x^m``: ``n! / prod(multiplicity!)``."""
    size = math.factorial(len(m))
    for c in Counter(m).values():
        size //= math.factorial(c)
    return size


def orbit_sum(n: int, lam: Sequence[int]) -> Polynomial:
    """Monomial symmetric polynomial ``m_lambda`` (sum over the orbit)."""
    lam = tuple(lam)
    if len(lam) > n:
        raise PolynomialError(f"partition {lam} has more than {n} parts")
    padded = lam + (0,) * (n - len(lam))
    return Polynomial._raw(n, {m: Fraction(1) for m in _multiset_permutations(padded)})


def power_sum(n: int, j: int) -> Polynomial:
    if j == 0:
        return Polynomial.constant(n, n)
    return orbit_sum(n, (j,))


def elementary_symmetric(n: int, j: int) -> Polynomial:
    if j > n:
        return Polynomial.zero(n)
    return orbit_sum(n, (1,) * j)


def _cyclic_orbit(m: Monomial) -> list[Monomial]:
    return [m[-k:] + m[:-k] if k else m for k in range(len(m))]


def reynolds(p: Polynomial, group: str = "sn") -> Polynomial:
    """Group average ``(1/|G|) sum_sigma p^sigma`` for ``group`` in {"sn", "cn"}.

    The symmetric group is handled orbit by orbit; the cyclic group by
    summing the ``n`` shifts.
    """
    group = group.lower()
    if group == "cn":
        n = p.n
        out: dict[Monomial, Coeff] = defaultdict(int)
        for m, c in p._terms.items():
            for mm in _cyclic_orbit(m):
                out[mm] += c / n if isinstance(c, float) else c * Fraction(1, n)
        return Polynomial._raw(p.n, {m: c for m, c in out.items() if c != 0})
    if group != "sn":
        raise PolynomialError(f"unknown group {group!r}")
    per_orbit: dict[Monomial, Coeff] = defaultdict(int)
    for m, c in p._terms.items():
        per_orbit[tuple(sorted(m, reverse=True))] += c
    out = {}
    for key, c in per_orbit.items():
        if c == 0:
            continue
        w = c / orbit_size(key) if isinstance(c, float) else c * Fraction(1, orbit_size(key))
        for mm in _multiset_permutations(key):
            out[mm] = w
    return Polynomial._raw(p.n, out)


def is_invariant(p: Polynomial, group: str = "sn") -> bool:
    """Check ``p^sigma == p`` on the group generators."""
    n = p.n
    if n <= 1:
        return True
    group = group.lower()
    if group == "cn":
        return act(Shift(1), p) == p
    if group != "sn":
        raise PolynomialError(f"unknown group {group!r}")
    swap = (2, 1) + tuple(range(3, n + 1))
    return act(swap, p) == p and act(Shift(1), p) == p


# ---------------------------------------------------------------------------
# invariant bases

@dataclass(frozen=True)
class OrbitBasisPolynomial:
    """An S_n-invariant polynomial as ``sum_lambda c_lambda * m_lambda``."""

    n: int
    coeffs: Mapping[Partition, Coeff]

    def items(self) -> list[tuple[Partition, Coeff]]:
        return sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"{_format_coeff(c)}*m{list(lam)}" for lam, c in self.items())


def to_orbit_basis(p: Polynomial) -> OrbitBasisPolynomial:
    if not is_invariant(p, "sn"):
        raise PolynomialError("polynomial is not S_n-invariant")
    coeffs: dict[Partition, Coeff] = {}
    for m, c in p._terms.items():
        if list(m) == sorted(m, reverse=True):
            coeffs[tuple(e for e in m if e)] = c
    return OrbitBasisPolynomial(p.n, coeffs)


def expand(q: OrbitBasisPolynomial) -> Polynomial:
    out = Polynomial.zero(q.n)
    for lam, c in q.coeffs.items():
        out = out + orbit_sum(q.n, lam) * c
    return out


def substitute_rpartition(p: Polynomial, omega: Sequence[int]) -> Polynomial:
    """Set the first ``omega[0]`` variables to ``T1``, the next ``omega[1]`` to ``T2``, ...

    Returns a polynomial in ``len(omega)`` variables.
    """
    omega = tuple(omega)
    if any(w <= 0 for w in omega) or sum(omega) != p.n:
        raise PolynomialError(f"{omega} is not an r-partition of {p.n}")
    blocks = []
    for j, w in enumerate(omega):
        blocks.extend([j] * w)
    r = len(omega)
    out: dict[Monomial, Coeff] = defaultdict(int)
    for m, c in p._terms.items():
        e = [0] * r
        for i, k in enumerate(m):
            e[blocks[i]] += k
        out[tuple(e)] += c
    return Polynomial._raw(r, {m: c for m, c in out.items() if c != 0})


def lift_rpartition(omega: Sequence[int], t: Sequence) -> list:
    """Repeat ``t[j]`` exactly ``omega[j]`` times, in coordinate order."""
    pt = []
    for w, v in zip(omega, t):
        pt.extend([v] * w)
    return pt


@lru_cache(maxsize=None)
def _elementary_in_power_sums(j: int, nvars: int) -> Polynomial:
    """``e_j`` as a polynomial in ``p_1..p_nvars`` via Newton's identities."""
    if j == 0:
        return Polynomial.constant(nvars, 1)
    acc = Polynomial.zero(nvars)
    for i in range(1, j + 1):
        term = _elementary_in_power_sums(j - i, nvars) * Polynomial.variable(nvars, i)
        acc = acc + term if i % 2 == 1 else acc - term
    return acc * Fraction(1, j)


def _to_elementary(p: Polynomial) -> Polynomial:
    """Rewrite a symmetric ``p`` as a polynomial in ``e_1..e_n``."""
    n = p.n
    e_polys = [elementary_symmetric(n, j) for j in range(1, n + 1)]
    result: dict[Monomial, Coeff] = {}
    rest = p
    while not rest.is_zero():
        lead = max(rest._terms)  # lex order
        c = rest._terms[lead]
        if list(lead) != sorted(lead, reverse=True):
            raise PolynomialError("polynomial is not symmetric")
        expo = tuple(lead[i] - (lead[i + 1] if i + 1 < n else 0) for i in range(n))
        result[expo] = result.get(expo, 0) + c
        prod = Polynomial.constant(n, c)
        for j, k in enumerate(expo):
            if k:
                prod = prod * e_polys[j] ** k
        rest = rest - prod
    return Polynomial(n, result)


def to_power_sums(p: Polynomial) -> Polynomial:
    """Express a symmetric ``p`` as ``gamma(p_1, ..., p_D)`` with ``D = min(deg p, n)``.

    Variable ``x_j`` of the result stands for the power sum ``p_j``.  For
    ``deg p <= n`` the representation is unique.
    """
    if not is_invariant(p, "sn"):
        raise PolynomialError("polynomial is not symmetric")
    d = max(p.degree, 0)
    D = max(min(d, p.n), 1)
    in_e = _to_elementary(p)
    subs = [_elementary_in_power_sums(j, D) if j <= D else Polynomial.zero(D)
            for j in range(1, p.n + 1)]
    return in_e.compose(subs)


def power_sums_substitution(n: int, D: int) -> list[Polynomial]:
    """``[p_1(x), ..., p_D(x)]`` for composing power-sum expressions back."""
    return [power_sum(n, j) for j in range(1, D + 1)]


def random_polynomial(n: int, degree: int, rng, density: float = 0.5,
                      coeff_range: int = 5) -> Polynomial:
    """Random integer-coefficient polynomial (test and demo helper)."""
    terms = {}
    for m in monomials_up_to(n, degree):
        if rng.random() < density:
            c = int(rng.integers(-coeff_range, coeff_range + 1))
            if c:
                terms[m] = c
    return Polynomial(n, terms)


def monomials_up_to(n: int, degree: int) -> list[Monomial]:
    """All exponent vectors of total degree <= ``degree``, graded-lex ascending."""
    out = []
    for d in range(degree + 1):
        out.extend(monomials_of_degree(n, d))
    return out


def monomials_of_degree(n: int, d: int) -> list[Monomial]:
    """Exponent vectors of degree exactly ``d`` in increasing lex order."""
    if n == 0:
        return [()] if d == 0 else []
    out = []

    def rec(prefix: list[int], left: int, slots: int) -> None:
        if slots == 1:
            out.append(tuple(prefix + [left]))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e, slots - 1)

    rec([], d, n)
    return out


def sum_polys(polys: Iterable[Polynomial], n: int) -> Polynomial:
    acc = Polynomial.zero(n)
    for q in polys:
        acc = acc + q
    return acc
