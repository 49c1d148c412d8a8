"""SDP problem model: affine linear forms, PSD blocks and equalities."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "LinearForm",
    "PsdBlock",
    "SdpError",
    "SdpProblem",
    "SdpSolution",
    "format_key",
    "lower_to_sdp",
    "variable_sort_key",
]


class SdpError(ValueError):
    """Malformed problem or violated solver precondition."""


def format_key(key: Hashable) -> str:
    """Printable name of a moment variable: ``y_21`` for ``(2, 1)``."""
    if isinstance(key, tuple) and all(isinstance(x, int) for x in key):
        if all(0 <= x < 10 for x in key):
            return "y_" + "".join(map(str, key))
        return "y_(" + ",".join(map(str, key)) + ")"
    return f"y[{key}]"


def variable_sort_key(key: Hashable):
    """Degree first, then reverse-lex: ``(2,)`` precedes ``(1, 1)``."""
    if isinstance(key, tuple) and all(isinstance(x, int) for x in key):
        return (0, sum(key), tuple(-x for x in key), len(key))
    return (1, 0, (), str(key))


class LinearForm:
    """Affine map ``constant + sum_k coeff_k * y_k`` over hashable keys."""

    __slots__ = ("terms", "constant")

    def __init__(self, terms: Mapping[Hashable, object] | None = None, constant=0):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}
        self.constant = constant

    @classmethod
    def var(cls, key: Hashable, coeff=1) -> LinearForm:
        return cls({key: coeff})

    def __add__(self, other) -> LinearForm:
        if not isinstance(other, LinearForm):
            return LinearForm(self.terms, self.constant + other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return LinearForm(terms, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> LinearForm:
        return LinearForm({k: -v for k, v in self.terms.items()}, -self.constant)

    def __sub__(self, other) -> LinearForm:
        return self + (-other)

    def __rsub__(self, other) -> LinearForm:
        return (-self) + other

    def __mul__(self, c) -> LinearForm:
        if isinstance(c, LinearForm):
            raise SdpError("product of two linear forms is not linear")
        return LinearForm({k: v * c for k, v in self.terms.items()}, self.constant * c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearForm):
            return not self.terms and self.constant == other
        return self.terms == other.terms and self.constant == other.constant

    def __hash__(self) -> int:
        return hash((frozenset(self.terms.items()), self.constant))

    def is_constant(self) -> bool:
        return not self.terms

    def is_zero(self) -> bool:
        return not self.terms and self.constant == 0

    def keys(self) -> list[Hashable]:
        return sorted(self.terms, key=variable_sort_key)

    def evaluate(self, values: Mapping[Hashable, float]) -> float:
        return float(self.constant) + sum(float(v) * values[k] for k, v in self.terms.items())

    def __str__(self) -> str:
        parts = []
        for k in self.keys():
            v = self.terms[k]
            name = format_key(k)
            mag = -v if v < 0 else v
            body = name if mag == 1 else f"{_fmt(mag)}*{name}"
            parts.append(("- " if v < 0 else "+ ") + body)
        if self.constant != 0 or not parts:
            c = self.constant
            parts.insert(0, ("- " if c < 0 else "+ ") + _fmt(-c if c < 0 else c))
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    __repr__ = __str__


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return format(v, ".12g") if isinstance(v, float) else str(v)


@dataclass
class PsdBlock:
    """``S(y) = F0 + sum_i y_i F[i]``, required positive semidefinite."""

    F0: np.ndarray
    F: np.ndarray  # shape (nvar, d, d)
    label: str = ""

    @property
    def dim(self) -> int:
        return self.F0.shape[0]

    def evaluate(self, y: np.ndarray) -> np.ndarray:
        return self.F0 + np.tensordot(y, self.F, axes=1)


@dataclass
class SdpProblem:
    """Minimize ``c @ y + c0`` subject to PSD blocks and ``A y + a0 = 0``."""

    c: np.ndarray
    blocks: list[PsdBlock]
    eq_A: np.ndarray
    eq_a0: np.ndarray
    c0: float = 0.0
    var_names: tuple = ()

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        nvar = self.c.size
        self.eq_A = np.asarray(self.eq_A, dtype=float).reshape(-1, nvar)
        self.eq_a0 = np.asarray(self.eq_a0, dtype=float).reshape(-1)
        if self.eq_A.shape[0] != self.eq_a0.size:
            raise SdpError("equality matrix and offset sizes differ")
        for b in self.blocks:
            b.F0 = np.asarray(b.F0, dtype=float)
            b.F = np.asarray(b.F, dtype=float).reshape(nvar, b.F0.shape[0], b.F0.shape[0])
            if not np.array_equal(b.F0, b.F0.T) or not np.array_equal(b.F, b.F.transpose(0, 2, 1)):
                raise SdpError(f"block {b.label!r} is not symmetric")
        if not self.var_names:
            self.var_names = tuple(f"y{i + 1}" for i in range(nvar))
        if len(self.var_names) != nvar:
            raise SdpError("variable names do not match the variable count")

    @property
    def var_count(self) -> int:
        return self.c.size

    @property
    def block_sizes(self) -> list[int]:
        return [b.dim for b in self.blocks]

    @property
    def total_psd_dim(self) -> int:
        return sum(self.block_sizes)

    def objective(self, y: np.ndarray) -> float:
        return float(self.c @ y + self.c0)

    def block_values(self, y: np.ndarray) -> list[np.ndarray]:
        return [b.evaluate(y) for b in self.blocks]

    def equality_residual(self, y: np.ndarray) -> np.ndarray:
        return self.eq_A @ y + self.eq_a0

    def same_data(self, other: SdpProblem, rtol: float = 0.0, atol: float = 0.0) -> bool:
        """Structural and numeric equality (names ignored)."""
        if self.var_count != other.var_count or self.block_sizes != other.block_sizes:
            return False
        if self.eq_A.shape != other.eq_A.shape:
            return False
        close = lambda a, b: np.allclose(a, b, rtol=rtol, atol=atol)  # noqa: E731
        if not (close(self.c, other.c) and close(self.c0, other.c0)):
            return False
        if not (close(self.eq_A, other.eq_A) and close(self.eq_a0, other.eq_a0)):
            return False
        return all(close(a.F0, b.F0) and close(a.F, b.F) for a, b in zip(self.blocks, other.blocks))


@dataclass
class SdpSolution:
    status: str  # optimal | near_optimal | infeasible | unbounded | max_iter
    values: np.ndarray
    block_matrices: list[np.ndarray]
    objective_value: float
    duality_gap: float
    dual_objective: float = float("nan")
    primal_infeasibility: float = float("nan")
    dual_infeasibility: float = float("nan")
    iterations: int = 0
    dual_matrices: list[np.ndarray] = field(default_factory=list)
    message: str = ""
    var_names: tuple = ()

    @property
    def optimal(self) -> bool:
        return self.status in ("optimal", "near_optimal")

    def value_of(self, name) -> float:
        return float(self.values[self.var_names.index(name)])

    def as_dict(self) -> dict:
        return {name: float(v) for name, v in zip(self.var_names, self.values)}

    def min_eigenvalue(self) -> float:
        return min((float(np.linalg.eigvalsh(m)[0]) for m in self.block_matrices if m.size),
                   default=0.0)


def _to_float(v) -> float:
    return float(v)


def lower_to_sdp(objective: LinearForm,
                 blocks: Sequence[tuple[str, Sequence[Sequence[LinearForm]]]],
                 equalities: Iterable[LinearForm] = (),
                 var_order: Sequence[Hashable] | None = None) -> SdpProblem:
    """Turn symbolic matrices of linear forms into numeric data.

    Variables are every key that occurs anywhere, ordered by ``var_order`` if
    given (unlisted keys are appended) and by :func:`variable_sort_key`
    otherwise.
    """
    equalities = [e for e in equalities if not e.is_zero()]
    keys: set = set(objective.terms)
    for _, mat in blocks:
        for row in mat:
            for entry in row:
                keys.update(entry.terms)
    for e in equalities:
        keys.update(e.terms)
    order = list(var_order or [])
    seen = set(order)
    order.extend(k for k in sorted(keys - seen, key=variable_sort_key))
    index = {k: i for i, k in enumerate(order)}
    nvar = len(order)

    c = np.zeros(nvar)
    for k, v in objective.terms.items():
        c[index[k]] += _to_float(v)
    psd = []
    for label, mat in blocks:
        d = len(mat)
        F0 = np.zeros((d, d))
        F = np.zeros((nvar, d, d))
        for i in range(d):
            if len(mat[i]) != d:
                raise SdpError(f"block {label!r} is not square")
            for j in range(d):
                entry = mat[i][j]
                if entry != mat[j][i]:
                    raise SdpError(f"block {label!r} is not symmetric at ({i}, {j})")
                F0[i, j] = _to_float(entry.constant)
                for k, v in entry.terms.items():
                    F[index[k], i, j] = _to_float(v)
        psd.append(PsdBlock(F0, F, str(label)))
    A = np.zeros((len(equalities), nvar))
    a0 = np.zeros(len(equalities))
    for r, e in enumerate(equalities):
        a0[r] = _to_float(e.constant)
        for k, v in e.terms.items():
            A[r, index[k]] = _to_float(v)
    return SdpProblem(c, psd, A, a0, _to_float(objective.constant), tuple(order))
