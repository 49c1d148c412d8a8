from math import comb

import numpy as np
import pytest

from symrelax.polyring import Polynomial, parse_polynomial, power_sum, random_polynomial, reynolds
from symrelax.sdpcore import RelaxationOrderError, dense_relaxation, moment_matrix
from symrelax.symadapt import (
    Constraint,
    InvarianceError,
    block_sizes,
    build_relaxation,
    cyclic_basis,
    cyclic_key,
    localizing_block,
    moment_block,
    moment_variable_count,
    sym_basis,
    symmetric_riesz,
)

EXPECTED_M3 = [
    ["1", "3*y_1", "3*y_2", "3*y_11"],
    ["3*y_1", "3*y_2 + 6*y_11", "3*y_3 + 6*y_21", "6*y_21 + 3*y_111"],
    ["3*y_2", "3*y_3 + 6*y_21", "3*y_4 + 6*y_22", "6*y_31 + 3*y_211"],
    ["3*y_11", "6*y_21 + 3*y_111", "6*y_31 + 3*y_211", "3*y_22 + 6*y_211"],
]
EXPECTED_M21 = [
    ["6*y_2 - 6*y_11", "6*y_3 - 6*y_21", "6*y_21 - 6*y_111"],
    ["6*y_3 - 6*y_21", "6*y_4 - 6*y_22", "6*y_31 - 6*y_211"],
    ["6*y_21 - 6*y_111", "6*y_31 - 6*y_211", "6*y_22 - 6*y_211"],
]


def as_strings(M):
    return [[str(e) for e in row] for row in M]


def test_blocks_n3_k2_patterns():
    s = sym_basis(3, 2)
    assert s.sizes() == {(3,): 4, (2, 1): 3}
    assert as_strings(moment_block(s.blocks[0].reps, 3)) == EXPECTED_M3
    assert as_strings(moment_block(s.blocks[1].reps, 3)) == EXPECTED_M21


def test_block_sizes_match_basis():
    for n in range(1, 6):
        for k in range(0, 4):
            s = sym_basis(n, k)
            assert s.sizes() == block_sizes(n, k)


def test_moment_variable_count_n3_k2():
    # partitions of 1..4 with at most three parts
    assert moment_variable_count(3, 2) == 10


@pytest.mark.parametrize("k,ns", [(2, range(4, 9)), (3, range(6, 11))])
def test_stabilization(k, ns):
    sigs = {tuple(sorted(block_sizes(n, k).values())) for n in ns}
    counts = {moment_variable_count(n, k) for n in ns}
    assert len(sigs) == 1 and len(counts) == 1


def test_symmetric_riesz_keys():
    form = symmetric_riesz(parse_polynomial("x1^2*x3 + 5*x2*x3", 3))
    assert form.terms == {(2, 1): 1, (1, 1): 5}


def test_localizing_block_degree_filter():
    s = sym_basis(3, 2)
    g = parse_polynomial("1 - x1^2 - x2^2 - x3^2", 3)
    L = localizing_block(g, s.blocks[0].reps, 3, "sn", 2)
    assert len(L) == 2  # only reps of degree <= 1 survive


# --- cyclic group

def test_c4_block_sizes():
    s = cyclic_basis(4, 1)
    assert [b.size for b in s.blocks] == [2, 1, 1, 1]
    assert str(s.blocks[0].reps[1]) == "x1 + x2 + x3 + x4"


def congruence_residual(n, k, rng):
    s = cyclic_basis(n, k)
    basis, M = moment_matrix(n, k)
    values = {}

    def val(form):
        out = float(form.constant)
        for key, c in form.terms.items():
            ck = cyclic_key(key)
            if ck not in values:
                values[ck] = float(rng.normal())
            out += float(c) * values[ck]
        return out

    dense = np.array([[val(e) for e in row] for row in M])
    reps = [r for b in s.blocks for r in b.reps]
    B = np.array([[float(r.coefficient(m)) for r in reps] for m in basis])
    lhs = B.T @ dense @ B
    rhs = np.zeros_like(lhs)
    pos = 0
    for b in s.blocks:
        blk = moment_block(b.reps, n, "cn")
        d = b.size
        rhs[pos:pos + d, pos:pos + d] = [[val(e) for e in row] for row in blk]
        pos += d
    assert pos == len(basis) == comb(n + k, k)
    return float(np.max(np.abs(lhs - rhs)))


@pytest.mark.parametrize("n,k", [(4, 1), (4, 2), (3, 2), (5, 1), (6, 2), (5, 2)])
def test_cyclic_congruence(n, k, rng):
    assert congruence_residual(n, k, rng) < 1e-10


# --- relaxations

def test_build_relaxation_powersum():
    f = power_sum(3, 2)
    h = Polynomial.constant(3, 3) - power_sum(3, 1)
    rel = build_relaxation(f, [Constraint(h, "eq0")], 3, 1)
    assert rel.solve().value == pytest.approx(3, abs=1e-6)


def test_build_relaxation_errors():
    with pytest.raises(InvarianceError):
        build_relaxation(parse_polynomial("x1", 3), [], 3, 1)
    with pytest.raises(RelaxationOrderError):
        build_relaxation(power_sum(3, 4), [], 3, 1)
    with pytest.raises(InvarianceError):
        build_relaxation(parse_polynomial("x1*x2", 3), [], 3, 1, "cn")


def random_ball_problem(rng, n=3, deg=4):
    f = reynolds(random_polynomial(n, deg, rng))
    g = Polynomial.constant(n, 1) - power_sum(n, 2)
    return f, g


def test_symmetric_matches_dense(rng):
    for _ in range(3):
        f, g = random_ball_problem(rng)
        a = build_relaxation(f, [g], 3, 2).solve().value
        b = dense_relaxation(f, [g], [], 2).solve().value
        assert a == pytest.approx(b, abs=1e-5)


def test_cyclic_matches_dense(rng):
    n = 4
    for _ in range(2):
        f = reynolds(random_polynomial(n, 2, rng), "cn")
        g = Polynomial.constant(n, 1) - power_sum(n, 2)
        a = build_relaxation(f, [g], n, 1, "cn").solve().value
        b = dense_relaxation(f, [g], [], 1).solve().value
        assert a == pytest.approx(b, abs=1e-5)


def test_symmetric_relaxation_is_smaller():
    f, g = power_sum(4, 4), Polynomial.constant(4, 1) - power_sum(4, 2)
    sym = build_relaxation(f, [g], 4, 2)
    dense = dense_relaxation(f, [g], [], 2)
    assert max(sym.to_sdp().block_sizes) < max(dense.to_sdp().block_sizes)
    assert sym.to_sdp().var_count < dense.to_sdp().var_count
