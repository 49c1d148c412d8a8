import math
import os

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DATA
from symrelax.polyring import Polynomial, parse_polynomial, power_sum
from symrelax.sdpcore import (
    NOT_SOS_MESSAGE,
    LinearForm,
    PsdBlock,
    RelaxationOrderError,
    SdpError,
    SdpProblem,
    SolverOptions,
    dense_relaxation,
    export_sdpa,
    is_sos,
    localizing_matrix,
    lower_to_sdp,
    moment_matrix,
    parse_sdpa,
    pmi_localizing_blocks,
    read_sdpa,
    riesz,
    solve,
)
from symrelax.sdpcore.problem import format_key


def one():
    return LinearForm({}, 1)


# --- linear forms and lowering

def test_linear_form_algebra():
    a, b = LinearForm.var("a"), LinearForm.var("b")
    f = a * 2 - b + 3
    assert f.evaluate({"a": 1, "b": 5}) == 0
    assert (f - f).is_zero()
    assert LinearForm({}, 4).is_constant()
    assert f == a * 2 + (-b) + 3
    assert hash(f) == hash(a * 2 - b + 3)


def test_format_key():
    assert format_key((2, 1)) == "y_21"


def test_lower_rejects_asymmetric():
    a = LinearForm.var("a")
    with pytest.raises(SdpError):
        lower_to_sdp(a, [("m", [[one(), a], [a * 2, one()]])])


def test_lower_variable_order():
    a, b = LinearForm.var("a"), LinearForm.var("b")
    prob = lower_to_sdp(a + b, [("m", [[one(), a], [a, b]])], [], ["b", "a"])
    assert prob.var_names == ("b", "a")
    assert prob.block_sizes == [2]


# --- solver

def test_solver_two_by_two():
    y = LinearForm.var("y")
    prob = lower_to_sdp(y, [("m", [[one(), y], [y, one()]])])
    sol = solve(prob)
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(-1, abs=1e-6)
    assert abs(sol.objective_value - sol.dual_objective) < 1e-5


def test_solver_with_equality():
    # min y1 s.t. [[1, y1], [y1, y2]] PSD, y2 = 4  ->  -2
    y1, y2 = LinearForm.var("y1"), LinearForm.var("y2")
    prob = lower_to_sdp(y1, [("m", [[one(), y1], [y1, y2]])], [y2 - 4])
    sol = solve(prob, feas_tol=1e-9, gap_tol=1e-9)
    assert sol.optimal
    assert sol.objective_value == pytest.approx(-2, abs=1e-7)
    assert sol.value_of("y2") == pytest.approx(4, abs=1e-9)


def test_solver_infeasible():
    y = LinearForm.var("y")
    prob = lower_to_sdp(y, [("a", [[y - 1]]), ("b", [[-y]])])
    assert solve(prob).status == "infeasible"


def test_solver_unbounded():
    y = LinearForm.var("y")
    prob = lower_to_sdp(y, [("a", [[1 - y]])])
    assert solve(prob).status == "unbounded"


def test_solver_inconsistent_equalities():
    y = LinearForm.var("y")
    prob = lower_to_sdp(y, [("a", [[y + 5]])], [y - 1, y - 2])
    assert solve(prob).status == "infeasible"


def test_solver_dimension_cap():
    y = LinearForm.var("y")
    mat = [[y if i == j else LinearForm() for j in range(5)] for i in range(5)]
    prob = lower_to_sdp(y, [("m", mat)])
    with pytest.raises(SdpError):
        solve(prob, max_psd_dim=4)


@pytest.mark.parametrize("direction", ["hkm", "nt"])
def test_solver_directions(direction):
    # Hankel: min s2 s.t. [[3, 3], [3, s2]] PSD -> 3
    s2 = LinearForm.var("s2")
    prob = lower_to_sdp(s2, [("h", [[LinearForm({}, 3), LinearForm({}, 3)], [LinearForm({}, 3), s2]])])
    sol = solve(prob, direction=direction)
    assert sol.optimal and sol.objective_value == pytest.approx(3, abs=1e-6)


def random_feasible_lmi(rng, nvar, sizes):
    blocks = []
    for d in sizes:
        F = rng.normal(size=(nvar, d, d))
        F = (F + F.transpose(0, 2, 1)) / 2
        B = rng.normal(size=(d, d))
        blocks.append(PsdBlock(B @ B.T + np.eye(d), F))  # y = 0 strictly feasible
    # c in the cone of A*(X) for X = I keeps the problem bounded
    c = sum(b.F.reshape(nvar, -1) @ np.eye(b.dim).reshape(-1) for b in blocks)
    return SdpProblem(c, blocks, np.zeros((0, nvar)), np.zeros(0))


def test_solver_random_duality(rng):
    for _ in range(5):
        prob = random_feasible_lmi(rng, 3, [3, 2])
        sol = solve(prob, feas_tol=1e-9, gap_tol=1e-9)
        assert sol.optimal
        assert abs(sol.objective_value - sol.dual_objective) < 1e-6 * (1 + abs(sol.objective_value))
        assert sol.min_eigenvalue() > -1e-8


def test_solver_deterministic(rng):
    prob = random_feasible_lmi(rng, 4, [3, 3])
    a, b = solve(prob), solve(prob)
    assert np.array_equal(a.values, b.values) and a.iterations == b.iterations


# --- SDPA

def golden(name):
    with open(os.path.join(DATA, name), encoding="ascii") as fh:
        return fh.read()


def tiny_lmi():
    y1, y2 = LinearForm.var("y1"), LinearForm.var("y2")
    return lower_to_sdp(y1 + 0.5, [("lmi", [[one(), y1], [y1, y2]])], [y2 - 1.0], ["y1", "y2"])


def test_sdpa_golden_tiny():
    assert export_sdpa(tiny_lmi()) == golden("tiny_lmi.dat-s")


def test_sdpa_parse_restores_equalities():
    prob = read_sdpa(os.path.join(DATA, "tiny_lmi.dat-s"))
    assert prob.same_data(tiny_lmi())
    assert prob.eq_A.tolist() == [[0.0, 1.0]] and prob.eq_a0.tolist() == [-1.0]


def random_problem(rng):
    nvar = int(rng.integers(1, 5))
    sizes = [int(s) for s in rng.integers(1, 4, size=rng.integers(1, 3))]
    blocks = []
    for d in sizes:
        F0 = rng.normal(size=(d, d))
        F = rng.normal(size=(nvar, d, d)) * (rng.random((nvar, d, d)) < 0.6)
        blocks.append(PsdBlock((F0 + F0.T) / 2, (F + F.transpose(0, 2, 1)) / 2))
    neq = int(rng.integers(0, 3))
    return SdpProblem(rng.normal(size=nvar), blocks, rng.normal(size=(neq, nvar)),
                      rng.normal(size=neq), float(rng.normal()))


def test_sdpa_roundtrip_random(rng):
    for _ in range(10):
        prob = random_problem(rng)
        assert parse_sdpa(export_sdpa(prob)).same_data(prob)


def test_sdpa_rejects_garbage():
    with pytest.raises(SdpError):
        parse_sdpa("1\n")
    with pytest.raises(SdpError):
        parse_sdpa("1\n1\n2\n1\n0 3 1 1 1\n")


def test_sdpa_parses_foreign_punctuation():
    text = '"comment\n1 =mdim\n1 =nblocks\n{2}\n{1.0}\n0 1 1 1 -1\n0 1 2 2 -1\n1 1 1 2 1\n'
    prob = parse_sdpa(text.replace("=mdim", "").replace("=nblocks", ""))
    sol = solve(prob)
    assert sol.objective_value == pytest.approx(-1, abs=1e-6)


# --- moment machinery

def test_moment_matrix_shape():
    basis, M = moment_matrix(2, 1)
    assert basis == [(0, 0), (0, 1), (1, 0)]  # graded lex, ascending
    assert str(M[1][2]) == "y_11"
    assert M[0][0] == one()


def test_localizing_truncation():
    g = parse_polynomial("1 - x1^2 - x2^2", 2)
    L = localizing_matrix(g, 2)
    assert len(L) == 3
    assert localizing_matrix(parse_polynomial("x1^4", 2), 1) is None


def test_pmi_block_structure():
    x = Polynomial.variable(1, 1)
    G = [[Polynomial.constant(1, 1), x], [x, x * x + 1]]
    blk = pmi_localizing_blocks(G, 2)
    assert len(blk) == 4  # 2 basis monomials x 2 entries
    with pytest.raises(ValueError):
        pmi_localizing_blocks([[x, x], [x * 2, x]], 1)


def test_dense_relaxation_order_error():
    f = power_sum(2, 4)
    with pytest.raises(RelaxationOrderError) as exc:
        dense_relaxation(f, [], [], 1)
    assert exc.value.k0 == 2


def test_dense_relaxation_ball():
    # min x1 + x2 on the unit disc is -sqrt(2), exact at order 1
    f = parse_polynomial("x1 + x2", 2)
    g = parse_polynomial("1 - x1^2 - x2^2", 2)
    res = dense_relaxation(f, [g], [], 1).solve()
    assert res.value == pytest.approx(-math.sqrt(2), abs=1e-6)


def test_dense_relaxation_motzkin_region():
    # x^4 - x^2 on the line: minimum -1/4
    f = parse_polynomial("x1^4 - x1^2", 1)
    assert dense_relaxation(f, [], [], 2).solve().value == pytest.approx(-0.25, abs=1e-6)


def test_riesz_linear():
    p = parse_polynomial("2*x1^2 - 3*x1*x2 + 5", 2)
    form = riesz(p)
    assert form.constant == 5
    assert form.terms == {(2, 0): 2, (1, 1): -3}


# --- SOS

def test_sos_positive_cases():
    for text in ["x1^2 + x2^2", "(x1 - x2)^2 + x1^4", "x1^4 + 4*x1^3*x2 + 6*x1^2*x2^2 + 4*x1*x2^3 + x2^4"]:
        res = is_sos(parse_polynomial(text, 2))
        assert res.feasible, text
        assert res.certificate.error < 1e-6
        diff = res.certificate.reconstruct() - parse_polynomial(text, 2)
        assert max((abs(float(c)) for _, c in diff.items()), default=0.0) < 1e-6


def test_sos_negative_cases():
    res = is_sos(parse_polynomial("-x1^2", 1))
    assert not res.feasible and NOT_SOS_MESSAGE in res.message
    # x^3 has odd degree
    assert not is_sos(parse_polynomial("x1^3", 1)).feasible


def test_motzkin_is_not_sos():
    m = parse_polynomial("x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1", 2)
    assert not is_sos(m).feasible


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_sum_of_squared_linear_forms_is_sos(coef):
    a, b, c = coef
    lin = parse_polynomial(f"{a}*x1 + {b}*x2 + {c}", 2)
    assert is_sos(lin * lin + parse_polynomial("x1^2", 2)).feasible
