"""Command-line front end.

Problem files are TOML::

    n = 3
    objective = "x1^2 + x2^2 + x3^2"
    symmetry = "sn"            # sn | cn | none

    [[constraints]]
    poly = "3 - x1 - x2 - x3"
    kind = "eq0"               # ge0 | eq0

Every subcommand prints a human-readable report; ``--json`` prints the
machine-readable one instead (``schema_version`` 1, keys sorted, no timing).
Exit codes: 0 success, 2 input or parse error, 3 solver failure, 4 regime or
invariance error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .degredux import degree4_nonnegativity, reduce as reduce_problem, solve_reduced
from .orbitpmi import (
    PowerSumProblem,
    RecoveryError,
    RegimeError,
    closed_form_lower,
    lower_bound_L,
    orbit_pmi_relaxation,
    recover_point,
    upper_bound_U,
)
from .polyring import Polynomial, PolynomialError, format_polynomial, is_invariant, parse_polynomial
from .sdpcore.moments import RelaxationOrderError, dense_relaxation
from .sdpcore.problem import SdpError, format_key
from .sdpcore.sdpa import write_sdpa
from .sdpcore.solver import SolverOptions
from .symadapt import Constraint, InvarianceError, build_relaxation, cyclic_basis, sym_basis
from .symcomb import hook_length_count

SCHEMA_VERSION = 1

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_REGIME = 0, 2, 3, 4


class InputError(ValueError):
    pass


class SolverFailure(RuntimeError):
    pass


@dataclass
class ProblemFile:
    n: int
    objective: Polynomial
    constraints: list[Constraint]
    symmetry: str

    @classmethod
    def load(cls, path) -> ProblemFile:
        try:
            data = tomllib.loads(Path(path).read_text())
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise InputError(f"cannot read problem file {path}: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> ProblemFile:
        try:
            n = int(data["n"])
            obj_text = data["objective"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"problem file needs integer 'n' and string 'objective' ({exc})") from exc
        sym = str(data.get("symmetry", "none")).lower()
        if sym not in ("sn", "cn", "none"):
            raise InputError(f"unknown symmetry {sym!r}")
        try:
            f = parse_polynomial(obj_text, n)
            cons = []
            for item in data.get("constraints", []):
                kind = item.get("kind", "ge0")
                if kind not in ("ge0", "eq0"):
                    raise InputError(f"constraint kind must be ge0 or eq0, got {kind!r}")
                cons.append(Constraint(parse_polynomial(item["poly"], n), kind))
        except (PolynomialError, KeyError) as exc:
            raise InputError(f"parse error: {exc}") from exc
        if sym != "none":
            for p in [f] + [c.poly for c in cons]:
                if not is_invariant(p, sym):
                    raise InvarianceError(f"{format_polynomial(p)} is not {sym}-invariant")
        return cls(n, f, cons, sym)


# ---------------------------------------------------------------------------
# helpers

def _options(args) -> SolverOptions:
    tol = getattr(args, "tol", None)
    if tol is None:
        return SolverOptions(feas_tol=1e-8, gap_tol=1e-8)
    return SolverOptions(feas_tol=tol, gap_tol=tol)


def _jsonable(v):
    if isinstance(v, Fraction):
        return float(v) if v.denominator != 1 else int(v)
    if isinstance(v, float):
        return None if math.isnan(v) else v if math.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):  # numpy scalar
        return _jsonable(v.item())
    return v


def _emit(args, report: dict, text: list[str], elapsed: float) -> None:
    report = dict(report, schema_version=SCHEMA_VERSION)
    if args.json:
        print(json.dumps(_jsonable(report), indent=2, sort_keys=True))
    else:
        print("\n".join(text))
        print(f"time: {elapsed:.3f} s")


def _label(label) -> str:
    if isinstance(label, tuple):
        return "(" + ",".join(map(str, label)) + ")"
    return str(label)


def _structure(n: int, k: int, group: str):
    return sym_basis(n, k) if group == "sn" else cyclic_basis(n, k)


def _structure_rows(s) -> list[dict]:
    rows = []
    for b in s.blocks:
        rows.append({"label": _label(b.label), "size": b.size,
                     "irrep_dim": hook_length_count(b.label) if isinstance(b.label, tuple) else 1})
    return rows


# ---------------------------------------------------------------------------
# commands

def cmd_structure(args) -> int:
    t0 = time.perf_counter()
    group = args.group
    s = _structure(args.n, args.k, group)
    rows = _structure_rows(s)
    report = {"command": "structure", "group": group, "n": args.n, "k": args.k,
              "blocks": rows, "variables": s.variable_count}
    head = "lambda" if group == "sn" else "block"
    text = [f"group {group}, n={args.n}, k={args.k}",
            f"{head:<16}{'kappa':>6}{'f':>6}"]
    text += [f"{r['label']:<16}{r['size']:>6}{r['irrep_dim']:>6}" for r in rows]
    text.append(f"block sizes: {[r['size'] for r in rows]}")
    text.append(f"moment variables: {s.variable_count}")
    if args.compare is not None:
        other = _structure(args.compare, args.k, group)
        orows = _structure_rows(other)
        same = (sorted(r["size"] for r in rows) == sorted(r["size"] for r in orows)
                and s.variable_count == other.variable_count)
        report["compare"] = {"n": args.compare, "blocks": orows,
                             "variables": other.variable_count, "identical": same}
        text.append("")
        text.append(f"{'n=' + str(args.n):<24}{'n=' + str(args.compare):<24}")
        for i in range(max(len(rows), len(orows))):
            a = f"{rows[i]['label']}:{rows[i]['size']}" if i < len(rows) else ""
            b = f"{orows[i]['label']}:{orows[i]['size']}" if i < len(orows) else ""
            text.append(f"{a:<24}{b:<24}")
        text.append(f"{'vars ' + str(s.variable_count):<24}{'vars ' + str(other.variable_count):<24}")
        text.append(f"identical structure: {'yes' if same else 'no'}")
    _emit(args, report, text, time.perf_counter() - t0)
    return EXIT_OK


def _build(prob: ProblemFile, route: str, k: int):
    if route == "symadapt":
        if prob.symmetry == "none":
            raise InvarianceError("route symadapt needs a declared symmetry (sn or cn)")
        return build_relaxation(prob.objective, prob.constraints, prob.n, k, prob.symmetry)
    if route == "orbit":
        if prob.symmetry != "sn":
            raise InvarianceError("route orbit needs symmetry sn")
        return orbit_pmi_relaxation(prob.objective, prob.constraints, prob.n, k)
    ineq = [c.poly for c in prob.constraints if c.kind == "ge0"]
    eq = [c.poly for c in prob.constraints if c.kind == "eq0"]
    return dense_relaxation(prob.objective, ineq, eq, k)


def _orders(args) -> list[int | None]:
    if args.order:
        return sorted(set(args.order))
    return [args.k]


def cmd_relax(args) -> int:
    t0 = time.perf_counter()
    prob = ProblemFile.load(args.file)
    orders = _orders(args)
    if args.export:
        rel = _build(prob, args.route, orders[-1])
        write_sdpa(rel.to_sdp(), args.export)
        report = {"command": "relax", "route": args.route, "order": rel.order,
                  "export": str(args.export), "blocks": rel.to_sdp().block_sizes}
        text = [f"route {args.route}, order {rel.order}: wrote {args.export}",
                f"block sizes: {report['blocks']}"]
        _emit(args, report, text, time.perf_counter() - t0)
        return EXIT_OK
    values, diag, failed = {}, {}, False
    text = [f"route {args.route}"]
    for k in orders:
        rel = _build(prob, args.route, k)
        res = rel.solve(_options(args))
        sol = res.solution
        values[rel.order] = res.value if res.optimal else math.nan
        diag[rel.order] = {"status": res.status, "iterations": sol.iterations,
                           "duality_gap": sol.duality_gap,
                           "primal_infeasibility": sol.primal_infeasibility,
                           "dual_infeasibility": sol.dual_infeasibility,
                           "blocks": rel.to_sdp().block_sizes}
        text.append(f"order {rel.order}: value {res.value:.10g}  status {res.status}  "
                    f"iterations {sol.iterations}  gap {sol.duality_gap:.2e}  "
                    f"blocks {diag[rel.order]['blocks']}")
        failed = failed or not res.optimal
    report = {"command": "relax", "route": args.route, "values": values, "diagnostics": diag}
    _emit(args, report, text, time.perf_counter() - t0)
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_reduce(args) -> int:
    t0 = time.perf_counter()
    prob = ProblemFile.load(args.file)
    if prob.symmetry != "sn":
        raise InvarianceError("reduce needs symmetry sn")
    problems = reduce_problem(prob.objective, prob.constraints, prob.n)
    orders = [k for k in _orders(args) if k is not None]
    if not orders:
        from .sdpcore.moments import minimal_order
        orders = [max(minimal_order(p.objective, [c.poly for c in p.constraints]) for p in problems)]
    rep = solve_reduced(problems, orders, _options(args), jobs=args.jobs)
    per = {",".join(map(str, o.omega)): {"values": o.values, "statuses": o.statuses}
           for o in rep.outcomes}
    report = {"command": "reduce", "r": rep.r, "omegas": [list(w) for w in rep.omegas],
              "per_omega": per, "value": rep.value,
              "best_omega": list(rep.best_omega) if rep.best_omega else None,
              "point": rep.point, "partial": rep.partial, "orders": rep.orders}
    text = [f"r = {rep.r}, |Omega| = {len(rep.omegas)}"]
    for o in rep.outcomes:
        vals = "  ".join(f"k={k}: {v:.10g}" for k, v in sorted(o.values.items()))
        text.append(f"omega {_label(o.omega)}: {vals}")
    text.append(f"minimum: {rep.value:.10g} at omega {_label(rep.best_omega) if rep.best_omega else '-'}")
    if rep.point is not None:
        text.append("point: (" + ", ".join(f"{v:.6g}" for v in rep.point) + ")")
    if rep.partial:
        text.append("warning: some reduced problems failed; the minimum is partial")
    _emit(args, report, text, time.perf_counter() - t0)
    return EXIT_SOLVER if rep.best_omega is None else EXIT_OK


def cmd_check_nonneg4(args) -> int:
    t0 = time.perf_counter()
    prob = ProblemFile.load(args.file)
    res = degree4_nonnegativity(prob.objective, seed=args.seed)
    certs = {",".join(map(str, w)): {"basis": [format_key(b) for b in c.basis],
                                     "error": c.error}
             for w, c in sorted(res.certificates.items())}
    report = {"command": "check-nonneg4", "verdict": res.verdict,
              "reduced": {",".join(map(str, w)): format_polynomial(p)
                          for w, p in sorted(res.reduced.items())},
              "certificates": certs, "witness": res.witness,
              "message": res.summary()}
    text = [f"omega {_label(w)}: {format_polynomial(p)}" for w, p in sorted(res.reduced.items())]
    text.append(res.summary())
    _emit(args, report, text, time.perf_counter() - t0)
    return EXIT_OK


def cmd_powersum(args) -> int:
    t0 = time.perf_counter()
    gamma = [Fraction(g) for g in args.gamma]
    m = args.m if args.m is not None else len(gamma) + 1
    prob = PowerSumProblem(args.n, m, args.q, tuple(gamma))
    prob.check()
    opts = _options(args) if args.tol is not None else None
    report = {"command": "powersum", "n": args.n, "m": m, "q": args.q, "gamma": gamma}
    text = [f"P(n={args.n}, m={m}, q={args.q}, gamma={[str(g) for g in gamma]})"]
    L = U = None
    if prob.lower_regime:
        L = lower_bound_L(prob, options=opts)
        report["L"] = {"value": L.value, "status": L.status}
        text.append(f"L = {L.value:.10g}  ({L.status})")
        if prob.q == prob.m and prob.m % 2 == 0:
            cf = closed_form_lower(prob)
            report["closed_form_lower"] = cf.value
            text.append(f"closed-form lower = {cf.value}")
    if prob.upper_regime:
        U = upper_bound_U(prob, options=opts)
        report["U"] = {"value": U.value, "status": U.status, "p0": U.p0}
        text.append(f"U = {U.value:.10g}  ({U.status}), p0* = {U.p0 if U.p0 is None else f'{U.p0:.10g}'}")
        if U.feasible:
            try:
                point = recover_point(U.p0, U.detail, args.n)
            except RecoveryError as exc:
                raise SolverFailure(str(exc)) from exc
            report["point"] = point
            text.append("point: (" + ", ".join(f"{v:.6g}" for v in point) + ")")
    if L is not None and U is not None and L.feasible and U.feasible:
        ok = L.value <= U.value + 1e-6
        report["sandwich"] = ok
        text.append(f"sandwich L <= U: {'holds' if ok else 'VIOLATED'}")
    _emit(args, report, text, time.perf_counter() - t0)
    failed = any(b is not None and b.status not in ("optimal", "near_optimal", "infeasible") for b in (L, U))
    return EXIT_SOLVER if failed else EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symrelax", description="Symmetry-reduced moment relaxations.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, tol=True):
        p.add_argument("--json", action="store_true", help="print the machine-readable report")
        if tol:
            p.add_argument("--tol", type=float, default=None, help="solver feasibility and gap tolerance")

    p = sub.add_parser("structure", help="block structure of the symmetry-adapted relaxation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--group", choices=["sn", "cn"], default="sn")
    p.add_argument("--compare", type=int, metavar="N2", help="compare with another n")
    common(p, tol=False)
    p.set_defaults(func=cmd_structure)

    p = sub.add_parser("relax", help="build and solve or export a relaxation")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=None, help="relaxation order (default: minimal)")
    p.add_argument("--order", type=int, action="append", help="solve at several orders")
    p.add_argument("--route", choices=["symadapt", "dense", "orbit"], default="symadapt")
    p.add_argument("--export", metavar="PATH", help="write SDPA sparse format instead of solving")
    common(p)
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("reduce", help="degree-principle reduction")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--order", type=int, action="append")
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("check-nonneg4", help="decide nonnegativity of a symmetric quartic")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    common(p, tol=False)
    p.set_defaults(func=cmd_check_nonneg4)

    p = sub.add_parser("powersum", help="bounds for a power-sum problem")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="default: len(gamma) + 1")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--gamma", nargs="+", required=True, help="prescribed power sums p_1..p_{m-1}")
    common(p)
    p.set_defaults(func=cmd_powersum)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, RelaxationOrderError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (RegimeError, InvarianceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (SdpError, SolverFailure) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
