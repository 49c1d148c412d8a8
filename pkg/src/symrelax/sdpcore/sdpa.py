"""SDPA sparse (.dat-s) export and import.

SDPA's standard form is ``min c @ x`` subject to ``sum_i x_i F_i - F_0 PSD``.
Our blocks read ``F0 + sum_i y_i F_i``, so the exported ``F_0`` is the
negated constant matrix.  Linear equalities ``A y + a0 = 0`` have no SDPA
counterpart; they are written as a trailing diagonal block holding the pair
``A y + a0 >= 0`` and ``-(A y + a0) >= 0`` per row (epsilon 0).  The header
comments record this so that :func:`parse_sdpa` can restore the equalities.
"""

from __future__ import annotations

import re

import numpy as np

from .problem import PsdBlock, SdpError, SdpProblem

__all__ = ["export_sdpa", "parse_sdpa", "write_sdpa", "read_sdpa"]

_SCHEMA = "symrelax-sdpa 1"


def _num(v: float) -> str:
    return format(float(v), ".17g")


def export_sdpa(problem: SdpProblem) -> str:
    m = problem.var_count
    neq = problem.eq_A.shape[0]
    sizes = [b.dim for b in problem.blocks]
    eq_block = None
    if neq:
        sizes.append(-2 * neq)
        eq_block = len(sizes)
    lines = [
        f"* {_SCHEMA}",
        f"* objective constant: {_num(problem.c0)}",
    ]
    if neq:
        lines.append(f"* equalities: {neq} rows as paired inequalities, epsilon 0, "
                     f"diagonal block {eq_block}")
    else:
        lines.append("* equalities: none")
    lines.append(str(m))
    lines.append(str(len(sizes)))
    lines.append(" ".join(str(s) for s in sizes) if sizes else "0")
    lines.append(" ".join(_num(v) for v in problem.c))

    entries: list[tuple[int, int, int, int, float]] = []
    for bno, blk in enumerate(problem.blocks, start=1):
        mats = [-blk.F0] + [blk.F[i] for i in range(m)]
        for matno, mat in enumerate(mats):
            d = mat.shape[0]
            for i in range(d):
                for j in range(i, d):
                    if mat[i, j] != 0:
                        entries.append((matno, bno, i + 1, j + 1, mat[i, j]))
    if neq:
        for r in range(neq):
            pos, neg = 2 * r + 1, 2 * r + 2
            if problem.eq_a0[r] != 0:
                entries.append((0, eq_block, pos, pos, -problem.eq_a0[r]))
                entries.append((0, eq_block, neg, neg, problem.eq_a0[r]))
            for i in range(m):
                a = problem.eq_A[r, i]
                if a != 0:
                    entries.append((i + 1, eq_block, pos, pos, a))
                    entries.append((i + 1, eq_block, neg, neg, -a))
    entries.sort(key=lambda e: e[:4])
    for matno, bno, i, j, v in entries:
        lines.append(f"{matno} {bno} {i} {j} {_num(v)}")
    return "\n".join(lines) + "\n"


def write_sdpa(problem: SdpProblem, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(export_sdpa(problem))


def parse_sdpa(text: str) -> SdpProblem:
    """Read an SDPA sparse file; restores equalities written by :func:`export_sdpa`."""
    c0 = 0.0
    eq_rows, eq_block = 0, None
    body: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line[0] in "*\"":
            mt = re.match(r"[*\"]\s*objective constant:\s*(\S+)", line)
            if mt:
                c0 = float(mt.group(1))
            mt = re.match(r"[*\"]\s*equalities:\s*(\d+) rows.*diagonal block (\d+)", line)
            if mt:
                eq_rows, eq_block = int(mt.group(1)), int(mt.group(2))
            continue
        body.append(re.sub(r"[,{}()]", " ", line))
    if len(body) < 3:
        raise SdpError("truncated SDPA file")
    try:
        m = int(body[0].split()[0])
        nblocks = int(body[1].split()[0])
        sizes = [int(s) for s in body[2].split()][:nblocks] if nblocks else []
        pos = 3
        cvals: list[float] = []
        while len(cvals) < m:
            cvals.extend(float(v) for v in body[pos].split())
            pos += 1
        entries = [body[k].split() for k in range(pos, len(body))]
    except (ValueError, IndexError) as exc:
        raise SdpError(f"malformed SDPA header: {exc}") from exc

    mats = {}
    for b, s in enumerate(sizes, start=1):
        d = abs(s)
        mats[b] = np.zeros((m + 1, d, d))
    for ent in entries:
        if len(ent) != 5:
            raise SdpError(f"bad SDPA entry line {' '.join(ent)!r}")
        matno, bno, i, j = (int(x) for x in ent[:4])
        v = float(ent[4])
        if not (0 <= matno <= m and bno in mats):
            raise SdpError(f"entry refers to missing matrix or block: {' '.join(ent)}")
        mats[bno][matno, i - 1, j - 1] = v
        mats[bno][matno, j - 1, i - 1] = v

    blocks = []
    A = np.zeros((0, m))
    a0 = np.zeros(0)
    for b, s in enumerate(sizes, start=1):
        data = mats[b]
        if b == eq_block:
            A = np.array([[data[i + 1, 2 * r, 2 * r] for i in range(m)] for r in range(eq_rows)])
            A = A.reshape(eq_rows, m)
            a0 = np.array([-data[0, 2 * r, 2 * r] for r in range(eq_rows)])
            continue
        F0 = -data[0]
        F0 = F0 + 0.0  # normalise negative zeros
        blocks.append(PsdBlock(F0, data[1:].copy(), f"block{b}"))
    return SdpProblem(np.array(cvals), blocks, A, a0, c0)


def read_sdpa(path) -> SdpProblem:
    with open(path, encoding="ascii") as fh:
        return parse_sdpa(fh.read())
