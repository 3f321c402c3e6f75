"""SDPA sparse format (``.dat-s``) export and import.

SDPA's primal form is ``min c'x  s.t.  sum_i F_i x_i - F_0  PSD``.  Our blocks
``h - G(x)`` map to ``F_0 = -h`` and ``F_i = -G_i``.  Equality rows become a
trailing diagonal block holding each row twice, ``a'x - b >= 0`` and
``b - a'x >= 0``; the reader merges such pairs back into equalities.  The
objective constant is carried in a leading comment line.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .sdp import SDPData

_ZERO = 1e-15


def _fmt(v: float) -> str:
    return repr(float(v))


def write_sdpa(data: SDPData, path) -> None:
    n = data.n
    p = data.A.shape[0]
    sizes = list(data.block_sizes)
    header = [f"* polyopt export: {n} variables, {len(sizes)} PSD blocks, {p} equality rows",
              f"* offset {_fmt(data.offset)}"]
    all_sizes = sizes + ([-2 * p] if p else [])
    lines = [str(n), str(len(all_sizes)), " ".join(str(s) for s in all_sizes),
             " ".join(_fmt(v) for v in data.c)]

    def emit(mat: int, blk: int, M: np.ndarray):
        k = M.shape[0]
        for i in range(k):
            for j in range(i, k):
                v = M[i, j]
                if abs(v) > _ZERO:
                    lines.append(f"{mat} {blk} {i + 1} {j + 1} {_fmt(v)}")

    for b, hk in enumerate(data.h, 1):
        emit(0, b, -hk)
    if p:
        eb = len(sizes) + 1
        for r in range(p):
            for sign, pos in ((1.0, 2 * r + 1), (-1.0, 2 * r + 2)):
                if abs(data.b[r]) > _ZERO:
                    lines.append(f"0 {eb} {pos} {pos} {_fmt(sign * data.b[r])}")
    for i in range(n):
        for b, gk in enumerate(data.G, 1):
            emit(i + 1, b, -gk[i])
        if p:
            eb = len(sizes) + 1
            for r in range(p):
                a = data.A[r, i]
                if abs(a) > _ZERO:
                    lines.append(f"{i + 1} {eb} {2 * r + 1} {2 * r + 1} {_fmt(a)}")
                    lines.append(f"{i + 1} {eb} {2 * r + 2} {2 * r + 2} {_fmt(-a)}")
    Path(path).write_text("\n".join(header + lines) + "\n")


def _numbers(line: str) -> list[str]:
    return [tok for tok in re.split(r"[\s,{}()]+", line.strip()) if tok]


def read_sdpa(path) -> SDPData:
    offset = 0.0
    body = []
    for raw in Path(path).read_text().splitlines():
        s = raw.strip()
        if not s:
            continue
        if s[0] in "*\"":
            m = re.match(r"[*\"]\s*offset\s+(\S+)", s)
            if m:
                offset = float(m.group(1))
            continue
        body.append(s)
    n = int(_numbers(body[0])[0])
    nblocks = int(_numbers(body[1])[0])
    sizes = [int(v) for v in _numbers(body[2])[:nblocks]]
    c = np.array([float(v) for v in _numbers(body[3])[:n]])
    F = [np.zeros((n + 1, abs(s), abs(s))) for s in sizes]
    for line in body[4:]:
        mat, blk, i, j, v = _numbers(line)[:5]
        mat, blk, i, j = int(mat), int(blk) - 1, int(i) - 1, int(j) - 1
        F[blk][mat, i, j] = float(v)
        F[blk][mat, j, i] = float(v)

    G, h, rows, rhs = [], [], [], []
    for s, Fb in zip(sizes, F):
        if s > 0:
            h.append(-Fb[0])
            G.append(-Fb[1:])
            continue
        # diagonal block: entry k reads  sum_i F_i[k,k] x_i - F_0[k,k] >= 0
        d = np.array([np.diag(Fb[m]) for m in range(n + 1)])  # (n+1, k)
        k = d.shape[1]
        used = np.zeros(k, dtype=bool)
        leftover = []
        for a in range(k):
            if used[a]:
                continue
            if a + 1 < k and not used[a + 1] and np.allclose(d[:, a], -d[:, a + 1], rtol=0, atol=1e-14):
                rows.append(d[1:, a])
                rhs.append(d[0, a])
                used[a] = used[a + 1] = True
            else:
                leftover.append(a)
                used[a] = True
        if leftover:
            L = d[:, leftover]
            h.append(np.diag(-L[0]))
            G.append(np.array([np.diag(-L[m]) for m in range(1, n + 1)]))
    A = np.array(rows).reshape(-1, n)
    return SDPData(c, G, h, A, np.array(rhs), offset=offset)
