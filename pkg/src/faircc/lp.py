"""LP relaxation of fair correlation clustering: one distance variable per
vertex pair, per-vertex color-cap rows, and (lazily separated) triangle rows.

Minimize  sum_{uv positive} x_uv + sum_{uv negative} (1 - x_uv)
subject to, for every color i and vertex u,
    sum_{v in V_i} (1 - x_uv)  <=  alpha_i * sum_{v in V} (1 - x_uv)
(both sums include v = u, contributing a constant 1), triangle inequalities,
and 0 <= x_uv <= 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .fairness import ColorModel
from .graph import SignedGraph, all_pairs, normalize_pairs, pair_index

__all__ = [
    "LpProblem",
    "FractionalMetric",
    "build_lp",
    "lp_cost_share",
    "export_lp",
    "triangle_orientations",
    "triangle_row",
]


@dataclass(frozen=True, eq=False)
class FractionalMetric:
    """Symmetric pairwise distances in [0, 1] with zero diagonal.

    Triangle feasibility is certified by the solver, not enforced here
    (checking it is an O(n^3) scan, see solver.verify_metric).
    """

    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
            raise ValueError("distance matrix must be square and nonempty")
        if not np.allclose(d, d.T, atol=1e-9):
            raise ValueError("distance matrix must be symmetric")
        if np.abs(d.diagonal()).max(initial=0.0) > 1e-9:
            raise ValueError("diagonal must be zero")
        if d.min() < -1e-9 or d.max() > 1 + 1e-9:
            raise ValueError("distances must lie in [0, 1]")
        d = np.clip((d + d.T) / 2.0, 0.0, 1.0)
        np.fill_diagonal(d, 0.0)
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return int(self.d.shape[0])

    @classmethod
    def from_condensed(cls, n: int, values) -> "FractionalMetric":
        values = np.asarray(values, dtype=float)
        m = n * (n - 1) // 2
        if values.shape != (m,):
            raise ValueError(f"expected {m} pair values, got {values.shape}")
        d = np.zeros((n, n))
        iu = np.triu_indices(n, k=1)
        d[iu] = values
        d = d + d.T
        return cls(d)

    @classmethod
    def zeros(cls, n: int) -> "FractionalMetric":
        return cls(np.zeros((n, n)))

    def condensed(self) -> np.ndarray:
        iu = np.triu_indices(self.n, k=1)
        return self.d[iu]

    def value(self, u: int, v: int) -> float:
        return float(self.d[u, v])


@dataclass(eq=False)
class LpProblem:
    """Built LP: objective over pair columns, color-cap rows, and a pool of
    triangle rows (initially empty; the solver separates the rest lazily).

    Column j corresponds to all_pairs(n)[j]. The objective value of x is
    obj_coeffs @ x + obj_constant, the constant being the negative-pair
    count.
    """

    n: int
    obj_coeffs: np.ndarray
    obj_constant: int
    fair_lhs: sparse.csr_matrix
    fair_rhs: np.ndarray
    fair_rows: list  # (color, vertex) per row, in row order
    triangle_pool: list = field(default_factory=list)  # (a, b, c) rows

    @property
    def num_cols(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def num_fair_rows(self) -> int:
        return self.fair_lhs.shape[0]


def triangle_orientations(n: int):
    """All triangle rows d(a,b) <= d(a,c) + d(c,b): long pair a < b, apex c.

    Yields (a, b, c) in lexicographic order; there are n(n-1)(n-2)/2 rows
    (three per unordered triple).
    """
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(n):
                if c != a and c != b:
                    yield (a, b, c)


def triangle_row(n: int, a: int, b: int, c: int):
    """Column indices and coefficients of row x_ab - x_ac - x_cb <= 0."""
    cols = [pair_index(a, b, n), pair_index(a, c, n), pair_index(b, c, n)]
    return cols, [1.0, -1.0, -1.0]


def build_lp(g: SignedGraph, cm: ColorModel) -> LpProblem:
    """Assemble the relaxation for a signed graph and color model.

    Color-cap rows are kept in the <= form with constants on the right:
        sum_{v != u} (alpha_i - [v in V_i]) x_uv  <=  alpha_i n - |V_i|.
    The triangle pool starts empty.
    """
    if cm.n != g.n:
        raise ValueError(f"color model covers {cm.n} vertices but graph has {g.n}")
    n = g.n
    cond = g.condensed()
    obj = np.where(cond, 1.0, -1.0)
    const = int(np.count_nonzero(~cond))

    rows, cols, vals, rhs, labels = [], [], [], [], []
    r = 0
    for i in range(cm.ell):
        mask = cm.masks[i]
        a = float(cm.alphas[i])
        vi = int(mask.sum())
        for u in range(n):
            for v in range(n):
                if v == u:
                    continue
                coef = a - (1.0 if mask[v] else 0.0)
                if coef != 0.0:
                    rows.append(r)
                    cols.append(pair_index(u, v, n))
                    vals.append(coef)
            rhs.append(a * n - vi)
            labels.append((i, u))
            r += 1
    m = n * (n - 1) // 2
    lhs = sparse.csr_matrix(
        (np.array(vals), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
        shape=(r, m),
    )
    return LpProblem(
        n=n,
        obj_coeffs=obj,
        obj_constant=const,
        fair_lhs=lhs,
        fair_rhs=np.array(rhs),
        fair_rows=labels,
    )


def lp_cost_share(x: FractionalMetric, g: SignedGraph, pairs) -> float:
    """Objective mass of an edge subset: x_uv on positive pairs plus
    (1 - x_uv) on negative pairs."""
    if x.n != g.n:
        raise ValueError(f"metric covers {x.n} vertices but graph has {g.n}")
    total = 0.0
    for u, v in normalize_pairs(pairs, g.n):
        if g.pos[u, v]:
            total += x.d[u, v]
        else:
            total += 1.0 - x.d[u, v]
    return total


def objective_value(x: FractionalMetric, g: SignedGraph) -> float:
    """Full objective of a metric (cost share of every pair)."""
    cond = x.condensed()
    signs = g.condensed()
    return float(cond[signs].sum() + (1.0 - cond[~signs]).sum())


def _fmt(value) -> str:
    return f"{float(value):.12g}"


def export_lp(problem: LpProblem, path) -> None:
    """Write the problem in MPS text form with every triangle row
    materialized.

    Row order: objective, color-cap rows FAIR_<color>_<vertex>, then
    TRI_<a>_<b>_<c> rows in lexicographic order. Columns x_<u>_<v> follow
    the pair order. The objective constant is encoded, per the usual MPS
    convention, as a negated RHS entry on the objective row. Output is a
    pure function of the problem (re-export is byte-identical).
    """
    n = problem.n
    pairs = all_pairs(n)
    col_names = [f"x_{u}_{v}" for u, v in pairs]
    fair_names = [f"FAIR_{i}_{u}" for i, u in problem.fair_rows]
    tri_list = list(triangle_orientations(n))

    # Per-column entries, assembled in global row order.
    col_entries = [[("COST", problem.obj_coeffs[j])] for j in range(len(pairs))]
    fair_coo = problem.fair_lhs.tocoo()
    by_rowcol = sorted(zip(fair_coo.row.tolist(), fair_coo.col.tolist(), fair_coo.data.tolist()))
    for r, j, v in by_rowcol:
        col_entries[j].append((fair_names[r], v))
    for a, b, c in tri_list:
        name = f"TRI_{a}_{b}_{c}"
        cols, coefs = triangle_row(n, a, b, c)
        for j, v in zip(cols, coefs):
            col_entries[j].append((name, v))

    lines = ["NAME          FCC_LP", "ROWS", " N  COST"]
    for name in fair_names:
        lines.append(f" L  {name}")
    for a, b, c in tri_list:
        lines.append(f" L  TRI_{a}_{b}_{c}")
    lines.append("COLUMNS")
    for j, cname in enumerate(col_names):
        for rname, v in col_entries[j]:
            lines.append(f"    {cname}  {rname}  {_fmt(v)}")
    lines.append("RHS")
    if problem.obj_constant != 0:
        lines.append(f"    RHS  COST  {_fmt(-problem.obj_constant)}")
    for r, name in enumerate(fair_names):
        if problem.fair_rhs[r] != 0.0:
            lines.append(f"    RHS  {name}  {_fmt(problem.fair_rhs[r])}")
    lines.append("BOUNDS")
    for cname in col_names:
        lines.append(f" UP BND  {cname}  1")
    lines.append("ENDATA")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
