"""Exact rational simplex for small dense LPs.

Standard form: maximize c.x subject to A x = b, x >= 0, all data Fraction.
Two phases with Bland's rule (smallest eligible index enters; ratio ties
break to the smallest basic variable index), so the method is deterministic
and never cycles.  Intended for the tiny instances produced by polytope and
stratification queries; no attempt is made at sparse or revised variants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    ray: tuple[Fraction, ...] | None = None  # improving direction if unbounded


class _Tableau:
    def __init__(self, a, b, nvars):
        self.m = len(a)
        self.nvars = nvars
        self.ncols = nvars + self.m  # artificial column block holds B^{-1}
        self.rows = []
        for i in range(self.m):
            coeffs = list(a[i]) if b[i] >= 0 else [-x for x in a[i]]
            row = coeffs + [_ZERO] * self.m + [abs(b[i])]
            row[nvars + i] = _ONE
            self.rows.append(row)
        self.basis = [nvars + i for i in range(self.m)]

    def pivot(self, r, c):
        piv = self.rows[r][c]
        self.rows[r] = [x / piv for x in self.rows[r]]
        for i in range(self.m):
            if i != r and self.rows[i][c] != 0:
                f = self.rows[i][c]
                self.rows[i] = [x - f * y for x, y in zip(self.rows[i], self.rows[r])]
        self.basis[r] = c

    def reduced_costs(self, cost):
        # cost over all columns; reduced cost r_j = c_j - c_B . column_j
        z = [_ZERO] * (self.ncols + 1)
        for i, bi in enumerate(self.basis):
            cb = cost[bi]
            if cb != 0:
                row = self.rows[i]
                for j in range(self.ncols + 1):
                    if row[j] != 0:
                        z[j] += cb * row[j]
        return [cost[j] - z[j] for j in range(self.ncols)], z[self.ncols]

    def solution(self):
        x = [_ZERO] * self.nvars
        for i, bi in enumerate(self.basis):
            if bi < self.nvars:
                x[bi] = self.rows[i][-1]
        return tuple(x)

    def _ratio_row(self, c):
        best = None
        for i in range(self.m):
            a = self.rows[i][c]
            if a > 0:
                ratio = self.rows[i][-1] / a
                key = (ratio, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        return None if best is None else best[1]

    def optimize(self, cost, allowed):
        """Run simplex iterations (maximization) with Bland's rule."""
        while True:
            red, _ = self.reduced_costs(cost)
            enter = next(
                (j for j in range(self.ncols) if allowed[j] and j not in self.basis and red[j] > 0),
                None,
            )
            if enter is None:
                return OPTIMAL
            leave = self._ratio_row(enter)
            if leave is None:
                self._last_ray_col = enter
                return UNBOUNDED
            self.pivot(leave, enter)

    def ray(self):
        """Improving direction in the original variables after UNBOUNDED."""
        c = self._last_ray_col
        d = [_ZERO] * self.nvars
        if c < self.nvars:
            d[c] = _ONE
        for i, bi in enumerate(self.basis):
            if bi < self.nvars:
                d[bi] = -self.rows[i][c]
        return tuple(d)


def solve_lp(a: Sequence[Sequence], b: Sequence, c: Sequence) -> LPResult:
    """Maximize c.x subject to a x = b, x >= 0 (all rationals, exact)."""
    a = [[Fraction(x) for x in row] for row in a]
    b = [Fraction(x) for x in b]
    c = [Fraction(x) for x in c]
    nvars = len(c)
    for row in a:
        if len(row) != nvars:
            raise ValueError("constraint row of wrong length")
    t = _Tableau(a, b, nvars)
    m = t.m

    # phase 1: maximize -(sum of artificials)
    phase1 = [_ZERO] * nvars + [Fraction(-1)] * m
    allowed = [True] * (nvars + m)
    status = t.optimize(phase1, allowed)
    assert status == OPTIMAL  # phase-1 objective is bounded above by 0
    _, zval = t.reduced_costs(phase1)
    if zval != 0:
        return LPResult(INFEASIBLE)

    # drive leftover artificials out of the basis (or drop redundant rows)
    for i in range(m):
        if t.basis[i] >= nvars and t.rows[i][-1] == 0:
            piv = next((j for j in range(nvars) if t.rows[i][j] != 0), None)
            if piv is not None:
                t.pivot(i, piv)

    # phase 2: artificials barred from entering
    for j in range(nvars, nvars + m):
        allowed[j] = False
    phase2 = list(c) + [_ZERO] * m
    status = t.optimize(phase2, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, x=t.solution(), ray=t.ray())
    x = t.solution()
    value = sum((ci * xi for ci, xi in zip(c, x)), _ZERO)
    return LPResult(OPTIMAL, x=x, value=value)


def solve_lp_mixed(
    eq: Sequence[tuple[Sequence, object]],
    ge: Sequence[tuple[Sequence, object]],
    c: Sequence,
    nonneg: Sequence[bool] | None = None,
) -> LPResult:
    """Maximize c.x with equality rows <a,x> = b and inequality rows
    <g,x> >= h; variables are free unless flagged nonneg.

    Free variables are split into positive and negative parts; inequality
    rows get one surplus variable each.  The reported solution is in the
    original variables.
    """
    n = len(c)
    nonneg = list(nonneg) if nonneg is not None else [False] * n
    nfree = sum(1 for f in nonneg if not f)
    # column layout: x_i (or x_i^+), then x_i^- for free vars, then surpluses
    pos_col = {}
    neg_col = {}
    col = 0
    for i in range(n):
        pos_col[i] = col
        col += 1
    for i in range(n):
        if not nonneg[i]:
            neg_col[i] = col
            col += 1
    nsurplus = len(ge)
    total = col + nsurplus

    def expand(coeffs):
        row = [Fraction(0)] * total
        for i, v in enumerate(coeffs):
            v = Fraction(v)
            row[pos_col[i]] += v
            if i in neg_col:
                row[neg_col[i]] -= v
        return row

    rows, rhs = [], []
    for coeffs, b in eq:
        rows.append(expand(coeffs))
        rhs.append(Fraction(b))
    for k, (coeffs, h) in enumerate(ge):
        row = expand(coeffs)
        row[col + k] = Fraction(-1)
        rows.append(row)
        rhs.append(Fraction(h))

    obj = [Fraction(0)] * total
    for i, v in enumerate(c):
        v = Fraction(v)
        obj[pos_col[i]] += v
        if i in neg_col:
            obj[neg_col[i]] -= v

    res = solve_lp(rows, rhs, obj)
    if res.x is None:
        return res

    def fold(vec):
        out = []
        for i in range(n):
            v = vec[pos_col[i]]
            if i in neg_col:
                v -= vec[neg_col[i]]
            out.append(v)
        return tuple(out)

    return LPResult(res.status, x=fold(res.x), value=res.value,
                    ray=fold(res.ray) if res.ray is not None else None)
