"""Exact rational/integer linear algebra: vectors over Fraction, rational
Gaussian elimination, Smith normal form, and saturated kernel lattices.

Everything here is exact; no floating point enters any computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

QVec = tuple[Fraction, ...]
IVec = tuple[int, ...]


def qvec(xs: Iterable) -> QVec:
    return tuple(Fraction(x) for x in xs)


def dot(a: Sequence, b: Sequence) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


def vadd(a: Sequence, b: Sequence) -> QVec:
    return tuple(Fraction(x) + Fraction(y) for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> QVec:
    return tuple(Fraction(x) - Fraction(y) for x, y in zip(a, b))


def vscale(c, a: Sequence) -> QVec:
    c = Fraction(c)
    return tuple(c * Fraction(x) for x in a)


def zero_vec(n: int) -> QVec:
    return (Fraction(0),) * n


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rref rows, pivot column indices)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rational_rank(vectors: Sequence[Sequence]) -> int:
    rows = [[Fraction(x) for x in v] for v in vectors]
    return len(rref(rows)[0])


def nullspace(rows: Sequence[Sequence]) -> list[QVec]:
    """Basis of {x : A x = 0} over the rationals (A given by rows)."""
    mat = [[Fraction(x) for x in r] for r in rows]
    if not mat:
        raise ValueError("need at least one row to know the dimension")
    n = len(mat[0])
    red, pivots = rref(mat)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(tuple(v))
    return basis


def solve_linear(rows: Sequence[Sequence], rhs: Sequence) -> QVec | None:
    """One rational solution of A x = b, or None if inconsistent."""
    aug = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    n = len(rows[0]) if rows else 0
    red, pivots = rref(aug)
    for i, row in enumerate(red):
        if (i >= len(pivots) or pivots[i] == n) and row[n] != 0:
            return None
    if pivots and pivots[-1] == n:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = red[i][n]
    return tuple(x)


def _int_rows(vectors: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for v in vectors:
        fr = [Fraction(x) for x in v]
        if any(f.denominator != 1 for f in fr):
            raise ValueError("expected integer vector")
        out.append([int(f) for f in fr])
    return out


def smith_normal_form(a: Sequence[Sequence[int]]):
    """Smith normal form of an integer matrix.

    Returns (U, D, V) with U @ a @ V = D, U and V unimodular, D diagonal with
    d_1 | d_2 | ... >= 0.
    """
    d = [list(map(int, row)) for row in a]
    m = len(d)
    n = len(d[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):
        d[dst] = [x + f * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, f):
        for row in d:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        # move a nonzero pivot of minimal absolute value to (t, t)
        cand = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n)
                if d[i][j] != 0]
        if not cand:
            break
        _, pi, pj = min(cand)
        swap_rows(t, pi)
        swap_cols(t, pj)
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if d[i][t] != 0:
                    add_row(t, i, -(d[i][t] // d[t][t]))
                    if d[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if d[t][j] != 0:
                    add_col(t, j, -(d[t][j] // d[t][t]))
                    if d[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
        # enforce divisibility d_t | d[i][j] for the trailing block
        fixed = False
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if d[i][j] % d[t][t] != 0:
                    add_row(i, t, 1)
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, d, v


def smith_invariants(a: Sequence[Sequence[int]]) -> list[int]:
    _, d, _ = smith_normal_form(a)
    out = [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]
    return [x for x in out if x != 0]


@dataclass(frozen=True)
class Lattice:
    """A saturated sublattice of Z^n, given by an independent integer basis.

    Saturated means the sublattice equals the intersection of its rational
    span with Z^n, so the quotient is torsion-free and the corresponding
    subtorus is well defined.
    """

    ambient_dim: int
    basis: tuple[IVec, ...]

    def __post_init__(self):
        for b in self.basis:
            if len(b) != self.ambient_dim:
                raise ValueError("basis vector of wrong dimension")
        if self.basis and rational_rank(self.basis) != len(self.basis):
            raise ValueError("basis is linearly dependent")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_saturated(self) -> bool:
        if not self.basis:
            return True
        return all(s == 1 for s in smith_invariants([list(b) for b in self.basis]))

    def contains(self, x: Sequence[int]) -> bool:
        """Integer membership: x lies in the Z-span of the basis."""
        if not self.basis:
            return all(int(c) == 0 for c in x)
        cols = [[Fraction(b[i]) for b in self.basis] for i in range(self.ambient_dim)]
        sol = solve_linear(cols, [Fraction(int(c)) for c in x])
        return sol is not None and all(c.denominator == 1 for c in sol)


def _primitive(v: Sequence[Fraction]) -> IVec:
    """Scale a rational vector to a primitive integer vector (gcd 1)."""
    denom = 1
    for x in v:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    return tuple(ints)


def saturated_kernel(weights: Sequence[Sequence[int]], ambient_dim: int | None = None) -> Lattice:
    """Basis of the saturated integer lattice {x : <w, x> = 0 for all w}.

    Computed from the Smith normal form U W V = D: the kernel of W is spanned
    by the columns of V at indices where D has a zero diagonal entry; those
    columns form a saturated basis since V is unimodular.
    """
    rows = _int_rows(weights)
    if not rows:
        if ambient_dim is None:
            raise ValueError("ambient_dim required when no weights are given")
        basis = tuple(tuple(int(i == j) for j in range(ambient_dim)) for i in range(ambient_dim))
        return Lattice(ambient_dim, basis)
    n = len(rows[0])
    if ambient_dim is not None and ambient_dim != n:
        raise ValueError("ambient_dim inconsistent with weight dimension")
    _, d, v = smith_normal_form(rows)
    nonzero = sum(1 for i in range(min(len(rows), n)) if d[i][i] != 0)
    basis = tuple(tuple(v[i][j] for i in range(n)) for j in range(nonzero, n))
    return Lattice(n, basis)
