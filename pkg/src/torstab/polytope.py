"""Convex polytopes over Q in V-representation, queried by exact LP.

Polytopes are stored as a finite generating set (not necessarily vertices;
duplicates are harmless).  Facts usually read off an H-representation --
membership, relative interior, minimal faces, axis slices -- are answered
on demand by the exact simplex, so no double-description step is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .qexact import QVec, qvec, rational_rank, vsub
from .simplex import OPTIMAL, solve_lp, solve_lp_mixed

# hull_position verdicts
INTERIOR = "Interior"
RELATIVE_INTERIOR_ONLY = "RelativeInteriorOnly"
ON_PROPER_FACE = "OnProperFace"
OUTSIDE = "Outside"


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class PolytopeQ:
    generators: tuple[QVec, ...]
    ambient_dim: int

    def __post_init__(self):
        if not self.generators:
            raise ValueError("polytope needs at least one generator")
        for g in self.generators:
            if len(g) != self.ambient_dim:
                raise DimensionMismatch("generator of wrong dimension")

    @staticmethod
    def from_points(points: Sequence[Sequence], ambient_dim: int | None = None) -> "PolytopeQ":
        gens = tuple(qvec(p) for p in points)
        if ambient_dim is None:
            if not gens:
                raise ValueError("ambient_dim required for an empty point list")
            ambient_dim = len(gens[0])
        return PolytopeQ(gens, ambient_dim)

    def dim(self) -> int:
        g0 = self.generators[0]
        return rational_rank([vsub(g, g0) for g in self.generators[1:]])


def _check_point(p: PolytopeQ, q: Sequence) -> QVec:
    q = qvec(q)
    if len(q) != p.ambient_dim:
        raise DimensionMismatch("query point of wrong dimension")
    return q


def _relint_lp(p: PolytopeQ, q: QVec):
    """max t s.t. q = sum_i (t + beta_i) g_i, sum_i (t + beta_i) = 1,
    beta >= 0, 0 <= t <= 1.

    Substituting alpha_i = t + beta_i keeps the row count at dim+2
    regardless of the number of generators.  Feasibility (with t = 0) is
    hull membership; optimum t* > 0 is relative-interior membership, since
    relint(conv G) is exactly the set of all-positive convex combinations.
    """
    gens = p.generators
    m = len(gens)
    d = p.ambient_dim
    sum_g = [sum((g[i] for g in gens), Fraction(0)) for i in range(d)]
    # variables: beta_1..beta_m, t
    rows = []
    rhs = []
    for i in range(d):
        rows.append([g[i] for g in gens] + [sum_g[i]])
        rhs.append(q[i])
    rows.append([Fraction(1)] * m + [Fraction(m)])
    rhs.append(Fraction(1))
    # t <= 1 via slack: t + s = 1
    rows = [r + [Fraction(0)] for r in rows]
    rows.append([Fraction(0)] * m + [Fraction(1), Fraction(1)])
    rhs.append(Fraction(1))
    obj = [Fraction(0)] * m + [Fraction(1), Fraction(0)]
    res = solve_lp(rows, rhs, obj)
    if res.status != OPTIMAL:
        return None
    t = res.x[m]
    alphas = tuple(b + t for b in res.x[:m])
    return t, alphas


def convex_combination(p: PolytopeQ, q: Sequence) -> tuple[Fraction, ...] | None:
    """Coefficients of a convex combination of the generators equal to q,
    or None when q is outside the hull.  The relint LP is reused so interior
    points get all-positive coefficients."""
    q = _check_point(p, q)
    out = _relint_lp(p, q)
    return None if out is None else out[1]


def hull_position(p: PolytopeQ, q: Sequence) -> str:
    """Classify q against the hull: Interior / RelativeInteriorOnly /
    OnProperFace / Outside, decided by exact LP with no tolerances.

    Interior is meant in the ambient topology, so it additionally requires
    the hull to be full-dimensional; RelativeInteriorOnly flags points in
    the relative interior of a lower-dimensional hull.
    """
    q = _check_point(p, q)
    out = _relint_lp(p, q)
    if out is None:
        return OUTSIDE
    t, _ = out
    if t == 0:
        return ON_PROPER_FACE
    if p.dim() == p.ambient_dim:
        return INTERIOR
    return RELATIVE_INTERIOR_ONLY


def minimal_face(p: PolytopeQ, q: Sequence) -> tuple[int, ...]:
    """Indices of the generators on the unique face whose relative interior
    contains q.

    A generator belongs to that face iff some convex representation of q
    gives it positive weight, so each index is settled by one small LP
    maximizing its coefficient; supports of maximizers are merged to skip
    indices already known to be on the face.
    """
    q = _check_point(p, q)
    base = convex_combination(p, q)
    if base is None:
        raise ValueError("q lies outside the hull")
    gens = p.generators
    m = len(gens)
    d = p.ambient_dim
    face = {i for i in range(m) if base[i] > 0}
    rows = [[g[i] for g in gens] for i in range(d)] + [[Fraction(1)] * m]
    rhs = list(q) + [Fraction(1)]
    for i in range(m):
        if i in face:
            continue
        obj = [Fraction(0)] * m
        obj[i] = Fraction(1)
        res = solve_lp(rows, rhs, obj)
        assert res.status == OPTIMAL
        if res.value > 0:
            face.update(j for j in range(m) if res.x[j] > 0)
    return tuple(sorted(face))


@dataclass(frozen=True)
class RayInterval:
    lo: Fraction
    hi: Fraction
    lo_combination: tuple[Fraction, ...]
    hi_combination: tuple[Fraction, ...]


def ray_intersect(
    p: PolytopeQ,
    axis_complement_dims: Sequence[int],
    positive_coord: int,
) -> RayInterval | None:
    """Exact interval of rho > 0 with the point (0,...,0,rho) in the hull,
    where the listed coordinates are pinned to zero and positive_coord
    carries rho.  Returns None when the positive ray misses the hull.

    Both endpoints come with convex-combination certificates.  If the slice
    reaches rho <= 0 the closure endpoint max(lo, 0) is reported; with the
    stratification preconditions in force this does not occur.
    """
    gens = p.generators
    m = len(gens)
    axis = list(axis_complement_dims)
    if positive_coord in axis or positive_coord >= p.ambient_dim:
        raise DimensionMismatch("bad coordinate split")
    rows = [[g[i] for g in gens] for i in axis] + [[Fraction(1)] * m]
    rhs = [Fraction(0)] * len(axis) + [Fraction(1)]
    obj = [g[positive_coord] for g in gens]
    top = solve_lp(rows, rhs, obj)
    if top.status != OPTIMAL:
        return None  # slice empty
    if top.value <= 0:
        return None
    bot = solve_lp(rows, rhs, [-x for x in obj])
    lo = -bot.value
    lo_comb = bot.x
    if lo < 0:
        # closure of the positive part; certificate left at the attained end
        lo = Fraction(0)
    return RayInterval(lo, top.value, tuple(lo_comb), tuple(top.x))


def solve_mixed_system(
    equalities: Sequence[tuple[Sequence, object]],
    strict_inequalities: Sequence[tuple[Sequence, object]],
    nvars: int,
) -> QVec | None:
    """A rational point with <a,x> = b for all equalities and <g,x> > h for
    all strict inequalities, or None exactly when the system is infeasible.

    Deterministic selection: strict rows are shifted to <g,x> >= h + t and
    the slack t is maximized first (capped at 1, an epsilon made concrete);
    with t pinned, coordinates are fixed one at a time to their minimal
    absolute value, preferring the nonnegative sign.  The result is the
    same point on every run.
    """
    eqs = [(qvec(a), Fraction(b)) for a, b in equalities]
    stricts = [(qvec(g), Fraction(h)) for g, h in strict_inequalities]
    for a, _ in eqs + stricts:
        if len(a) != nvars:
            raise DimensionMismatch("constraint of wrong arity")

    # variables: x_1..x_nvars, t
    def with_t(coeffs, tcoef):
        return list(coeffs) + [Fraction(tcoef)]

    eq_rows = [(with_t(a, 0), b) for a, b in eqs]
    ge_rows = [(with_t(g, -1), h) for g, h in stricts]
    ge_rows.append((with_t([0] * nvars, -1), Fraction(-1)))  # t <= 1
    ge_rows.append((with_t([0] * nvars, 1), Fraction(0)))    # t >= 0
    obj = with_t([0] * nvars, 1)
    res = solve_lp_mixed(eq_rows, ge_rows, obj)
    if res.status != OPTIMAL or res.x[nvars] <= 0:
        return None
    tstar = res.x[nvars]
    eq_rows.append((with_t([0] * nvars, 1), tstar))

    fixed: list[Fraction] = []
    for i in range(nvars):
        # achievable x_i values form an interval by convexity; pick the one
        # of minimal absolute value (0 whenever the interval straddles it)
        lo = _coordinate_extreme(eq_rows, ge_rows, nvars, i, maximize=False)
        hi = _coordinate_extreme(eq_rows, ge_rows, nvars, i, maximize=True)
        if lo is not None and lo > 0:
            val = lo
        elif hi is not None and hi < 0:
            val = hi
        else:
            val = Fraction(0)
        eq_rows.append((_unit_row(nvars, i), val))
        fixed.append(val)
    return tuple(fixed)


def _unit_row(nvars, i):
    row = [Fraction(0)] * (nvars + 1)
    row[i] = Fraction(1)
    return row


def _coordinate_extreme(eq_rows, ge_rows, nvars, i, maximize):
    obj = [Fraction(0)] * (nvars + 1)
    obj[i] = Fraction(1) if maximize else Fraction(-1)
    res = solve_lp_mixed(eq_rows, ge_rows, obj)
    if res.status != OPTIMAL:
        return None  # unbounded in this direction
    return res.x[i]
