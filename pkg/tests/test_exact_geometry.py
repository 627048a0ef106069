"""Exact geometry tests.

The LP-based hull queries are checked against brute-force oracles that never
touch the simplex: Caratheodory membership by exhaustive enumeration of
affinely independent generator subsets, and relative-interior / face
detection by exhaustive supporting-hyperplane enumeration in affine
coordinates of the hull.
"""

from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torstab.polytope import (
    INTERIOR,
    ON_PROPER_FACE,
    OUTSIDE,
    RELATIVE_INTERIOR_ONLY,
    PolytopeQ,
    convex_combination,
    hull_position,
    minimal_face,
    ray_intersect,
    solve_mixed_system,
)
from torstab.qexact import (
    Lattice,
    dot,
    nullspace,
    qvec,
    rational_rank,
    saturated_kernel,
    smith_normal_form,
    solve_linear,
    vsub,
)
from torstab.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_lp

F = Fraction


# ---------------------------------------------------------------------------
# oracles (independent of the simplex)


def oracle_member(gens, q):
    """q in conv(gens) iff q is a convex combination of some affinely
    independent subset (Caratheodory), each checked by an exact solve."""
    gens = [qvec(g) for g in gens]
    q = qvec(q)
    d = len(q)
    for size in range(1, d + 2):
        for sub in combinations(gens, size):
            diffs = [vsub(g, sub[0]) for g in sub[1:]]
            if diffs and rational_rank(diffs) != len(diffs):
                continue
            # barycentric solve: sum a_i g_i = q, sum a_i = 1
            rows = [[g[i] for g in sub] for i in range(d)] + [[F(1)] * size]
            rhs = list(q) + [F(1)]
            sol = solve_linear(rows, rhs)
            if sol is not None and all(a >= 0 for a in sol):
                return True
    return False


def _affine_coords(gens):
    """Basis of the affine hull directions plus a coordinate map."""
    g0 = gens[0]
    basis = []
    for g in gens[1:]:
        cand = basis + [vsub(g, g0)]
        if rational_rank(cand) == len(cand):
            basis.append(vsub(g, g0))

    def coords(p):
        if not basis:
            return ()
        cols = [[b[i] for b in basis] for i in range(len(g0))]
        sol = solve_linear(cols, list(vsub(p, g0)))
        assert sol is not None
        return sol

    return basis, coords


def oracle_supporting_hyperplanes(gens):
    """All supporting hyperplanes spanned by generator subsets, in affine
    coordinates; every facet appears among them."""
    gens = [qvec(g) for g in gens]
    basis, coords = _affine_coords(gens)
    dim = len(basis)
    pts = [coords(g) for g in gens]
    if dim == 0:
        return dim, pts, []
    planes = []
    for sub in combinations(range(len(pts)), dim):
        anchor = pts[sub[0]]
        diffs = [vsub(pts[i], anchor) for i in sub[1:]]
        normals = nullspace(diffs) if diffs else nullspace([[F(0)] * dim])
        if len(normals) != 1:
            continue
        n = normals[0]
        c = dot(n, anchor)
        vals = [dot(n, p) for p in pts]
        if all(v <= c for v in vals) or all(v >= c for v in vals):
            planes.append((n, c))
    return dim, pts, planes


def oracle_position(gens, q, ambient):
    if not oracle_member(gens, q):
        return OUTSIDE
    dim, pts, planes = oracle_supporting_hyperplanes(gens)
    _, coords = _affine_coords([qvec(g) for g in gens])
    qa = coords(qvec(q))
    on_boundary = any(dot(n, qa) == c for n, c in planes)
    if on_boundary:
        return ON_PROPER_FACE
    return INTERIOR if dim == ambient else RELATIVE_INTERIOR_ONLY


def oracle_minimal_face(gens, q):
    gens_q = [qvec(g) for g in gens]
    dim, pts, planes = oracle_supporting_hyperplanes(gens_q)
    _, coords = _affine_coords(gens_q)
    qa = coords(qvec(q))
    through = [(n, c) for n, c in planes if dot(n, qa) == c]
    return tuple(
        i for i, p in enumerate(pts) if all(dot(n, p) == c for n, c in through)
    )


# ---------------------------------------------------------------------------
# simplex core


def test_lp_basic_max():
    # max x + y st x + y <= 1 encoded with a slack variable
    res = solve_lp([[1, 1, 1]], [1], [1, 1, 0])
    assert res.status == OPTIMAL
    assert res.value == 1


def test_lp_infeasible():
    res = solve_lp([[1], [1]], [1, 2], [0])
    assert res.status == INFEASIBLE


def test_lp_unbounded_with_ray():
    # max x st x - s = 0 (x, s >= 0): x can grow along the ray
    res = solve_lp([[1, -1]], [0], [1, 0])
    assert res.status == UNBOUNDED
    assert res.ray is not None
    rx = res.ray
    assert rx[0] > 0 and rx[0] - rx[1] == 0


def test_lp_negative_rhs_rows():
    # -x = -3 with x >= 0
    res = solve_lp([[-1]], [-3], [0])
    assert res.status == OPTIMAL
    assert res.x[0] == 3


def test_lp_deterministic():
    a = [[1, 2, 1, 0], [3, 1, 0, 1]]
    b = [4, 5]
    c = [2, 3, 0, 0]
    r1 = solve_lp(a, b, c)
    r2 = solve_lp(a, b, c)
    assert r1.x == r2.x and r1.value == r2.value


# ---------------------------------------------------------------------------
# hull_position


def test_hull_position_spec_examples():
    p = PolytopeQ.from_points([(1, 0), (-1, 1), (0, -1)])
    # barycentric solve puts weight 1/3 on each generator
    assert convex_combination(p, (0, 0)) is not None
    assert hull_position(p, (0, 0)) == INTERIOR

    seg = PolytopeQ.from_points([(1, 0), (-1, 0)])
    assert hull_position(seg, (0, 0)) == RELATIVE_INTERIOR_ONLY

    off = PolytopeQ.from_points([(1, 0), (2, 0)])
    assert hull_position(off, (0, 0)) == OUTSIDE


def test_hull_position_face_case():
    sq = PolytopeQ.from_points([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert hull_position(sq, (F(1, 2), 0)) == ON_PROPER_FACE
    assert hull_position(sq, (F(1, 2), F(1, 2))) == INTERIOR
    assert hull_position(sq, (0, 0)) == ON_PROPER_FACE


def test_hull_position_point_hull():
    pt = PolytopeQ.from_points([(2, 3)])
    assert hull_position(pt, (2, 3)) == RELATIVE_INTERIOR_ONLY
    assert hull_position(pt, (2, 4)) == OUTSIDE


def test_hull_position_dim_zero_ambient():
    pt = PolytopeQ.from_points([()], ambient_dim=0)
    assert hull_position(pt, ()) == INTERIOR


small_coord = st.integers(min_value=-4, max_value=4)


def _points(dim, min_n=1, max_n=6):
    return st.lists(
        st.tuples(*([small_coord] * dim)), min_size=min_n, max_size=max_n
    )


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 3).flatmap(lambda d: st.tuples(st.just(d), _points(d), st.tuples(*([small_coord] * d)))))
def test_hull_position_matches_oracle(data):
    dim, pts, q = data
    p = PolytopeQ.from_points(pts, ambient_dim=dim)
    assert hull_position(p, q) == oracle_position(pts, q, dim)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 3).flatmap(lambda d: st.tuples(st.just(d), _points(d, min_n=2))))
def test_minimal_face_matches_oracle(data):
    dim, pts = data
    p = PolytopeQ.from_points(pts, ambient_dim=dim)
    # query the barycenter, which always lies in the hull
    n = len(pts)
    q = tuple(sum(F(v) for v in col) / n for col in zip(*pts))
    assert minimal_face(p, q) == oracle_minimal_face(pts, q)


# ---------------------------------------------------------------------------
# minimal_face


def test_minimal_face_spec_examples():
    tri = PolytopeQ.from_points([(1, 0), (-1, 1), (0, -1)])
    assert minimal_face(tri, (0, 0)) == (0, 1, 2)

    seg = PolytopeQ.from_points([(1, 1), (-1, 2)])
    assert minimal_face(seg, (0, F(3, 2))) == (0, 1)
    assert minimal_face(seg, (1, 1)) == (0,)


def test_minimal_face_rejects_outside():
    seg = PolytopeQ.from_points([(1, 1), (-1, 2)])
    with pytest.raises(ValueError):
        minimal_face(seg, (5, 5))


def test_minimal_face_tightness_property():
    # members satisfy every supporting constraint tight at q; non-members
    # violate at least one (witnessed by a separating functional)
    pts = [(0, 0), (2, 0), (0, 2), (1, 0), (2, 2)]
    p = PolytopeQ.from_points(pts)
    q = (1, 0)
    face = minimal_face(p, q)
    assert face == (0, 1, 3)
    for i in range(len(pts)):
        if i in face:
            continue
        # functional tight on the face and strictly positive on generator i
        sol = solve_mixed_system(
            equalities=[(list(g) + [1], 0) for g in [pts[j] for j in face]]
            + [(list(q) + [1], 0)],
            strict_inequalities=[(list(pts[i]) + [1], 0)],
            nvars=3,
        )
        assert sol is not None
        cvec, gamma = sol[:2], sol[2]
        assert all(dot(cvec, pts[j]) + gamma == 0 for j in face)
        assert dot(cvec, pts[i]) + gamma > 0


# ---------------------------------------------------------------------------
# ray_intersect


def test_ray_intersect_spec_examples():
    p = PolytopeQ.from_points([(1, 1), (-1, 2)])
    iv = ray_intersect(p, [0], 1)
    assert (iv.lo, iv.hi) == (F(3, 2), F(3, 2))

    p2 = PolytopeQ.from_points([(1, 1), (-1, 1), (0, 2)])
    iv2 = ray_intersect(p2, [0], 1)
    assert (iv2.lo, iv2.hi) == (F(1), F(2))

    p3 = PolytopeQ.from_points([(1, 1), (2, 1)])
    assert ray_intersect(p3, [0], 1) is None


def test_ray_intersect_certificates():
    p = PolytopeQ.from_points([(1, 1), (-1, 1), (0, 2)])
    iv = ray_intersect(p, [0], 1)
    for combo, rho in ((iv.lo_combination, iv.lo), (iv.hi_combination, iv.hi)):
        assert sum(combo) == 1 and all(a >= 0 for a in combo)
        pt = [
            sum(a * g[i] for a, g in zip(combo, p.generators))
            for i in range(2)
        ]
        assert pt[0] == 0 and pt[1] == rho


@settings(max_examples=60, deadline=None)
@given(_points(2, min_n=2), st.integers(-8, 8), st.integers(1, 8))
def test_ray_intersect_vs_membership(pts, num, den):
    p = PolytopeQ.from_points(pts, ambient_dim=2)
    iv = ray_intersect(p, [0], 1)
    rho = F(num, den)
    inside = oracle_member(pts, (0, rho))
    if iv is None:
        assert not inside or rho <= 0
    elif rho > 0:
        assert inside == (iv.lo <= rho <= iv.hi) or (rho == iv.lo == 0)


# ---------------------------------------------------------------------------
# solve_mixed_system


def test_solve_mixed_spec_examples():
    # 1 + x = 3/2 and 2 - x = 3/2
    sol = solve_mixed_system([((1,), F(1, 2)), ((-1,), F(-1, 2))], [], 1)
    assert sol == (F(1, 2),)

    assert solve_mixed_system([((1,), 0)], [((1,), 0)], 1) is None

    sol = solve_mixed_system([], [((1,), 0), ((-1,), -1)], 1)
    assert sol == (F(1, 2),)


def test_solve_mixed_no_constraints():
    assert solve_mixed_system([], [], 2) == (F(0), F(0))


def test_solve_mixed_deterministic():
    eqs = [((1, 1, 0), 2)]
    stricts = [((1, 0, 0), 0), ((0, 0, 1), -3)]
    a = solve_mixed_system(eqs, stricts, 3)
    b = solve_mixed_system(eqs, stricts, 3)
    assert a == b


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.tuples(st.tuples(small_coord, small_coord), st.integers(-3, 3)), max_size=3),
    st.lists(st.tuples(st.tuples(small_coord, small_coord), st.integers(-3, 3)), max_size=3),
)
def test_solve_mixed_satisfies_constraints(eqs, stricts):
    sol = solve_mixed_system(eqs, stricts, 2)
    if sol is not None:
        for a, b in eqs:
            assert dot(a, sol) == b
        for g, h in stricts:
            assert dot(g, sol) > h


# ---------------------------------------------------------------------------
# saturated_kernel / lattices


def lattice_equal(l1: Lattice, l2: Lattice) -> bool:
    return (
        l1.rank == l2.rank
        and all(l1.contains(b) for b in l2.basis)
        and all(l2.contains(b) for b in l1.basis)
    )


def test_saturated_kernel_spec_examples():
    k1 = saturated_kernel([(1, -1)])
    assert lattice_equal(k1, Lattice(2, ((1, 1),)))

    k2 = saturated_kernel([(1, 0), (0, 1)])
    assert k2.rank == 0

    k3 = saturated_kernel([(2, -2)])
    assert lattice_equal(k3, Lattice(2, ((1, 1),)))
    assert k3.is_saturated()


def test_saturated_kernel_no_weights():
    k = saturated_kernel([], ambient_dim=3)
    assert k.rank == 3


def test_smith_normal_form_reconstructs():
    a = [[2, 4, 4], [-6, 6, 12], [10, 4, 16]]
    u, d, v = smith_normal_form(a)
    m, n = 3, 3
    prod = [
        [sum(u[i][k] * a[k][j] for k in range(m)) for j in range(n)]
        for i in range(m)
    ]
    prod = [
        [sum(prod[i][k] * v[k][j] for k in range(n)) for j in range(n)]
        for i in range(m)
    ]
    assert prod == d
    diag = [d[i][i] for i in range(3)]
    assert all(d[i][j] == 0 for i in range(3) for j in range(3) if i != j)
    for x, y in zip(diag, diag[1:]):
        if x != 0 and y != 0:
            assert y % x == 0


@settings(max_examples=100, deadline=None)
@given(
    st.integers(1, 3).flatmap(
        lambda k: st.lists(st.tuples(*([small_coord] * k)), min_size=1, max_size=4)
    )
)
def test_saturated_kernel_properties(weights):
    k = len(weights[0])
    lat = saturated_kernel(weights)
    for b in lat.basis:
        for w in weights:
            assert dot(w, b) == 0
    assert lat.is_saturated()
    assert lat.rank == k - rational_rank(weights)
    # brute-force: every small integer kernel point lies in the lattice
    from itertools import product

    for x in product(range(-2, 3), repeat=k):
        if all(dot(w, x) == 0 for w in weights):
            assert lat.contains(x)
