"""Iterative stratification of a stable vector in a graded torus
representation.

Input: a vector u in a representation of G x C^* whose lines carry a torus
weight l and a circle weight rho >= 1, with u stable for the G-action.  The
iteration peels u apart: at stage n it removes the G_n-fixed components
(nu_n), shears the remaining weights by the accumulated rational
cocharacters, intersects the weight polytope with the positive rho-axis to
get c_n, reads off the face F_n through (0, c_n), projects u onto the face
weights S_n, solves an exact linear system for the next rational
cocharacter x_n, and passes to the stabilizer torus G_{n+1} of the
projection.  Tori strictly decrease, so the loop stops after at most dim G
stages.  A final integer sigma clears all denominators, producing a genuine
one-parameter subgroup (x, sigma) under which every projected piece scales
with a single integer exponent d_i = c_i * sigma and the strict ladder
0 < d_0 < ... < d_{k-1} holds.

The combinatorial output depends only on which amplitudes are nonzero;
per-stage Kempf-Ness minimizers (the metric updates) are computed
separately by stage_kn_minimizers and never feed back into the iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from .errors import NotStableError, StratifyInternalError, ZeroVectorError
from .kempf_ness import KNProblem, KNResult, kn_minimize
from .polytope import PolytopeQ, minimal_face, ray_intersect, solve_mixed_system
from .qexact import Lattice, QVec, dot, nullspace, qvec, saturated_kernel
from .stability import POLYSTABLE_NOT_STABLE, STABLE, classify
from .torus_rep import RepVector, Subtorus


@dataclass(frozen=True)
class StratifyOptions:
    # extra positive multiple applied on top of the minimal denominator-
    # clearing sigma
    sigma_multiple: int = 1

    def __post_init__(self):
        if self.sigma_multiple < 1:
            raise ValueError("sigma_multiple must be a positive integer")


@dataclass(frozen=True)
class Stage:
    index: int
    torus: Subtorus
    nu_labels: tuple[str, ...]
    s_labels: tuple[str, ...]
    s_weights: frozenset
    c: Fraction
    x_stage: QVec
    d: int
    dim_hull: int
    dim_projected_hull: int


@dataclass(frozen=True)
class StratifyResult:
    u: RepVector
    ambient_rank: int
    tori: tuple[Subtorus, ...]
    stages: tuple[Stage, ...]
    x: tuple[int, ...]
    sigma: int
    residual_labels: tuple[str, ...]
    exponents: dict  # label -> integer exponent under (x, sigma)

    @property
    def num_stages(self) -> int:
        return len(self.stages)

    @property
    def d_ladder(self) -> tuple[int, ...]:
        return tuple(s.d for s in self.stages)

    def nu_exponents(self, i: int) -> dict:
        return {lab: self.exponents[lab] for lab in self.stages[i].nu_labels}

    def s_exponents(self, i: int) -> dict:
        return {lab: self.exponents[lab] for lab in self.stages[i].s_labels}

    def residual_exponents(self) -> dict:
        return {lab: self.exponents[lab] for lab in self.residual_labels}

    def residual_vector(self) -> RepVector:
        return self.u.project_labels(self.residual_labels)


def _require_graded_positive(u: RepVector):
    if u.is_zero():
        raise ZeroVectorError("cannot stratify the zero vector")
    if not u.graded:
        raise ValueError("stratification needs graded lines (rho present)")
    for ln in u.effective_lines():
        if ln.rho < 1:
            raise ValueError(f"line {ln.label!r} has rho < 1; not in the positive slice")


def stratify(
    u: RepVector,
    torus: Subtorus | None = None,
    options: StratifyOptions = StratifyOptions(),
) -> StratifyResult:
    """Run the full iteration on a G-stable vector of the positive slice.

    Raises NotStableError when u fails the stability precondition (with the
    classification certificate attached) and StratifyInternalError if any
    internal invariant breaks, which signals an invalid input.
    """
    _require_graded_positive(u)
    k = u.rank
    g0 = torus if torus is not None else Subtorus.full(k)
    cls = classify(u.restrict(g0))
    if cls.stability != STABLE:
        raise NotStableError(f"input vector is {cls.stability}, not stable", cls)

    tori = [g0]
    stages: list[dict] = []
    removed: set[str] = set()
    x_prev: QVec = tuple(Fraction(0) for _ in range(k))
    effective = {ln.label for ln in u.effective_lines()}

    while tori[-1].dim > 0:
        n = len(stages)
        gn = tori[-1]
        u_n = u.project_labels(effective - removed)
        nu = u_n.fixed_part(gn)
        nu_labels = tuple(sorted(ln.label for ln in nu.effective_lines()))
        removed.update(nu_labels)

        active = [u.line(lab) for lab in sorted(effective - removed)]
        if not active:
            raise StratifyInternalError(
                "EmptyResidual", f"no weights left at stage {n} with dim G_n > 0"
            )
        # sheared, projected points; one polytope generator per distinct point
        pts: dict[tuple, list] = {}
        for ln in active:
            sheared_rho = Fraction(ln.rho) + dot(ln.weight, x_prev)
            point = tuple(
                Fraction(dot(ln.weight, b)) for b in gn.basis
            ) + (sheared_rho,)
            pts.setdefault(point, []).append(ln)
        gens = sorted(pts)
        hull = PolytopeQ.from_points(gens, ambient_dim=gn.dim + 1)
        iv = ray_intersect(hull, list(range(gn.dim)), gn.dim)
        if iv is None:
            raise StratifyInternalError("RayEmpty", f"positive rho-ray misses C_{n}")
        c_n = iv.lo
        c_prev = stages[-1]["c"] if stages else Fraction(0)
        if not c_prev < c_n:
            raise StratifyInternalError(
                "NonIncreasingC", f"c_{n} = {c_n} is not above c_{n - 1} = {c_prev}"
            )
        axis_point = (Fraction(0),) * gn.dim + (c_n,)
        face_idx = minimal_face(hull, axis_point)
        face_pts = [gens[i] for i in face_idx]
        if len(set(face_pts)) < 2:
            raise StratifyInternalError("VertexFace", f"F_{n} degenerates to a vertex")
        s_labels = tuple(
            sorted(ln.label for p in face_pts for ln in pts[p])
        )
        s_weights = frozenset(u.line(lab).full_weight for lab in s_labels)

        proj = u.project_labels(s_labels)
        pcls = classify(proj.restrict(gn))
        if pcls.stability not in (STABLE, POLYSTABLE_NOT_STABLE):
            raise StratifyInternalError(
                "NotPolystable", f"P_S{n}(u) is {pcls.stability} under G_{n}"
            )

        # exact system for x_n inside the span of G_n, in basis coordinates
        eqs, stricts = [], []
        for p in face_pts:
            eqs.append((p[: gn.dim], c_n - p[gn.dim]))
        for p in gens:
            if p not in face_pts:
                stricts.append((p[: gn.dim], c_n - p[gn.dim]))
        y = solve_mixed_system(eqs, stricts, gn.dim)
        if y is None:
            raise StratifyInternalError("NoCocharacter", f"stage {n} system infeasible")
        x_n = tuple(
            sum((yj * Fraction(b[i]) for yj, b in zip(y, gn.basis)), Fraction(0))
            for i in range(k)
        )
        x_prev = tuple(a + b for a, b in zip(x_prev, x_n))

        restricted = sorted({p[: gn.dim] for p in face_pts})
        ker = saturated_kernel(restricted, ambient_dim=gn.dim)
        lifted = tuple(
            tuple(
                sum(z[j] * gn.basis[j][i] for j in range(gn.dim))
                for i in range(k)
            )
            for z in ker.basis
        )
        g_next = Subtorus(k, saturated_kernel_lift(lifted, k))
        if not g_next.dim < gn.dim:
            raise StratifyInternalError(
                "NonDecreasingTorus", f"stabilizer did not shrink at stage {n}"
            )

        dim_hull = hull.dim()
        dim_proj = PolytopeQ.from_points(
            [p[: gn.dim] for p in gens], ambient_dim=gn.dim
        ).dim()
        stages.append(
            dict(
                index=n,
                torus=gn,
                nu_labels=nu_labels,
                s_labels=s_labels,
                s_weights=s_weights,
                c=c_n,
                x_stage=x_n,
                dim_hull=dim_hull,
                dim_projected_hull=dim_proj,
            )
        )
        removed.update(s_labels)
        tori.append(g_next)

    residual = tuple(sorted(effective - removed))

    # minimal sigma clearing every denominator, times the requested multiple
    denoms = [f.denominator for f in x_prev]
    q_of: dict[str, Fraction] = {}
    for lab in sorted(effective):
        ln = u.line(lab)
        q = Fraction(ln.rho) + dot(ln.weight, x_prev)
        q_of[lab] = q
        denoms.append(q.denominator)
    sigma = 1
    for d in denoms:
        sigma = lcm(sigma, d)
    sigma *= options.sigma_multiple
    x = tuple(int(sigma * c) for c in x_prev)

    exponents = u.one_ps_exponents(x, sigma)
    for lab in sorted(effective):
        assert exponents[lab] == sigma * q_of[lab]

    final_stages = tuple(
        Stage(d=int(sigma * s["c"]), **s) for s in stages
    )
    return StratifyResult(
        u=u,
        ambient_rank=k,
        tori=tuple(tori),
        stages=final_stages,
        x=x,
        sigma=sigma,
        residual_labels=residual,
        exponents=exponents,
    )


def saturated_kernel_lift(lifted_basis, ambient):
    """Wrap an already-saturated lifted basis as a Lattice, re-saturating
    defensively through a Smith normal form pass when needed."""
    lat = Lattice(ambient, tuple(tuple(int(c) for c in b) for b in lifted_basis))
    if not lat.is_saturated():
        ker = saturated_kernel(
            nullspace_rows(lat, ambient), ambient_dim=ambient
        )
        return ker
    return lat


def nullspace_rows(lat, ambient):
    """Integer functionals cutting out the rational span of the lattice."""
    if lat.rank == 0:
        return [tuple(int(i == j) for j in range(ambient)) for i in range(ambient)]
    dual = nullspace([qvec(b) for b in lat.basis])
    out = []
    for v in dual:
        denom = 1
        for c in v:
            denom = denom * c.denominator // gcd(denom, c.denominator)
        out.append(tuple(int(c * denom) for c in v))
    return out


# ---------------------------------------------------------------------------
# verification


@dataclass
class CheckReport:
    checks: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, bool(ok), detail))

    @property
    def all_ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self):
        return [(n, d) for n, ok, d in self.checks if not ok]


def verify_decomposition(result: StratifyResult, u: RepVector) -> CheckReport:
    """Recompute every exponent independently and check all the bounds, the
    fixedness conditions, per-stage polystability, and the exact sum."""
    rep = CheckReport()
    exps = u.one_ps_exponents(result.x, result.sigma)
    ladder = result.d_ladder
    rep.add(
        "ladder-strictly-increasing",
        all(a < b for a, b in zip((0,) + ladder, ladder)),
        f"d = {ladder}",
    )
    rep.add("sigma-positive", result.sigma >= 1, f"sigma = {result.sigma}")

    prev_d = 0
    for i, st in enumerate(result.stages):
        s_exp = {lab: exps[lab] for lab in st.s_labels}
        rep.add(
            f"stage{i}-projection-exponent",
            all(e == st.d for e in s_exp.values()),
            f"expected {st.d}, got {sorted(set(s_exp.values()))}",
        )
        nu_exp = {lab: exps[lab] for lab in st.nu_labels}
        rep.add(
            f"stage{i}-nu-bound",
            all(e > prev_d for e in nu_exp.values()),
            f"need > {prev_d}, got {sorted(nu_exp.values())}",
        )
        nu_vec = u.project_labels(st.nu_labels)
        fixed = nu_vec.fixed_part(st.torus)
        rep.add(
            f"stage{i}-nu-fixed",
            fixed.amplitudes == nu_vec.amplitudes,
            "nu_i must be fixed by G_i",
        )
        proj = u.project_labels(st.s_labels)
        next_torus = result.tori[i + 1]
        rep.add(
            f"stage{i}-projection-fixed-by-next",
            proj.fixed_part(next_torus).amplitudes == proj.amplitudes,
            "P_Si(u) must be fixed by G_{i+1}",
        )
        pcls = classify(proj.restrict(st.torus))
        rep.add(
            f"stage{i}-polystable",
            pcls.stability in (STABLE, POLYSTABLE_NOT_STABLE),
            pcls.stability,
        )
        prev_d = st.d

    res_exp = {lab: exps[lab] for lab in result.residual_labels}
    rep.add(
        "residual-bound",
        all(e > prev_d for e in res_exp.values()),
        f"need > {prev_d}, got {sorted(res_exp.values())}",
    )
    rep.add(
        "all-exponents-positive",
        all(e > 0 for e in exps.values()),
        str(sorted(exps.values())[:5]),
    )

    buckets = list(result.residual_labels)
    for st in result.stages:
        buckets.extend(st.nu_labels)
        buckets.extend(st.s_labels)
    eff = sorted(ln.label for ln in u.effective_lines())
    rep.add(
        "exact-sum-decomposition",
        sorted(buckets) == eff,
        "every effective component in exactly one bucket",
    )
    rep.add(
        "termination-bound",
        result.num_stages <= result.tori[0].dim + 1,
        f"{result.num_stages} stages for dim G = {result.tori[0].dim}",
    )
    rep.add(
        "tori-strictly-decreasing",
        all(a.dim > b.dim for a, b in zip(result.tori, result.tori[1:])),
        str([t.dim for t in result.tori]),
    )
    for i, st in enumerate(result.stages):
        if st.dim_hull == st.dim_projected_hull:
            rep.add(
                f"stage{i}-equal-dim-stop",
                i == result.num_stages - 1 and not result.residual_labels,
                "equal-dimension case must stop with zero residual",
            )
    return rep


def stage_kn_minimizers(result: StratifyResult) -> list[tuple[KNResult, dict]]:
    """Per-stage Kempf-Ness minimizers of P_Si(u) under G_i, together with
    the rescaled amplitudes of the minimizing metric.  Diagnostic only: the
    combinatorial stratification never depends on these numbers."""
    out = []
    for st in result.stages:
        proj = result.u.project_labels(st.s_labels).restrict(st.torus)
        res = kn_minimize(KNProblem.from_vector(proj))
        rescaled = {}
        if res.minimizer is not None:
            rescaled = proj.rescale(res.minimizer).amplitudes
        out.append((res, dict(rescaled)))
    return out
