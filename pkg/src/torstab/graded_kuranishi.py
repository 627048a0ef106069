"""Finite-dimensional graded three-term complexes with a quadratic bracket:
Green's operator as a pseudoinverse, the quadratic correction map, its
grade-by-grade inverse on positively graded inputs, and the obstruction.

The complex is C0 -> C1 -> C2 with grade-preserving differentials d0, d1
(d1 d0 = 0) and a grade-additive symmetric bilinear bracket C1 x C1 -> C2,
all over complex coordinate spaces with the standard hermitian inner
products.  Writing q(u) = [u, u]/2, the forward map is

    kappa(u) = u + d1* Gamma(q(u)),

with Gamma the Moore-Penrose pseudoinverse of d1 d1* on C2.  Since the
bracket of positive grades lands in strictly higher grade, kappa restricted
to positively graded vectors is inverted exactly by the recursion that
copies the lowest grade and corrects each higher grade by the brackets of
the already-known lower ones.

Vectors at level one or two are plain dicts mapping a grade to a complex
array; missing grades mean zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

import numpy as np

from .qexact import nullspace, rational_rank

GVec = dict  # grade -> complex ndarray

_RCOND = 1e-12


@dataclass(frozen=True)
class GradedComplex:
    grades: tuple[int, ...]
    dims: dict  # grade -> (n0, n1, n2)
    d0: dict  # grade -> (n1 x n0)
    d1: dict  # grade -> (n2 x n1)
    bracket: dict  # (g1, g2) -> (n2[g1+g2] x n1[g1] x n1[g2])

    def __post_init__(self):
        if tuple(sorted(self.grades)) != self.grades:
            raise ValueError("grades must be sorted")
        for g in self.grades:
            n0, n1, n2 = self.dims[g]
            if self.d0[g].shape != (n1, n0) or self.d1[g].shape != (n2, n1):
                raise ValueError(f"differential shape mismatch at grade {g}")
            comp = self.d1[g] @ self.d0[g]
            scale = max(
                1.0,
                float(np.abs(self.d1[g]).max(initial=0.0)),
                float(np.abs(self.d0[g]).max(initial=0.0)),
            )
            if comp.size and float(np.abs(comp).max()) > 1e-12 * scale * scale:
                raise ValueError(f"d1 d0 != 0 at grade {g}")
        for (g1, g2), t in self.bracket.items():
            if g1 not in self.dims or g2 not in self.dims or g1 + g2 not in self.dims:
                raise ValueError(f"bracket grades ({g1}, {g2}) leave the range")
            n2 = self.dims[g1 + g2][2]
            if t.shape != (n2, self.dims[g1][1], self.dims[g2][1]):
                raise ValueError(f"bracket tensor shape mismatch at ({g1}, {g2})")
            partner = self.bracket.get((g2, g1))
            if partner is None or not np.array_equal(
                t, np.transpose(partner, (0, 2, 1))
            ):
                raise ValueError(f"bracket not symmetric at ({g1}, {g2})")

    def n1(self, g) -> int:
        return self.dims[g][1] if g in self.dims else 0

    def n2(self, g) -> int:
        return self.dims[g][2] if g in self.dims else 0

    def zero1(self) -> GVec:
        return {g: np.zeros(self.n1(g), dtype=complex) for g in self.grades}

    def zero2(self) -> GVec:
        return {g: np.zeros(self.n2(g), dtype=complex) for g in self.grades}


@dataclass(frozen=True)
class SliceVector:
    """Level-one graded vector; positive when supported in grades > 0."""

    parts: dict

    @property
    def is_positive(self) -> bool:
        return all(
            g > 0 for g, arr in self.parts.items() if np.any(np.asarray(arr) != 0)
        )


def gvec(parts) -> GVec:
    return {g: np.asarray(a, dtype=complex) for g, a in parts.items()}


def gvec_add(a: GVec, b: GVec) -> GVec:
    out = dict(a)
    for g, arr in b.items():
        out[g] = out.get(g, 0) + arr
    return out


def gvec_scale_action(t: complex, a: GVec) -> GVec:
    """The grading circle action: grade-j parts pick up t^j."""
    return {g: (t ** g) * arr for g, arr in a.items()}


def gvec_norm(a: GVec) -> float:
    return float(np.sqrt(sum(float(np.vdot(x, x).real) for x in a.values())))


def gvec_truncate(a: GVec, max_grade: int) -> GVec:
    return {g: arr for g, arr in a.items() if g <= max_grade}


def bracket_eval(cx: GradedComplex, u: GVec, v: GVec) -> GVec:
    out = cx.zero2()
    for (g1, g2), t in cx.bracket.items():
        x = u.get(g1)
        y = v.get(g2)
        if x is None or y is None or t.size == 0:
            continue
        out[g1 + g2] = out[g1 + g2] + np.einsum("kij,i,j->k", t, x, y)
    return out


def quadratic_part(cx: GradedComplex, u: GVec) -> GVec:
    """q(u) = [u, u]/2, the quadratic term fed to the forward map."""
    return {g: a / 2.0 for g, a in bracket_eval(cx, u, u).items()}


def d1_apply(cx: GradedComplex, u: GVec) -> GVec:
    out = cx.zero2()
    for g, arr in u.items():
        if g in cx.d1 and cx.d1[g].size:
            out[g] = out[g] + cx.d1[g] @ arr
    return out


@dataclass(frozen=True)
class GreensOperator:
    gamma: dict  # grade -> matrix on C2
    harmonic: dict  # grade -> projector onto harmonic C2
    status: str  # "ok" or "ill-conditioned"
    condition: float

    def apply(self, v: GVec) -> GVec:
        return {g: (self.gamma[g] @ arr if arr.size else arr) for g, arr in v.items()}

    def project_harmonic(self, v: GVec) -> GVec:
        return {g: (self.harmonic[g] @ arr if arr.size else arr) for g, arr in v.items()}


def greens_operator(cx: GradedComplex) -> GreensOperator:
    """Pseudoinverse of the Laplacian d1 d1* per grade, with the harmonic
    projector.

    A singular value falling in the gray zone just above the rank cutoff
    makes the zero/nonzero split numerically ambiguous; that is reported as
    an ill-conditioned warning status rather than a failure.
    """
    gamma, harm = {}, {}
    worst = 1.0
    ambiguous = False
    for g in cx.grades:
        d1 = cx.d1[g]
        n2 = cx.n2(g)
        lap = d1 @ d1.conj().T
        if n2 == 0:
            gamma[g] = np.zeros((0, 0), dtype=complex)
            harm[g] = np.zeros((0, 0), dtype=complex)
            continue
        pinv = np.linalg.pinv(lap, rcond=_RCOND, hermitian=True)
        gamma[g] = pinv
        harm[g] = np.eye(n2, dtype=complex) - lap @ pinv
        s = np.linalg.svd(lap, compute_uv=False)
        if s.size and s[0] > 0:
            cutoff = _RCOND * s[0]
            nz = s[s > cutoff]
            if nz.size:
                worst = max(worst, float(s[0] / nz[-1]))
            if np.any((s > cutoff) & (s < 1e4 * cutoff)):
                ambiguous = True
    status = "ill-conditioned" if ambiguous else "ok"
    return GreensOperator(gamma, harm, status, worst)


def kuranishi_forward(cx: GradedComplex, u: GVec, greens: GreensOperator | None = None) -> GVec:
    """kappa(u) = u + d1* Gamma(q(u))."""
    greens = greens or greens_operator(cx)
    corr = greens.apply(quadratic_part(cx, u))
    out = {g: np.array(arr, dtype=complex) for g, arr in u.items()}
    for g, arr in corr.items():
        if g in cx.d1 and cx.d1[g].size and arr.size:
            out[g] = out.get(g, np.zeros(cx.n1(g), dtype=complex)) + cx.d1[g].conj().T @ arr
    return out


def kuranishi_inverse_graded(
    cx: GradedComplex, x: GVec, greens: GreensOperator | None = None
) -> GVec:
    """The unique positively graded u with kappa(u) = x, built grade by
    grade: the lowest grade is copied and grade j is corrected by the
    brackets of strictly lower grades, so the recursion always terminates
    and only ever reads input grades <= j to produce output grades <= j.
    """
    sv = SliceVector(x)
    if not sv.is_positive:
        raise ValueError("input must be supported in positive grades")
    greens = greens or greens_operator(cx)
    u: GVec = {}
    for g in sorted(gr for gr in cx.grades if gr > 0):
        target = x.get(g, np.zeros(cx.n1(g), dtype=complex)).astype(complex)
        corr = np.zeros(cx.n1(g), dtype=complex)
        for (a, b), t in cx.bracket.items():
            if a + b != g or a not in u or b not in u or t.size == 0:
                continue
            contrib = 0.5 * np.einsum("kij,i,j->k", t, u[a], u[b])
            if cx.d1[g].size:
                corr = corr + cx.d1[g].conj().T @ (greens.gamma[g] @ contrib)
        u[g] = target - corr
    return u


def obstruction(cx: GradedComplex, x: GVec, greens: GreensOperator | None = None) -> GVec:
    """k(x) = (1/2) P [x, x], the harmonic projection of the bracket square."""
    greens = greens or greens_operator(cx)
    return greens.project_harmonic(quadratic_part(cx, x))


def curvature(cx: GradedComplex, u: GVec) -> GVec:
    """d1 u + q(u); vanishes on the deformation space the slice models."""
    return gvec_add(d1_apply(cx, u), quadratic_part(cx, u))


def satisfies_slice_conditions(cx: GradedComplex, u: GVec, tol: float = 1e-9) -> bool:
    """Model slice conditions under which curvature(u) = obstruction(kappa(u))
    holds: kappa(u) is d1-closed and q(u), q(kappa(u)) share their harmonic
    part."""
    greens = greens_operator(cx)
    x = kuranishi_forward(cx, u, greens)
    closed = gvec_norm(d1_apply(cx, x))
    qu = greens.project_harmonic(quadratic_part(cx, u))
    qx = greens.project_harmonic(quadratic_part(cx, x))
    drift = gvec_norm({g: qu[g] - qx[g] for g in qu})
    scale = max(1.0, gvec_norm(u))
    return closed <= tol * scale and drift <= tol * scale * scale


# ---------------------------------------------------------------------------
# generators


def _int_matrix(rng, rows, cols, lo=-2, hi=3):
    return rng.integers(lo, hi, size=(rows, cols)).astype(complex)


def _integer_kernel_matrix(m) -> np.ndarray:
    """Integer matrix whose columns span ker(m) exactly (m integer)."""
    n_rows, n_cols = m.shape
    if n_rows == 0:
        return np.eye(n_cols, dtype=complex)
    rows = [[int(v.real) for v in row] for row in m]
    basis = nullspace(rows)
    cols = []
    for v in basis:
        mult = lcm(*[f.denominator for f in v]) if v else 1
        cols.append([int(f * mult) for f in v])
    if not cols:
        return np.zeros((len(rows[0]), 0), dtype=complex)
    return np.array(cols, dtype=complex).T


def random_graded_complex(
    rng,
    grades=(1, 2, 3, 4),
    max_dim=5,
    bracket_density=0.6,
    surjective_d1_above=None,
):
    """Random complex with exact integer structure constants.

    d0 is built inside ker(d1) so d1 d0 = 0 holds exactly.  When
    surjective_d1_above is set, every grade above it gets a full-row-rank
    d1, killing harmonic C2 there (used by slice-instance construction).
    """
    grades = tuple(sorted(grades))
    dims, d0, d1 = {}, {}, {}
    for g in grades:
        n1 = int(rng.integers(1, max_dim + 1))
        n2 = int(rng.integers(0, max(1, n1)))
        if surjective_d1_above is not None and g > surjective_d1_above and n2 > 0:
            while True:
                m = _int_matrix(rng, n2, n1)
                if rational_rank([[int(v.real) for v in row] for row in m]) == n2:
                    break
        else:
            m = _int_matrix(rng, n2, n1)
        ker = _integer_kernel_matrix(m)
        n0 = int(rng.integers(0, ker.shape[1] + 1))
        mix = _int_matrix(rng, ker.shape[1], n0, lo=-1, hi=2) if n0 else np.zeros(
            (ker.shape[1], 0), dtype=complex
        )
        dims[g] = (n0, n1, n2)
        d1[g] = m
        d0[g] = ker @ mix if ker.size else np.zeros((n1, n0), dtype=complex)
    bracket = {}
    for a in grades:
        for b in grades:
            if a > b or (a + b) not in dims:
                continue
            n2 = dims[a + b][2]
            t = _int_matrix(rng, n2 * dims[a][1], dims[b][1]).reshape(
                n2, dims[a][1], dims[b][1]
            )
            t = np.where(rng.random(t.shape) < bracket_density, t, 0)
            if a == b:
                t = t + np.transpose(t, (0, 2, 1))
                bracket[(a, a)] = t
            else:
                bracket[(a, b)] = t
                bracket[(b, a)] = np.transpose(t, (0, 2, 1))
    return GradedComplex(grades, dims, d0, d1, bracket)


def nilpotent_chain_complex(n: int = 3, grades=(1, 2, 3)):
    """Deterministic triangular model: one line per grade at each level,
    shift differentials, and a bracket stacking grades additively."""
    grades = tuple(sorted(grades))
    dims = {g: (1, 2, 1) for g in grades}
    d0 = {g: np.array([[1.0], [0.0]], dtype=complex) for g in grades}
    d1 = {g: np.array([[0.0, 1.0]], dtype=complex) for g in grades}
    bracket = {}
    for a in grades:
        for b in grades:
            if (a + b) in dims:
                t = np.zeros((1, 2, 2), dtype=complex)
                t[0, 0, 0] = 1.0
                bracket[(a, b)] = t
    return GradedComplex(grades, dims, d0, d1, bracket)


def random_slice_instance(rng, grades=(1, 2, 3, 4), max_dim=5):
    """(complex, u, x) satisfying the model slice conditions: harmonic C2 is
    confined to the lowest grade and x is a d1-closed positive vector, so
    curvature(kappa^{-1}(x)) and the obstruction both vanish."""
    grades = tuple(sorted(grades))
    while True:
        cx = random_graded_complex(
            rng, grades=grades, max_dim=max_dim, surjective_d1_above=grades[0]
        )
        x = {}
        for g in grades:
            n1 = cx.n1(g)
            ker = _integer_kernel_matrix(cx.d1[g])
            if ker.shape[1]:
                coeff = rng.normal(size=ker.shape[1]) + 1j * rng.normal(size=ker.shape[1])
                x[g] = ker @ coeff
            else:
                x[g] = np.zeros(n1, dtype=complex)
        if any(np.any(arr != 0) for arr in x.values()):
            u = kuranishi_inverse_graded(cx, x)
            return cx, u, x
