"""Symbolic combinatorics of polystable systems of Hodge bundles.

A system is a list of stable blocks, each a chain of Hodge summands with
ranks and degrees.  Everything here is index bookkeeping: automorphism
tori and their relation character, the graded weight lines of the positive
deformation slice, partition lattices with dimension counts, Riemann-Roch
positivity bounds, the cyclic Higgs-direction stability construction, and
the integer degree table governing metric rescaling exponents.

Grading sign convention.  A Hom-component mapping the Hodge summand at
index b of block j into the summand at index a of block i carries, in the
default convention, circle weight b - a on bundle-direction (beta) classes
and b - a + 1 on Higgs-direction (phi) classes, and torus weight e_i - e_j;
so Higgs-parallel deformations are circle-fixed and quadratic-differential
directions land in the positive slice.  The "flipped" convention negates
both, matching the opposite reading of the index pair.  All identities in
the test suite run under both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import TorstabError
from .qexact import dot
from .stability import classify
from .torus_rep import RepVector, Subtorus, Torus, WeightLine

DEFAULT = "default"
FLIPPED = "flipped"
CONVENTIONS = (DEFAULT, FLIPPED)

MAX_PARTITION_BLOCKS = 8


@dataclass(frozen=True)
class StableBlock:
    """One stable summand: Hodge chain lengths, per-summand ranks, degrees.

    Degree-zero SL-block: degrees sum to zero, the first degree is positive
    and the last negative unless the chain has length one.  The tag is an
    opaque identity marker: blocks with equal discrete data but different
    tags stand for non-isomorphic summands (e.g. two distinct degree-zero
    line bundles), which is the user's assertion to make.
    """

    ranks: tuple[int, ...]
    degrees: tuple[int, ...]
    tag: str = ""

    def __post_init__(self):
        if len(self.ranks) != len(self.degrees) or not self.ranks:
            raise ValueError("ranks and degrees must be nonempty and aligned")
        if any(r < 1 for r in self.ranks):
            raise ValueError("summand ranks must be >= 1")
        if sum(self.degrees) != 0:
            raise ValueError("block degrees must sum to zero")
        ell = len(self.ranks)
        if ell == 1:
            if self.degrees[0] != 0:
                raise ValueError("length-one block must have degree zero")
        else:
            if self.degrees[0] <= 0 or self.degrees[-1] >= 0:
                raise ValueError(
                    "first degree must be positive and last negative for a chain"
                )

    @property
    def hodge_length(self) -> int:
        return len(self.ranks)

    @property
    def rank(self) -> int:
        return sum(self.ranks)


@dataclass(frozen=True)
class SHBSpec:
    genus: int
    blocks: tuple[StableBlock, ...]

    def __post_init__(self):
        if self.genus < 2:
            raise ValueError("genus must be >= 2")
        if not self.blocks:
            raise ValueError("need at least one block")

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def total_rank(self) -> int:
        return sum(b.rank for b in self.blocks)

    @property
    def abelian(self) -> bool:
        """Pairwise distinct block data, the model-level proxy for pairwise
        non-isomorphic stable summands."""
        return len(set(self.blocks)) == self.k

    def block_ranks(self) -> tuple[int, ...]:
        return tuple(b.rank for b in self.blocks)


@dataclass(frozen=True)
class AutomorphismTorus:
    """Scalar automorphisms (xi_1, ..., xi_k) subject to prod xi_i^{r_i} = 1,
    presented as a saturated subtorus of the ambient coordinate torus."""

    ambient_rank: int
    relation_character: tuple[int, ...]
    subtorus: Subtorus

    def restrict(self, weight: Sequence[int]) -> tuple[int, ...]:
        return tuple(int(dot(weight, b)) for b in self.subtorus.basis)

    @property
    def rank(self) -> int:
        return self.subtorus.dim

    @property
    def torus(self) -> Torus:
        """Standalone torus carrying the character restriction map."""
        return Torus(self.rank, embedding=self.subtorus.basis)


def automorphism_torus(shb: SHBSpec) -> AutomorphismTorus:
    if not shb.abelian:
        raise TorstabError("automorphism torus needs pairwise distinct blocks")
    ranks = shb.block_ranks()
    sub = Subtorus.kernel_of([ranks], rank=shb.k)
    return AutomorphismTorus(shb.k, ranks, sub)


def _check_convention(convention: str):
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")


def class_label(kind: str, cod: tuple[int, int], dom: tuple[int, int]) -> str:
    return f"{kind}[{cod[0]}.{cod[1]}|{dom[0]}.{dom[1]}]"


def index_classes(shb: SHBSpec):
    """All Hom-index classes ((cod block, cod hodge), (dom block, dom hodge))."""
    out = []
    for p, bp in enumerate(shb.blocks, start=1):
        for q, bq in enumerate(shb.blocks, start=1):
            for a in range(1, bp.hodge_length + 1):
                for b in range(1, bq.hodge_length + 1):
                    out.append(((p, a), (q, b)))
    return out


def class_weight_data(cod, dom, k: int, convention: str = DEFAULT):
    """(ambient torus weight, beta circle weight) of an index class."""
    _check_convention(convention)
    (p, a), (q, b) = cod, dom
    w = [0] * k
    if convention == DEFAULT:
        w[p - 1] += 1
        w[q - 1] -= 1
        rho_beta = b - a
    else:
        w[q - 1] += 1
        w[p - 1] -= 1
        rho_beta = a - b
    return tuple(w), rho_beta


def positive_slice_lines(shb: SHBSpec, convention: str = DEFAULT) -> tuple[WeightLine, ...]:
    """Weight lines of the positively graded deformation slice: one line per
    admissible index class, beta classes with rho = beta grade and phi
    classes shifted by one, keeping only rho >= 1."""
    if not shb.abelian:
        raise TorstabError("positive slice needs pairwise distinct blocks")
    _check_convention(convention)
    lines = []
    for cod, dom in index_classes(shb):
        w, rho_beta = class_weight_data(cod, dom, shb.k, convention)
        if rho_beta >= 1:
            lines.append(WeightLine(class_label("beta", cod, dom), w, rho=rho_beta))
        if rho_beta + 1 >= 1:
            lines.append(WeightLine(class_label("phi", cod, dom), w, rho=rho_beta + 1))
    return tuple(lines)


def slice_vector(
    shb: SHBSpec,
    amplitudes: Mapping[str, complex],
    convention: str = DEFAULT,
) -> RepVector:
    """A vector of the positive slice with the given amplitudes (absent
    labels are zero)."""
    lines = positive_slice_lines(shb, convention)
    known = {ln.label for ln in lines}
    for lab in amplitudes:
        if lab not in known:
            raise KeyError(f"{lab!r} is not a positive-slice class")
    amps = {ln.label: complex(amplitudes.get(ln.label, 0.0)) for ln in lines}
    return RepVector(lines, amps)


# ---------------------------------------------------------------------------
# dimensions and partitions


def expected_dim_central_locus(r: int, g: int) -> int:
    """Dimension of the central locus (r^2 - 1)(g - 1), half the moduli
    dimension for rank r and genus g."""
    if r < 2 or g < 2:
        raise ValueError("need r >= 2 and g >= 2")
    return (r * r - 1) * (g - 1)


@dataclass(frozen=True)
class PartitionP:
    """Partition of the block index set {0, ..., k-1} into sorted parts."""

    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = [i for part in self.parts for i in part]
        if not self.parts or any(not p for p in self.parts):
            raise ValueError("parts must be nonempty")
        if sorted(seen) != list(range(len(seen))):
            raise ValueError("parts must partition a full index range")

    @staticmethod
    def of(parts) -> "PartitionP":
        norm = tuple(sorted(tuple(sorted(p)) for p in parts))
        return PartitionP(norm)

    @property
    def is_trivial(self) -> bool:
        return len(self.parts) == 1

    def refines(self, coarser: "PartitionP") -> bool:
        return all(
            any(set(p) <= set(cp) for cp in coarser.parts) for p in self.parts
        )


def partition_dim(partition: PartitionP, block_ranks: Sequence[int], g: int) -> int:
    """Sum over parts of (r_part^2 - 1)(g - 1) with r_part the total rank."""
    if g < 2:
        raise ValueError("genus must be >= 2")
    total = 0
    for part in partition.parts:
        r = sum(block_ranks[i] for i in part)
        total += (r * r - 1) * (g - 1)
    return total


def partition_dim_comparison(partition: PartitionP, block_ranks: Sequence[int], g: int):
    """(partition dimension, strictly smaller than the full central locus)."""
    dim = partition_dim(partition, block_ranks, g)
    full = (sum(block_ranks) ** 2 - 1) * (g - 1)
    return dim, dim < full


def _set_partitions(n: int):
    if n == 0:
        yield []
        return
    if n == 1:
        yield [[0]]
        return
    for smaller in _set_partitions(n - 1):
        for i in range(len(smaller)):
            yield smaller[:i] + [smaller[i] + [n - 1]] + smaller[i + 1:]
        yield smaller + [[n - 1]]


@dataclass(frozen=True)
class PartitionPoset:
    partitions: tuple[PartitionP, ...]
    # pairs (i, j) with partitions[i] > partitions[j] (strict coarsening)
    order: frozenset

    def greater(self, a: PartitionP, b: PartitionP) -> bool:
        return (self.partitions.index(a), self.partitions.index(b)) in self.order

    @property
    def maximum(self) -> PartitionP:
        tops = [p for p in self.partitions if p.is_trivial]
        return tops[0]


def partitions_with_order(shb: SHBSpec) -> PartitionPoset:
    """All partitions of the block multiset, ordered by strict coarsening
    (P > P' when P' refines P).  Partitions identifying the same multiset of
    block-data multisets are deduplicated."""
    k = shb.k
    if k > MAX_PARTITION_BLOCKS:
        raise TorstabError(f"partition enumeration capped at {MAX_PARTITION_BLOCKS} blocks")
    raw = [PartitionP.of(parts) for parts in _set_partitions(k)]

    def block_key(i):
        b = shb.blocks[i]
        return (b.ranks, b.degrees, b.tag)

    def signature(p: PartitionP):
        return tuple(
            sorted(tuple(sorted(block_key(i) for i in part)) for part in p.parts)
        )

    reps: dict = {}
    classes: dict = {}
    for p in raw:
        sig = signature(p)
        classes.setdefault(sig, []).append(p)
        reps.setdefault(sig, p)
    parts = tuple(reps[sig] for sig in reps)
    order = set()
    for ia, pa in enumerate(parts):
        siga = signature(pa)
        for ib, pb in enumerate(parts):
            if ia == ib:
                continue
            # pb fixed; pa > pb iff some member of pa's class is coarser
            if any(pb.refines(cand) and pb != cand for cand in classes[siga]):
                order.add((ia, ib))
    return PartitionPoset(parts, frozenset(order))


def rr_h1_lower_bound(r1: int, r2: int, deg: int, g: int):
    """Riemann-Roch bound h^1(Hom) >= max(0, -deg + r1 r2 (g-1)) together
    with the positivity verdict; positive whenever deg <= 0."""
    if r1 < 1 or r2 < 1 or g < 2:
        raise ValueError("need r1, r2 >= 1 and g >= 2")
    bound = max(0, -deg + r1 * r2 * (g - 1))
    return bound, bound > 0


# ---------------------------------------------------------------------------
# cyclic Higgs direction


def cyclic_phi_weights(shb: SHBSpec, convention: str = DEFAULT):
    """Unit-amplitude vector on the cyclic Higgs classes, last Hodge summand
    of each block mapping into the first summand of the next block, with its
    stability verdict under the relation torus."""
    if not shb.abelian:
        raise TorstabError("cyclic construction needs pairwise distinct blocks")
    if shb.k < 2:
        raise TorstabError("cyclic construction needs at least two blocks")
    _check_convention(convention)
    torus = automorphism_torus(shb)
    lines = []
    for i, blk in enumerate(shb.blocks, start=1):
        j = i % shb.k + 1
        # geometric map: last summand of block i into first summand of block
        # j; the index-slot order of the class follows the convention
        if convention == DEFAULT:
            first, second = (j, 1), (i, blk.hodge_length)
        else:
            first, second = (i, blk.hodge_length), (j, 1)
        w, rho_beta = class_weight_data(first, second, shb.k, convention)
        lines.append(WeightLine(class_label("phi", first, second), w, rho=rho_beta + 1))
    ambient = RepVector(tuple(lines), {ln.label: 1.0 for ln in lines})
    restricted = ambient.restrict(torus.subtorus)
    verdict = classify(restricted)
    return restricted, verdict


# ---------------------------------------------------------------------------
# conformal-limit degree table


@dataclass(frozen=True)
class ConformalDegreeTable:
    """Integer metric-rescaling degree per index class under a one-parameter
    subgroup (x, sigma): twice the beta-grade exponent, so diagonal classes
    sit at zero and composition of classes adds degrees."""

    x: tuple[int, ...]
    sigma: int
    convention: str
    entries: dict

    def degree(self, cod, dom) -> int:
        return self.entries[(cod, dom)]

    def degree_of_label(self, label: str) -> int:
        kind, rest = label.split("[", 1)
        cod_s, dom_s = rest.rstrip("]").split("|")
        cod = tuple(int(v) for v in cod_s.split("."))
        dom = tuple(int(v) for v in dom_s.split("."))
        return self.degree(cod, dom)

    def in_filtration(self, cod, dom, d: int) -> bool:
        """Filtration membership: degree at least d."""
        return self.degree(cod, dom) >= d

    def filtration(self, d: int):
        return {key for key, deg in self.entries.items() if deg >= d}


def conformal_degree_table(
    shb: SHBSpec,
    x: Sequence[int],
    sigma: int,
    convention: str = DEFAULT,
) -> ConformalDegreeTable:
    if sigma < 1:
        raise ValueError("sigma must be a positive integer")
    if any(int(v) != v for v in x):
        raise ValueError("x must be an integral cocharacter")
    xs = tuple(int(v) for v in x)
    if len(xs) != shb.k:
        raise ValueError("x must be an ambient cocharacter, one entry per block")
    entries = {}
    for cod, dom in index_classes(shb):
        w, rho_beta = class_weight_data(cod, dom, shb.k, convention)
        entries[(cod, dom)] = 2 * sigma * rho_beta + 2 * int(dot(w, xs))
    return ConformalDegreeTable(xs, sigma, convention, entries)
