"""Complex-torus representations as weight-labeled coordinate lines.

A representation is a list of lines, each carrying an integer weight for the
torus (plus an optional positive integer rho-weight for a distinguished
C^*-factor in graded settings) and a positive squared-norm scale.  A vector
assigns a complex amplitude to each line.  All weight arithmetic is exact;
amplitudes are ordinary complex floats and only their being literally zero
or not ever influences a combinatorial decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .qexact import Lattice, dot, saturated_kernel


@dataclass(frozen=True)
class Torus:
    """A complex torus (C^x)^rank; cocharacters are integer vectors.

    The optional embedding records how this torus sits inside an ambient
    coordinate torus, as the integer character quotient map (one row per
    cocharacter-basis vector of the subtorus, full row rank)."""

    rank: int
    embedding: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        if self.embedding is not None:
            from .qexact import rational_rank

            if len(self.embedding) != self.rank:
                raise ValueError("embedding needs one row per rank")
            if self.rank and rational_rank(self.embedding) != self.rank:
                raise ValueError("embedding map must have full row rank")

    def restrict_character(self, weight: Sequence[int]) -> tuple[int, ...]:
        if self.embedding is None:
            raise ValueError("torus carries no embedding data")
        return tuple(int(dot(weight, row)) for row in self.embedding)


@dataclass(frozen=True)
class Subtorus:
    """Subtorus of (C^x)^parent_rank given by a saturated cocharacter lattice."""

    parent_rank: int
    lattice: Lattice

    def __post_init__(self):
        if self.lattice.ambient_dim != self.parent_rank:
            raise ValueError("lattice dimension must match the parent rank")
        if not self.lattice.is_saturated():
            raise ValueError("cocharacter lattice must be saturated")

    @staticmethod
    def full(rank: int) -> "Subtorus":
        basis = tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank))
        return Subtorus(rank, Lattice(rank, basis))

    @staticmethod
    def trivial(rank: int) -> "Subtorus":
        return Subtorus(rank, Lattice(rank, ()))

    @staticmethod
    def kernel_of(characters: Sequence[Sequence[int]], rank: int) -> "Subtorus":
        return Subtorus(rank, saturated_kernel(characters, ambient_dim=rank))

    @property
    def dim(self) -> int:
        return self.lattice.rank

    @property
    def basis(self):
        return self.lattice.basis


@dataclass(frozen=True)
class WeightLine:
    """One coordinate line: a label, a torus weight, an optional rho-weight
    for the grading circle, and a positive squared-norm scale."""

    label: str
    weight: tuple[int, ...]
    rho: int | None = None
    norm2: float = 1.0

    def __post_init__(self):
        if self.norm2 <= 0:
            raise ValueError("squared-norm scale must be positive")

    @property
    def graded(self) -> bool:
        return self.rho is not None

    @property
    def full_weight(self) -> tuple[int, ...]:
        return self.weight if self.rho is None else self.weight + (self.rho,)


@dataclass(frozen=True)
class RepVector:
    """A vector in a torus representation: lines plus complex amplitudes."""

    lines: tuple[WeightLine, ...]
    amplitudes: Mapping[str, complex]

    def __post_init__(self):
        labels = [ln.label for ln in self.lines]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate line labels")
        known = set(labels)
        for lab, amp in self.amplitudes.items():
            if lab not in known:
                raise ValueError(f"amplitude for unknown line {lab!r}")
            if not (math.isfinite(amp.real if isinstance(amp, complex) else amp)
                    and math.isfinite(amp.imag if isinstance(amp, complex) else 0.0)):
                raise ValueError(f"non-finite amplitude on line {lab!r}")
        ranks = {len(ln.weight) for ln in self.lines}
        if len(ranks) > 1:
            raise ValueError("inconsistent weight dimensions")
        gradings = {ln.graded for ln in self.lines}
        if len(gradings) > 1:
            raise ValueError("cannot mix graded and ungraded lines")

    @staticmethod
    def make(lines: Iterable[WeightLine], amplitudes: Mapping[str, complex]) -> "RepVector":
        return RepVector(tuple(lines), dict(amplitudes))

    @property
    def rank(self) -> int:
        return len(self.lines[0].weight) if self.lines else 0

    @property
    def graded(self) -> bool:
        return bool(self.lines) and self.lines[0].graded

    def line(self, label: str) -> WeightLine:
        for ln in self.lines:
            if ln.label == label:
                return ln
        raise KeyError(label)

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes.get(label, 0.0))

    def is_zero(self) -> bool:
        return all(self.amplitude(ln.label) == 0 for ln in self.lines)

    def effective_lines(self) -> tuple[WeightLine, ...]:
        return tuple(ln for ln in self.lines if self.amplitude(ln.label) != 0)

    def effective_weights(self) -> frozenset[tuple[int, ...]]:
        """Distinct full weights carrying a nonzero amplitude."""
        return frozenset(ln.full_weight for ln in self.effective_lines())

    def effective_g_weights(self) -> frozenset[tuple[int, ...]]:
        """Distinct torus weights (rho dropped) carrying a nonzero amplitude."""
        return frozenset(ln.weight for ln in self.effective_lines())

    def project(self, weights: Iterable[tuple[int, ...]]) -> "RepVector":
        """Zero out every component whose full weight is not in the set."""
        keep = frozenset(weights)
        amps = {
            ln.label: (self.amplitude(ln.label) if ln.full_weight in keep else 0.0)
            for ln in self.lines
        }
        return RepVector(self.lines, amps)

    def project_labels(self, labels: Iterable[str]) -> "RepVector":
        keep = frozenset(labels)
        amps = {
            ln.label: (self.amplitude(ln.label) if ln.label in keep else 0.0)
            for ln in self.lines
        }
        return RepVector(self.lines, amps)

    def fixed_part(self, h: Subtorus) -> "RepVector":
        """Components whose torus weight vanishes on the subtorus; the
        grading circle is excluded from the fixing condition."""
        if h.parent_rank != self.rank:
            raise ValueError("subtorus of wrong rank")
        fixed = {
            ln.label
            for ln in self.lines
            if all(dot(ln.weight, b) == 0 for b in h.basis)
        }
        return self.project_labels(fixed)

    def restrict(self, h: Subtorus) -> "RepVector":
        """Replace each weight by its pairing vector against the subtorus
        cocharacter basis; rho comes through unchanged."""
        if h.parent_rank != self.rank:
            raise ValueError("subtorus of wrong rank")
        lines = tuple(
            WeightLine(
                ln.label,
                tuple(int(dot(ln.weight, b)) for b in h.basis),
                ln.rho,
                ln.norm2,
            )
            for ln in self.lines
        )
        return RepVector(lines, dict(self.amplitudes))

    def drop_grading(self) -> "RepVector":
        lines = tuple(WeightLine(ln.label, ln.weight, None, ln.norm2) for ln in self.lines)
        return RepVector(lines, dict(self.amplitudes))

    def one_ps_exponents(self, x: Sequence[int], sigma: int) -> dict[str, int]:
        """Exponent rho*sigma + <weight, x> of t on each effective component
        under the one-parameter subgroup (x, sigma)."""
        if sigma < 1:
            raise ValueError("sigma must be a positive integer")
        xs = [Fraction(v) for v in x]
        if any(v.denominator != 1 for v in xs):
            raise ValueError("x must be an integral cocharacter")
        out = {}
        for ln in self.effective_lines():
            if ln.rho is None:
                raise ValueError("one-parameter exponents need a graded line")
            out[ln.label] = ln.rho * sigma + int(dot(ln.weight, x))
        return out

    def norm2_by_weight(self, restricted_to: Subtorus | None = None) -> dict[tuple[int, ...], float]:
        """Aggregate squared norms |amplitude|^2 * scale per torus weight
        (optionally after restriction to a subtorus)."""
        v = self.restrict(restricted_to) if restricted_to is not None else self
        acc: dict[tuple[int, ...], float] = {}
        for ln in v.effective_lines():
            a = v.amplitude(ln.label)
            acc[ln.weight] = acc.get(ln.weight, 0.0) + ln.norm2 * abs(a) ** 2
        return acc

    def rescale(self, x: Sequence[float]) -> "RepVector":
        """Amplitude rescaling by the torus element exp(x): each component of
        weight w is multiplied by e^{<w, x>}.  Weights never change."""
        amps = {}
        for ln in self.lines:
            a = self.amplitude(ln.label)
            if a != 0:
                a = a * math.exp(sum(wi * xi for wi, xi in zip(ln.weight, x)))
            amps[ln.label] = a
        return RepVector(self.lines, amps)

    def add(self, other: "RepVector") -> "RepVector":
        if self.lines != other.lines:
            raise ValueError("vectors live in different representations")
        amps = {
            ln.label: self.amplitude(ln.label) + other.amplitude(ln.label)
            for ln in self.lines
        }
        return RepVector(self.lines, amps)

    def sub(self, other: "RepVector") -> "RepVector":
        if self.lines != other.lines:
            raise ValueError("vectors live in different representations")
        amps = {
            ln.label: self.amplitude(ln.label) - other.amplitude(ln.label)
            for ln in self.lines
        }
        return RepVector(self.lines, amps)
