"""Finite fermionic Fock space with region-owned modes.

Modes are allocated to regions in blocks (sorted region order), the Fock
basis is indexed by occupation bitsets in little-endian mode order, and
smeared fields are Jordan-Wigner creators.  Everything is dense complex
at the operator level; creators are cached sparse internally since each
has only 2^(K-1) entries.  The supported envelope is K <= 12 modes
(4096 x 4096 dense); beyond that construction fails with CapacityError
rather than degrading.

Operators carry a support tag (the regions whose modes they were built
from) and a grading inferred from which charge blocks their matrix
couples; the gauge unitary acts on a grade-k operator as multiplication
by zeta^k.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .cocycles import FlatPotentialU1, InvalidPotential
from .covers import Cover
from .groups import PhaseU1

CAPACITY_MODES = 12
CAR_TOL = 1e-12
GRADE_SCAN_CUTOFF = 1e-13


class CapacityError(RuntimeError):
    """Raised when a construction would exceed the K <= 12 dense envelope."""


class SupportError(ValueError):
    """Raised when an operand's region support violates a precondition."""


class MixedGrade(ValueError):
    """Raised where a definite-grade operand is required."""


@dataclass(frozen=True)
class OneParticleSpace:
    """Mode labels with owning regions; inner product is the Hermitian dot
    (conjugate-linear in the first slot)."""

    mode_owner: tuple[int, ...]

    @property
    def num_modes(self) -> int:
        return len(self.mode_owner)

    def region_modes(self, region: int) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.mode_owner) if r == region)

    def owners(self, f: np.ndarray) -> frozenset[int]:
        f = np.asarray(f)
        return frozenset(self.mode_owner[i] for i in np.nonzero(f)[0])

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        return complex(np.vdot(np.asarray(f), np.asarray(g)))


def allocate_modes(cover: Cover, modes_per_region: int = 2) -> OneParticleSpace:
    """Give every region a private block of modes, sorted region order."""
    if modes_per_region < 1:
        raise ValueError("modes_per_region must be >= 1")
    owner: list[int] = []
    for r in sorted(cover.regions):
        owner.extend([r] * modes_per_region)
    return OneParticleSpace(tuple(owner))


class FockSpace:
    """Dense antisymmetric Fock space over a OneParticleSpace."""

    def __init__(self, space: OneParticleSpace):
        if space.num_modes > CAPACITY_MODES:
            raise CapacityError(
                f"{space.num_modes} modes exceeds the {CAPACITY_MODES}-mode envelope"
            )
        self.space = space
        self.K = space.num_modes
        self.dim = 1 << self.K
        self._creators: dict[int, sp.csr_matrix] = {}

    @cached_property
    def occupation_counts(self) -> np.ndarray:
        idx = np.arange(self.dim, dtype=np.uint64)
        counts = np.zeros(self.dim, dtype=np.int64)
        for i in range(self.K):
            counts += (idx >> np.uint64(i)).astype(np.int64) & 1
        return counts

    @property
    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v

    def basis_index(self, occupied: Sequence[int]) -> int:
        s = 0
        for m in occupied:
            s |= 1 << m
        return s

    def creator(self, mode: int) -> sp.csr_matrix:
        """Jordan-Wigner creation operator for one mode (sparse, exact entries)."""
        if mode not in self._creators:
            if not 0 <= mode < self.K:
                raise ValueError(f"mode {mode} out of range")
            rows, cols, vals = [], [], []
            bit = 1 << mode
            below = bit - 1
            for s in range(self.dim):
                if s & bit:
                    continue
                sign = -1.0 if bin(s & below).count("1") % 2 else 1.0
                rows.append(s | bit)
                cols.append(s)
                vals.append(sign)
            self._creators[mode] = sp.csr_matrix(
                (vals, (rows, cols)), shape=(self.dim, self.dim), dtype=complex
            )
        return self._creators[mode]

    def annihilator(self, mode: int) -> sp.csr_matrix:
        return self.creator(mode).conj().T.tocsr()

    def number_operator(self) -> np.ndarray:
        return np.diag(self.occupation_counts.astype(complex))

    def gauge_diagonal(self, zeta: complex) -> np.ndarray:
        """Diagonal of the gauge unitary zeta^N."""
        return np.power(complex(zeta), self.occupation_counts)


SPARSE_PRODUCT_CUTOFF = 0.25


def _product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # csr products use plain multiply-add, so the paired monomials of
    # anticommuting fields cancel entrywise to exact zeros; the BLAS
    # path fuses multiply-adds and leaves rounding dust instead.  The
    # cutoff keeps every smeared field on the exact route (a field fills
    # at most K/2^(K+1) <= 1/4 of its matrix) while dense operators
    # still go through BLAS.
    limit = SPARSE_PRODUCT_CUTOFF * a.size
    if np.count_nonzero(a) <= limit and np.count_nonzero(b) <= limit:
        return (sp.csr_matrix(a) @ sp.csr_matrix(b)).toarray()
    return a @ b


def _scan_grades(fock: FockSpace, matrix: np.ndarray) -> set[int]:
    scale = np.max(np.abs(matrix))
    if scale == 0.0:
        return set()
    rows, cols = np.nonzero(np.abs(matrix) > GRADE_SCAN_CUTOFF * scale)
    counts = fock.occupation_counts
    return set((counts[rows] - counts[cols]).tolist())


@dataclass(frozen=True, eq=False)
class FieldOp:
    """Dense operator with support and grading tags.

    ``charge`` is the common charge transfer of all nonzero matrix blocks,
    or None when blocks of different transfer are mixed; ``parity`` is
    'even', 'odd', or 'mixed'.
    """

    matrix: np.ndarray
    fock: FockSpace
    support: frozenset[int]
    charge: int | None = dc_field(init=False)
    parity: str = dc_field(init=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.fock.dim, self.fock.dim):
            raise ValueError(f"matrix shape {m.shape} does not fit the Fock space")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        grades = _scan_grades(self.fock, m)
        if not grades:
            object.__setattr__(self, "charge", 0)
            object.__setattr__(self, "parity", "even")
        elif len(grades) == 1:
            g = grades.pop()
            object.__setattr__(self, "charge", g)
            object.__setattr__(self, "parity", "odd" if g % 2 else "even")
        else:
            object.__setattr__(self, "charge", None)
            parities = {g % 2 for g in grades}
            object.__setattr__(
                self, "parity", ("odd" if parities == {1} else
                                 "even" if parities == {0} else "mixed")
            )

    def __mul__(self, other: "FieldOp") -> "FieldOp":
        if self.fock is not other.fock:
            raise ValueError("operators live on different Fock spaces")
        return FieldOp(_product(self.matrix, other.matrix), self.fock,
                       self.support | other.support)

    def __add__(self, other: "FieldOp") -> "FieldOp":
        if self.fock is not other.fock:
            raise ValueError("operators live on different Fock spaces")
        return FieldOp(self.matrix + other.matrix, self.fock,
                       self.support | other.support)

    def __sub__(self, other: "FieldOp") -> "FieldOp":
        return self + other.scaled(-1.0)

    def scaled(self, factor: complex | PhaseU1) -> "FieldOp":
        if isinstance(factor, PhaseU1):
            factor = factor.complex_value
        return FieldOp(self.matrix * complex(factor), self.fock, self.support)

    def adjoint(self) -> "FieldOp":
        return FieldOp(self.matrix.conj().T, self.fock, self.support)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def norm_max(self) -> float:
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0


def zero_op(fock: FockSpace) -> FieldOp:
    return FieldOp(np.zeros((fock.dim, fock.dim), dtype=complex), fock, frozenset())


def identity_op(fock: FockSpace) -> FieldOp:
    return FieldOp(np.eye(fock.dim, dtype=complex), fock, frozenset())


def smeared_field(fock: FockSpace, f: np.ndarray) -> FieldOp:
    """Charge-one smeared field psi(f) = sum_i f_i c_i^dagger (linear in f)."""
    f = np.asarray(f, dtype=complex)
    if f.shape != (fock.K,):
        raise ValueError(f"expected a length-{fock.K} mode vector")
    acc = sp.csr_matrix((fock.dim, fock.dim), dtype=complex)
    for i in np.nonzero(f)[0]:
        acc = acc + f[i] * fock.creator(int(i))
    return FieldOp(acc.toarray(), fock, fock.space.owners(f))


def anticommutator(a: FieldOp, b: FieldOp) -> FieldOp:
    return a * b + b * a


def commutator(a: FieldOp, b: FieldOp) -> FieldOp:
    return a * b - b * a


def gauge_action(zeta: complex | PhaseU1, t: FieldOp) -> FieldOp:
    """Conjugate by the gauge unitary zeta^N; grade-k operators pick up zeta^k."""
    if isinstance(zeta, PhaseU1):
        zeta = zeta.complex_value
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise ValueError("gauge parameter must lie on the unit circle")
    d = t.fock.gauge_diagonal(zeta)
    mat = (d[:, None] * t.matrix) * d.conj()[None, :]
    return FieldOp(mat, t.fock, t.support)


def grading(t: FieldOp) -> int:
    """Definite charge transfer of an operator; MixedGrade when there is none."""
    if t.charge is None:
        raise MixedGrade("operator mixes charge-transfer blocks")
    return t.charge


def normal_commutation_check(cover: Cover, t: FieldOp, s: FieldOp) -> float:
    """Max-norm of [t, s] (graded: anticommutator iff both odd).

    Requires every region pair across the two supports to be declared
    causally disjoint, and definite parities on both operands.
    """
    if t.parity == "mixed" or s.parity == "mixed":
        raise MixedGrade("normal commutation needs definite parities")
    for u in t.support:
        for v in s.support:
            if u == v or not cover.are_disjoint(u, v):
                raise SupportError(
                    f"regions {u} and {v} are not declared causally disjoint"
                )
    bracket = anticommutator(t, s) if (t.parity == "odd" and s.parity == "odd") \
        else commutator(t, s)
    return bracket.norm_max()


# ---------------------------------------------------------------------------
# Fields twisted by a flat potential


def twisted_local_field(
    fock: FockSpace, pot: FlatPotentialU1, region: int, f: np.ndarray
) -> FieldOp:
    """psi_o(f) = exp(-i phi_o) psi(f) for f supported in region o.

    Needs the potential's per-region primitives (present exactly when the
    underlying transition data trivializes).
    """
    if pot.primitives is None:
        raise InvalidPotential(
            "twisted fields need a trivializable potential (no primitives present)"
        )
    if region not in pot.cover.regions:
        raise SupportError(f"unknown region {region}")
    f = np.asarray(f, dtype=complex)
    owners = fock.space.owners(f)
    if not owners <= {region}:
        raise SupportError(
            f"mode vector is supported on {sorted(owners)}, not inside region {region}"
        )
    phase = PhaseU1(-pot.primitives[region])
    return smeared_field(fock, f).scaled(phase)


def nested_pair_residual(
    fock: FockSpace, pot: FlatPotentialU1, dst: int, src: int, f: np.ndarray,
    comp: int | None = None,
) -> float:
    """Gap in psi_dst(f) = exp(-i A(dst<-src)) psi_src(f) across one overlap.

    f lives in the src region's modes; the dst chart phase is applied
    support-blind (charts are global phases, only the owning region pins
    where f is localized).  Lowest shared component taken when comp is
    omitted.
    """
    if pot.primitives is None:
        raise InvalidPotential("chart comparison needs a trivializable potential")
    if comp is None:
        comps = pot.cover.overlap_components(src, dst)
        if not comps:
            raise SupportError(f"regions {src} and {dst} do not overlap")
        comp = comps[0]
    lhs = smeared_field(fock, f).scaled(PhaseU1(-pot.primitives[dst]))
    rhs = twisted_local_field(fock, pot, src, f).scaled(
        PhaseU1(-pot.lift(dst, src, comp))
    )
    return float(np.max(np.abs(lhs.matrix - rhs.matrix)))


@dataclass(frozen=True)
class GlueResult:
    op: FieldOp
    chart_residual: float
    charts: tuple[int, ...]


def glue_psi_A(
    fock: FockSpace, pot: FlatPotentialU1, section: Mapping[int, np.ndarray]
) -> GlueResult:
    """Evaluate a twisted section through per-region charts and glue.

    The section gives, per region, the same twisted spinor expressed in
    that region's chart; consistency demands s_v = exp(i lift(v<-u)) s_u on
    every overlap component of the section's regions.  Each chart then
    produces exp(-i phi_r) psi(s_r) and all agree; the returned operator is
    evaluated in the lowest-numbered chart, with the max cross-chart
    mismatch reported.
    """
    if pot.primitives is None:
        raise InvalidPotential("gluing needs a trivializable potential")
    if not section:
        raise ValueError("empty section")
    regions = tuple(sorted(section))
    vecs = {r: np.asarray(section[r], dtype=complex) for r in regions}
    for (u, v, c) in pot.cover.overlaps:
        if u in vecs and v in vecs:
            gap = np.max(np.abs(vecs[v] - np.exp(1j * pot.lift(v, u, c)) * vecs[u]))
            if gap > 1e-8:
                raise SupportError(
                    f"section inconsistent across ({u},{v},{c}): gap {gap:.3e}"
                )
    ops = [
        smeared_field(fock, vecs[r]).scaled(PhaseU1(-pot.primitives[r]))
        for r in regions
    ]
    spread = 0.0
    for other in ops[1:]:
        spread = max(spread, np.max(np.abs(ops[0].matrix - other.matrix)))
    return GlueResult(op=ops[0], chart_residual=float(spread), charts=regions)


def twisted_product(t: FieldOp, s: FieldOp, g: PhaseU1) -> FieldOp:
    """Product twisted by a unit phase: (g^grade(t) t) s."""
    if not isinstance(g, PhaseU1):
        raise TypeError("twisting value must be a unit phase")
    k = grading(t)  # raises MixedGrade for indefinite operands
    return t.scaled(PhaseU1(k * g.angle)) * s


# short name used throughout the demos; `smeared_field` stays the primary
field = smeared_field
