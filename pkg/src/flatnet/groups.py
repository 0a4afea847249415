"""Group and Lie-algebra values used for transport data.

Four group variants cover everything the rest of the package needs:
unit phases (stored as canonical angles), unitary matrices, reduced
free-group words, and cyclic residues.  A small Lie layer (real scalars
and anti-Hermitian matrices) feeds ``path_ordered_exp``.

Conventions, fixed once here and relied on everywhere else:

* phase angles live in (-pi, pi], with the tie at -pi mapped to +pi;
* free words are tuples of signed 1-based letters and are always reduced;
* ordered products are written operator-style: in a list of steps
  ``[s1, ..., sn]`` the *later* steps multiply on the *left*.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

GROUP_EQ_TOL = 1e-10
UNITARY_TOL = 1e-10
ANTIHERM_TOL = 1e-12


class VariantMismatch(TypeError):
    """Raised when two values from different group variants are combined."""


def wrap_angle(theta: float) -> float:
    """Reduce an angle to the canonical branch (-pi, pi], ties at -pi -> +pi."""
    w = float(np.remainder(theta + np.pi, 2.0 * np.pi)) - np.pi
    if w <= -np.pi:  # remainder can land exactly on the open end
        w = np.pi
    return w


class GroupValue:
    """Base class; concrete variants are PhaseU1, MatrixUn, FreeWord, CyclicZn."""

    __hash__ = None  # tolerance-based equality is incompatible with hashing

    def __eq__(self, other):
        if not isinstance(other, GroupValue):
            return NotImplemented
        if type(self) is not type(other):
            return False
        try:
            return distance(self, other) <= GROUP_EQ_TOL
        except VariantMismatch:
            return False

    def __mul__(self, other):
        return compose(self, other)


@dataclass(frozen=True, eq=False)
class PhaseU1(GroupValue):
    """A U(1) element exp(i*angle), stored by its canonical angle."""

    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", wrap_angle(self.angle))

    @property
    def complex_value(self) -> complex:
        return complex(np.exp(1j * self.angle))


@dataclass(frozen=True, eq=False)
class MatrixUn(GroupValue):
    """A U(n) element as a dense complex matrix, unitary to UNITARY_TOL."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        defect = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if defect > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary: max |U*U - I| = {defect:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


def _reduce_letters(letters: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for l in letters:
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(int(l))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class FreeWord(GroupValue):
    """A reduced word over a named generator alphabet.

    Letters are nonzero integers: +k is the k-th generator (1-based),
    -k its inverse.  Reduction happens at construction, so every stored
    word is reduced.
    """

    letters: tuple[int, ...]
    alphabet: tuple[str, ...]

    def __post_init__(self):
        alpha = tuple(self.alphabet)
        lets = _reduce_letters(self.letters)
        for l in lets:
            if l == 0 or abs(l) > len(alpha):
                raise ValueError(f"letter {l} outside alphabet of size {len(alpha)}")
        object.__setattr__(self, "letters", lets)
        object.__setattr__(self, "alphabet", alpha)

    def __len__(self) -> int:
        return len(self.letters)

    def as_names(self) -> str:
        """Human form, e.g. 'a.b^-1' for letters (1, -2)."""
        if not self.letters:
            return "1"
        parts = []
        for l in self.letters:
            name = self.alphabet[abs(l) - 1]
            parts.append(name if l > 0 else f"{name}^-1")
        return ".".join(parts)


@dataclass(frozen=True, eq=False)
class CyclicZn(GroupValue):
    """A residue in the cyclic group of the given order."""

    residue: int
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("cyclic order must be >= 1")
        object.__setattr__(self, "residue", int(self.residue) % int(self.order))
        object.__setattr__(self, "order", int(self.order))


def identity_like(value: GroupValue) -> GroupValue:
    """The identity element of the same variant (and shape) as ``value``."""
    if isinstance(value, PhaseU1):
        return PhaseU1(0.0)
    if isinstance(value, MatrixUn):
        return MatrixUn(np.eye(value.dim))
    if isinstance(value, FreeWord):
        return FreeWord((), value.alphabet)
    if isinstance(value, CyclicZn):
        return CyclicZn(0, value.order)
    raise VariantMismatch(f"not a group value: {type(value).__name__}")


def compose(a: GroupValue, b: GroupValue) -> GroupValue:
    """Group product a*b (a acts after b in transport chains)."""
    if type(a) is not type(b):
        raise VariantMismatch(
            f"cannot compose {type(a).__name__} with {type(b).__name__}"
        )
    if isinstance(a, PhaseU1):
        return PhaseU1(a.angle + b.angle)
    if isinstance(a, MatrixUn):
        if a.dim != b.dim:
            raise VariantMismatch(f"matrix sizes differ: {a.dim} vs {b.dim}")
        return MatrixUn(a.mat @ b.mat)
    if isinstance(a, FreeWord):
        if a.alphabet != b.alphabet:
            raise VariantMismatch("free words over different alphabets")
        return FreeWord(a.letters + b.letters, a.alphabet)
    if isinstance(a, CyclicZn):
        if a.order != b.order:
            raise VariantMismatch(f"cyclic orders differ: {a.order} vs {b.order}")
        return CyclicZn(a.residue + b.residue, a.order)
    raise VariantMismatch(f"not a group value: {type(a).__name__}")


def inverse(a: GroupValue) -> GroupValue:
    if isinstance(a, PhaseU1):
        return PhaseU1(-a.angle)
    if isinstance(a, MatrixUn):
        return MatrixUn(a.mat.conj().T)
    if isinstance(a, FreeWord):
        return FreeWord(tuple(-l for l in reversed(a.letters)), a.alphabet)
    if isinstance(a, CyclicZn):
        return CyclicZn(-a.residue, a.order)
    raise VariantMismatch(f"not a group value: {type(a).__name__}")


def power(a: GroupValue, k: int) -> GroupValue:
    """Integer power by repeated composition (k may be negative)."""
    if k < 0:
        return power(inverse(a), -k)
    out = identity_like(a)
    for _ in range(k):
        out = compose(out, a)
    return out


def distance(a: GroupValue, b: GroupValue) -> float:
    """Comparison metric: angular gap, max-norm gap, or 0/1 for exact variants."""
    if type(a) is not type(b):
        raise VariantMismatch(
            f"cannot compare {type(a).__name__} with {type(b).__name__}"
        )
    if isinstance(a, PhaseU1):
        return abs(wrap_angle(a.angle - b.angle))
    if isinstance(a, MatrixUn):
        if a.dim != b.dim:
            raise VariantMismatch(f"matrix sizes differ: {a.dim} vs {b.dim}")
        return float(np.max(np.abs(a.mat - b.mat)))
    if isinstance(a, FreeWord):
        if a.alphabet != b.alphabet:
            raise VariantMismatch("free words over different alphabets")
        return 0.0 if a.letters == b.letters else 1.0
    if isinstance(a, CyclicZn):
        if a.order != b.order:
            raise VariantMismatch(f"cyclic orders differ: {a.order} vs {b.order}")
        return 0.0 if a.residue == b.residue else 1.0
    raise VariantMismatch(f"not a group value: {type(a).__name__}")


def isclose(a: GroupValue, b: GroupValue, tol: float = GROUP_EQ_TOL) -> bool:
    return distance(a, b) <= tol


def is_identity(a: GroupValue, tol: float = GROUP_EQ_TOL) -> bool:
    return distance(a, identity_like(a)) <= tol


# ---------------------------------------------------------------------------
# Lie layer


class LieValue:
    """Base class for exponent data consumed by path_ordered_exp."""


@dataclass(frozen=True)
class ScalarU1(LieValue):
    """Abelian step: a real angle increment theta, exponentiating to exp(i theta)."""

    theta: float


@dataclass(frozen=True, eq=False)
class AntiHermitianUn(LieValue):
    """Matrix step X with X + X^dagger = 0 (to ANTIHERM_TOL), exponentiating into U(n)."""

    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        defect = np.max(np.abs(m + m.conj().T))
        if defect > ANTIHERM_TOL:
            raise ValueError(f"matrix is not anti-Hermitian: max |X + X*| = {defect:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


def _check_uniform_steps(steps: Sequence[LieValue]) -> type | None:
    kinds = {type(s) for s in steps}
    if len(kinds) > 1:
        names = sorted(k.__name__ for k in kinds)
        raise VariantMismatch(f"mixed step variants: {names}")
    return kinds.pop() if kinds else None


def path_ordered_exp(steps: Sequence[LieValue], dim: int | None = None) -> GroupValue:
    """Ordered product exp(X_n) ... exp(X_1) of the step exponents.

    Later steps multiply on the left.  Scalar steps collapse to a single
    phase exp(i sum theta_k); matrix steps multiply scipy expm factors.
    An empty step list returns the identity (PhaseU1 unless ``dim`` names
    a matrix size).
    """
    kind = _check_uniform_steps(steps)
    if kind is None:
        if dim is None:
            return PhaseU1(0.0)
        return MatrixUn(np.eye(dim))
    if kind is ScalarU1:
        return PhaseU1(sum(s.theta for s in steps))
    if kind is AntiHermitianUn:
        d = steps[0].dim
        for s in steps:
            if s.dim != d:
                raise VariantMismatch(f"matrix sizes differ: {d} vs {s.dim}")
        prod = np.eye(d, dtype=complex)
        for s in steps:
            prod = expm(s.mat) @ prod
        return MatrixUn(prod)
    raise VariantMismatch(f"not a Lie value: {kind.__name__}")


def path_ordered_exp_subdivided(
    steps: Sequence[LieValue], substeps: int, dim: int | None = None
) -> GroupValue:
    """Brute-force check value: split each step into equal substeps.

    Each substep contributes a second-order factor I + H + H^2/2 with
    H = X/substeps, so the result approaches path_ordered_exp like
    1/substeps^2.  Kept deliberately independent of scipy's expm so the
    two routes can be compared.
    """
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    kind = _check_uniform_steps(steps)
    if kind is None or kind is ScalarU1:
        # the Abelian product is exact at any subdivision
        return path_ordered_exp(steps, dim=dim)
    d = steps[0].dim
    prod = np.eye(d, dtype=complex)
    for s in steps:
        h = s.mat / substeps
        factor = np.eye(d, dtype=complex) + h + (h @ h) / 2.0
        prod = np.linalg.matrix_power(factor, substeps) @ prod
    return _as_unitary_loose(prod)


def _as_unitary_loose(m: np.ndarray) -> MatrixUn:
    """Wrap a near-unitary product without re-unitarizing it.

    Subdivided products drift off the unitary manifold by O(1/substeps^2);
    the constructor tolerance would reject coarse subdivisions, so this
    bypasses the check while keeping the same container type.
    """
    out = MatrixUn.__new__(MatrixUn)
    arr = np.array(m, dtype=complex)
    arr.setflags(write=False)
    object.__setattr__(out, "mat", arr)
    return out
