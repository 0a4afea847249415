"""Charged-sector transport on the Fock window.

Each region gets an implementer: the ordered product of creators of its
first kappa private modes.  These are partial isometries, not unitaries
(a finite Fock space admits no unitary charge raiser), so every sector
identity here is asserted after compression to the window subspace
spanned by the vacuum and the charged vectors v_o, the subspace on
which the implementer chains act isometrically.  Transporter entries
pair a dense operator with a symbolic (end, start, coefficient) record;
path transport multiplies entries with later steps on the left, and on
the window a transported chain telescopes to its end/start pair times
the accumulated coefficient.

Sign bookkeeping: with bare Jordan-Wigner implementers, odd-charge
implementers of disjoint regions anticommute both with and without
stars (uniform graded signs).  The mixed sign pattern that continuum
dressing produces (starred pairs anticommuting, unstarred commuting) is
not reproducible in this finite model; tests pin the uniform signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .cocycles import TransitionCocycle
from .covers import Cover, Edge, NerveGraph, PosetPath, InvalidPath, generator_loop
from .groups import (
    GroupValue,
    MatrixUn,
    PhaseU1,
    VariantMismatch,
    compose,
    inverse,
    is_identity,
)
from .fock import FieldOp, FockSpace, SupportError, identity_op

SECTOR_TOL = 1e-10


class NotGaugeInvariant(ValueError):
    """Raised when a morphism argument carries net charge."""


class MissingEntry(KeyError):
    """Raised when a path step has no transporter entry."""


@dataclass(frozen=True)
class Implementer:
    """Charge-kappa partial isometry private to one region."""

    region: int
    charge: int
    modes: tuple[int, ...]
    op: FieldOp
    in_window: bool = True


def implementer(fock: FockSpace, region: int, kappa: int = 1) -> Implementer:
    """Ordered product of the region's first kappa creators.

    Creators are applied in descending mode order so the charged vector
    op |vacuum> is the plain occupation basis vector with + sign.
    """
    if kappa < 1:
        raise ValueError("charge must be >= 1")
    modes = fock.space.region_modes(region)
    if len(modes) < kappa:
        raise SupportError(
            f"region {region} owns {len(modes)} modes, fewer than charge {kappa}"
        )
    chosen = modes[:kappa]
    mat = None
    for m in chosen:  # ascending matrix factors => descending application order
        c = fock.creator(m).toarray()
        mat = c if mat is None else mat @ c
    return Implementer(
        region=region,
        charge=kappa,
        modes=chosen,
        op=FieldOp(mat, fock, frozenset({region})),
    )


@dataclass(frozen=True)
class WindowSubspace:
    """Span of the vacuum and the charged vectors, with explicit basis."""

    fock: FockSpace
    implementers: dict[int, Implementer]
    regions: tuple[int, ...] = dc_field(init=False)
    basis: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        regions = tuple(sorted(self.implementers))
        cols = [self.fock.vacuum]
        for r in regions:
            cols.append(self.implementers[r].op.apply(self.fock.vacuum))
        b = np.stack(cols, axis=1)
        gram = b.conj().T @ b
        if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-12:
            raise ValueError("window basis failed to come out orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "basis", b)

    def charged_vector(self, region: int) -> np.ndarray:
        return self.basis[:, 1 + self.regions.index(region)]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def compress(self, op: FieldOp | np.ndarray) -> np.ndarray:
        m = op.matrix if isinstance(op, FieldOp) else op
        return self.basis.conj().T @ m @ self.basis


def make_window(fock: FockSpace, cover: Cover, kappa: int = 1) -> WindowSubspace:
    imps = {r: implementer(fock, r, kappa) for r in cover.regions}
    return WindowSubspace(fock=fock, implementers=imps)


# ---------------------------------------------------------------------------
# Transporters


@dataclass(frozen=True)
class TransportEntry:
    """One transport step: dense operator plus its telescoped symbol."""

    end: int
    start: int
    coeff: GroupValue
    op: FieldOp | None


@dataclass(frozen=True)
class SectorTransporter:
    """Transport entries over the cover's oriented overlap components.

    ``entries`` is keyed by canonical edges (u, v, c), holding the u -> v
    entry; the reverse direction is the operator adjoint with inverted
    coefficient.  ``kind`` is 'plain' (bare pairs), 'twisted'
    (cocycle-weighted pairs), or 'matrix' (coefficient-only layer for
    higher-dimensional transport, no Fock realization).
    """

    cover: Cover
    entries: dict[Edge, TransportEntry]
    identity_coeff: GroupValue
    kind: str
    window: WindowSubspace | None = None

    def entry(self, dst: int, src: int, comp: int | None) -> TransportEntry:
        if dst == src:
            op = None
            if self.window is not None:
                op = identity_op(self.window.fock)
            return TransportEntry(end=dst, start=src, coeff=self.identity_coeff, op=op)
        a, b = min(src, dst), max(src, dst)
        try:
            e = self.entries[(a, b, comp)]
        except KeyError:
            raise MissingEntry(f"no transporter entry for ({a},{b},{comp})") from None
        if (src, dst) == (a, b):
            return e
        return TransportEntry(
            end=dst,
            start=src,
            coeff=inverse(e.coeff),
            op=None if e.op is None else e.op.adjoint(),
        )


def z1(window: WindowSubspace, dst: int, src: int) -> FieldOp:
    """Bare charge transporter phi_dst phi_src^* between two regions."""
    return window.implementers[dst].op * window.implementers[src].op.adjoint()


def plain_transporter(window: WindowSubspace, cover: Cover) -> SectorTransporter:
    ident = PhaseU1(0.0)
    entries = {}
    for (u, v, c) in cover.overlaps:
        entries[(u, v, c)] = TransportEntry(
            end=v, start=u, coeff=ident, op=z1(window, v, u)
        )
    return SectorTransporter(
        cover=cover, entries=entries, identity_coeff=ident, kind="plain", window=window
    )


def twisted_transporter(
    window: WindowSubspace, cocycle: TransitionCocycle
) -> SectorTransporter:
    """Cocycle-weighted transporter: entry(v<-u) = g(v<-u) phi_v phi_u^*.

    Only unit-phase transition data acts on the Fock layer; matrix-valued
    data goes through rho_layer_transporter instead.
    """
    if not isinstance(cocycle.identity, PhaseU1):
        raise VariantMismatch(
            "Fock-layer twisting needs unit phases; use rho_layer_transporter"
        )
    entries = {}
    for (u, v, c) in cocycle.cover.overlaps:
        g = cocycle.values[(u, v, c)]
        entries[(u, v, c)] = TransportEntry(
            end=v, start=u, coeff=g, op=z1(window, v, u).scaled(g)
        )
    return SectorTransporter(
        cover=cocycle.cover,
        entries=entries,
        identity_coeff=PhaseU1(0.0),
        kind="twisted",
        window=window,
    )


def dress_transporter(
    t: SectorTransporter, phases: dict[int, GroupValue]
) -> SectorTransporter:
    """Conjugate entries by per-region phases: entry'(v<-u) = p_v entry p_u^{-1}."""
    entries = {}
    for (u, v, c), e in t.entries.items():
        coeff = compose(compose(phases[v], e.coeff), inverse(phases[u]))
        op = None if e.op is None else e.op.scaled(
            compose(phases[v], inverse(phases[u]))
        )
        entries[(u, v, c)] = TransportEntry(end=v, start=u, coeff=coeff, op=op)
    return SectorTransporter(
        cover=t.cover, entries=entries, identity_coeff=t.identity_coeff,
        kind=t.kind, window=t.window,
    )


def z_path(t: SectorTransporter, path: PosetPath) -> TransportEntry:
    """Ordered product of entries along a path (later steps on the left)."""
    coeff = t.identity_coeff
    op: FieldOp | None = None
    if t.window is not None:
        op = identity_op(t.window.fock)
    for s in path.steps:
        e = t.entry(s.dst, s.src, s.comp)
        coeff = compose(e.coeff, coeff)
        if op is not None and e.op is not None:
            op = e.op * op
    return TransportEntry(end=path.end, start=path.start, coeff=coeff, op=op)


def telescope_residual(t: SectorTransporter, path: PosetPath) -> float:
    """Window gap between transported chain and its telescoped pair.

    An empty path telescopes to the reflexive identity entry, not to the
    degenerate pair phi phi^*, so its residual is zero by construction.
    """
    if t.window is None:
        raise ValueError("telescoping residuals need a Fock window")
    if not path.steps:
        return 0.0
    chain = z_path(t, path)
    pair = z1(t.window, path.end, path.start).scaled(chain.coeff)
    return float(
        np.max(np.abs(t.window.compress(chain.op) - t.window.compress(pair)))
    )


def triple_law_residual(
    t: SectorTransporter, triple: tuple[int, int, int, tuple[int, int, int]]
) -> float:
    """Window gap of entry(r3<-r2) entry(r2<-r1) = entry(r3<-r1)."""
    if t.window is None:
        raise ValueError("triple-law residuals need a Fock window")
    r1, r2, r3, (c12, c13, c23) = triple
    lhs = t.entry(r3, r2, c23).op * t.entry(r2, r1, c12).op
    rhs = t.entry(r3, r1, c13).op
    return float(np.max(np.abs(t.window.compress(lhs) - t.window.compress(rhs))))


# ---------------------------------------------------------------------------
# Morphisms and invariant extraction


def charge_morphism(window: WindowSubspace, region: int, t: FieldOp) -> FieldOp:
    """Localized morphism pi_o(t) = phi_o t phi_o^* for gauge-invariant t."""
    if t.charge != 0:
        raise NotGaugeInvariant(
            f"morphism argument must be gauge invariant, got charge {t.charge}"
        )
    phi = window.implementers[region].op
    return phi * t * phi.adjoint()


def intertwining_residual(
    window: WindowSubspace, dst: int, src: int, t: FieldOp
) -> float:
    """Window gap of pi_dst(t) = z(dst<-src) pi_src(t) z(src<-dst)."""
    z = z1(window, dst, src)
    lhs = charge_morphism(window, dst, t)
    rhs = z * charge_morphism(window, src, t) * z.adjoint()
    return float(np.max(np.abs(window.compress(lhs) - window.compress(rhs))))


def localization_residual(
    window: WindowSubspace, cover: Cover, o: int, ambient: int, e: int, t: FieldOp
) -> float:
    """How far pi^ambient_o(t) is from t on the charge's own window vector.

    Preconditions: t is gauge invariant and supported in region e, with e
    causally disjoint from o; both o and e overlap the ambient region.
    With partial-isometry implementers the identity holds exactly on v_o
    (not on the whole window; the vacuum column and foreign charged
    vectors see the support projector of the chain).
    """
    if not cover.are_disjoint(o, e):
        raise SupportError(f"regions {o} and {e} are not declared causally disjoint")
    if not t.support <= {e}:
        raise SupportError(f"observable must be supported in region {e}")
    for r in (o, e):
        if not cover.overlap_components(r, ambient):
            raise SupportError(f"region {r} does not meet the ambient region {ambient}")
    z_oa = z1(window, o, ambient)
    localized = z_oa * charge_morphism(window, ambient, t) * z_oa.adjoint()
    v = window.charged_vector(o)
    return float(np.max(np.abs(localized.apply(v) - t.apply(v))))


@dataclass(frozen=True)
class TopologicalComponent:
    value: complex
    residual: float
    basepoint: int


def topological_component(
    t: SectorTransporter, loop: PosetPath
) -> TopologicalComponent:
    """Scalar the transported loop acts by on its basepoint's charged vector.

    The residual measures how far the window compression is from that
    scalar times the basepoint matrix unit; a large residual means the
    compression is not scalar and the value should not be trusted.
    """
    if not loop.is_loop:
        raise InvalidPath("topological components are defined for loops")
    if t.window is None:
        raise ValueError("use rho_holonomy for the coefficient-only layer")
    chain = z_path(t, loop)
    m = t.window.compress(chain.op)
    ia = 1 + t.window.regions.index(loop.start)
    value = complex(m[ia, ia])
    expected = np.zeros_like(m)
    expected[ia, ia] = value
    residual = float(np.max(np.abs(m - expected)))
    return TopologicalComponent(value=value, residual=residual, basepoint=loop.start)


def transition_amplitude(
    t: SectorTransporter, p: PosetPath, q: PosetPath
) -> complex:
    """Overlap <Z_q v_a, Z_p v_a> of two transported charges.

    Both paths must share start and end regions; the value depends only on
    the loop class of reverse(q) then p.
    """
    if t.window is None:
        raise ValueError("transition amplitudes need a Fock window")
    if p.start != q.start or p.end != q.end:
        raise InvalidPath(
            f"paths must share endpoints: ({p.start}->{p.end}) vs ({q.start}->{q.end})"
        )
    v = t.window.charged_vector(p.start)
    zp = z_path(t, p).op.apply(v)
    zq = z_path(t, q).op.apply(v)
    return complex(np.vdot(zq, zp))


@dataclass(frozen=True)
class Classification:
    kind: str  # "DHR" or "topological"
    components: dict[str, GroupValue]
    residuals: dict[str, float]
    dimension: int


def classify(
    t: SectorTransporter, nerve: NerveGraph, tol: float = SECTOR_TOL
) -> Classification:
    """Evaluate the transported loop value on every presentation generator.

    All components identity => the sector data is equivalent to an
    untwisted (DHR-type) sector; any non-identity component is a
    topological obstruction.  Phase-layer dimension is 1; the matrix
    layer reports its fiber dimension.
    """
    components: dict[str, GroupValue] = {}
    residuals: dict[str, float] = {}
    for idx in range(len(nerve.non_tree_edges)):
        name = f"g{idx}"
        loop = generator_loop(nerve, idx)
        if t.window is None:
            val = rho_holonomy(t, loop)
            components[name] = val
            residuals[name] = 0.0
        else:
            comp = topological_component(t, loop)
            components[name] = PhaseU1(float(np.angle(comp.value)))
            residuals[name] = max(
                comp.residual, abs(abs(comp.value) - 1.0)
            )
    trivial = all(is_identity(v, tol) for v in components.values())
    dim = t.identity_coeff.dim if isinstance(t.identity_coeff, MatrixUn) else 1
    return Classification(
        kind="DHR" if trivial else "topological",
        components=components,
        residuals=residuals,
        dimension=dim,
    )


def coefficient_cocycle(t: SectorTransporter) -> TransitionCocycle:
    """The symbolic coefficients as transition data (for equivalence tests)."""
    values = {key: e.coeff for key, e in t.entries.items()}
    return TransitionCocycle(cover=t.cover, values=values, identity=t.identity_coeff)


def coefficient_ratio_cocycle(
    a: SectorTransporter, b: SectorTransporter
) -> TransitionCocycle:
    """Entrywise coeff_a coeff_b^{-1}; trivializing it exhibits per-region
    phases conjugating one transporter into the other on the window."""
    values = {}
    for key, ea in a.entries.items():
        eb = b.entries[key]
        values[key] = compose(ea.coeff, inverse(eb.coeff))
    return TransitionCocycle(cover=a.cover, values=values, identity=a.identity_coeff)


# ---------------------------------------------------------------------------
# Coefficient-only matrix layer


def rho_layer_transporter(
    cocycle: TransitionCocycle,
    rho: Callable[[GroupValue], MatrixUn] | None = None,
) -> SectorTransporter:
    """Matrix-coefficient transporter (end, start, rho(g)); no Fock ops.

    Higher-dimensional transport has no faithful realization on the
    finite Fock window, so this layer carries coefficients only.  By
    default rho is the identity on already-matrix transition data.
    """
    if rho is None:
        if not isinstance(cocycle.identity, MatrixUn):
            raise VariantMismatch(
                "default rho needs matrix transition data; pass an explicit rho"
            )
        rho = lambda g: g  # noqa: E731
    ident = rho(cocycle.identity)
    if not isinstance(ident, MatrixUn):
        raise VariantMismatch("rho must produce unitary matrices")
    entries = {}
    for (u, v, c) in cocycle.cover.overlaps:
        entries[(u, v, c)] = TransportEntry(
            end=v, start=u, coeff=rho(cocycle.values[(u, v, c)]), op=None
        )
    return SectorTransporter(
        cover=cocycle.cover, entries=entries, identity_coeff=ident,
        kind="matrix", window=None,
    )


def rho_holonomy(t: SectorTransporter, loop: PosetPath) -> GroupValue:
    """Ordered coefficient product around a loop (later steps left)."""
    if not loop.is_loop:
        raise InvalidPath("holonomy is defined for loops")
    acc = t.identity_coeff
    for s in loop.steps:
        acc = compose(t.entry(s.dst, s.src, s.comp).coeff, acc)
    return acc
