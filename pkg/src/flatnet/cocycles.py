"""Transition data on a nerve: morphism-built cocycles, trivialization,
potential lifts, and holonomy.

A morphism from the loop group assigns a group value to each presentation
generator.  Pushing it onto the nerve gives one transition value per
oriented overlap component; tree edges carry the identity, the non-tree
edge crossed low-to-high carries its generator's value.  The triple law
g(r3<-r2) g(r2<-r1) = g(r3<-r1) then holds whenever the morphism
respects the triangle relations.

Trivialization walks the spanning tree assigning per-region values
lambda with g(v<-u) = lambda_v lambda_u^{-1}; the first non-tree edge
that breaks this produces a witness loop whose holonomy is the
obstruction.  For unit phases the transition angles can be lifted to
real numbers; triangle sums of the lifts are integer multiples of 2 pi,
and those integers are the discrete curvature bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covers import (
    Cover,
    Edge,
    NerveGraph,
    Pi1Presentation,
    PosetPath,
    Triple,
    generator_loop,
)
from .groups import (
    GROUP_EQ_TOL,
    FreeWord,
    GroupValue,
    PhaseU1,
    VariantMismatch,
    compose,
    distance,
    inverse,
    wrap_angle,
)

COCYCLE_TOL = 1e-10
TRIANGLE_INT_TOL = 1e-9


class CocycleInconsistent(ValueError):
    """Raised when transition data fails the triple law."""


class InvalidPotential(ValueError):
    """Raised when potential lifts break the integer triangle condition."""


class MissingGenerator(KeyError):
    """Raised when a morphism assignment does not cover every generator."""


@dataclass(frozen=True)
class SigmaMorphism:
    """Generator assignment defining a morphism from the loop group.

    ``identity`` fixes the target variant (and matrix size / alphabet /
    cyclic order); every assigned value must live in the same variant.
    """

    assignment: dict[str, GroupValue]
    identity: GroupValue

    def __post_init__(self):
        for name, val in self.assignment.items():
            # compose raises VariantMismatch on any variant/shape difference
            compose(self.identity, val)

    def value(self, generator: str) -> GroupValue:
        if generator not in self.assignment:
            raise MissingGenerator(generator)
        return self.assignment[generator]

    def evaluate(self, word: FreeWord) -> GroupValue:
        """Evaluate on a reduced word, letters composed left to right."""
        acc = self.identity
        for l in word.letters:
            name = word.alphabet[abs(l) - 1]
            v = self.value(name)
            acc = compose(acc, v if l > 0 else inverse(v))
        return acc


def validate_sigma(
    presentation: Pi1Presentation,
    sigma: SigmaMorphism,
    tol: float = GROUP_EQ_TOL,
) -> list[tuple[FreeWord, float]]:
    """Return the relations the assignment violates, with residuals.

    Every presentation generator must be assigned (MissingGenerator
    otherwise).  An empty return value means sigma is a morphism within
    ``tol``.
    """
    for name in presentation.generators:
        if name not in sigma.assignment:
            raise MissingGenerator(name)
    violations = []
    for rel in presentation.relations:
        resid = distance(sigma.evaluate(rel), sigma.identity)
        if resid > tol:
            violations.append((rel, resid))
    return violations


@dataclass(frozen=True)
class TransitionCocycle:
    """One group value per oriented overlap component.

    ``values`` is keyed by the canonical edge (u, v, c) with u < v and
    holds the value for crossing u -> v; the reverse crossing is the
    inverse.  Same-region steps carry the identity.
    """

    cover: Cover
    values: dict[Edge, GroupValue]
    identity: GroupValue

    def __post_init__(self):
        for e in self.cover.overlaps:
            if e not in self.values:
                raise CocycleInconsistent(f"no transition value for overlap {e}")
        for e, v in self.values.items():
            compose(self.identity, v)  # variant uniformity

    def value(self, dst: int, src: int, comp: int | None) -> GroupValue:
        if dst == src:
            return self.identity
        a, b = min(src, dst), max(src, dst)
        try:
            g = self.values[(a, b, comp)]
        except KeyError:
            raise CocycleInconsistent(
                f"no transition value for component ({a},{b},{comp})"
            ) from None
        return g if (src, dst) == (a, b) else inverse(g)


def identity_cocycle(cover: Cover, identity: GroupValue) -> TransitionCocycle:
    return TransitionCocycle(
        cover=cover,
        values={e: identity for e in cover.overlaps},
        identity=identity,
    )


def transition_cocycle(sigma: SigmaMorphism, nerve: NerveGraph) -> TransitionCocycle:
    """Push a morphism onto the nerve: tree edges identity, non-tree edges
    their generator's value (crossing low-to-high is the positive direction)."""
    pres_names = [f"g{i}" for i in range(len(nerve.non_tree_edges))]
    values: dict[Edge, GroupValue] = {}
    for e in nerve.cover.overlaps:
        if e in nerve.tree_edges:
            values[e] = sigma.identity
        else:
            idx = nerve.non_tree_edges.index(e)
            values[e] = sigma.value(pres_names[idx])
    return TransitionCocycle(cover=nerve.cover, values=values, identity=sigma.identity)


def dress_cocycle(
    cocycle: TransitionCocycle, phases: dict[int, GroupValue]
) -> TransitionCocycle:
    """Multiply by the coboundary of per-region values:
    g'(v<-u) = phase_v g(v<-u) phase_u^{-1}.  Preserves the triple law."""
    values = {}
    for (u, v, c), g in cocycle.values.items():
        values[(u, v, c)] = compose(compose(phases[v], g), inverse(phases[u]))
    return TransitionCocycle(cocycle.cover, values, cocycle.identity)


@dataclass(frozen=True)
class CocycleCheck:
    max_residual: float
    failures: tuple[tuple[Triple, float], ...]
    tolerance: float

    @property
    def ok(self) -> bool:
        return not self.failures


def check_cocycle(cocycle: TransitionCocycle, tol: float = COCYCLE_TOL) -> CocycleCheck:
    """Test g(r3<-r2) g(r2<-r1) = g(r3<-r1) on every triple of the cover."""
    failures = []
    worst = 0.0
    for t in cocycle.cover.triples:
        r1, r2, r3, (c12, c13, c23) = t
        lhs = compose(cocycle.value(r3, r2, c23), cocycle.value(r2, r1, c12))
        rhs = cocycle.value(r3, r1, c13)
        resid = distance(lhs, rhs)
        worst = max(worst, resid)
        if resid > tol:
            failures.append((t, resid))
    return CocycleCheck(max_residual=worst, failures=tuple(failures), tolerance=tol)


@dataclass(frozen=True)
class WitnessLoop:
    """Obstruction to trivializing: a loop with non-identity holonomy."""

    loop: PosetPath
    holonomy: GroupValue
    edge: Edge
    residual: float


@dataclass(frozen=True)
class TrivializationResult:
    success: bool
    lambdas: dict[int, GroupValue] | None = None
    witness: WitnessLoop | None = None


def trivialize(
    cocycle: TransitionCocycle,
    nerve: NerveGraph,
    tol: float = COCYCLE_TOL,
) -> TrivializationResult:
    """Solve g(v<-u) = lambda_v lambda_u^{-1} along the spanning tree.

    The base region gets the identity; each non-tree edge is then tested
    and the first failure is returned as a witness loop through that edge
    (its holonomy is the transported obstruction).
    """
    chk = check_cocycle(cocycle, tol)
    if not chk.ok:
        raise CocycleInconsistent(
            f"cocycle fails the triple law, max residual {chk.max_residual:.3e}"
        )
    lam: dict[int, GroupValue] = {nerve.base: cocycle.identity}
    for r in nerve.bfs_order[1:]:
        up = nerve.parent[r]
        lam[r] = compose(cocycle.value(up.dst, up.src, up.comp), lam[up.src])
    for idx, (u, v, c) in enumerate(nerve.non_tree_edges):
        want = compose(lam[v], inverse(lam[u]))
        resid = distance(cocycle.value(v, u, c), want)
        if resid > tol:
            loop = generator_loop(nerve, idx)
            return TrivializationResult(
                success=False,
                witness=WitnessLoop(
                    loop=loop,
                    holonomy=holonomy(cocycle, loop),
                    edge=(u, v, c),
                    residual=resid,
                ),
            )
    return TrivializationResult(success=True, lambdas=lam)


def holonomy(source, path: PosetPath) -> GroupValue:
    """Ordered product of transition values along a path (later steps left).

    ``source`` may be a TransitionCocycle or a FlatPotentialU1.  Loops give
    the transported loop-group value; open paths are allowed but their
    value is chart-dependent bookkeeping, not an invariant.
    """
    if isinstance(source, FlatPotentialU1):
        return PhaseU1(lift_sum(source, path))
    acc = source.identity
    for s in path.steps:
        acc = compose(source.value(s.dst, s.src, s.comp), acc)
    return acc


# ---------------------------------------------------------------------------
# Abelian potential lifts


@dataclass(frozen=True)
class FlatPotentialU1:
    """Real lifts of unit-phase transition data.

    ``angles`` holds one real number per canonical edge (u, v, c), the lift
    for crossing u -> v.  Triangle sums must land on 2 pi Z within
    TRIANGLE_INT_TOL; the rounded integers are exposed by
    ``triangle_integers``.  When the underlying cocycle trivializes, the
    per-region primitives phi satisfy angle(v<-u) == phi_v - phi_u mod 2 pi.
    """

    cover: Cover
    angles: dict[Edge, float]
    primitives: dict[int, float] | None = None

    def __post_init__(self):
        for e in self.cover.overlaps:
            if e not in self.angles:
                raise InvalidPotential(f"no lift for overlap {e}")
        for t, (n, defect) in self._triangle_data().items():
            if defect > TRIANGLE_INT_TOL:
                raise InvalidPotential(
                    f"triangle {t}: lift sum off 2 pi Z by {defect:.3e}"
                )
        if self.primitives is not None:
            for (u, v, c) in self.cover.overlaps:
                gap = abs(
                    wrap_angle(
                        self.angles[(u, v, c)]
                        - (self.primitives[v] - self.primitives[u])
                    )
                )
                if gap > TRIANGLE_INT_TOL:
                    raise InvalidPotential(
                        f"primitives fail on ({u},{v},{c}): gap {gap:.3e}"
                    )

    def lift(self, dst: int, src: int, comp: int | None) -> float:
        if dst == src:
            return 0.0
        a, b = min(src, dst), max(src, dst)
        try:
            th = self.angles[(a, b, comp)]
        except KeyError:
            raise InvalidPotential(f"no lift for component ({a},{b},{comp})") from None
        return th if (src, dst) == (a, b) else -th

    def _triangle_data(self) -> dict[Triple, tuple[int, float]]:
        out = {}
        for t in self.cover.triples:
            r1, r2, r3, (c12, c13, c23) = t
            s = (
                self.lift(r2, r1, c12)
                + self.lift(r3, r2, c23)
                - self.lift(r3, r1, c13)
            )
            n = int(round(s / (2.0 * np.pi)))
            out[t] = (n, abs(s - 2.0 * np.pi * n))
        return out

    def triangle_integers(self) -> dict[Triple, int]:
        return {t: n for t, (n, _) in self._triangle_data().items()}


def lift_sum(pot: FlatPotentialU1, path: PosetPath) -> float:
    """Unwrapped sum of lifts along a path (winding-sensitive)."""
    return float(sum(pot.lift(s.dst, s.src, s.comp) for s in path.steps))


def lift_potential(
    cocycle: TransitionCocycle,
    nerve: NerveGraph,
    tol: float = COCYCLE_TOL,
) -> FlatPotentialU1:
    """Principal-branch lift of a unit-phase cocycle.

    Every stored angle lands in (-pi, pi] (ties at -pi resolve to +pi by
    the phase container itself).  If the cocycle trivializes, the
    spanning-tree solution provides per-region primitives.
    """
    if not isinstance(cocycle.identity, PhaseU1):
        raise VariantMismatch("potential lifts exist for unit-phase data only")
    angles = {e: cocycle.values[e].angle for e in cocycle.cover.overlaps}
    triv = trivialize(cocycle, nerve, tol)
    primitives = None
    if triv.success:
        primitives = {r: lam.angle for r, lam in triv.lambdas.items()}
    return FlatPotentialU1(cover=cocycle.cover, angles=angles, primitives=primitives)
