import numpy as np
import pytest

from flatnet.cocycles import (
    CocycleInconsistent,
    FlatPotentialU1,
    InvalidPotential,
    MissingGenerator,
    SigmaMorphism,
    TransitionCocycle,
    check_cocycle,
    dress_cocycle,
    holonomy,
    identity_cocycle,
    lift_potential,
    lift_sum,
    transition_cocycle,
    trivialize,
    validate_sigma,
)
from flatnet.covers import (
    annulus_cover,
    approximate_curve,
    build_nerve,
    builtin_cover,
    circle_cover,
    closed_triangle_cycles,
    disk_cover,
    figure_eight_cover,
    free_h1_coordinates,
    generator_loop,
    loop_class,
    path_compose,
    path_reverse,
    pi1_presentation,
    torus_cover,
)
from flatnet.groups import (
    FreeWord,
    MatrixUn,
    PhaseU1,
    VariantMismatch,
    compose,
    distance,
    inverse,
    is_identity,
    power,
    wrap_angle,
)

ALL_BUILTINS = ["circle", "annulus", "disk", "figure_eight", "torus"]
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
I2 = np.eye(2)


def make(name):
    return builtin_cover(name, 5 if name == "circle" else None)


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diagonal(r) / np.abs(np.diagonal(r))).conj()


def u1_sigma_from_h1(pres, alpha, beta=0.0):
    """Assignment factoring through free homology; always a valid morphism."""
    coords = free_h1_coordinates(pres)
    weights = ([alpha, beta] + [0.0] * len(coords))[: len(coords)]
    out = {}
    for i, name in enumerate(pres.generators):
        theta = sum(w * c[i] for w, c in zip(weights, coords))
        out[name] = PhaseU1(theta)
    return SigmaMorphism(out, PhaseU1(0.0))


# ---------------------------------------------------------------------------
# sigma validation


def test_validate_sigma_trivial_ok():
    for name in ALL_BUILTINS:
        pres = pi1_presentation(build_nerve(make(name)))
        sigma = SigmaMorphism(
            {g: PhaseU1(0.0) for g in pres.generators}, PhaseU1(0.0)
        )
        assert validate_sigma(pres, sigma) == []


def test_validate_sigma_torus_commuting_phases_ok():
    pres = pi1_presentation(build_nerve(torus_cover()))
    sigma = u1_sigma_from_h1(pres, 0.7, -1.3)
    assert validate_sigma(pres, sigma) == []


def test_validate_sigma_torus_noncommuting_matrices_fail():
    # factor the same homology classes through two non-commuting unitaries;
    # some triangle relation then sees the commutator and breaks loudly
    pres = pi1_presentation(build_nerve(torus_cover()))
    coords = free_h1_coordinates(pres)
    u, v = MatrixUn(1j * SX), MatrixUn(1j * SY)
    assignment = {
        name: compose(power(u, coords[0][i]), power(v, coords[1][i]))
        for i, name in enumerate(pres.generators)
    }
    sigma = SigmaMorphism(assignment, MatrixUn(I2))
    violations = validate_sigma(pres, sigma)
    assert violations
    assert max(r for _, r in violations) > 0.1


def test_validate_sigma_missing_generator():
    pres = pi1_presentation(build_nerve(annulus_cover()))
    with pytest.raises(MissingGenerator):
        validate_sigma(pres, SigmaMorphism({}, PhaseU1(0.0)))


def test_sigma_evaluate_word_order():
    # letters evaluate left to right: (-2,-1,2,1) -> s1^-1 s0^-1 s1 s0
    sigma = SigmaMorphism(
        {"g0": MatrixUn(1j * SX), "g1": MatrixUn(1j * SY)}, MatrixUn(I2)
    )
    word = FreeWord((-2, -1, 2, 1), ("g0", "g1"))
    got = sigma.evaluate(word)
    want = (
        np.conj(1j * SY).T @ np.conj(1j * SX).T @ (1j * SY) @ (1j * SX)
    )
    assert np.max(np.abs(got.mat - want)) < 1e-14
    assert np.max(np.abs(got.mat + I2)) < 1e-14  # the commutator is -1


# ---------------------------------------------------------------------------
# transition cocycles


def test_transition_cocycle_tree_identity_nontree_generator():
    cov = circle_cover(3)
    nerve = build_nerve(cov)
    sigma = SigmaMorphism({"g0": PhaseU1(0.9)}, PhaseU1(0.0))
    coc = transition_cocycle(sigma, nerve)
    for e in cov.overlaps:
        if e in nerve.tree_edges:
            assert is_identity(coc.values[e])
        else:
            assert distance(coc.values[e], PhaseU1(0.9)) < 1e-15


def test_transition_cocycle_disk_forced_trivial():
    nerve = build_nerve(disk_cover())
    sigma = SigmaMorphism({"g0": PhaseU1(0.0)}, PhaseU1(0.0))
    coc = transition_cocycle(sigma, nerve)
    assert all(is_identity(v) for v in coc.values.values())


def test_cocycle_antisymmetry_accessor():
    cov = annulus_cover()
    nerve = build_nerve(cov)
    sigma = SigmaMorphism({"g0": PhaseU1(1.2)}, PhaseU1(0.0))
    coc = transition_cocycle(sigma, nerve)
    for (u, v, c) in cov.overlaps:
        assert is_identity(
            compose(coc.value(v, u, c), coc.value(u, v, c)), 1e-15
        )
    assert is_identity(coc.value(2, 2, None))


def test_check_cocycle_construction_is_lawful():
    for name in ALL_BUILTINS:
        cov = make(name)
        nerve = build_nerve(cov)
        pres = pi1_presentation(nerve)
        sigma = u1_sigma_from_h1(pres, 1.1, 0.4)
        chk = check_cocycle(transition_cocycle(sigma, nerve))
        assert chk.ok, name
        assert chk.max_residual <= 1e-12, name


def test_check_cocycle_locates_corruption():
    cov = torus_cover()
    nerve = build_nerve(cov)
    pres = pi1_presentation(nerve)
    sigma = u1_sigma_from_h1(pres, 0.8, 0.3)
    coc = transition_cocycle(sigma, nerve)
    bad_edge = cov.overlaps[0]
    values = dict(coc.values)
    values[bad_edge] = compose(values[bad_edge], PhaseU1(0.5))
    chk = check_cocycle(TransitionCocycle(cov, values, coc.identity))
    assert not chk.ok
    containing = {
        t
        for t in cov.triples
        if bad_edge
        in {(t[0], t[1], t[3][0]), (t[0], t[2], t[3][1]), (t[1], t[2], t[3][2])}
    }
    assert {t for t, _ in chk.failures} == containing


def test_check_cocycle_vacuous_without_triples():
    coc = identity_cocycle(annulus_cover(), PhaseU1(0.0))
    chk = check_cocycle(coc)
    assert chk.ok and chk.max_residual == 0.0


# ---------------------------------------------------------------------------
# trivialization


def test_trivialize_identity():
    cov = make("figure_eight")
    nerve = build_nerve(cov)
    res = trivialize(identity_cocycle(cov, PhaseU1(0.0)), nerve)
    assert res.success
    assert all(is_identity(v) for v in res.lambdas.values())


def test_trivialize_recovers_coboundary_u1():
    rng = np.random.default_rng(7)
    for name in ALL_BUILTINS:
        cov = make(name)
        nerve = build_nerve(cov)
        lam = {r: PhaseU1(rng.uniform(-np.pi, np.pi)) for r in cov.regions}
        coc = dress_cocycle(identity_cocycle(cov, PhaseU1(0.0)), lam)
        res = trivialize(coc, nerve)
        assert res.success, name
        for (u, v, c) in cov.overlaps:
            want = coc.values[(u, v, c)]
            got = compose(res.lambdas[v], inverse(res.lambdas[u]))
            assert distance(got, want) <= 1e-10, name


def test_trivialize_recovers_coboundary_matrix():
    rng = np.random.default_rng(11)
    cov = torus_cover()
    nerve = build_nerve(cov)
    lam = {r: MatrixUn(random_unitary(rng, 2)) for r in cov.regions}
    coc = dress_cocycle(identity_cocycle(cov, MatrixUn(I2)), lam)
    res = trivialize(coc, nerve)
    assert res.success
    for (u, v, c) in cov.overlaps:
        got = compose(res.lambdas[v], inverse(res.lambdas[u]))
        assert distance(got, coc.values[(u, v, c)]) <= 1e-10


def test_trivialize_global_right_ambiguity():
    # recovered family differs from the seed family by one fixed right factor
    rng = np.random.default_rng(23)
    cov = annulus_cover()
    nerve = build_nerve(cov)
    lam = {r: PhaseU1(rng.uniform(-np.pi, np.pi)) for r in cov.regions}
    coc = dress_cocycle(identity_cocycle(cov, PhaseU1(0.0)), lam)
    res = trivialize(coc, nerve)
    ks = [compose(inverse(lam[r]), res.lambdas[r]) for r in cov.regions]
    for k in ks[1:]:
        assert distance(k, ks[0]) <= 1e-10


def test_trivialize_witness_circle_pi():
    cov = circle_cover(3)
    nerve = build_nerve(cov)
    sigma = SigmaMorphism({"g0": PhaseU1(np.pi)}, PhaseU1(0.0))
    res = trivialize(transition_cocycle(sigma, nerve), nerve)
    assert not res.success
    w = res.witness
    assert w.edge in nerve.non_tree_edges
    assert distance(w.holonomy, PhaseU1(np.pi)) <= 1e-12
    assert w.loop.is_loop and w.residual > 1.0


def test_trivialize_rejects_lawless_cocycle():
    cov = disk_cover()
    nerve = build_nerve(cov)
    values = {e: PhaseU1(0.0) for e in cov.overlaps}
    values[(0, 1, 0)] = PhaseU1(0.7)  # breaks the triple law
    with pytest.raises(CocycleInconsistent):
        trivialize(TransitionCocycle(cov, values, PhaseU1(0.0)), nerve)


def test_trivialize_succeeds_iff_sigma_trivial_on_generators():
    rng = np.random.default_rng(3)
    for name in ["circle", "annulus", "figure_eight", "torus"]:
        cov = make(name)
        nerve = build_nerve(cov)
        pres = pi1_presentation(nerve)
        trivial = u1_sigma_from_h1(pres, 0.0, 0.0)
        assert trivialize(transition_cocycle(trivial, nerve), nerve).success
        alpha = rng.uniform(0.3, np.pi - 0.3)
        twisted = u1_sigma_from_h1(pres, alpha, 0.0)
        assert not trivialize(transition_cocycle(twisted, nerve), nerve).success


# ---------------------------------------------------------------------------
# holonomy


def test_holonomy_generator_roundtrip():
    rng = np.random.default_rng(17)
    for name in ALL_BUILTINS:
        cov = make(name)
        nerve = build_nerve(cov)
        pres = pi1_presentation(nerve)
        sigma = u1_sigma_from_h1(pres, rng.uniform(-2, 2), rng.uniform(-2, 2))
        coc = transition_cocycle(sigma, nerve)
        for idx, gname in enumerate(pres.generators):
            loop = generator_loop(nerve, idx)
            assert (
                distance(holonomy(coc, loop), sigma.value(gname)) <= 1e-10
            ), name


def test_holonomy_annulus_winding_powers():
    cov = annulus_cover()
    nerve = build_nerve(cov)
    wind1 = approximate_curve(cov, [0, 1, 2, 3, 0])
    for theta in (np.pi / 7, np.pi / 2, 1.0):
        sigma = SigmaMorphism({"g0": PhaseU1(theta)}, PhaseU1(0.0))
        coc = transition_cocycle(sigma, nerve)
        loop = wind1
        for k in range(1, 4):
            assert distance(holonomy(coc, loop), PhaseU1(k * theta)) <= 1e-10
            back = path_reverse(loop)
            assert distance(holonomy(coc, back), PhaseU1(-k * theta)) <= 1e-10
            loop = path_compose(loop, wind1)


def test_holonomy_trivial_loop_identity():
    cov = annulus_cover()
    nerve = build_nerve(cov)
    sigma = SigmaMorphism({"g0": PhaseU1(2.2)}, PhaseU1(0.0))
    coc = transition_cocycle(sigma, nerve)
    p = approximate_curve(cov, [0, 1, 0])
    assert is_identity(holonomy(coc, p))


def test_holonomy_matches_word_evaluation_matrix():
    cov = figure_eight_cover()
    nerve = build_nerve(cov)
    pres = pi1_presentation(nerve)
    sigma = SigmaMorphism(
        {"g0": MatrixUn(1j * SX), "g1": MatrixUn(1j * SY)}, MatrixUn(I2)
    )
    coc = transition_cocycle(sigma, nerve)
    seq = [0, 1, 2, 0, 3, 4, 0, 2, 1, 0, 4, 3, 0]
    loop = approximate_curve(cov, seq)
    hol = holonomy(coc, loop)
    word = loop_class(pres, loop)
    assert distance(hol, sigma.evaluate(word)) <= 1e-12
    assert distance(hol, MatrixUn(I2)) > 0.1  # non-Abelian obstruction


# ---------------------------------------------------------------------------
# potentials


def test_lift_potential_identity():
    cov = disk_cover()
    nerve = build_nerve(cov)
    pot = lift_potential(identity_cocycle(cov, PhaseU1(0.0)), nerve)
    assert all(a == 0.0 for a in pot.angles.values())
    assert all(n == 0 for n in pot.triangle_integers().values())
    assert pot.primitives is not None


def test_lift_principal_branch():
    cov = annulus_cover()
    nerve = build_nerve(cov)
    sigma = SigmaMorphism({"g0": PhaseU1(np.pi / 3)}, PhaseU1(0.0))
    pot = lift_potential(transition_cocycle(sigma, nerve), nerve)
    nongens = [a for a in pot.angles.values() if a != 0.0]
    assert nongens == [pytest.approx(np.pi / 3)]
    assert pot.primitives is None  # obstructed, no global primitives


def test_lift_antisymmetry():
    cov = annulus_cover()
    nerve = build_nerve(cov)
    sigma = SigmaMorphism({"g0": PhaseU1(0.8)}, PhaseU1(0.0))
    pot = lift_potential(transition_cocycle(sigma, nerve), nerve)
    for (u, v, c) in cov.overlaps:
        assert pot.lift(v, u, c) == -pot.lift(u, v, c)
    assert pot.lift(0, 0, None) == 0.0


def test_relifting_shifts_triangle_integers():
    cov = disk_cover()
    nerve = build_nerve(cov)
    pot = lift_potential(identity_cocycle(cov, PhaseU1(0.0)), nerve)
    shifted = dict(pot.angles)
    shifted[(0, 1, 0)] += 2 * np.pi
    pot2 = FlatPotentialU1(cover=cov, angles=shifted)
    n1 = pot.triangle_integers()
    n2 = pot2.triangle_integers()
    (t,) = cov.triples
    assert abs(n2[t] - n1[t]) == 1


def test_potential_rejects_non_integer_triangles():
    cov = disk_cover()
    angles = {e: 0.0 for e in cov.overlaps}
    angles[(0, 1, 0)] = 0.4
    with pytest.raises(InvalidPotential):
        FlatPotentialU1(cover=cov, angles=angles)


def test_potential_rejects_inconsistent_primitives():
    cov = annulus_cover()
    angles = {e: 0.0 for e in cov.overlaps}
    with pytest.raises(InvalidPotential):
        FlatPotentialU1(
            cover=cov, angles=angles, primitives={0: 0.0, 1: 1.0, 2: 0.0, 3: 0.0}
        )


def test_potential_holonomy_matches_cocycle():
    rng = np.random.default_rng(29)
    for name in ALL_BUILTINS:
        cov = make(name)
        nerve = build_nerve(cov)
        pres = pi1_presentation(nerve)
        sigma = u1_sigma_from_h1(pres, rng.uniform(-2, 2), rng.uniform(-2, 2))
        coc = transition_cocycle(sigma, nerve)
        pot = lift_potential(coc, nerve)
        for _ in range(100):
            cur = cov.base_region
            visited = [cur]
            for _ in range(int(rng.integers(2, 8))):
                nbrs = cov.neighbors(cur)
                cur = int(nbrs[int(rng.integers(0, len(nbrs)))])
                visited.append(cur)
            p = approximate_curve(cov, visited)
            assert distance(holonomy(pot, p), holonomy(coc, p)) <= 1e-10, name


def test_lift_sum_winding():
    cov = annulus_cover()
    nerve = build_nerve(cov)
    sigma = SigmaMorphism({"g0": PhaseU1(np.pi / 2)}, PhaseU1(0.0))
    pot = lift_potential(transition_cocycle(sigma, nerve), nerve)
    wind1 = approximate_curve(cov, [0, 1, 2, 3, 0])
    wind3 = approximate_curve(cov, [0, 1, 2, 3] * 3 + [0])
    assert lift_sum(pot, wind3) == pytest.approx(3 * lift_sum(pot, wind1))
    assert lift_sum(pot, wind1) == pytest.approx(np.pi / 2)
    # the unwrapped sums differ even though wrapped holonomies may not
    assert lift_sum(pot, wind3) == pytest.approx(3 * np.pi / 2)


def test_lift_potential_rejects_matrices():
    cov = figure_eight_cover()
    nerve = build_nerve(cov)
    coc = identity_cocycle(cov, MatrixUn(I2))
    with pytest.raises(VariantMismatch):
        lift_potential(coc, nerve)


def test_two_cycle_integer_sum_is_dressing_invariant():
    # pair the triangle integers with the torus fundamental 2-cycle; the
    # pairing must not move under coboundary dressing of the same cocycle
    rng = np.random.default_rng(41)
    cov = torus_cover()
    nerve = build_nerve(cov)
    pres = pi1_presentation(nerve)
    sigma = u1_sigma_from_h1(pres, 2.0, -1.4)
    coc = transition_cocycle(sigma, nerve)
    (cycle,) = closed_triangle_cycles(cov)

    def pairing(c):
        pot = lift_potential(c, nerve)
        ints = pot.triangle_integers()
        return sum(cycle[t] * ints[t] for t in cov.triples)

    base = pairing(coc)
    for _ in range(5):
        lam = {r: PhaseU1(rng.uniform(-np.pi, np.pi)) for r in cov.regions}
        assert pairing(dress_cocycle(coc, lam)) == base


def test_two_cycle_integer_sum_rerooting_invariant():
    cov = torus_cover()
    pres = pi1_presentation(build_nerve(cov))
    sigma = u1_sigma_from_h1(pres, 2.0, -1.4)
    (cycle,) = closed_triangle_cycles(cov)
    sums = []
    for base in cov.regions:
        cov2 = builtin_cover("torus")
        cov2 = type(cov2)(
            regions=cov2.regions,
            overlaps=cov2.overlaps,
            triples=cov2.triples,
            disjoint_pairs=cov2.disjoint_pairs,
            base_region=base,
            kind=cov2.kind,
        )
        nerve2 = build_nerve(cov2)
        pres2 = pi1_presentation(nerve2)
        sigma2 = u1_sigma_from_h1(pres2, 2.0, -1.4)
        pot = lift_potential(transition_cocycle(sigma2, nerve2), nerve2)
        ints = pot.triangle_integers()
        sums.append(sum(cycle[t] * ints[t] for t in cov.triples))
    assert len(set(sums)) == 1
