"""
Phases, covers, and transition data
===================================

Walks the abelian layer end to end: build a ring cover, assign the one
generator a quarter turn, spread that to lawful transition data, try to
split it as a coboundary, and read winding numbers back from holonomy.
"""

import numpy as np

from flatnet import (
    PhaseU1,
    SigmaMorphism,
    annulus_cover,
    approximate_curve,
    build_nerve,
    check_cocycle,
    disk_cover,
    dress_cocycle,
    generator_loop,
    holonomy,
    identity_cocycle,
    lift_potential,
    lift_sum,
    loop_class,
    pi1_presentation,
    transition_cocycle,
    trivialize,
    validate_sigma,
)

# -- the ring cover and its fundamental group --------------------------------

cover = annulus_cover()
nerve = build_nerve(cover)
pres = pi1_presentation(nerve)
print("annulus cover:", len(cover.regions), "regions,",
      len(cover.overlaps), "overlaps")
print("pi1 generators:", pres.generators, "relations:", len(pres.relations))

# one free generator, so any phase gives a lawful assignment
sigma = SigmaMorphism({"g0": PhaseU1(np.pi / 2)}, PhaseU1(0.0))
coc = transition_cocycle(sigma, nerve)
chk = check_cocycle(coc)
print("cocycle triple-law residual:", chk.max_residual, "ok:", chk.ok)

# -- the dichotomy: split or witness -----------------------------------------

res = trivialize(coc, nerve)
print("quarter-turn data splits as a coboundary:", res.success)
w = res.witness
print("witness loop regions:", [w.loop.start] + [s.dst for s in w.loop.steps],
      "holonomy angle:", w.holonomy.angle)

# coboundaries, by contrast, are recovered exactly (up to one global phase)
rng = np.random.default_rng(0)
lam = {r: PhaseU1(rng.uniform(-np.pi, np.pi)) for r in cover.regions}
cob = dress_cocycle(identity_cocycle(cover, PhaseU1(0.0)), lam)
rec = trivialize(cob, nerve)
print("random coboundary splits:", rec.success)

# -- winding numbers from holonomy -------------------------------------------

ring = [0, 1, 2, 3]
for k in (1, 2, 3, -1):
    visited = ring * k + [0] if k > 0 else [0, 3, 2, 1] * -k + [0]
    loop = approximate_curve(cover, visited)
    word = loop_class(pres, loop)
    print(f"winding {k:+d}: class {word.as_names():>12s} "
          f"angle {holonomy(coc, loop).angle:+.6f}")

# -- flat potentials: local angle lifts --------------------------------------

pot = lift_potential(coc, nerve)
gen = generator_loop(nerve, 0)
print("lift sum around the generator:", lift_sum(pot, gen),
      "(equals the holonomy angle mod 2*pi)")
print("primitives available:", pot.primitives is not None,
      "(obstructed data has no global primitive)")

# the disk forces contractibility: the same quarter turn is now unlawful
disk = disk_cover()
dnerve = build_nerve(disk)
dpres = pi1_presentation(dnerve)
bad = SigmaMorphism({"g0": PhaseU1(np.pi / 2)}, PhaseU1(0.0))
violations = validate_sigma(dpres, bad)
print("disk relation violations for a quarter turn:", len(violations))
good = SigmaMorphism({"g0": PhaseU1(0.0)}, PhaseU1(0.0))
print("disk relation violations for the trivial assignment:",
      len(validate_sigma(dpres, good)))
