"""Walkthrough: free operations shrink every monotone.

A free operation relabels/mixes preparations and measurements and
post-processes outcomes, with equivalence bookkeeping between the two
scenarios.  Such operations cannot create contextuality: noncontextual
behaviors stay noncontextual and every monotone is non-increasing.

Run:  python demos/free_operations.py
"""

import random

from ctxlab import (
    FreeOperation,
    apply_freeop,
    check_membership,
    contextual_fraction,
    enumerate_vertices,
    l1_contextuality_distance,
    robustness,
    sample_random_freeop,
    scenario,
    to_float,
    validate_freeop,
)
from ctxlab.instances import pom_behavior, pom_scenario, pom_success_quantum
from ctxlab.model import PrepEquivalence
from ctxlab.rational import ONE, ZERO
from ctxlab.sampling import rand_column_stochastic, random_nc_behavior

# 1. noncontextual in, noncontextual out
op, src, tgt = sample_random_freeop((3, 2, 2), seed=5, source_dims=(3, 2, 2))
vs, vt = enumerate_vertices(src), enumerate_vertices(tgt)
b_nc = random_nc_behavior(random.Random(6), src, vs)
image = apply_freeop(op, b_nc)
print("random operation on a random noncontextual behavior:")
print(f"  source noncontextual: {check_membership(src, b_nc, vs).noncontextual}")
print(f"  image  noncontextual: {check_membership(tgt, image, vt).noncontextual}\n")

# 2. monotone drops on a contextual input: keep the parity scenario as
# source (permute preparations, garble measurements and outcomes)
rng = random.Random(11)
s = pom_scenario()
perm = [2, 0, 3, 1]
q_P = tuple(tuple(ONE if i == perm[it] else ZERO for it in range(4)) for i in range(4))
eq = s.prep_equivalences[0]
tgt_eq = PrepEquivalence(
    tuple(eq.alpha[perm[it]] for it in range(4)),
    tuple(eq.beta[perm[it]] for it in range(4)),
)
def _mostly_identity(eps):
    noise = rand_column_stochastic(rng, 2, 2)
    eye = ((ONE, ZERO), (ZERO, ONE))
    return tuple(
        tuple((1 - eps) * eye[r][c] + eps * noise[r][c] for c in range(2))
        for r in range(2)
    )

from ctxlab.rational import Q

q_M = _mostly_identity(Q(1, 10))
q_O = tuple(_mostly_identity(Q(1, 10)) for _ in range(2))
noisy = FreeOperation(s, scenario(4, 2, 2, [tgt_eq], []), q_P, q_M, q_O)
assert validate_freeop(noisy).ok

b = pom_behavior(pom_success_quantum())
tb = apply_freeop(noisy, b)
v = enumerate_vertices(s)
v2 = enumerate_vertices(noisy.target)
print("noisy parity-respecting operation on the contextual qubit behavior:")
for name, fn in (("contextual fraction", contextual_fraction),
                 ("robustness", robustness),
                 ("l1 distance", l1_contextuality_distance)):
    before = fn(s, b, v).value
    after = fn(noisy.target, tb, v2).value
    arrow = "==" if after == before else "->"
    print(f"  {name:20s} {to_float(before):.6f} {arrow} {to_float(after):.6f}")
print("\nevery monotone is non-increasing, exactly (rational arithmetic).")
