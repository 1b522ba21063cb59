"""A form with killing need not have a maximal Silverstein extension.

The study discretizes the interval (-1, 1) as a path graph and builds three
forms: the base form (Dirichlet boundary at both ends, a unit point killing
at the midpoint) and two unmasked extensions, one replacing the killing by a
coupling to the right endpoint, one keeping the killing.  Both extensions are
Silverstein extensions of the base.

A hypothetical maximal extension would have to annihilate constants (the
coupling extension does) and lie below the killing extension, while agreeing
with the base on its domain.  For the tent probe f (one at the midpoint, zero
at the ends) those demands collide:

    base(f) = gradient(f) + 1,   ext2(f - 1) = gradient(f),

and the unit gap between them is mesh-independent, so the contradiction
survives at every resolution.
"""

from graphforms import CounterexampleSetup, run_counterexample

for n in (5, 51, 201):
    rep = run_counterexample(CounterexampleSetup(n=n))
    print(f"--- n = {n} ---")
    print(rep.summary())
    print()

# The killing extension stays transient while the coupling one is recurrent;
# that asymmetry is exactly what rules out a common upper bound.
from graphforms import classify_recurrence
from graphforms.corpus import saturating_exhaustion

setup = CounterexampleSetup(n=51)
_, _, ext1, ext2 = setup.build()
for name, form in (("coupling extension", ext1), ("killing extension", ext2)):
    rep = classify_recurrence(form, saturating_exhaustion(form.graph))
    print(f"{name}: reflected_recurrent = {rep['reflected_recurrent']}, "
          f"reflected(1) = {rep['reflected_value_at_1']:.6f}")
