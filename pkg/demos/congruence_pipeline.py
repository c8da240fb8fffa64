"""From q-expansion congruences to the torsion check on a toy instance."""

import random

from eiscong import qexpansion as Q
from eiscong.iwasawa import diagonal_model, rw_equivalence
from eiscong.pipeline import perturb_free_orbit, synthetic_instance, torsion_check

rng = random.Random(0)
inst = Q.free_instance(rng, d=1, p=3, bound=6)
rep = Q.congruence_check(inst)
print(f"free model: pass={rep['pass']}, {rep['checked']} indices, {rep['fixed_matches']} fixed matches")
h = sorted(inst.ext.coeffs)[1]
inst.ext = inst.ext.perturbed(h, 1)
print(f"  after perturbing {h}: first witness {Q.congruence_check(inst)['first_witness']}")

rw = rw_equivalence(diagonal_model(3), 2, 2000, seed=0)
print(f"criterion vs trace ideal: {rw['tested']} pairs, {rw['n_discrepancies']} discrepancies")

base = synthetic_instance(7)
print(f"compliant instance: pass={torsion_check(base)['pass']}")
loud = perturb_free_orbit(base)
print(f"free-orbit perturbation: witness {torsion_check(loud)['witness']}")
quiet = perturb_free_orbit(base, compensate=True)
print(f"compensated across the orbit: pass={torsion_check(quiet)['pass']}")
