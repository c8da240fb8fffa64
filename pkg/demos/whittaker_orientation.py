"""Compare the two orientations of the Whittaker closed form with the cell-sum oracle.

At p = 2, t = 1 the closed form evaluated at beta itself disagrees with
the oracle when exactly one off-diagonal entry of beta is a unit; evaluated
at the transpose it always agrees.
"""

import itertools

from eiscong.characters import LocalMultChar as C
from eiscong.zeta_local import PrincipalSeriesDatum, SplitPairChar, whittaker_closed, whittaker_oracle

t = C.trivial(2)
u = C.unramified(2, 2, 1)
pair = SplitPairChar(t, u)
datum = PrincipalSeriesDatum(2, (1, 1), (t, u))

rows = []
for b in itertools.product(range(4), repeat=4):
    beta = [[b[0], b[1]], [b[2], b[3]]]
    oracle = whittaker_oracle(beta, pair, datum, 1)
    rows.append((beta, whittaker_closed(beta, pair, datum, "stated") == oracle,
                 whittaker_closed(beta, pair, datum, "derived") == oracle))

print(f"{len(rows)} integral beta mod 4")
print(f"  derived orientation agrees: {sum(r[2] for r in rows)}")
print(f"  stated orientation agrees:  {sum(r[1] for r in rows)}")
print("  first disagreements:", [r[0] for r in rows if not r[1]][:4])
