"""Print A, f and g for a few zeta at a split and an inert place."""

from eiscong.arith import ratfunc_taylor
from eiscong.hermitian import HermitianMatrix as H
from eiscong.hermitian import LocalQuadData
from eiscong.local_series import A_zeta_truncated, SeriesRequest, f_zeta, g_zeta

DEPTH = 3

for label in ("split", "inert"):
    data = LocalQuadData(3, label)
    fc = data.field_case
    print(f"p = 3, {label}")
    for z in (H.diag([1, 1], fc), H.diag([1, 3], fc), H.diag([3, 3], fc), H.diag([1, 0], fc)):
        req = SeriesRequest.make(z, data, DEPTH)
        A = A_zeta_truncated(req).coeffs
        f = ratfunc_taylor(f_zeta(req), DEPTH).coeffs
        g = g_zeta(z, data).coeffs
        print(f"  zeta={z!r}\n    A={list(map(str, A))}  f={list(map(str, f))}  g={list(g)}")
