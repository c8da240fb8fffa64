"""The local coefficient series A_zeta, the factor f_zeta and the polynomial g_zeta.

``A_zeta(t) = sum_sigma e(tr(zeta*sigma)) t^k(sigma)`` over ``S/S(r)``, with the
additive character ``e(x) = zeta_{p^D}^{p^D * {x}_p}`` evaluated exactly.
The closed factor is::

    f_zeta(t) = prod_{i=1..n} (1 - tau^(i-1) q^(i-1) t)
                / prod_{i=1..n-r} (1 - tau^(n+1) q^(n+i-1) t)

and ``g_zeta = A_zeta / f_zeta`` is expected to be an integral polynomial
with constant term 1.  That expectation is checked on every call.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .arith import (INF, CycloNum, Poly, RatFunc, TruncSeries, rat_mod,
                    ratfunc_taylor, series_divide)
from .errors import (Budget, ConsistencyError, DepthInsufficient, InputError,
                     PreconditionError, ResourceError, UnsupportedCase,
                     default_budget)
from .hermitian import (HermitianMatrix, LocalQuadData, check_enumeration_budget,
                        coset_table, elementary_exponents, galois_act, in_lattice, matrix_rank,
                        pairing_weights_mod)


@dataclass(frozen=True)
class SeriesRequest:
    zeta: HermitianMatrix
    data: LocalQuadData
    n: int
    r: int
    depth: int

    def __post_init__(self):
        z = self.zeta
        if z.n != self.n:
            raise InputError("zeta has the wrong size")
        if z.field_case != self.data.field_case:
            raise InputError("zeta kind does not match the local label")
        if self.depth < 0:
            raise InputError("depth must be nonnegative")
        rank = matrix_rank(z, self.data)
        if rank != self.r:
            raise InputError(f"declared rank {self.r} but zeta has rank {rank}")
        if 0 < self.r < self.n:
            r = self.r
            outside = []
            mats = (z.a, z.b) if z.field_case else (z.y,)
            for m in mats:
                outside += [m[i][j] for i in range(self.n) for j in range(self.n) if i >= r or j >= r]
            if any(v != 0 for v in outside):
                raise InputError("a rank-deficient zeta must be normalized to diag[xi, 0]")
        if not in_lattice(z, "T_dual", self.data):
            raise PreconditionError("zeta is not in the dual lattice T")

    @classmethod
    def make(cls, zeta: HermitianMatrix, data: LocalQuadData, depth: int) -> "SeriesRequest":
        return cls(zeta, data, zeta.n, matrix_rank(zeta, data), depth)


def f_zeta(req: SeriesRequest) -> RatFunc:
    """The closed rational factor of A_zeta.

    >>> d = LocalQuadData(3, "inert")
    >>> f_zeta(SeriesRequest.make(HermitianMatrix.scalar(1, 2, True), d, 3)).num.coeffs
    (1, 2, -3)
    """
    return f_zeta_from(req.data, req.n, req.r, req.data.q)


def f_zeta_from(data: LocalQuadData, n: int, r: int, q: int) -> RatFunc:
    tau = data.tau
    num = Poly([1])
    for i in range(1, n + 1):
        num = num * Poly([1, -tau(i - 1) * q ** (i - 1)])
    den = Poly([1])
    for i in range(1, n - r + 1):
        den = den * Poly([1, -tau(n + 1) * q ** (n + i - 1)])
    return RatFunc(num, den)


def _counts_to_int(P: int, counts, where: str) -> int:
    val = CycloNum.from_power_counts(P, counts)
    if not val.is_rational() or val.coeffs[0].denominator != 1:
        raise ConsistencyError(f"character sum {where} is not a rational integer: {val!r}")
    return int(val.coeffs[0])


def _series_from_table(params, k, weights, P: int, D: int) -> TruncSeries:
    keep = k <= D
    exps = (params[keep] @ weights) % P if params.shape[1] else np.zeros(int(keep.sum()), dtype=np.int64)
    keys = k[keep] * P + exps
    counts = np.bincount(keys, minlength=(D + 1) * P)
    coeffs = [_counts_to_int(P, counts[j * P:(j + 1) * P].tolist(), f"at t^{j}") for j in range(D + 1)]
    return TruncSeries(coeffs, D)


def A_zeta_truncated(req: SeriesRequest, budget: Budget | None = None) -> TruncSeries:
    """``A_zeta`` modulo ``t^(D+1)`` by exact coset summation.

    >>> d = LocalQuadData(3, "split")
    >>> A_zeta_truncated(SeriesRequest.make(HermitianMatrix.scalar(0, 1), d, 3)).coeffs
    (1, 2, 6, 18)
    """
    data, n, D = req.data, req.n, req.depth
    if data.label == "ramified":
        raise UnsupportedCase("A_zeta needs k(sigma), which is refused for ramified data")
    check_enumeration_budget(data, n, D, budget)
    params, k = coset_table(data, n, D)
    w = pairing_weights_mod(req.zeta, data, D)
    return _series_from_table(params, k, w, data.p**D, D)


def g_series(req: SeriesRequest, budget: Budget | None = None) -> TruncSeries:
    """The raw quotient ``A_zeta / taylor(f_zeta)`` to depth D."""
    A = A_zeta_truncated(req, budget)
    F = ratfunc_taylor(f_zeta(req), req.depth)
    return series_divide(A, F)


def _check_g(g: TruncSeries, where: str) -> None:
    if g.coeffs[0] != 1:
        raise ConsistencyError(f"g(0) = {g.coeffs[0]} != 1 {where}")
    for c in g.coeffs:
        if isinstance(c, Fraction) and c.denominator != 1:
            raise ConsistencyError(f"g has a non-integral coefficient {c} {where}")


def default_depth(zeta: HermitianMatrix, data: LocalQuadData) -> int:
    e = sum(v for v in elementary_exponents(zeta, data) if v is not INF)
    if zeta.field_case:
        e //= 2
    return max(zeta.n, e) + 1


def g_zeta(zeta: HermitianMatrix, data: LocalQuadData, depth: int | None = None,
           budget: Budget | None = None) -> Poly:
    """Polynomial part of A_zeta; default depth ``max(n, v_p(det)) + 1``.

    The quotient series must vanish in its top degree; otherwise the depth
    was not enough to see the polynomial terminate and
    :class:`DepthInsufficient` carries the partial series.
    """
    D = default_depth(zeta, data) if depth is None else depth
    req = SeriesRequest.make(zeta, data, D)
    g = g_series(req, budget)
    _check_g(g, f"for {zeta!r}")
    if D > 0 and g.coeffs[-1] != 0:
        raise DepthInsufficient(f"g_zeta not stabilized by depth {D}", partial=g)
    return Poly(int(c) for c in g.coeffs)


# ---------------------------------------------------------------------------
# unramified degree-p extensions of Q_l (the inert congruence model)

def _poly_mod_divides(f, g, ell):
    """Does monic f divide g over F_ell?  Coefficient lists, lowest first."""
    g = [c % ell for c in g]
    df = len(f) - 1
    while len(g) - 1 >= df and any(g):
        while g and g[-1] % ell == 0:
            g.pop()
        if len(g) - 1 < df:
            break
        c = g[-1]
        shift = len(g) - 1 - df
        for i, fc in enumerate(f):
            g[shift + i] = (g[shift + i] - c * fc) % ell
        while g and g[-1] == 0:
            g.pop()
    return not any(g)


@lru_cache(maxsize=None)
def irreducible_modulus(ell: int, deg: int) -> tuple:
    """First monic irreducible polynomial of the given degree over F_ell (lex order)."""
    for tail in product(range(ell), repeat=deg):
        f = list(tail) + [1]
        if f[0] == 0:
            continue
        ok = True
        for d in range(1, deg // 2 + 1):
            for low in product(range(ell), repeat=d):
                if _poly_mod_divides(list(low) + [1], f, ell):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return tuple(f)
    raise ConsistencyError(f"no irreducible polynomial of degree {deg} mod {ell}")


class UnramifiedExtension:
    """``Z_l[x]/(g)`` for a lift ``g`` of an irreducible polynomial mod l."""

    def __init__(self, ell: int, deg: int):
        self.ell = ell
        self.deg = deg
        self.modulus = irreducible_modulus(ell, deg)
        d = deg
        # reduction of x^k, k < 2d-1, to the basis 1..x^(d-1)
        table = []
        cur = [0] * d
        cur[0] = 1
        for _ in range(2 * d - 1):
            table.append(cur[:])
            top = cur[-1]
            nxt = [0] + cur[:-1]
            nxt = [c - top * self.modulus[i] for i, c in enumerate(nxt)]
            cur = nxt
        self.reduce_table = np.array(table, dtype=np.int64)
        # traces of x^i via the companion matrix
        C = np.zeros((d, d), dtype=object)
        for i in range(1, d):
            C[i, i - 1] = 1
        for i in range(d):
            C[i, d - 1] = -self.modulus[i]
        M = np.identity(d, dtype=object)
        tr = []
        for _ in range(d):
            tr.append(int(np.trace(M)))
            M = M.dot(C)
        self.traces = np.array(tr, dtype=np.int64)

    def mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Rowwise product of coordinate arrays of shape (N, d)."""
        d = self.deg
        prod_ = np.zeros((u.shape[0], 2 * d - 1), dtype=np.int64)
        for i in range(d):
            for j in range(d):
                prod_[:, i + j] += u[:, i] * v[:, j]
        return prod_ @ self.reduce_table


def _vals(arr, p, cap):
    v = np.zeros(arr.shape, dtype=np.int64)
    mod = 1
    for _ in range(cap):
        mod *= p
        v += (arr % mod == 0)
    return v


def extension_A_series(zeta: HermitianMatrix, data: LocalQuadData, deg: int, D: int,
                       budget: Budget | None = None) -> TruncSeries:
    """A'_zeta over the unramified degree-``deg`` extension, zeta base-rational.

    Brute force over ``S'/S'(r')``.  Supports n = 1 (either label) and n = 2
    with split label.
    """
    budget = budget or default_budget()
    ell, n = data.p, zeta.n
    if n == 2 and data.field_case:
        raise UnsupportedCase("extension model for n = 2 needs a split label")
    if n > 2:
        raise UnsupportedCase("extension model supports n <= 2")
    est = ell ** (n * n * deg * D)
    if est > budget.max_cosets:
        raise ResourceError(f"extension enumeration l={ell}, deg={deg}, n={n}, D={D}", est)
    ext = UnramifiedExtension(ell, deg)
    P = ell**D
    if D == 0:
        return TruncSeries([1], 0)
    m = n * n * deg
    params = np.indices((P,) * m).reshape(m, -1).T.astype(np.int64)
    ws = []
    if n == 1:
        z = zeta.a[0][0] if zeta.field_case else zeta.y[0][0]
        zw = rat_mod(z, ell, D)
        weights = (zw * ext.traces) % P
        vmin = _vals(params, ell, D).min(axis=1)
        k = D - vmin
    else:
        y = zeta.y
        for i in range(2):
            for j in range(2):
                ws.append(rat_mod(y[j][i], ell, D))
        weights = np.concatenate([(w * ext.traces) % P for w in ws])
        vmin = _vals(params, ell, D).min(axis=1)
        blocks = [params[:, b * deg:(b + 1) * deg] for b in range(4)]
        det = ext.mul(blocks[0], blocks[3]) - ext.mul(blocks[1], blocks[2])
        vdet = _vals(det, ell, 2 * D + 1).min(axis=1)
        k = np.maximum(0, D - vmin) + np.maximum(0, D + vmin - vdet)
    return _series_from_table(params, k, np.asarray(weights, dtype=np.int64), P, D)


# ---------------------------------------------------------------------------
# coefficient congruences

def congruence_suite(beta: HermitianMatrix, data: LocalQuadData, p: int, depth: int,
                     extension: str, tuple_inputs=None, budget: Budget | None = None) -> dict:
    """Check ``n_{q^j} == n'_{q'^j} mod p`` for j <= depth, and Gamma-equivariance.

    ``data`` describes the base place (residue characteristic l, usually
    different from p); ``extension`` is ``"split"`` (p copies of the place)
    or ``"inert"`` (one place with residue field of size ``q^p``).
    """
    if extension not in ("split", "inert"):
        raise InputError("extension must be 'split' or 'inert'")
    if matrix_rank(beta, data) != beta.n:
        raise PreconditionError("beta must have full rank")
    D = depth
    req = SeriesRequest.make(beta, data, D)
    base = g_series(req, budget)
    witnesses = []
    series = {"base": [str(c) for c in base.coeffs]}
    if extension == "split":
        copies = [g_series(SeriesRequest.make(beta, data, D), budget) for _ in range(p)]
        ext_coeffs = []
        for j in range(D + 1):
            prod_ = 1
            for s in copies:
                prod_ *= int(s.coeffs[j])
            ext_coeffs.append(prod_)
    else:
        A_ext = extension_A_series(beta, data, p, D, budget)
        f_ext = f_zeta_from(data, beta.n, beta.n, data.q**p)
        F_ext = ratfunc_taylor(f_ext, D)
        g_ext = series_divide(A_ext, F_ext)
        ext_coeffs = [int(c) for c in g_ext.coeffs]
        A_base = A_zeta_truncated(req, budget)
        F_base = ratfunc_taylor(f_zeta(req), D)
        for j in range(D + 1):
            if (int(F_ext.coeffs[j]) - int(F_base.coeffs[j])) % p:
                witnesses.append({"check": "f mod p", "j": j})
            if (int(A_ext.coeffs[j]) - int(A_base.coeffs[j])) % p:
                witnesses.append({"check": "A mod p", "j": j})
        series["A_base"] = [str(c) for c in A_base.coeffs]
        series["A_ext"] = [str(c) for c in A_ext.coeffs]
    series["ext"] = [str(c) for c in ext_coeffs]
    for j in range(D + 1):
        if (ext_coeffs[j] - int(base.coeffs[j])) % p:
            witnesses.append({"check": "n mod p", "j": j,
                              "n": str(base.coeffs[j]), "n_ext": str(ext_coeffs[j])})
    # Gamma-equivariance on tuples of split places
    tup = tuple(tuple_inputs) if tuple_inputs is not None else tuple(
        beta if i % 2 == 0 else beta.scale(data.p) for i in range(p))
    if len(tup) != p:
        raise InputError("the tuple input needs one matrix per place")
    gamma = tuple((i + 1) % p for i in range(p))
    polys = tuple(tuple(g_series(SeriesRequest.make(b, data, D), budget).coeffs) for b in tup)
    moved = tuple(tuple(g_series(SeriesRequest.make(b, data, D), budget).coeffs)
                  for b in galois_act(tup, gamma))
    if moved != galois_act(polys, gamma):
        witnesses.append({"check": "gamma-equivariance"})
    return {"pass": not witnesses, "witnesses": witnesses, "series": series,
            "p": p, "depth": D, "extension": extension, "place": data.to_json()}
