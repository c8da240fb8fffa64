"""Formal q-expansions over ordered monoids and the mod-p congruence mechanism.

Two index models ship.  ``FreeMonoid(d)`` is ``Z_{>=0}^d``; a
``TupleMonoid(base, p)`` holds p-tuples of base indices with the cyclic
group Gamma permuting positions, and the trace map adds the tuple up.
``HermitianPDMonoid`` indexes positive semi-definite integral hermitian
matrices over an imaginary quadratic field ``Q(sqrt(delta))`` by trace.

The congruence being checked: for extension coefficients of the shape
``c'(h_1..h_p) = eps'(h') prod_i c(h_i) psi(h_i)`` with ``eps'``
Gamma-invariant, the pull-back along the trace is congruent mod p to the
Frobenius twist of the base expansion with coefficients
``eps'(h0,..,h0) c^[p](h0) psi(h0)^p``.  Non-fixed fibers cancel in
Gamma-orbits of size p; fixed fibers match by ``x^p = x`` on the base data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Callable, Sequence

from .arith import CycloNum, as_rat, exact_str, lcm_list, padic_val
from .characters import LocalMultChar
from .errors import (Budget, InputError, PreconditionError, ResourceError,
                     UnsupportedCase, default_budget)
from .hermitian import HermitianMatrix, LocalQuadData, galois_act

# ---------------------------------------------------------------------------
# index monoids


class IndexMonoid:
    """Interface: finitely many elements below any height."""

    kind = "abstract"

    def zero(self):
        raise NotImplementedError

    def height(self, h) -> int:
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def coords(self, h) -> tuple:
        raise NotImplementedError

    def elements(self, bound: int) -> list:
        raise NotImplementedError

    def contains(self, h) -> bool:
        raise NotImplementedError

    def scale(self, h, m: int):
        out = self.zero()
        for _ in range(m):
            out = self.add(out, h)
        return out

    def divide(self, h, m: int):
        """``h0`` with ``m*h0 == h``, or None."""
        c = self.coords(h)
        if any(x % m for x in c):
            return None
        cand = self.from_coords(tuple(x // m for x in c))
        return cand if cand is not None and self.contains(cand) else None

    def from_coords(self, c):
        raise NotImplementedError

    def gamma(self, h, s: int = 1):
        return h

    def is_fixed(self, h) -> bool:
        return True


class FreeMonoid(IndexMonoid):
    """``Z_{>=0}^d`` with height the coordinate sum."""

    kind = "free"

    def __init__(self, d: int):
        if d < 1:
            raise InputError("rank must be positive")
        self.d = d

    def zero(self):
        return (0,) * self.d

    def height(self, h) -> int:
        return sum(h)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def coords(self, h) -> tuple:
        return tuple(h)

    def from_coords(self, c):
        return tuple(c)

    def contains(self, h) -> bool:
        return len(h) == self.d and all(isinstance(x, int) and x >= 0 for x in h)

    def elements(self, bound: int) -> list:
        return _compositions_upto(self.d, bound)

    def to_json(self):
        return {"kind": "free", "rank": self.d}

    def __eq__(self, o):
        return isinstance(o, FreeMonoid) and o.d == self.d

    def __hash__(self):
        return hash(("free", self.d))


@lru_cache(maxsize=None)
def _compositions_upto(d: int, bound: int) -> list:
    out = []

    def rec(prefix, left, k):
        if k == 0:
            out.append(tuple(prefix))
            return
        for x in range(left + 1):
            rec(prefix + [x], left - x, k - 1)
    rec([], bound, d)
    return sorted(out, key=lambda h: (sum(h), h))


class HermitianPDMonoid(IndexMonoid):
    """2x2 psd hermitian matrices ``[[a, x + y w], [x - y w, b]]``, ``w = sqrt(delta)``.

    Entries: ``a, b`` integers, ``x, y`` integers (the order ``Z[sqrt(delta)]``).
    Height is the trace.  Stored as ``(a, b, x, y)``.
    """

    kind = "hermitian-pd"

    def __init__(self, delta: int = -2):
        if delta >= 0:
            raise InputError("delta must be negative (imaginary quadratic field)")
        self.delta = delta

    def zero(self):
        return (0, 0, 0, 0)

    def height(self, h) -> int:
        return h[0] + h[1]

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def coords(self, h) -> tuple:
        return tuple(h)

    def from_coords(self, c):
        return tuple(c)

    def det(self, h) -> int:
        a, b, x, y = h
        return a * b - (x * x - self.delta * y * y)

    def contains(self, h) -> bool:
        a, b, x, y = h
        return a >= 0 and b >= 0 and self.det(h) >= 0 and (a > 0 or (x == 0 and y == 0)) \
            and (b > 0 or (x == 0 and y == 0))

    def elements(self, bound: int) -> list:
        out = []
        for a in range(bound + 1):
            for b in range(bound + 1 - a):
                lim = isqrt(a * b)
                for x in range(-lim, lim + 1):
                    for y in range(-lim, lim + 1):
                        h = (a, b, x, y)
                        if self.contains(h):
                            out.append(h)
        return sorted(out, key=lambda h: (self.height(h), h))

    def to_matrix(self, h) -> HermitianMatrix:
        a, b, x, y = h
        return HermitianMatrix.field([[a, x], [x, b]], [[0, y], [-y, 0]])

    def to_json(self):
        return {"kind": "hermitian-pd", "delta": self.delta}

    def __eq__(self, o):
        return isinstance(o, HermitianPDMonoid) and o.delta == self.delta

    def __hash__(self):
        return hash(("hpd", self.delta))


class TupleMonoid(IndexMonoid):
    """p-tuples of base indices; Gamma shifts positions."""

    def __init__(self, base: IndexMonoid, p: int):
        if p < 2:
            raise InputError("need at least two copies")
        self.base = base
        self.p = p
        self.kind = f"tuple[{base.kind}]"

    def zero(self):
        return (self.base.zero(),) * self.p

    def height(self, h) -> int:
        return sum(self.base.height(x) for x in h)

    def add(self, a, b):
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def coords(self, h) -> tuple:
        return tuple(c for x in h for c in self.base.coords(x))

    def contains(self, h) -> bool:
        return len(h) == self.p and all(self.base.contains(x) for x in h)

    def gamma(self, h, s: int = 1):
        perm = tuple((i + s) % self.p for i in range(self.p))
        return galois_act(h, perm)

    def is_fixed(self, h) -> bool:
        return all(x == h[0] for x in h)

    def orbit(self, h) -> list:
        out = [h]
        cur = self.gamma(h)
        while cur != h:
            out.append(cur)
            cur = self.gamma(cur)
        return out

    def elements(self, bound: int) -> list:
        base = self.base.elements(bound)
        out = []

        def rec(prefix, left):
            if len(prefix) == self.p:
                out.append(tuple(prefix))
                return
            for x in base:
                hx = self.base.height(x)
                if hx <= left:
                    rec(prefix + [x], left - hx)
        rec([], bound)
        return out

    def to_json(self):
        return {"kind": "tuple", "copies": self.p, "base": self.base.to_json()}


@dataclass
class TraceMap:
    """``Tr(h_1..h_p) = h_1 + ... + h_p`` from a TupleMonoid to its base."""

    source: TupleMonoid

    @property
    def target(self) -> IndexMonoid:
        return self.source.base

    def __call__(self, h):
        out = self.target.zero()
        for x in h:
            out = self.target.add(out, x)
        return out

    def fiber(self, h, budget: Budget | None = None) -> list:
        """All source tuples with trace h (complete, by height recursion)."""
        budget = budget or default_budget()
        T = self.target
        bound = T.height(h)
        cands = [x for x in T.elements(bound)]
        out = []

        def rec(prefix, acc):
            if len(out) > budget.max_cosets:
                raise ResourceError(f"fiber over {h}", len(out))
            if len(prefix) == self.source.p - 1:
                rest = tuple(a - b for a, b in zip(T.coords(h), T.coords(acc)))
                last = T.from_coords(rest)
                if T.contains(last):
                    out.append(tuple(prefix) + (last,))
                return
            for x in cands:
                nxt = T.add(acc, x)
                if T.height(nxt) <= bound:
                    rec(prefix + [x], nxt)
        rec([], T.zero())
        return out


# ---------------------------------------------------------------------------
# q-expansions


class QExpansion:
    """Finitely supported ``sum c(h) q^h`` truncated at a height bound."""

    def __init__(self, monoid: IndexMonoid, bound: int, coeffs: dict | None = None,
                 provenance: dict | None = None):
        self.monoid = monoid
        self.bound = bound
        self.coeffs = {}
        for h, v in (coeffs or {}).items():
            if monoid.height(h) > bound:
                raise InputError(f"index {h} is above the height bound {bound}")
            if not monoid.contains(h):
                raise InputError(f"index {h} is not in the monoid")
            if not (v == 0):
                self.coeffs[h] = v
        self.provenance = provenance or {}

    def __getitem__(self, h):
        return self.coeffs.get(h, 0)

    def __add__(self, o: "QExpansion") -> "QExpansion":
        bound = min(self.bound, o.bound)
        keys = {h for h in set(self.coeffs) | set(o.coeffs) if self.monoid.height(h) <= bound}
        return QExpansion(self.monoid, bound, {h: self[h] + o[h] for h in keys})

    def scale(self, c) -> "QExpansion":
        return QExpansion(self.monoid, self.bound, {h: v * c for h, v in self.coeffs.items()})

    def perturbed(self, h, delta=1) -> "QExpansion":
        c = dict(self.coeffs)
        c[h] = c.get(h, 0) + delta
        return QExpansion(self.monoid, self.bound, c)

    def to_json(self) -> dict:
        items = sorted(self.coeffs.items(), key=lambda kv: (self.monoid.height(kv[0]), repr(kv[0])))
        return {"monoid": self.monoid.to_json(), "bound": self.bound,
                "coeffs": [{"index": _jsonable(h), "value": exact_str(v)} for h, v in items]}


def _jsonable(h):
    if isinstance(h, tuple):
        return [_jsonable(x) for x in h]
    return h


def pullback_trace(fp: QExpansion, tr: TraceMap, bound: int | None = None,
                   budget: Budget | None = None) -> QExpansion:
    """``g(h) = sum_{Tr(h') = h} c'(h')`` for every target h up to the bound.

    Provenance records, per target index, the Gamma-orbits in its fiber
    with their orbit sums.
    """
    bound = fp.bound if bound is None else bound
    if bound > fp.bound:
        raise InputError(f"target bound {bound} exceeds the source bound {fp.bound}; "
                         "fibers would be incomplete")
    src = tr.source
    out, prov = {}, {}
    for h in tr.target.elements(bound):
        fib = tr.fiber(h, budget)
        seen, orbits, total = set(), [], 0
        for x in fib:
            if x in seen:
                continue
            orb = src.orbit(x)
            seen.update(orb)
            s = 0
            for y in orb:
                s = s + fp[y]
            total = total + s
            orbits.append({"rep": x, "size": len(orb), "sum": s})
        if not (total == 0):
            out[h] = total
        prov[h] = orbits
    return QExpansion(tr.target, bound, out, prov)


def frobenius_twist(f: QExpansion, p: int) -> QExpansion:
    """Reindex by ``q -> q^p``: coefficient at ``p h`` is ``c(h)``."""
    M = f.monoid
    return QExpansion(M, f.bound * p, {M.scale(h, p): v for h, v in f.coeffs.items()})


# ---------------------------------------------------------------------------
# epsilon data: Gamma-invariant combinations of characters


@dataclass(frozen=True)
class EpsilonData:
    """``eps'(h') = sum_j c_j zeta_N^(a_j . coords(h'))`` on a TupleMonoid."""

    N: int
    terms: tuple  # ((coeff, exps), ...)

    def value(self, coords: Sequence[int]) -> CycloNum:
        total = CycloNum.from_rational(0, self.N)
        for c, a in self.terms:
            total = total + CycloNum.zeta(self.N, sum(x * y for x, y in zip(a, coords))) * as_rat(c)
        return total

    def validate(self, monoid: TupleMonoid, p: int) -> None:
        """Gamma-invariance and p-integrality of the coefficients."""
        table = {}
        for c, a in self.terms:
            a = tuple(x % self.N for x in a)
            table[a] = table.get(a, 0) + as_rat(c)
        for c in table.values():
            if padic_val(c, p) < 0 if c != 0 else False:
                raise PreconditionError(f"coefficient {c} is not p-integral")
        k = len(monoid.base.coords(monoid.base.zero()))
        for a, c in table.items():
            blocks = [a[i * k:(i + 1) * k] for i in range(monoid.p)]
            for s in range(1, monoid.p):
                moved = tuple(x for b in galois_act(blocks, tuple((i + s) % monoid.p for i in range(monoid.p)))
                              for x in b)
                if table.get(moved, 0) != c:
                    raise PreconditionError(f"epsilon is not Gamma-invariant: orbit of {list(a)}")

    @classmethod
    def trivial(cls) -> "EpsilonData":
        return cls(1, ((1, ()),))

    def to_json(self) -> dict:
        return {"N": self.N, "terms": [{"coeff": exact_str(c), "exps": list(a)} for c, a in self.terms]}


def random_invariant_epsilon(monoid: TupleMonoid, N: int, rng: random.Random, n_orbits: int = 2) -> EpsilonData:
    """A random Gamma-invariant epsilon: fixed characters plus full orbits."""
    k = len(monoid.base.coords(monoid.base.zero()))
    p = monoid.p
    terms = []
    for _ in range(n_orbits):
        c = rng.randint(-3, 3)
        if rng.random() < 0.4:
            blk = tuple(rng.randrange(N) for _ in range(k))
            terms.append((c, blk * p))
        else:
            blocks = [tuple(rng.randrange(N) for _ in range(k)) for _ in range(p)]
            seen = set()
            for s in range(p):
                moved = galois_act(blocks, tuple((i + s) % p for i in range(p)))
                flat = tuple(x for b in moved for x in b)
                if flat not in seen:
                    seen.add(flat)
                    terms.append((c, flat))
    return EpsilonData(N, tuple(terms))


# ---------------------------------------------------------------------------
# Eisenstein coefficients (hermitian model)


@dataclass(frozen=True)
class DirichletChar:
    """Character mod ``q^e`` of Z built from a local unit character at q."""

    local: LocalMultChar

    @property
    def modulus(self) -> int:
        return self.local.p ** self.local.level

    def __call__(self, x: int) -> CycloNum:
        if x % self.local.p == 0:
            return CycloNum.from_rational(0)
        return self.local.unit_value(x)

    def __pow__(self, k: int) -> "DirichletChar":
        return DirichletChar(LocalMultChar(self.local.p, self.local.level,
                                           tuple(a * k for a in self.local.unit_exponents)))


def _legendre(a: int, l: int) -> int:
    a %= l
    if a == 0:
        return 0
    return 1 if pow(a, (l - 1) // 2, l) == 1 else -1


def _sqrt_mod(a: int, l: int, e: int) -> int:
    """A square root of a mod l^e (l odd, a a unit square) by Hensel lifting."""
    r = next(x for x in range(1, l) if (x * x - a) % l == 0)
    mod = l
    for _ in range(1, e):
        mod *= l
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    return r


def localize(h, monoid: HermitianPDMonoid, ell: int, prec: int) -> tuple:
    """``(LocalQuadData, HermitianMatrix)`` of the index at the place ell."""
    a, b, x, y = h
    delta = monoid.delta
    if ell == 2 or delta % ell == 0:
        raise UnsupportedCase(f"place {ell} is ramified or dyadic for delta={delta}")
    mod = ell**prec
    if _legendre(delta, ell) == 1:
        r = _sqrt_mod(delta % ell, ell, prec)
        data = LocalQuadData(ell, "split")
        return data, HermitianMatrix.split([[a, (x + y * r) % mod], [(x - y * r) % mod, b]])
    data = LocalQuadData(ell, "inert")
    # sqrt(delta) = c * sqrt(delta_local) with c^2 = delta / delta_local
    dl = int(data.delta)
    c = _sqrt_mod(delta * pow(dl, -1, mod) % mod, ell, prec)
    return data, HermitianMatrix.field([[a, x], [x, b]], [[0, (y * c) % mod], [-(y * c) % mod, 0]])


def _prime_factors(n: int) -> list:
    out, f = [], 2
    while f * f <= n:
        while n % f == 0:
            if f not in out:
                out.append(f)
            n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


@dataclass
class EisensteinDatum:
    """Toy global data for one coefficient family on the hermitian model.

    ``chi`` is a Dirichlet character; ``bad`` the finite set S of places
    excluded from the P-factor; ``g_table`` optionally overrides the local
    polynomials ``g_{beta, l}``.  ``p_part`` is an optional callable
    ``beta -> value`` for the factor at p.
    """

    n: int
    k: int
    chi: DirichletChar
    monoid: HermitianPDMonoid
    bad: frozenset = frozenset({2})
    g_table: dict | None = None
    p_part: Callable | None = None
    volume: Fraction = Fraction(1)
    degenerate: bool = False


def local_g(h, datum: EisensteinDatum, ell: int):
    from .local_series import g_zeta
    if datum.g_table is not None:
        try:
            return datum.g_table[(h, ell)]
        except KeyError:
            raise InputError(f"no g-polynomial supplied for {h} at {ell}") from None
    det = datum.monoid.det(h)
    prec = padic_val(det, ell) + 3
    data, beta = localize(h, datum.monoid, ell, prec)
    return g_zeta(beta, data)


def eis_coefficient(h, datum: EisensteinDatum) -> CycloNum:
    """``Q chi(det b) (p-part) P^(S)(chi)`` with ``Q = det(b)^(k-n) vol``.

    ``P^(S)(chi) = prod_{l | det b, l not in S} g_{b,l}(chi(l))``; places
    not dividing det b contribute ``g = 1``.  Singular indices get 0, or
    with ``datum.degenerate`` the stand-in ``content(b)^(k-1)`` (1 at b = 0).
    """
    M = datum.monoid
    det = M.det(h)
    if det == 0:
        if not datum.degenerate:
            return CycloNum.from_rational(0)
        m = gcd(*h)
        return CycloNum.from_rational(1 if m == 0 else m ** (datum.k - 1))
    Q = Fraction(det) ** (datum.k - datum.n) * datum.volume
    val = datum.chi(det) * Q
    if datum.p_part is not None:
        val = val * datum.p_part(h)
    for ell in _prime_factors(det):
        if ell in datum.bad or ell == datum.chi.local.p:
            continue
        g = local_g(h, datum, ell)
        val = val * g(datum.chi(ell))
    return val


def twist_by_class(values: dict, chi: DirichletChar, det_r: int, det_a: int) -> dict:
    """Multiply every value by ``chi(det r / det a)``."""
    m = chi.modulus
    if gcd(det_a, m) != 1:
        raise InputError("det(a) must be prime to the conductor")
    factor = chi(det_r * pow(det_a, -1, m) % m)
    return {h: v * factor for h, v in values.items()}


# ---------------------------------------------------------------------------
# building and checking the congruence


@dataclass
class CongruenceInstance:
    """Extension and base expansions ready for :func:`congruence_check`."""

    ext: QExpansion
    base: QExpansion
    trace: TraceMap
    p: int
    epsilon: EpsilonData
    meta: dict = field(default_factory=dict)


def build_instance(base_monoid: IndexMonoid, p: int, bound: int, c_ext: Callable, c_base: Callable,
                   psi: Callable, epsilon: EpsilonData) -> CongruenceInstance:
    """``c'(h') = eps'(h') prod c_ext(h_i) psi(h_i)``; base ``eps'(h0..h0) c_base(h0) psi(h0)^p``."""
    src = TupleMonoid(base_monoid, p)
    epsilon.validate(src, p)
    cache = {}

    def ce(x):
        if x not in cache:
            cache[x] = CycloNum.coerce(c_ext(x)) * psi(x)
        return cache[x]
    ext = {}
    for hp in src.elements(bound):
        v = epsilon.value(src.coords(hp))
        for x in hp:
            v = v * ce(x)
        if not (v == 0):
            ext[hp] = v
    base = {}
    for h0 in base_monoid.elements(bound // p):
        v = epsilon.value(src.coords((h0,) * p)) * CycloNum.coerce(c_base(h0)) * psi(h0) ** p
        if not (v == 0):
            base[h0] = v
    return CongruenceInstance(QExpansion(src, bound, ext), QExpansion(base_monoid, bound // p, base),
                              TraceMap(src), p, epsilon)


def _congruent(a, b, p: int) -> bool:
    a, b = CycloNum.coerce(a), CycloNum.coerce(b)
    d = a - b
    den = lcm_list([c.denominator for c in d.coeffs])
    if den % p == 0:
        raise PreconditionError("values are not p-integral")
    return all((c * den).numerator % p == 0 for c in d.coeffs)


def congruence_check(inst: CongruenceInstance, bound: int | None = None,
                     budget: Budget | None = None) -> dict:
    """``Res(E') == Frob_p(E) mod p`` coefficientwise up to the bound.

    The report carries the orbit ledger (every non-fixed Gamma-orbit sum
    must vanish mod p), the fixed-point matches, and the first mismatch.
    """
    bound = inst.ext.bound if bound is None else bound
    p = inst.p
    lhs = pullback_trace(inst.ext, inst.trace, bound, budget)
    rhs = frobenius_twist(inst.base, p)
    T = inst.trace.target
    witnesses, orbit_fail, fixed_ok = [], [], 0
    for h in T.elements(bound):
        for orb in lhs.provenance.get(h, []):
            if orb["size"] > 1 and not _congruent(orb["sum"], 0, p):
                orbit_fail.append({"index": _jsonable(h), "rep": _jsonable(orb["rep"])})
        r = rhs[h] if T.height(h) <= rhs.bound else 0
        if _congruent(lhs[h], r, p):
            if T.divide(h, p) is not None:
                fixed_ok += 1
        else:
            witnesses.append({"index": _jsonable(h), "lhs": exact_str(lhs[h]), "rhs": exact_str(r)})
    return {"pass": not witnesses and not orbit_fail, "p": p, "bound": bound,
            "checked": len(T.elements(bound)), "fixed_matches": fixed_ok,
            "orbit_failures": orbit_fail, "witnesses": witnesses,
            "first_witness": witnesses[0] if witnesses else None}


def free_instance(rng: random.Random, d: int = 1, p: int = 3, bound: int = 6, N: int = 4,
                  spread: int = 5) -> CongruenceInstance:
    """Random free-model instance with integer base data and a psi of order N."""
    base = FreeMonoid(d)
    table = {h: rng.randint(-spread, spread) for h in base.elements(bound)}
    lin = tuple(rng.randrange(N) for _ in range(d))

    def psi(h):
        return CycloNum.zeta(N, sum(a * x for a, x in zip(lin, h)))
    eps = random_invariant_epsilon(TupleMonoid(base, p), N, rng)
    inst = build_instance(base, p, bound, table.__getitem__, table.__getitem__, psi, eps)
    inst.meta = {"model": "free", "rank": d * p, "psi": list(lin), "N": N}
    return inst


def hermitian_instance(chi: DirichletChar, p: int = 3, bound: int = 4, k: int = 3, delta: int = -2,
                       epsilon: EpsilonData | None = None, psi_form: Sequence[int] | None = None,
                       N: int = 1, bad=frozenset({2})) -> CongruenceInstance:
    """Hermitian-pd model: extension coefficients are products of base ones.

    The base side uses ``chi^p`` and weight ``p(k-n)+n`` (so ``Q`` becomes
    ``Q^p``), which is what the fixed fibers reduce to mod p.  ``psi_form``
    is a linear form on ``(a, b, x, y)`` giving ``psi = zeta_N^form``.
    """
    n = 2
    M = HermitianPDMonoid(delta)
    ext_d = EisensteinDatum(n, k, chi, M, frozenset(bad), degenerate=True)
    base_d = EisensteinDatum(n, p * (k - n) + n, chi**p, M, frozenset(bad), degenerate=True)
    eps = epsilon or EpsilonData.trivial()
    form = tuple(psi_form or (0, 0, 0, 0))

    def psi(h):
        return CycloNum.zeta(N, sum(a * x for a, x in zip(form, h)))
    inst = build_instance(M, p, bound, lambda h: eis_coefficient(h, ext_d),
                          lambda h: eis_coefficient(h, base_d), psi, eps)
    inst.meta = {"model": "hermitian-pd", "delta": delta, "k": k, "chi": chi.local.to_json(),
                 "psi": list(form), "N": N}
    return inst


def hermitian_instances(count: int = 5, seed: int = 0, p: int = 3, bound: int = 4) -> list:
    """A reproducible batch of hermitian-pd instances with varied data."""
    rng = random.Random(seed)
    M = TupleMonoid(HermitianPDMonoid(-2), p)
    out = []
    for i in range(count):
        q = rng.choice([5, 7])
        chi = DirichletChar(LocalMultChar(q, 1, (rng.randrange(q - 1),)))
        N = rng.choice([1, 2, 4])
        eps = random_invariant_epsilon(M, N, rng) if N > 1 else EpsilonData.trivial()
        form = tuple(rng.randrange(N) for _ in range(4))
        out.append(hermitian_instance(chi, p, bound, k=rng.choice([3, 4]), epsilon=eps,
                                      psi_form=form, N=N))
    return out
