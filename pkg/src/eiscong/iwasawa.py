"""Finite-level group rings with a cyclic Gamma of order p.

A :class:`GammaGroupPair` is ``(G, G', A, V)``: ``A`` an integer matrix
acting on exponent vectors of ``G'`` with order exactly p, and ``V`` the
matrix of the transfer ``ver: G -> G'`` whose image must be A-fixed.

Group-ring elements are dense coefficient tuples mod ``p^m``, indexed in
the order of ``FinAbGroup.elements()``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .arith import CycloNum, exact_str, padic_val
from .characters import FinAbGroup
from .errors import InputError, PreconditionError


def _apply(M, g, orders):
    return tuple(sum(a * x for a, x in zip(row, g)) % d for row, d in zip(M, orders))


@dataclass
class GammaGroupPair:
    G: FinAbGroup
    Gp: FinAbGroup
    action: tuple
    ver: tuple
    p: int

    def __post_init__(self):
        self.action = tuple(tuple(int(a) for a in r) for r in self.action)
        self.ver = tuple(tuple(int(a) for a in r) for r in self.ver)
        k, kp = len(self.G.orders), len(self.Gp.orders)
        if len(self.action) != kp or any(len(r) != kp for r in self.action):
            raise InputError("action matrix must be square of size rank(G')")
        if len(self.ver) != kp or any(len(r) != k for r in self.ver):
            raise InputError("ver matrix must be rank(G') x rank(G)")
        # well-defined on the cyclic factors
        for j, d in enumerate(self.Gp.orders):
            e = tuple(d if i == j else 0 for i in range(kp))
            if any(_apply(self.action, e, self.Gp.orders)):
                raise InputError("action matrix is not well defined on G'")
        for j, d in enumerate(self.G.orders):
            e = tuple(d if i == j else 0 for i in range(k))
            if any(_apply(self.ver, e, self.Gp.orders)):
                raise InputError("ver matrix is not well defined on G")
        els = self.elements_p
        if all(self.gamma(y) == y for y in els):
            raise InputError("Gamma acts trivially")
        for y in els:
            z = y
            for _ in range(self.p):
                z = self.gamma(z)
            if z != y:
                raise InputError("Gamma action does not have order p")
        for g in self.elements:
            v = self.ver_elem(g)
            if self.gamma(v) != v:
                raise InputError(f"ver({list(g)}) is not Gamma-fixed")

    @cached_property
    def elements(self) -> list:
        return list(self.G.elements())

    @cached_property
    def elements_p(self) -> list:
        return list(self.Gp.elements())

    @cached_property
    def index_p(self) -> dict:
        return {y: i for i, y in enumerate(self.elements_p)}

    def gamma(self, y, s: int = 1):
        for _ in range(s % self.p):
            y = _apply(self.action, y, self.Gp.orders)
        return y

    def ver_elem(self, g):
        return _apply(self.ver, g, self.Gp.orders)

    @cached_property
    def gamma_perm(self) -> np.ndarray:
        """Index permutation: position of gamma(y) for each y."""
        return np.array([self.index_p[self.gamma(y)] for y in self.elements_p])

    @cached_property
    def ver_map(self) -> np.ndarray:
        return np.array([self.index_p[self.ver_elem(g)] for g in self.elements])

    @cached_property
    def orbits(self) -> list:
        """Gamma-orbits of G' as sorted index lists, in order of first element."""
        seen, out = set(), []
        for i, y in enumerate(self.elements_p):
            if i in seen:
                continue
            orb, z = [], y
            while True:
                orb.append(self.index_p[z])
                z = self.gamma(z)
                if z == y:
                    break
            seen.update(orb)
            out.append(sorted(orb))
        return out

    @cached_property
    def fixed(self) -> list:
        return [o[0] for o in self.orbits if len(o) == 1]

    def to_json(self) -> dict:
        return {"p": self.p, "G": list(self.G.orders), "Gp": list(self.Gp.orders),
                "action": [list(r) for r in self.action], "ver": [list(r) for r in self.ver]}

    @classmethod
    def from_json(cls, d) -> "GammaGroupPair":
        return cls(FinAbGroup(d["G"]), FinAbGroup(d["Gp"]), d["action"], d["ver"], d["p"])


def diagonal_model(p: int = 3, r: int = 1) -> GammaGroupPair:
    """``G = (Z/p)^r``, ``G' = G^p`` with cyclic shift and diagonal ver."""
    n = p * r
    A = [[0] * n for _ in range(n)]
    for blk in range(p):
        for i in range(r):
            A[((blk + 1) % p) * r + i][blk * r + i] = 1
    V = [[1 if i % r == j else 0 for j in range(r)] for i in range(n)]
    return GammaGroupPair(FinAbGroup([p] * r), FinAbGroup([p] * n), A, V, p)


def unipotent_model(p: int = 3) -> GammaGroupPair:
    """``G = Z/p``, ``G' = (Z/p)^2``, Gamma = [[1,1],[0,1]], ver(g) = (g, 0)."""
    return GammaGroupPair(FinAbGroup([p]), FinAbGroup([p, p]), [[1, 1], [0, 1]], [[1], [0]], p)


# ---------------------------------------------------------------------------
# group rings


@dataclass(frozen=True)
class GroupRingElem:
    pair: GammaGroupPair
    side: str            # "G" or "Gp"
    modulus: int
    coeffs: tuple

    def __post_init__(self):
        if self.side not in ("G", "Gp"):
            raise InputError("side must be 'G' or 'Gp'")
        n = len(self._els())
        if len(self.coeffs) != n:
            raise InputError(f"need {n} coefficients, got {len(self.coeffs)}")
        object.__setattr__(self, "coeffs", tuple(int(c) % self.modulus for c in self.coeffs))

    def _els(self):
        return self.pair.elements if self.side == "G" else self.pair.elements_p

    def _group(self):
        return self.pair.G if self.side == "G" else self.pair.Gp

    @classmethod
    def zero(cls, pair, side, modulus):
        n = len(pair.elements if side == "G" else pair.elements_p)
        return cls(pair, side, modulus, (0,) * n)

    @classmethod
    def basis(cls, pair, side, modulus, g):
        el = cls.zero(pair, side, modulus)
        idx = el._els().index(tuple(g))
        c = list(el.coeffs)
        c[idx] = 1
        return cls(pair, side, modulus, tuple(c))

    def _check(self, o):
        if o.side != self.side or o.modulus != self.modulus or o.pair is not self.pair:
            raise InputError("group-ring elements live in different rings")

    def __add__(self, o):
        self._check(o)
        return GroupRingElem(self.pair, self.side, self.modulus,
                             tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o):
        self._check(o)
        return GroupRingElem(self.pair, self.side, self.modulus,
                             tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def scale(self, c: int):
        return GroupRingElem(self.pair, self.side, self.modulus, tuple(a * c for a in self.coeffs))

    def __mul__(self, o):
        self._check(o)
        els, grp = self._els(), self._group()
        idx = {g: i for i, g in enumerate(els)}
        out = [0] * len(els)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        out[idx[grp.mul(els[i], els[j])]] += a * b
        return GroupRingElem(self.pair, self.side, self.modulus, tuple(out))

    def gamma(self, s: int = 1) -> "GroupRingElem":
        if self.side != "Gp":
            raise InputError("Gamma acts on the G' side")
        perm = self.pair.gamma_perm
        c = list(self.coeffs)
        for _ in range(s % self.pair.p):
            nxt = [0] * len(c)
            for i, a in enumerate(c):
                nxt[perm[i]] = a
            c = nxt
        return GroupRingElem(self.pair, self.side, self.modulus, tuple(c))

    def is_invariant(self) -> bool:
        return self.gamma() == self

    def reduce(self, modulus: int) -> "GroupRingElem":
        if self.modulus % modulus:
            raise InputError("can only reduce to a divisor of the modulus")
        return GroupRingElem(self.pair, self.side, modulus, self.coeffs)

    def to_json(self) -> dict:
        return {"side": self.side, "modulus": self.modulus, "coeffs": list(self.coeffs)}


def ver_apply(mu: GroupRingElem) -> GroupRingElem:
    """Linear extension of ver: ``e_g -> e_{ver(g)}``."""
    if mu.side != "G":
        raise InputError("ver_apply takes an element over G")
    out = [0] * len(mu.pair.elements_p)
    for i, a in enumerate(mu.coeffs):
        out[mu.pair.ver_map[i]] += a
    res = GroupRingElem(mu.pair, "Gp", mu.modulus, tuple(out))
    assert res.is_invariant()
    return res


# ---------------------------------------------------------------------------
# linear algebra over Z/p^k


@dataclass
class LocalSmith:
    """``U A V = diag(p^v_i)`` over ``Z/p^k``; ``v_i = k`` marks a zero pivot."""

    p: int
    k: int
    U: np.ndarray
    V: np.ndarray
    vals: list


def local_smith(A, p: int, k: int) -> LocalSmith:
    mod = p**k
    A = np.array(A, dtype=object) % mod
    m, n = A.shape
    U = np.eye(m, dtype=object)
    V = np.eye(n, dtype=object)
    vals = []
    for r in range(min(m, n)):
        best = None
        for i in range(r, m):
            for j in range(r, n):
                if A[i, j] % mod:
                    v = padic_val(int(A[i, j]), p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        A[[r, i]] = A[[i, r]]
        U[[r, i]] = U[[i, r]]
        A[:, [r, j]] = A[:, [j, r]]
        V[:, [r, j]] = V[:, [j, r]]
        unit = int(A[r, r]) // p**v
        inv = pow(unit, -1, mod)
        A[r] = (A[r] * inv) % mod
        U[r] = (U[r] * inv) % mod
        for i2 in range(m):
            if i2 != r and A[i2, r] % mod:
                f = (int(A[i2, r]) // p**v) % mod
                A[i2] = (A[i2] - f * A[r]) % mod
                U[i2] = (U[i2] - f * U[r]) % mod
        for j2 in range(r + 1, n):
            if A[r, j2] % mod:
                f = (int(A[r, j2]) // p**v) % mod
                A[:, j2] = (A[:, j2] - f * A[:, r]) % mod
                V[:, j2] = (V[:, j2] - f * V[:, r]) % mod
        vals.append(v)
    vals += [k] * (m - len(vals))
    return LocalSmith(p, k, U % mod, V % mod, vals)


def solve_local(S: LocalSmith, b, ncols: int):
    """Solve ``A x = b`` mod ``p^k`` given the decomposition of A.

    Returns ``(x, None)`` or ``(None, lam)`` with ``lam A = 0`` and
    ``lam b != 0`` mod ``p^k``.
    """
    p, k = S.p, S.k
    mod = p**k
    c = S.U.dot(np.array(b, dtype=object)) % mod
    y = [0] * ncols
    for i, v in enumerate(S.vals):
        ci = int(c[i])
        if v >= k:
            if ci % mod:
                return None, [int(a) for a in S.U[i] % mod]
            continue
        if ci % p**v:
            lam = (S.U[i] * p ** (k - v)) % mod
            return None, [int(a) for a in lam]
        if i < ncols:
            y[i] = (ci // p**v) % mod
    x = S.V.dot(np.array(y, dtype=object)) % mod
    return [int(a) for a in x], None


_SMITH_CACHE: dict = {}


def _trace_matrix(pair: GammaGroupPair) -> np.ndarray:
    n = len(pair.elements_p)
    T = np.zeros((n, n), dtype=object)
    for j in range(n):
        i = j
        for _ in range(pair.p):
            T[i, j] += 1
            i = pair.gamma_perm[i]
    return T


def trace_ideal_test(x: GroupRingElem, j: int = 1) -> dict:
    """Is ``x`` in ``T + p^j R``?  Columns are traces of basis vectors.

    Returns ``{"member", "witness" | "functional"}``; a witness ``alpha``
    satisfies ``sum_gamma alpha^gamma = x`` mod ``p^j``.
    """
    pair = x.pair
    if x.side != "Gp":
        raise InputError("trace ideal lives on the G' side")
    if not x.is_invariant():
        raise PreconditionError("x is not Gamma-invariant")
    p = pair.p
    if x.modulus % p**j:
        raise InputError(f"modulus {x.modulus} is not divisible by p^{j}")
    key = (id(pair), j)
    if key not in _SMITH_CACHE:
        T = _trace_matrix(pair)
        _SMITH_CACHE[key] = (pair, T, local_smith(T, p, j))
    _, T, S = _SMITH_CACHE[key]
    sol, lam = solve_local(S, [c % p**j for c in x.coeffs], T.shape[1])
    if sol is not None:
        assert all(int(a) % p**j == b % p**j for a, b in zip(T.dot(np.array(sol, dtype=object)), x.coeffs))
        return {"member": True, "witness": sol, "functional": None}
    return {"member": False, "witness": None, "functional": lam}


def fixed_point_criterion(x: GroupRingElem) -> bool:
    """The j = 1 shortcut: coefficients at Gamma-fixed elements vanish mod p."""
    return all(x.coeffs[i] % x.pair.p == 0 for i in x.pair.fixed)


# ---------------------------------------------------------------------------
# epsilon criterion


def epsilon_criterion(mu: GroupRingElem, mup: GroupRingElem) -> dict:
    """Orbit-indicator form of the criterion, mod p.

    For each Gamma-orbit O of G': ``sum_{ver(x) in O} mu(x) == sum_{y in O} mu'(y)``.
    """
    if mu.side != "G" or mup.side != "Gp":
        raise InputError("need mu over G and mu' over G'")
    if not mup.is_invariant():
        raise PreconditionError("mu' is not Gamma-invariant")
    pair, p = mu.pair, mu.pair.p
    vm = pair.ver_map
    ledger, ok = [], True
    for orb in pair.orbits:
        s_orb = set(orb)
        left = sum(a for i, a in enumerate(mu.coeffs) if vm[i] in s_orb)
        right = sum(mup.coeffs[i] for i in orb)
        good = (left - right) % p == 0
        ok &= good
        ledger.append({"orbit": [list(pair.elements_p[i]) for i in orb],
                       "base_sum": left % p, "ext_sum": right % p, "ok": good})
    return {"pass": ok, "ledger": ledger}


def _invariant_from_orbit_values(pair, values, modulus):
    c = [0] * len(pair.elements_p)
    for orb, v in zip(pair.orbits, values):
        for i in orb:
            c[i] = v
    return GroupRingElem(pair, "Gp", modulus, tuple(c))


def rw_equivalence(pair: GammaGroupPair, exhaustive_support: int | None = 2,
                   n_random: int = 0, seed: int = 0) -> dict:
    """Compare epsilon_criterion with trace membership of ``ver(mu) - mu'`` mod p.

    Exhaustive part: every mu over G with at most ``exhaustive_support``
    nonzero coefficients, against every invariant mu' nonzero on at most
    that many Gamma-orbits.  Random part: uniform pairs, half of them
    forced onto the criterion's solution set.
    """
    p = pair.p
    discrepancies, tested, agree_true = [], 0, 0

    def check(mu, mup):
        nonlocal tested, agree_true
        a = epsilon_criterion(mu, mup)["pass"]
        b = trace_ideal_test(ver_apply(mu) - mup, 1)["member"]
        tested += 1
        if a != b:
            discrepancies.append({"mu": list(mu.coeffs), "mu_prime": list(mup.coeffs), "criterion": a,
                                  "membership": b})
        elif a:
            agree_true += 1

    if exhaustive_support is not None:
        mus = list(_sparse_vectors(len(pair.elements), exhaustive_support, p))
        mups = list(_sparse_vectors(len(pair.orbits), exhaustive_support, p))
        for cm in mus:
            mu = GroupRingElem(pair, "G", p, cm)
            for co in mups:
                check(mu, _invariant_from_orbit_values(pair, co, p))
    rng = random.Random(seed)
    for t in range(n_random):
        mu = GroupRingElem(pair, "G", p, tuple(rng.randrange(p) for _ in pair.elements))
        if t % 2:
            base = ver_apply(mu)
            vals = [rng.randrange(p) if len(o) > 1 else base.coeffs[o[0]] for o in pair.orbits]
        else:
            vals = [rng.randrange(p) for _ in pair.orbits]
        check(mu, _invariant_from_orbit_values(pair, vals, p))
    return {"pass": not discrepancies, "tested": tested, "both_true": agree_true,
            "discrepancies": discrepancies[:10], "n_discrepancies": len(discrepancies)}


def _sparse_vectors(n: int, support: int, p: int):
    for s in range(support + 1):
        for pos in itertools.combinations(range(n), s):
            for vals in itertools.product(range(1, p), repeat=s):
                v = [0] * n
                for i, a in zip(pos, vals):
                    v[i] = a
                yield tuple(v)


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class AdmissibleData:
    """Finite-precision cyclotomic character: images of the cyclic generators mod p^M."""

    group: FinAbGroup
    images: tuple
    p: int
    M: int

    def __post_init__(self):
        mod = self.p**self.M
        if len(self.images) != len(self.group.orders):
            raise InputError("one image per cyclic generator")
        if any(x % self.p == 0 for x in self.images):
            raise InputError("images must be units mod p^M")
        object.__setattr__(self, "images", tuple(int(x) % mod for x in self.images))

    def __call__(self, g) -> int:
        mod = self.p**self.M
        out = 1
        for x, e in zip(self.images, g):
            out = out * pow(x, e, mod) % mod
        return out

    @property
    def consistent(self) -> bool:
        """Whether the generator images respect the cyclic orders."""
        mod = self.p**self.M
        return all(pow(x, d, mod) == 1 for x, d in zip(self.images, self.group.orders))


def subgroup(group: FinAbGroup, gens) -> list:
    out = {tuple(0 for _ in group.orders)}
    frontier = list(out)
    gens = [tuple(g) for g in gens]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                z = group.mul(h, g)
                if z not in out:
                    out.add(z)
                    nxt.append(z)
        frontier = nxt
    return sorted(out)


def admissible_m(U_gens, data: AdmissibleData) -> dict:
    """``m(U) = min_{u in U} v_p(N(u) - 1)``, capped at the precision M."""
    p, M = data.p, data.M
    m, witness = M, None
    for u in subgroup(data.group, U_gens):
        val = data(u)
        if (val - 1) % p:
            raise PreconditionError(f"not admissible: N({list(u)}) = {val} is not 1 mod p")
        v = M if val == 1 else padic_val(val - 1, p)
        if v < m:
            m, witness = v, list(u)
    return {"m": m, "saturated": m >= M, "witness": witness, "consistent": data.consistent}


def lemma_check(U_gens, data: AdmissibleData, V_gens, data_p: AdmissibleData) -> dict:
    """``m(U) >= m'(V) - 1`` on a supplied pair of subgroups."""
    a = admissible_m(U_gens, data)
    b = admissible_m(V_gens, data_p)
    return {"m_base": a["m"], "m_ext": b["m"], "holds": a["m"] >= b["m"] - 1}


# ---------------------------------------------------------------------------
# delta functions


def delta_decompose(group: FinAbGroup, x) -> list:
    """``delta_x = sum_j c_j chi_j`` with ``c_j = chi_j(x)^(-1) / |G|``."""
    x = tuple(x)
    n = group.size
    out = []
    for chi in group.characters():
        out.append((chi(x).inverse() * Fraction(1, n), chi))
    for g in group.elements():
        s = CycloNum.from_rational(0)
        for c, chi in out:
            s = s + c * chi(g)
        assert s == (1 if tuple(g) == x else 0)
    return out


def delta_to_json(terms) -> list:
    return [{"chi": list(chi.exps), "coeff": exact_str(c)} for c, chi in terms]
