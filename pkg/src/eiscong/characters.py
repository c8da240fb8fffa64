"""Finite-order characters: finite abelian groups and characters of Q_p^x.

Values live in :class:`CycloNum`.  The archimedean-looking factor ``|x|^s``
is never evaluated; it is the formal monomial ``X^v(x)`` with ``X = p^-s``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import gcd

from .arith import (CycloNum, LaurentSeries, Poly, RatFunc, as_rat, lcm_list,
                    laurent_of_ratfunc, padic_val, require_prime, unit_part)
from .errors import InputError

# ---------------------------------------------------------------------------
# finite abelian groups


class FinAbGroup:
    """``Z/d_1 x ... x Z/d_k``; elements are exponent tuples."""

    def __init__(self, orders):
        orders = tuple(int(d) for d in orders)
        if any(d <= 0 for d in orders):
            raise InputError("cyclic orders must be positive")
        self.orders = orders

    @property
    def size(self) -> int:
        s = 1
        for d in self.orders:
            s *= d
        return s

    @property
    def exponent(self) -> int:
        return lcm_list(self.orders)

    def elements(self):
        return product(*(range(d) for d in self.orders))

    def mul(self, g, h) -> tuple:
        return tuple((a + b) % d for a, b, d in zip(g, h, self.orders))

    def characters(self):
        return [Character(self, e) for e in self.elements()]

    def __eq__(self, o):
        return isinstance(o, FinAbGroup) and o.orders == self.orders

    def __hash__(self):
        return hash(self.orders)

    def __repr__(self):
        return f"FinAbGroup({list(self.orders)})"


class Character:
    """Character ``g -> prod_i zeta_{d_i}^(a_i g_i)`` of a :class:`FinAbGroup`."""

    def __init__(self, group: FinAbGroup, exps):
        exps = tuple(int(a) % d for a, d in zip(exps, group.orders))
        if len(exps) != len(group.orders):
            raise InputError("exponent vector has the wrong length")
        self.group = group
        self.exps = exps

    def exponent_of(self, g) -> int:
        """k with chi(g) = zeta_N^k, N the group exponent."""
        N = self.group.exponent
        return sum(a * x * (N // d) for a, x, d in zip(self.exps, g, self.group.orders)) % N

    def __call__(self, g) -> CycloNum:
        return CycloNum.zeta(self.group.exponent, self.exponent_of(g))

    def __mul__(self, o: "Character") -> "Character":
        if o.group != self.group:
            raise InputError("characters of different groups")
        return Character(self.group, [a + b for a, b in zip(self.exps, o.exps)])

    def inverse(self) -> "Character":
        return Character(self.group, [-a for a in self.exps])

    def is_trivial(self) -> bool:
        return not any(self.exps)

    def __eq__(self, o):
        return isinstance(o, Character) and o.group == self.group and o.exps == self.exps

    def __hash__(self):
        return hash((self.group, self.exps))

    def __repr__(self):
        return f"Character({self.group!r}, {list(self.exps)})"


def inner_product(chi: Character, psi: Character) -> CycloNum:
    """``sum_g chi(g) * conj(psi(g))``."""
    G = chi.group
    N = G.exponent
    counts = [0] * N
    for g in G.elements():
        counts[(chi.exponent_of(g) - psi.exponent_of(g)) % N] += 1
    return CycloNum.from_power_counts(N, counts)


def orthogonality_holds(G: FinAbGroup) -> bool:
    chars = G.characters()
    for chi in chars:
        for psi in chars:
            want = G.size if chi == psi else 0
            if inner_product(chi, psi) != want:
                return False
    return True


# ---------------------------------------------------------------------------
# (Z/p^t)^x as a product of cyclic groups


@lru_cache(maxsize=None)
def unit_group(p: int, t: int) -> tuple:
    """``(orders, generators)`` for ``(Z/p^t)^x``."""
    if t <= 0:
        return (), ()
    if p == 2:
        if t == 1:
            return (), ()
        if t == 2:
            return (2,), (3,)
        return (2, 2 ** (t - 2)), (2**t - 1, 5)
    P = p**t
    order = (p - 1) * p ** (t - 1)
    for g in range(2, P):
        if g % p == 0:
            continue
        # a primitive root mod p^2 generates every (Z/p^t)^x
        if _mult_order(g % (p * p), p * p) == (p - 1) * p and _mult_order(g, p) == p - 1:
            return (order,), (g,)
    raise InputError(f"no primitive root mod {p}^{t}")


def _mult_order(g: int, m: int) -> int:
    k, x = 1, g % m
    while x != 1:
        x = x * g % m
        k += 1
    return k


@lru_cache(maxsize=None)
def discrete_log_table(p: int, t: int) -> dict:
    """Map unit residues mod p^t to exponent tuples over :func:`unit_group`."""
    orders, gens = unit_group(p, t)
    P = p**t
    table = {}
    for e in product(*(range(d) for d in orders)):
        u = 1
        for g, a in zip(gens, e):
            u = u * pow(g, a, P) % P
        table[u] = e
    if P > 1 and len(table) != (p - 1) * p ** (t - 1):
        raise InputError(f"generator data for (Z/{p}^{t})^x is wrong")
    return table


@dataclass(frozen=True)
class LocalMultChar:
    """Finite-order character of Q_p^x trivial on ``1 + p^level Z_p``.

    ``unit_exponents`` index a character of ``(Z/p^level)^x`` in the cyclic
    decomposition of :func:`unit_group`; ``value_at_p = (m, k)`` means
    ``chi(p) = zeta_m^k``.

    >>> chi = LocalMultChar(3, 1, (1,))
    >>> chi.conductor, chi.unit_value(2)
    (1, CycloNum(1, [-1]))
    """

    p: int
    level: int
    unit_exponents: tuple = ()
    value_at_p: tuple = (1, 0)

    def __post_init__(self):
        require_prime(self.p)
        if self.level < 0:
            raise InputError("level must be nonnegative")
        orders, _ = unit_group(self.p, self.level)
        ue = tuple(self.unit_exponents) or (0,) * len(orders)
        if len(ue) != len(orders):
            raise InputError(f"(Z/{self.p}^{self.level})^x needs {len(orders)} exponents")
        object.__setattr__(self, "unit_exponents", tuple(int(a) % d for a, d in zip(ue, orders)))
        m, k = self.value_at_p
        if m <= 0:
            raise InputError("value_at_p order must be positive")
        object.__setattr__(self, "value_at_p", (int(m), int(k) % int(m)))

    @classmethod
    def trivial(cls, p: int) -> "LocalMultChar":
        return cls(p, 0)

    @classmethod
    def unramified(cls, p: int, m: int, k: int) -> "LocalMultChar":
        return cls(p, 0, (), (m, k))

    @property
    def unit_character(self) -> Character:
        return Character(FinAbGroup(unit_group(self.p, self.level)[0]), self.unit_exponents)

    @property
    def chi_p(self) -> CycloNum:
        return CycloNum.zeta(*self.value_at_p)

    def unit_value(self, u) -> CycloNum:
        """chi on a unit, given mod p^level (or as a p-adic unit rational)."""
        if self.level == 0:
            return CycloNum.from_rational(1)
        P = self.p**self.level
        u = as_rat(u)
        if padic_val(u, self.p) != 0:
            raise InputError(f"{u} is not a p-adic unit")
        r = u.numerator * pow(u.denominator, -1, P) % P
        return self.unit_character(discrete_log_table(self.p, self.level)[r])

    def char_value(self, x) -> tuple:
        """``(chi(x), a)`` with ``a = v_p(x)``; ``|x|^s`` is ``X^a``."""
        x = as_rat(x)
        if x == 0:
            raise InputError("characters of Q_p^x are not defined at 0")
        a = padic_val(x, self.p)
        return self.chi_p ** a * self.unit_value(unit_part(x, self.p)), a

    @cached_property
    def conductor(self) -> int:
        """Least c with chi trivial on ``1 + p^c Z_p`` (c = 0: unramified)."""
        p, t = self.p, self.level
        if all(a == 0 for a in self.unit_exponents):
            return 0
        P = p**t
        for c in range(1, t + 1):
            step = p**c
            if all(self.unit_value(u) == 1 for u in range(1, P, step)):
                return c
        return t

    @property
    def ramified(self) -> bool:
        return self.conductor > 0

    def order(self) -> int:
        N = self.unit_character.group.exponent
        vals = [N // gcd(N, a * (N // d)) if a else 1
                for a, d in zip(self.unit_exponents, self.unit_character.group.orders)]
        m, k = self.value_at_p
        return lcm_list(vals + [m // gcd(m, k)])

    def at_level(self, t: int) -> "LocalMultChar":
        """The same character described at level ``t >= conductor``."""
        if t < self.conductor:
            raise InputError(f"level {t} is below the conductor {self.conductor}")
        if t == self.level:
            return self
        orders, gens = unit_group(self.p, t)
        G = FinAbGroup(orders)
        N = G.exponent
        exps = []
        for g, d in zip(gens, orders):
            k = _log_zeta(self.unit_value(g), N)
            exps.append(k * d // N)
        return LocalMultChar(self.p, t, tuple(exps), self.value_at_p)

    def __mul__(self, o: "LocalMultChar") -> "LocalMultChar":
        if o.p != self.p:
            raise InputError("characters at different primes")
        t = max(self.level, o.level)
        a, b = self.at_level(t), o.at_level(t)
        m = lcm_list([a.value_at_p[0], b.value_at_p[0]])
        k = a.value_at_p[1] * (m // a.value_at_p[0]) + b.value_at_p[1] * (m // b.value_at_p[0])
        return LocalMultChar(self.p, t, tuple(x + y for x, y in zip(a.unit_exponents, b.unit_exponents)), (m, k))

    def inverse(self) -> "LocalMultChar":
        m, k = self.value_at_p
        return LocalMultChar(self.p, self.level, tuple(-a for a in self.unit_exponents), (m, -k))

    def __pow__(self, e: int) -> "LocalMultChar":
        if e < 0:
            return self.inverse() ** (-e)
        out = LocalMultChar.trivial(self.p)
        for _ in range(e):
            out = out * self
        return out

    def same_as(self, o: "LocalMultChar") -> bool:
        """Equality as characters, independent of the chosen level."""
        if o.p != self.p or self.chi_p != o.chi_p:
            return False
        t = max(self.level, o.level)
        P = self.p**t
        return all(self.unit_value(u) == o.unit_value(u) for u in range(1, P) if u % self.p)

    def to_json(self) -> dict:
        m, k = self.value_at_p
        return {"p": self.p, "level": self.level, "unit_exponents": list(self.unit_exponents),
                "value_at_p": {"order": m, "power": k}}

    @classmethod
    def from_json(cls, obj) -> "LocalMultChar":
        if isinstance(obj, str):
            obj = json.loads(obj)
        vp = obj.get("value_at_p", {"order": 1, "power": 0})
        return cls(int(obj["p"]), int(obj.get("level", 0)), tuple(obj.get("unit_exponents", ())),
                   (int(vp["order"]), int(vp["power"])))


def _log_zeta(v: CycloNum, N: int) -> int:
    for k in range(N):
        if v == CycloNum.zeta(N, k):
            return k
    raise InputError(f"{v!r} is not an N-th root of unity for N={N}")


def all_characters(p: int, level: int, value_orders=(1,)) -> list:
    """Every character of level ``level`` with ``chi(p)`` of the given orders."""
    orders, _ = unit_group(p, level)
    out = []
    for e in product(*(range(d) for d in orders)):
        for m in value_orders:
            for k in range(m):
                if gcd(k, m) == 1 or m == 1:
                    out.append(LocalMultChar(p, level, e, (m, k)))
    return out


# ---------------------------------------------------------------------------
# Gauss sums and local factors

def raw_gauss_sum(chi: LocalMultChar) -> CycloNum:
    """Classical ``sum_{u mod p^c} chi(u) e(u/p^c)`` at the conductor c."""
    c = chi.conductor
    if c == 0:
        return CycloNum.from_rational(1)
    chi = chi.at_level(c)
    P = chi.p**c
    char = chi.unit_character
    N = char.group.exponent
    M = lcm_list([N, P])
    counts = [0] * M
    for r, e in discrete_log_table(chi.p, c).items():
        counts[(char.exponent_of(e) * (M // N) + r * (M // P)) % M] += 1
    return CycloNum.from_power_counts(M, counts)


def gauss_sum(chi: LocalMultChar, measure: str = "additive") -> CycloNum:
    """``tau(chi) = int_{units} chi(x/c) psi(x/c) dx`` with ``c = p^c(chi)``.

    ``measure="additive"`` uses the Haar measure with ``vol(Z_p) = 1`` (this is
    the normalization under which the Tate functional equation is exact);
    ``"multiplicative"`` uses ``vol(Z_p^x) = 1``; ``"raw"`` is the plain
    classical sum.  Unramified characters give 1.

    >>> chi = LocalMultChar(3, 1, (1,))
    >>> gauss_sum(chi, "raw") == CycloNum.zeta(3) - CycloNum.zeta(3, 2)
    True
    """
    c = chi.conductor
    if c == 0:
        return CycloNum.from_rational(1)
    G = raw_gauss_sum(chi)
    if measure == "raw":
        return G
    twist = chi.chi_p ** (-c)
    P = chi.p**c
    if measure == "additive":
        return twist * G * Fraction(1, P)
    if measure == "multiplicative":
        return twist * G * Fraction(1, P - P // chi.p)
    raise InputError(f"unknown measure {measure!r}")


def local_L_factor(chi: LocalMultChar) -> RatFunc:
    """``1/(1 - chi(p) X)`` when unramified, else 1."""
    if chi.ramified:
        return RatFunc(Poly([1]))
    return RatFunc(Poly([1]), Poly([1, -chi.chi_p]))


@dataclass(frozen=True)
class Monomial:
    """``coeff * X^exp``."""

    coeff: CycloNum
    exp: int

    def __mul__(self, o: "Monomial") -> "Monomial":
        return Monomial(self.coeff * o.coeff, self.exp + o.exp)

    def to_json(self) -> dict:
        from .arith import exact_str
        return {"coeff": exact_str(self.coeff), "exp": self.exp}


def epsilon_factor(chi: LocalMultChar, measure: str = "additive") -> Monomial:
    """``e(s, chi) = |c|^s tau(chi)^-1 = tau(chi)^-1 X^c(chi)``."""
    if not chi.ramified:
        return Monomial(CycloNum.from_rational(1), 0)
    return Monomial(gauss_sum(chi, measure).inverse(), chi.conductor)


@dataclass(frozen=True)
class ShiftedRatFunc:
    """``X^shift * f(X)``, a Laurent rational function with a pole-free f(0)."""

    f: RatFunc
    shift: int

    def expand(self, top: int) -> LaurentSeries:
        return laurent_of_ratfunc(self.f, self.shift, top)

    def __mul__(self, o: "ShiftedRatFunc") -> "ShiftedRatFunc":
        return ShiftedRatFunc(self.f * o.f, self.shift + o.shift)


def tate_E_factor(chi: LocalMultChar, measure: str = "additive") -> ShiftedRatFunc:
    """``E(s, chi) = L(s, chi) / (e(s, chi) L(1-s, chi^-1))``.

    Unramified: ``(1 - chi(p)^-1 p^-1 X^-1)/(1 - chi(p) X)``, stored as
    ``X^-1 (X - chi(p)^-1/p)/(1 - chi(p) X)``.  Ramified: ``tau(chi) X^-c``.
    """
    if chi.ramified:
        return ShiftedRatFunc(RatFunc(Poly([gauss_sum(chi, measure)])), -chi.conductor)
    a = chi.chi_p
    num = Poly([-(a.inverse() * Fraction(1, chi.p)), 1])
    return ShiftedRatFunc(RatFunc(num, Poly([1, -a])), -1)


def L_dual_factor(chi: LocalMultChar) -> ShiftedRatFunc:
    """``L(1-s, chi^-1)`` in X: substitute ``X -> p^-1 X^-1``.

    ``1/(1 - a/(pX)) = X / (X - a/p)``; with ``f(0) != 0`` this is
    ``X (-p/a) / (1 - pX/a)``.
    """
    if chi.ramified:
        return ShiftedRatFunc(RatFunc(Poly([1])), 0)
    a = chi.inverse().chi_p
    c = -(Fraction(chi.p) * a.inverse())
    return ShiftedRatFunc(RatFunc(Poly([c]), Poly([1, c])), 1)


def functional_equation_holds(chi: LocalMultChar, top: int = 6) -> bool:
    """Check ``E * e * L(1-s, chi^-1) == L(s, chi)`` to X-degree ``top``."""
    E = tate_E_factor(chi)
    eps = epsilon_factor(chi)
    lhs = (E * ShiftedRatFunc(RatFunc(Poly([eps.coeff])), eps.exp) * L_dual_factor(chi))
    rhs = ShiftedRatFunc(local_L_factor(chi), 0)
    return lhs.expand(top).equal_to(rhs.expand(top), top)
