"""Exact arithmetic kernel.

Rationals are :class:`fractions.Fraction`.  On top of that this module
provides cyclotomic numbers reduced modulo the cyclotomic polynomial,
residues modulo prime powers, dense polynomials, truncated power series,
rational functions with unit constant denominator, and Laurent series in
a formal variable ``X``.  Nothing here ever touches a float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Sequence, Union

from sympy import cyclotomic_poly, isprime, totient
from sympy.abc import x as _x

Rat = Fraction
Scalar = Union[int, Fraction]


class ArithError(ArithmeticError):
    """Raised for malformed arithmetic requests (bad prime, non-unit divisor)."""


class _Infinity:
    """Valuation of zero.  Compares greater than every integer."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("padic-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__


INF = _Infinity()


def as_rat(x) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, CycloNum):
        return x.to_rational()
    raise TypeError(f"cannot read {x!r} as a rational")


def rat_str(x) -> str:
    """Canonical exact string ``"n"`` or ``"n/d"``."""
    x = as_rat(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def require_prime(p: int) -> None:
    if not isinstance(p, int) or isinstance(p, bool) or p < 2 or not isprime(p):
        raise ArithError(f"{p!r} is not a prime")


def _int_val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_val(x, p: int):
    """p-adic valuation of a rational number.

    Returns :data:`INF` for zero.

    Examples
    ========

    >>> padic_val(Fraction(9, 4), 3)
    2
    >>> padic_val(Fraction(8, 3), 2)
    3
    >>> padic_val(0, 7)
    INF
    """
    require_prime(p)
    x = as_rat(x)
    if x == 0:
        return INF
    return _int_val(x.numerator, p) - _int_val(x.denominator, p)


def unit_part(x, p: int) -> Fraction:
    """``x / p^v(x)`` for nonzero x."""
    x = as_rat(x)
    v = padic_val(x, p)
    if v is INF:
        raise ArithError("zero has no unit part")
    return x / Fraction(p) ** v


def rat_mod(x, p: int, m: int) -> int:
    """Image of a p-integral rational in ``Z/p^m``."""
    x = as_rat(x)
    if x.denominator % p == 0:
        raise ArithError(f"{x} is not {p}-integral")
    mod = p**m
    return (x.numerator * pow(x.denominator, -1, mod)) % mod


def frac_part_p(x, p: int) -> Fraction:
    """The p-adic fractional part ``{x}_p`` in ``[0, 1)`` with p-power denominator."""
    x = as_rat(x)
    v = padic_val(x, p)
    if v is INF or v >= 0:
        return Fraction(0)
    k = -v
    num = rat_mod(x * p**k, p, k)
    return Fraction(num, p**k)


# ---------------------------------------------------------------------------
# Smith normal form

def smith_normal_form(M: Sequence[Sequence[int]]) -> tuple:
    """Elementary divisors of an integer matrix.

    Row and column unimodular elimination; returns the nonzero invariant
    factors ``e_1 | e_2 | ...`` as nonnegative integers.  A zero matrix
    gives ``()``.

    Examples
    ========

    >>> smith_normal_form([[2, 4], [6, 8]])
    (2, 4)
    >>> smith_normal_form([[0, 0], [0, 0]])
    ()
    """
    A = [[int(as_rat(v)) if as_rat(v).denominator == 1 else _bad_entry(v) for v in row] for row in M]
    if not A or not A[0]:
        return ()
    nr, nc = len(A), len(A[0])
    divisors = []
    t = 0
    while t < min(nr, nc):
        # pick the nonzero entry of least absolute value in the remaining block
        piv = None
        for i in range(t, nr):
            for j in range(t, nc):
                if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            changed = False
            a = A[t][t]
            for i in range(t + 1, nr):
                q = A[i][t] // a
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                if A[i][t]:
                    changed = True
            for j in range(t + 1, nc):
                q = A[t][j] // a
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                if A[t][j]:
                    changed = True
            if changed:
                # move the smallest leftover in row/column t onto the pivot
                best = (t, t)
                for i in range(t + 1, nr):
                    if A[i][t] and abs(A[i][t]) < abs(A[best[0]][best[1]]):
                        best = (i, t)
                for j in range(t + 1, nc):
                    if A[t][j] and abs(A[t][j]) < abs(A[best[0]][best[1]]):
                        best = (t, j)
                bi, bj = best
                if bi != t:
                    A[t], A[bi] = A[bi], A[t]
                if bj != t:
                    for row in A:
                        row[t], row[bj] = row[bj], row[t]
                continue
            # pivot must divide the rest of the block
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if A[i][j] % a:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            A[t] = [x + y for x, y in zip(A[t], A[bad])]
        divisors.append(abs(A[t][t]))
        t += 1
    return tuple(divisors)


def _bad_entry(v):
    raise ArithError(f"smith_normal_form needs integer entries, got {v!r}")


def rational_elementary_divisors(M: Sequence[Sequence]) -> tuple:
    """Elementary divisors of a rational matrix, as Fractions.

    Clears a common denominator ``d``, runs the integer SNF and divides back.
    """
    rows = [[as_rat(v) for v in row] for row in M]
    d = 1
    for row in rows:
        for v in row:
            d = d * v.denominator // gcd(d, v.denominator)
    ints = [[int(v * d) for v in row] for row in rows]
    return tuple(Fraction(e, d) for e in smith_normal_form(ints))


# ---------------------------------------------------------------------------
# Rational polynomial helpers (coefficient lists, lowest degree first)

def _trim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _pdivmod(a: list, b: list):
    a = list(a)
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = Fraction(b[-1])
    while len(_trim(a)) >= len(b):
        k = len(a) - len(b)
        c = a[-1] / lead
        q[k] = c
        for i, bc in enumerate(b):
            a[k + i] -= c * bc
        a.pop()
    return _trim(q), a


def _pmul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _psub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def _pinverse_mod(a: list, m: list) -> list:
    """Inverse of ``a`` modulo ``m`` in Q[x] by the extended Euclidean algorithm."""
    r0, r1 = [Fraction(c) for c in m], _trim([Fraction(c) for c in a])
    s0, s1 = [], [Fraction(1)]
    while r1 and len(r1) > 1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, _trim(r)
        s0, s1 = s1, _psub(s0, _pmul(q, s1))
    if not r1:
        raise ZeroDivisionError("element is not invertible")
    c = r1[0]
    return [v / c for v in s1]


# ---------------------------------------------------------------------------
# Cyclotomic numbers

@lru_cache(maxsize=None)
def cyclotomic_coeffs(N: int) -> tuple:
    """Coefficients of the N-th cyclotomic polynomial, lowest degree first."""
    if N < 1:
        raise ArithError("cyclotomic order must be positive")
    poly = cyclotomic_poly(N, _x, polys=True)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


@lru_cache(maxsize=None)
def _power_table(N: int) -> tuple:
    """Reduced coefficient vector of zeta_N^k for k in [0, N)."""
    phi = cyclotomic_coeffs(N)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(N):
        rows.append(tuple(cur))
        # multiply by zeta: shift and reduce x^d = -sum phi_i x^i
        top = cur[-1]
        nxt = [0] + cur[:-1]
        if top:
            nxt = [c - top * phi[i] for i, c in enumerate(nxt)]
        cur = nxt
    return tuple(rows)


def _reduce_dense(N: int, dense: list) -> tuple:
    table = _power_table(N)
    d = len(table[0])
    out = [0] * d
    for k, c in enumerate(dense):
        if c == 0:
            continue
        row = table[k % N]
        for i, r in enumerate(row):
            if r:
                out[i] += c * r
    return tuple(Fraction(v) for v in out)


def _mobius(n: int) -> int:
    res, m, f = 1, n, 2
    while f * f <= m:
        if m % f == 0:
            m //= f
            if m % f == 0:
                return 0
            res = -res
        f += 1
    if m > 1:
        res = -res
    return res


class CycloNum:
    """Element of Q(zeta_N) in the power basis modulo Phi_N.

    Elements of different orders interoperate by lifting to the lcm of the
    orders.  Equality with ints and Fractions is exact.

    >>> z = CycloNum.zeta(3)
    >>> z**3 == 1
    True
    >>> 1 + z + z**2 == 0
    True
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable):
        coeffs = tuple(as_rat(c) for c in coeffs)
        d = len(cyclotomic_coeffs(order)) - 1
        if len(coeffs) != d:
            raise ArithError(f"order {order} needs {d} coefficients, got {len(coeffs)}")
        self.order = order
        self.coeffs = coeffs

    # constructors -------------------------------------------------------
    @classmethod
    def from_rational(cls, r, order: int = 1) -> "CycloNum":
        d = len(cyclotomic_coeffs(order)) - 1
        return cls(order, (as_rat(r),) + (Fraction(0),) * (d - 1))

    @classmethod
    def zeta(cls, N: int, k: int = 1) -> "CycloNum":
        return cls(N, _power_table(N)[k % N])

    @classmethod
    def from_power_counts(cls, N: int, counts: Sequence) -> "CycloNum":
        """``sum_k counts[k] * zeta_N^k``; the fast path for character sums."""
        return cls(N, _reduce_dense(N, list(counts)))

    @classmethod
    def coerce(cls, v) -> "CycloNum":
        if isinstance(v, CycloNum):
            return v
        return cls.from_rational(v)

    # structure ----------------------------------------------------------
    def lift(self, M: int) -> "CycloNum":
        if M == self.order:
            return self
        if M % self.order:
            raise ArithError(f"cannot lift order {self.order} to {M}")
        step = M // self.order
        dense = [0] * M
        for i, c in enumerate(self.coeffs):
            dense[(i * step) % M] += c
        return CycloNum(M, _reduce_dense(M, dense))

    def _common(self, other):
        other = CycloNum.coerce(other)
        if other.order == self.order:
            return self, other
        M = self.order * other.order // gcd(self.order, other.order)
        return self.lift(M), other.lift(M)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ArithError(f"{self!r} is not rational")
        return self.coeffs[0]

    def is_integral(self) -> bool:
        """All power-basis coordinates are integers (Z[zeta_N] membership)."""
        return all(c.denominator == 1 for c in self.coeffs)

    def congruent(self, other, p: int) -> bool:
        """Congruence modulo p in Z[zeta_N]; both sides must be integral."""
        a, b = self._common(other)
        diff = a - b
        if not diff.is_integral():
            raise ArithError("congruence needs integral cyclotomic numbers")
        return all(c.numerator % p == 0 for c in diff.coeffs)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return CycloNum(a.order, (x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.order, (-c for c in self.coeffs))

    def __sub__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return CycloNum(a.order, (x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return CycloNum(self.order, (c * other for c in self.coeffs))
        if not isinstance(other, CycloNum):
            return NotImplemented
        a, b = self._common(other)
        dense = _pmul(list(a.coeffs), list(b.coeffs))
        return CycloNum(a.order, _reduce_dense(a.order, dense))

    __rmul__ = __mul__

    def inverse(self) -> "CycloNum":
        if all(c == 0 for c in self.coeffs):
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return CycloNum.from_rational(1 / self.coeffs[0], self.order)
        inv = _pinverse_mod(list(self.coeffs), list(cyclotomic_coeffs(self.order)))
        d = len(self.coeffs)
        inv = (inv + [Fraction(0)] * d)[:d]
        return CycloNum(self.order, inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return CycloNum(self.order, (c / other for c in self.coeffs))
        if not isinstance(other, CycloNum):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CycloNum.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CycloNum.from_rational(1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "CycloNum":
        """Complex conjugation zeta -> zeta^{-1}."""
        N = self.order
        dense = [0] * N
        for i, c in enumerate(self.coeffs):
            dense[(-i) % N] += c
        return CycloNum(N, _reduce_dense(N, dense))

    def galois(self, a: int) -> "CycloNum":
        """The automorphism zeta -> zeta^a for a prime to the order."""
        N = self.order
        if gcd(a, N) != 1:
            raise ArithError(f"{a} is not prime to {N}")
        dense = [0] * N
        for i, c in enumerate(self.coeffs):
            dense[(i * a) % N] += c
        return CycloNum(N, _reduce_dense(N, dense))

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, bool):
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycloNum):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        # trace divided by the degree does not depend on the ambient order
        if self.is_rational():
            return hash(self.coeffs[0])
        N = self.order
        t = Fraction(0)
        for i, c in enumerate(self.coeffs):
            if c:
                m = N // gcd(N, i)
                t += c * Fraction(_mobius(m), int(totient(m)))
        return hash(t)

    def __repr__(self) -> str:
        return f"CycloNum({self.order}, [{', '.join(rat_str(c) for c in self.coeffs)}])"

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": [rat_str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "CycloNum":
        if isinstance(obj, (int, str)):
            return cls.from_rational(as_rat(obj))
        return cls(int(obj["order"]), [as_rat(c) for c in obj["coeffs"]])


def exact_str(v) -> str:
    """Exact printable form for rationals and cyclotomic numbers."""
    if isinstance(v, CycloNum):
        if v.is_rational():
            return rat_str(v.coeffs[0])
        terms = []
        for i, c in enumerate(v.coeffs):
            if c:
                terms.append(f"{rat_str(c)}*z{v.order}^{i}" if i else rat_str(c))
        return " + ".join(terms)
    if isinstance(v, ResidueInt):
        return f"{v.value} mod {v.modulus}"
    return rat_str(v)


# ---------------------------------------------------------------------------
# Residues modulo p^m

@dataclass(frozen=True)
class ResidueInt:
    modulus: int
    value: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ArithError("modulus must be positive")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _other(self, o):
        if isinstance(o, ResidueInt):
            if o.modulus != self.modulus:
                raise ArithError(f"moduli differ: {self.modulus} vs {o.modulus}")
            return o.value
        if isinstance(o, int) and not isinstance(o, bool):
            return o
        if isinstance(o, Fraction):
            return rat_mod(o, _base_prime(self.modulus), _exponent(self.modulus))
        raise TypeError(o)

    def __add__(self, o):
        return ResidueInt(self.modulus, self.value + self._other(o))

    __radd__ = __add__

    def __sub__(self, o):
        return ResidueInt(self.modulus, self.value - self._other(o))

    def __rsub__(self, o):
        return ResidueInt(self.modulus, self._other(o) - self.value)

    def __mul__(self, o):
        return ResidueInt(self.modulus, self.value * self._other(o))

    __rmul__ = __mul__

    def __neg__(self):
        return ResidueInt(self.modulus, -self.value)

    def __pow__(self, k: int):
        return ResidueInt(self.modulus, pow(self.value, k, self.modulus))

    def __eq__(self, o):
        if isinstance(o, ResidueInt):
            return self.modulus == o.modulus and self.value == o.value
        if isinstance(o, int) and not isinstance(o, bool):
            return (self.value - o) % self.modulus == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.modulus, self.value))

    def is_unit(self) -> bool:
        return gcd(self.value, self.modulus) == 1

    def inverse(self) -> "ResidueInt":
        if not self.is_unit():
            raise ArithError(f"{self.value} is not a unit mod {self.modulus}")
        return ResidueInt(self.modulus, pow(self.value, -1, self.modulus))


def _base_prime(m: int) -> int:
    f = 2
    while m % f:
        f += 1
    return f


def _exponent(m: int) -> int:
    return _int_val(m, _base_prime(m))


# ---------------------------------------------------------------------------
# Polynomials, truncated series, rational functions

def _is_zero(c) -> bool:
    return c == 0


class Poly:
    """Dense polynomial; coefficients lowest degree first, any exact ring."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = list(coeffs)
        while c and _is_zero(c[-1]):
            c.pop()
        self.coeffs = tuple(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, o):
        o = o if isinstance(o, Poly) else Poly([o])
        n = max(len(self.coeffs), len(o.coeffs))
        return Poly(self[i] + o[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, o):
        return self + (-(o if isinstance(o, Poly) else Poly([o])))

    def __mul__(self, o):
        if not isinstance(o, Poly):
            return Poly(c * o for c in self.coeffs)
        return Poly(_pmul(list(self.coeffs), list(o.coeffs)))

    __rmul__ = __mul__

    def __eq__(self, o):
        if not isinstance(o, Poly):
            o = Poly([o])
        n = max(len(self.coeffs), len(o.coeffs))
        return all(self[i] == o[i] for i in range(n))

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly([{', '.join(exact_str(c) for c in self.coeffs)}])"

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc


class TruncSeries:
    """Power series known modulo ``t^(depth+1)``.

    >>> a = TruncSeries([1, -1], 3)
    >>> b = TruncSeries([1, -3], 3)
    >>> series_divide(a, b).coeffs
    (1, 2, 6, 18)
    """

    __slots__ = ("coeffs", "depth")

    def __init__(self, coeffs: Iterable, depth: int):
        if depth < 0:
            raise ArithError("depth must be nonnegative")
        c = list(coeffs)[: depth + 1]
        c += [0] * (depth + 1 - len(c))
        self.coeffs = tuple(c)
        self.depth = depth

    def _check(self, o):
        if not isinstance(o, TruncSeries):
            o = TruncSeries([o], self.depth)
        if o.depth != self.depth:
            raise ArithError(f"depth mismatch {self.depth} vs {o.depth}")
        return o

    def __add__(self, o):
        o = self._check(o)
        return TruncSeries((a + b for a, b in zip(self.coeffs, o.coeffs)), self.depth)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries((-c for c in self.coeffs), self.depth)

    def __sub__(self, o):
        return self + (-self._check(o))

    def __mul__(self, o):
        if not isinstance(o, TruncSeries):
            if isinstance(o, Poly):
                o = TruncSeries(o.coeffs, self.depth)
            else:
                return TruncSeries((c * o for c in self.coeffs), self.depth)
        o = self._check(o)
        D = self.depth
        out = [0] * (D + 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j in range(D + 1 - i):
                out[i + j] += a * o.coeffs[j]
        return TruncSeries(out, D)

    __rmul__ = __mul__

    def __eq__(self, o):
        if isinstance(o, Poly):
            o = TruncSeries(o.coeffs, self.depth)
        if not isinstance(o, TruncSeries):
            return NotImplemented
        return self.depth == o.depth and all(a == b for a, b in zip(self.coeffs, o.coeffs))

    def __hash__(self):
        return hash((self.coeffs, self.depth))

    def __repr__(self):
        return f"TruncSeries([{', '.join(exact_str(c) for c in self.coeffs)}], depth={self.depth})"

    def to_poly(self) -> Poly:
        return Poly(self.coeffs)


def _unit_inverse(c):
    if isinstance(c, ResidueInt):
        if not c.is_unit():
            raise ArithError(f"constant term {c} is not a unit")
        return c.inverse()
    if isinstance(c, CycloNum):
        if c == 0:
            raise ArithError("constant term is zero")
        return c.inverse()
    if c == 0:
        raise ArithError("constant term is zero")
    return Fraction(1) / as_rat(c)


def series_divide(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """Quotient ``c`` with ``b*c == a`` modulo ``t^(D+1)``.

    The divisor must have an invertible constant term.  Integer inputs
    keep integer outputs when the constant term is +-1.
    """
    if a.depth != b.depth:
        raise ArithError(f"depth mismatch {a.depth} vs {b.depth}")
    inv0 = _unit_inverse(b.coeffs[0])
    if isinstance(inv0, Fraction) and inv0.denominator == 1:
        inv0 = int(inv0)
    out = []
    for k in range(a.depth + 1):
        s = a.coeffs[k]
        for j in range(k):
            s = s - out[j] * b.coeffs[k - j]
        v = s * inv0
        if isinstance(v, Fraction) and v.denominator == 1:
            v = int(v)
        out.append(v)
    return TruncSeries(out, a.depth)


class RatFunc:
    """``num/den`` with ``den(0) == 1`` after normalization."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly(num if isinstance(num, (list, tuple)) else [num])
        den = Poly([1]) if den is None else (den if isinstance(den, Poly) else Poly(den))
        if not den.coeffs:
            raise ZeroDivisionError("zero denominator")
        c0 = den[0]
        inv = _unit_inverse(c0)
        if not (c0 == 1):
            num = num * inv
            den = den * inv
        self.num = num
        self.den = den

    def __mul__(self, o):
        if isinstance(o, RatFunc):
            return RatFunc(self.num * o.num, self.den * o.den)
        return RatFunc(self.num * o, self.den)

    __rmul__ = __mul__

    def __eq__(self, o):
        if not isinstance(o, RatFunc):
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash("ratfunc")

    def __repr__(self):
        return f"RatFunc({self.num!r} / {self.den!r})"


def ratfunc_taylor(f: RatFunc, D: int) -> TruncSeries:
    """Taylor expansion of a rational function modulo ``t^(D+1)``.

    >>> ratfunc_taylor(RatFunc(Poly([1]), Poly([1, -3])), 2).coeffs
    (1, 3, 9)
    """
    return series_divide(TruncSeries(f.num.coeffs, D), TruncSeries(f.den.coeffs, D))


# ---------------------------------------------------------------------------
# Laurent series in X = p^{-s}

class LaurentSeries:
    """``sum_k c_k X^k`` known for all ``k <= top``; finitely many negative terms."""

    __slots__ = ("terms", "top")

    def __init__(self, terms: dict, top: int):
        self.top = top
        self.terms = {k: v for k, v in terms.items() if k <= top and not (v == 0)}

    @classmethod
    def monomial(cls, c, k: int, top: int) -> "LaurentSeries":
        return cls({k: c}, top)

    def coeff(self, k: int):
        if k > self.top:
            raise ArithError(f"degree {k} beyond known range {self.top}")
        return self.terms.get(k, 0)

    def __add__(self, o):
        top = min(self.top, o.top)
        keys = set(self.terms) | set(o.terms)
        return LaurentSeries({k: self.terms.get(k, 0) + o.terms.get(k, 0) for k in keys}, top)

    def __sub__(self, o):
        return self + o.scale(-1)

    def scale(self, c) -> "LaurentSeries":
        return LaurentSeries({k: v * c for k, v in self.terms.items()}, self.top)

    def shift(self, m: int) -> "LaurentSeries":
        """Multiply by X^m."""
        return LaurentSeries({k + m: v for k, v in self.terms.items()}, self.top + m)

    def substitute_scale(self, c) -> "LaurentSeries":
        """X -> c*X."""
        return LaurentSeries({k: v * (Fraction(c) ** k) for k, v in self.terms.items()}, self.top)

    def low(self) -> int:
        return min(self.terms) if self.terms else self.top

    def __mul__(self, o):
        if not isinstance(o, LaurentSeries):
            return self.scale(o)
        lo_a, lo_b = self.low(), o.low()
        top = min(self.top + lo_b, o.top + lo_a)
        out: dict = {}
        for i, a in self.terms.items():
            for j, b in o.terms.items():
                if i + j <= top:
                    out[i + j] = out.get(i + j, 0) + a * b
        return LaurentSeries(out, top)

    def truncate(self, top: int) -> "LaurentSeries":
        if top > self.top:
            raise ArithError("cannot extend a truncated series")
        return LaurentSeries(self.terms, top)

    def equal_to(self, o, top: int) -> bool:
        keys = {k for k in set(self.terms) | set(o.terms) if k <= top}
        return all(_same(self.terms.get(k, 0), o.terms.get(k, 0)) for k in keys)

    def __eq__(self, o):
        if not isinstance(o, LaurentSeries):
            return NotImplemented
        return self.top == o.top and self.equal_to(o, self.top)

    def __hash__(self):
        return hash(self.top)

    def __repr__(self):
        body = ", ".join(f"{k}: {exact_str(v)}" for k, v in sorted(self.terms.items()))
        return f"LaurentSeries({{{body}}}, top={self.top})"

    def to_json(self) -> dict:
        return {str(k): exact_str(v) for k, v in sorted(self.terms.items())}


def _same(a, b) -> bool:
    if isinstance(a, CycloNum):
        return a == b
    if isinstance(b, CycloNum):
        return b == a
    return a == b


def laurent_of_ratfunc(f: RatFunc, shift: int, top: int) -> LaurentSeries:
    """Expand ``X^shift * f(X)`` up to degree ``top``."""
    D = top - shift
    if D < 0:
        return LaurentSeries({}, top)
    s = ratfunc_taylor(f, D)
    return LaurentSeries({shift + i: c for i, c in enumerate(s.coeffs)}, top)


def lcm_list(ns: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), ns, 1)
