"""Hermitian matrices over a local quadratic etale algebra.

The base field is Q_p.  The algebra K is either split (K = F x F) or a
quadratic field extension ``F(sqrt(delta))``.  A split hermitian matrix is
stored through its first component ``y`` (the pair is ``(y, y^t)``); a field
case matrix is a pair ``(a, b)`` meaning ``a + b*sqrt(delta)`` with ``a``
symmetric and ``b`` alternating.

Integrality in the field case is measured in the basis ``{1, w}`` of the
maximal order, where ``w = sqrt(delta)`` for odd p and ``w = (1+sqrt(5))/2``
for the unramified extension of Q_2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

from .arith import (INF, ArithError, as_rat, padic_val, rat_mod, rat_str,
                    rational_elementary_divisors, require_prime)
from .errors import (Budget, InputError, PreconditionError, ResourceError,
                     UnsupportedCase, default_budget)

LABELS = ("split", "inert", "ramified")


def _nonresidue(p: int) -> int:
    for a in range(2, p):
        if pow(a, (p - 1) // 2, p) == p - 1:
            return a
    raise ArithError(f"no quadratic non-residue mod {p}")


@dataclass(frozen=True)
class LocalQuadData:
    """Local data ``(p, label, q)`` with the fixed square class ``delta``.

    >>> LocalQuadData(3, "inert").tau(1)
    -1
    """

    p: int
    label: str
    q: int = 0
    delta: Fraction = field(default=Fraction(0), compare=False)

    def __post_init__(self):
        require_prime(self.p)
        if self.label not in LABELS:
            raise InputError(f"label must be one of {LABELS}, got {self.label!r}")
        if self.q == 0:
            object.__setattr__(self, "q", self.p)
        if self.delta == 0:
            object.__setattr__(self, "delta", Fraction(self._default_delta()))

    def _default_delta(self) -> int:
        if self.label == "split":
            return 1
        if self.label == "inert":
            return 5 if self.p == 2 else _nonresidue(self.p)
        return -1 if self.p == 2 else self.p

    @property
    def field_case(self) -> bool:
        return self.label != "split"

    def tau(self, i: int) -> int:
        if i % 2 == 0 or self.label == "split":
            return 1
        return -1 if self.label == "inert" else 0

    @property
    def omega(self) -> tuple:
        """``(t, nrm)`` with ``w^2 = t*w - nrm`` for the order basis ``{1, w}``."""
        if self.p == 2 and self.label == "inert":
            d = self.delta
            return (Fraction(1), (1 - d) / 4)
        return (Fraction(0), -self.delta)

    def to_json(self) -> dict:
        return {"p": self.p, "label": self.label, "q": self.q}

    @classmethod
    def from_json(cls, obj) -> "LocalQuadData":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["p"]), str(obj["label"]), int(obj.get("q", 0) or 0))


def _mat(rows) -> tuple:
    return tuple(tuple(as_rat(v) for v in row) for row in rows)


def _zeros(n: int) -> tuple:
    return tuple((Fraction(0),) * n for _ in range(n))


def _transpose(m):
    return tuple(zip(*m)) if m else ()


class HermitianMatrix:
    """Hermitian n x n matrix, split or field case."""

    __slots__ = ("n", "field_case", "y", "a", "b")

    def __init__(self, n: int, *, y=None, a=None, b=None):
        self.n = n
        if y is not None:
            self.field_case = False
            self.y = _mat(y)
            self.a = self.b = None
            if len(self.y) != n or any(len(r) != n for r in self.y):
                raise InputError("matrix is not n x n")
        else:
            self.field_case = True
            self.y = None
            self.a = _mat(a) if a is not None else _zeros(n)
            self.b = _mat(b) if b is not None else _zeros(n)
            for m in (self.a, self.b):
                if len(m) != n or any(len(r) != n for r in m):
                    raise InputError("matrix is not n x n")
            if self.a != _transpose(self.a):
                raise InputError("field-case hermitian matrix needs a symmetric real part")
            if any(self.b[i][j] != -self.b[j][i] for i in range(n) for j in range(n)):
                raise InputError("field-case hermitian matrix needs an alternating sqrt(delta) part")

    @classmethod
    def split(cls, y) -> "HermitianMatrix":
        y = _mat(y)
        return cls(len(y), y=y)

    @classmethod
    def field(cls, a, b=None) -> "HermitianMatrix":
        a = _mat(a)
        return cls(len(a), a=a, b=b)

    @classmethod
    def scalar(cls, c, n: int, field_case: bool = False) -> "HermitianMatrix":
        m = tuple(tuple(as_rat(c) if i == j else Fraction(0) for j in range(n)) for i in range(n))
        return cls.field(m) if field_case else cls.split(m)

    @classmethod
    def diag(cls, entries: Sequence, field_case: bool = False) -> "HermitianMatrix":
        n = len(entries)
        m = tuple(tuple(as_rat(entries[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n))
        return cls.field(m) if field_case else cls.split(m)

    def _key(self):
        return (self.n, self.field_case, self.y, self.a, self.b)

    def __eq__(self, other):
        return isinstance(other, HermitianMatrix) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.field_case:
            return f"HermitianMatrix.field({_fmt(self.a)}, {_fmt(self.b)})"
        return f"HermitianMatrix.split({_fmt(self.y)})"

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        if self.field_case != other.field_case or self.n != other.n:
            raise InputError("shape or kind mismatch")
        if self.field_case:
            return HermitianMatrix(self.n, a=_madd(self.a, other.a), b=_madd(self.b, other.b))
        return HermitianMatrix(self.n, y=_madd(self.y, other.y))

    def scale(self, c) -> "HermitianMatrix":
        c = as_rat(c)
        if self.field_case:
            return HermitianMatrix(self.n, a=_mscale(self.a, c), b=_mscale(self.b, c))
        return HermitianMatrix(self.n, y=_mscale(self.y, c))

    def entries(self):
        """All rational coordinates."""
        if self.field_case:
            return [v for m in (self.a, self.b) for r in m for v in r]
        return [v for r in self.y for v in r]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.entries())

    def to_json(self) -> dict:
        if self.field_case:
            return {"n": self.n, "kind": "field",
                    "a": [[rat_str(v) for v in r] for r in self.a],
                    "b": [[rat_str(v) for v in r] for r in self.b]}
        return {"n": self.n, "kind": "split", "y": [[rat_str(v) for v in r] for r in self.y]}

    @classmethod
    def from_json(cls, obj) -> "HermitianMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if isinstance(obj, list):
            return cls.split(obj)
        kind = obj.get("kind", "split")
        if kind == "split":
            return cls.split(obj["y"])
        return cls.field(obj["a"], obj.get("b"))


def _fmt(m) -> str:
    return "[" + ", ".join("[" + ", ".join(rat_str(v) for v in r) + "]" for r in m) + "]"


def _madd(x, y):
    return tuple(tuple(u + v for u, v in zip(r, s)) for r, s in zip(x, y))


def _mscale(x, c):
    return tuple(tuple(u * c for u in r) for r in x)


def _check_kind(M: HermitianMatrix, data: LocalQuadData) -> None:
    if M.field_case != data.field_case:
        raise InputError(f"matrix kind does not match label {data.label!r}")


# ---------------------------------------------------------------------------
# order coordinates in the field case

def order_coords(a, b, data: LocalQuadData) -> tuple:
    """Coordinates ``(c0, c1)`` of ``a + b*sqrt(delta)`` in the basis ``{1, w}``."""
    a, b = as_rat(a), as_rat(b)
    if data.p == 2 and data.label == "inert":
        # sqrt(delta) = 2w - 1
        return (a - b, 2 * b)
    return (a, b)


def from_order_coords(c0, c1, data: LocalQuadData) -> tuple:
    c0, c1 = as_rat(c0), as_rat(c1)
    if data.p == 2 and data.label == "inert":
        return (c0 + c1 / 2, c1 / 2)
    return (c0, c1)


def _field_entry(M: HermitianMatrix, i: int, j: int) -> tuple:
    return M.a[i][j], M.b[i][j]


def _vmin(vals, p):
    return min((padic_val(v, p) for v in vals), default=INF)


# ---------------------------------------------------------------------------
# lattice membership

def trace_pairing_weights(M: HermitianMatrix, data: LocalQuadData) -> list:
    """Values ``tr(s*M)`` over the standard Z_p-basis ``s`` of S(r)."""
    _check_kind(M, data)
    n = M.n
    if not M.field_case:
        return [M.y[j][i] for i in range(n) for j in range(n)]
    t, nrm = data.omega
    out = [M.a[i][i] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            u0, u1 = order_coords(*_field_entry(M, i, j), data)
            out.append(2 * u0 + t * u1)
            out.append(t * u0 + 2 * nrm * u1)
    return out


def in_lattice(M: HermitianMatrix, spec, data: LocalQuadData) -> bool:
    """Membership in ``S(r)``, its trace dual ``T``, or ``p^-e S(r)``.

    ``spec`` is ``"S_of_r"``, ``"T_dual"`` or ``("scaled", e)``.

    >>> d = LocalQuadData(3, "split")
    >>> in_lattice(HermitianMatrix.scalar(Fraction(1, 3), 1), "T_dual", d)
    False
    """
    _check_kind(M, data)
    p = data.p
    if spec == "T_dual":
        return all(padic_val(w, p) >= 0 for w in trace_pairing_weights(M, data))
    if spec == "S_of_r":
        shift = 0
    elif isinstance(spec, (tuple, list)) and len(spec) == 2 and spec[0] == "scaled":
        shift = int(spec[1])
    else:
        raise InputError(f"unknown lattice spec {spec!r}")
    scaled = M.scale(Fraction(p) ** shift)
    if not scaled.field_case:
        return all(padic_val(v, p) >= 0 for v in scaled.entries())
    n = M.n
    for i in range(n):
        for j in range(n):
            for c in order_coords(*_field_entry(scaled, i, j), data):
                if padic_val(c, p) < 0:
                    return False
    return True


# ---------------------------------------------------------------------------
# denominator ideals

def rational_realization(M: HermitianMatrix, data: LocalQuadData) -> list:
    """Matrix of ``M`` over Z_p: ``y`` itself, or the 2n x 2n action on ``{1, w}``."""
    _check_kind(M, data)
    if not M.field_case:
        return [list(r) for r in M.y]
    n = M.n
    t, nrm = data.omega
    R = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            c0, c1 = order_coords(*_field_entry(M, i, j), data)
            # x*1 = c0 + c1 w ; x*w = -nrm*c1 + (c0 + t*c1) w
            R[2 * i][2 * j] = c0
            R[2 * i + 1][2 * j] = c1
            R[2 * i][2 * j + 1] = -nrm * c1
            R[2 * i + 1][2 * j + 1] = c0 + t * c1
    return R


def elementary_exponents(M: HermitianMatrix, data: LocalQuadData) -> list:
    """p-adic valuations of the elementary divisors (INF padded to size)."""
    R = rational_realization(M, data)
    divs = rational_elementary_divisors(R)
    vals = [padic_val(e, data.p) for e in divs]
    vals += [INF] * (len(R) - len(vals))
    return vals


def denominator_exponent(M: HermitianMatrix, data: LocalQuadData) -> int:
    """Exponent e with ``nu_0(M) = (p^e)``.

    >>> d = LocalQuadData(3, "split")
    >>> denominator_exponent(HermitianMatrix.diag([Fraction(1, 3), Fraction(1, 9)]), d)
    3
    """
    total = sum(max(0, -v) for v in elementary_exponents(M, data) if v is not INF)
    if M.field_case:
        if total % 2:
            raise ArithError("odd denominator count in the field realization")
        total //= 2
    return total


def k_of_sigma(sigma: HermitianMatrix, data: LocalQuadData) -> int:
    """Exponent k with ``nu[sigma] = q^k``.  The ramified case is refused."""
    if data.label == "ramified":
        raise UnsupportedCase("k(sigma) is not defined here for ramified quadratic data")
    return denominator_exponent(sigma, data)


def matrix_rank(M: HermitianMatrix, data: LocalQuadData) -> int:
    R = rational_realization(M, data)
    r = len(rational_elementary_divisors(R))
    return r // 2 if M.field_case else r


# ---------------------------------------------------------------------------
# coset enumeration

def coset_count_estimate(data: LocalQuadData, n: int, D: int) -> int:
    return data.p ** (n * n * D)


def check_enumeration_budget(data: LocalQuadData, n: int, D: int, budget: Budget | None = None) -> None:
    budget = budget or default_budget()
    est = coset_count_estimate(data, n, D)
    if n > budget.max_n or D > budget.max_depth or data.p > budget.max_p or est > budget.max_cosets:
        raise ResourceError(f"coset enumeration n={n}, D={D}, p={data.p} exceeds budget", est)


def _vals_np(arr: np.ndarray, p: int, cap: int) -> np.ndarray:
    """Elementwise p-adic valuation capped at ``cap`` (zero maps to ``cap``)."""
    v = np.zeros(arr.shape, dtype=np.int64)
    mod = 1
    for _ in range(cap):
        mod *= p
        v += (arr % mod == 0)
    return v


@lru_cache(maxsize=32)
def coset_table(data: LocalQuadData, n: int, D: int) -> tuple:
    """All cosets of ``p^-D S(r) / S(r)`` as integer parameter rows with k values.

    Parameter layout: split case ``y_ij`` row-major; field case the
    diagonal entries then ``(c0, c1)`` per upper off-diagonal entry.  The
    coset is ``params / p^D``.  Returns ``(params, k)`` as numpy arrays.
    """
    if data.label == "ramified":
        raise UnsupportedCase("k(sigma) is not defined here for ramified quadratic data")
    if n not in (1, 2):
        raise ResourceError("vectorized enumeration supports n <= 2", coset_count_estimate(data, n, D))
    p = data.p
    P = p**D
    m = n * n
    grids = np.indices((P,) * m).reshape(m, -1).T.astype(np.int64) if m else np.zeros((1, 0), np.int64)
    if D == 0:
        return grids, np.zeros(len(grids), dtype=np.int64)
    if n == 1:
        v = _vals_np(grids[:, 0], p, D)
        k = D - v
        return grids, k
    cap = 2 * D + 1
    if not data.field_case:
        y11, y12, y21, y22 = grids.T
        vmin = np.minimum(np.minimum(_vals_np(y11, p, D), _vals_np(y12, p, D)),
                          np.minimum(_vals_np(y21, p, D), _vals_np(y22, p, D)))
        det = y11 * y22 - y12 * y21
    else:
        x1, x2, c0, c1 = grids.T
        t, nrm = data.omega
        tt, nn = int(t), int(nrm)
        vmin = np.minimum(np.minimum(_vals_np(x1, p, D), _vals_np(x2, p, D)),
                          np.minimum(_vals_np(c0, p, D), _vals_np(c1, p, D)))
        det = x1 * x2 - (c0 * c0 + tt * c0 * c1 + nn * c1 * c1)
    vdet = _vals_np(det, p, cap)
    k = np.maximum(0, D - vmin) + np.maximum(0, D + vmin - vdet)
    return grids, k


def params_to_matrix(row, data: LocalQuadData, n: int, D: int) -> HermitianMatrix:
    scale = Fraction(1, data.p**D)
    vals = [Fraction(int(v)) * scale for v in row]
    if not data.field_case:
        return HermitianMatrix.split([vals[i * n:(i + 1) * n] for i in range(n)])
    a = [[Fraction(0)] * n for _ in range(n)]
    b = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = vals[i]
    pos = n
    for i in range(n):
        for j in range(i + 1, n):
            ea, eb = from_order_coords(vals[pos], vals[pos + 1], data)
            a[i][j] = a[j][i] = ea
            b[i][j], b[j][i] = eb, -eb
            pos += 2
    return HermitianMatrix.field(a, b)


def enumerate_cosets(data: LocalQuadData, n: int, D: int, budget: Budget | None = None) -> list:
    """One representative per coset of ``p^-D S(r)/S(r)`` with ``k <= D``.

    >>> reps = enumerate_cosets(LocalQuadData(3, "split"), 1, 1)
    >>> sorted(m.y[0][0] for m in reps)
    [Fraction(0, 1), Fraction(1, 3), Fraction(2, 3)]
    """
    if D < 0:
        raise InputError("depth must be nonnegative")
    check_enumeration_budget(data, n, D, budget)
    params, k = coset_table(data, n, D)
    keep = np.nonzero(k <= D)[0]
    return [params_to_matrix(params[i], data, n, D) for i in keep]


def pairing_weights_mod(zeta: HermitianMatrix, data: LocalQuadData, D: int) -> np.ndarray:
    """Integer weights w with ``tr(zeta*sigma) = (w . params)/p^D`` modulo Z_p.

    Requires ``zeta`` in the dual lattice T.
    """
    ws = trace_pairing_weights(zeta, data)
    if any(padic_val(w, data.p) < 0 for w in ws):
        raise PreconditionError("zeta is not in the dual lattice T")
    if D == 0:
        return np.zeros(len(ws), dtype=np.int64)
    return np.array([rat_mod(w, data.p, D) for w in ws], dtype=np.int64)


# ---------------------------------------------------------------------------
# Galois action on tuples and positivity

def galois_act(tup: Sequence, gamma: Sequence[int]) -> tuple:
    """Permute tuple coordinates: the entry at position i moves to ``gamma[i]``.

    >>> galois_act(("A", "B", "C"), (1, 2, 0))
    ('C', 'A', 'B')
    """
    if len(tup) != len(gamma) or sorted(gamma) != list(range(len(gamma))):
        raise InputError("permutation does not match the tuple length")
    out = [None] * len(tup)
    for i, g in enumerate(gamma):
        out[g] = tup[i]
    return tuple(out)


def gamma_orbit(tup: Sequence, gamma: Sequence[int]) -> list:
    orbit = [tuple(tup)]
    cur = galois_act(tup, gamma)
    while cur != orbit[0]:
        orbit.append(cur)
        cur = galois_act(cur, gamma)
    return orbit


def is_fixed(tup: Sequence) -> bool:
    return all(x == tup[0] for x in tup)


def _quad_mul(x, y, d):
    return (x[0] * y[0] + d * x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _quad_det(rows, d):
    """Determinant over Q(sqrt d) by cofactor expansion (n is tiny)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = (Fraction(0), Fraction(0))
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = _quad_mul(rows[0][j], _quad_det(minor, d), d)
        sign = 1 if j % 2 == 0 else -1
        total = (total[0] + sign * term[0], total[1] + sign * term[1])
    return total


def is_positive_definite(M, archimedean_delta: int = -1) -> bool:
    """Positive definiteness through exact leading principal minors.

    ``M`` is a rational symmetric matrix (list of rows or a split-encoded
    HermitianMatrix with symmetric ``y``) or a field-case HermitianMatrix,
    read as ``a + b*sqrt(archimedean_delta)`` with ``archimedean_delta < 0``.

    >>> is_positive_definite([[2, 1], [1, 2]])
    True
    """
    if isinstance(M, HermitianMatrix) and M.field_case:
        if archimedean_delta >= 0:
            raise InputError("archimedean delta must be negative for a CM field")
        n = M.n
        rows = [[(M.a[i][j], M.b[i][j]) for j in range(n)] for i in range(n)]
        for k in range(1, n + 1):
            det = _quad_det([r[:k] for r in rows[:k]], Fraction(archimedean_delta))
            if det[1] != 0:
                raise ArithError("hermitian minor is not rational")
            if det[0] <= 0:
                return False
        return True
    rows = M.y if isinstance(M, HermitianMatrix) else _mat(M)
    if rows != _transpose(rows):
        raise InputError("rational realization must be symmetric")
    n = len(rows)
    for k in range(1, n + 1):
        sub = [[(v, Fraction(0)) for v in r[:k]] for r in rows[:k]]
        if _quad_det(sub, Fraction(0))[0] <= 0:
            return False
    return True


def all_residue_matrices(p: int, m: int, n: int):
    """Integer n x n matrices with entries in [0, p^m)."""
    P = p**m
    for flat in product(range(P), repeat=n * n):
        yield [list(flat[i * n:(i + 1) * n]) for i in range(n)]
