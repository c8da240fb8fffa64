"""Exact local integrals at p for GL_1 and GL_2 over Q_p.

Conventions (fixed once, used everywhere):

* additive Haar measure with ``vol(M_n(Z_p)) = 1``;
* multiplicative Haar measure with ``vol(GL_n(Z_p)) = 1``;
* ``psi(x) = e(x)`` is the standard character trivial on ``Z_p``;
* ``|x|^s`` is the formal monomial ``X^v(x)``, ``X = p^-s``.

Schwartz functions are :class:`CellFunction` objects: supported on
``p^-R M_n(Z_p)`` and constant modulo ``p^L M_n(Z_p)``.  The Fourier
transform ``Phi^(X) = int Phi(Y) psi(tr(Y^t X)) dY`` swaps ``(R, L)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .arith import CycloNum, LaurentSeries, as_rat, exact_str, padic_val, rat_mod
from .characters import LocalMultChar, Monomial, tate_E_factor
from .errors import (Budget, InputError, PreconditionError, ResourceError,
                     default_budget)
from .hermitian import HermitianMatrix

SUPPORTS = ("iwahori", "gamma0", "gamma")

# ---------------------------------------------------------------------------
# small matrix helpers (n <= 2, exact rationals)


def _as_matrix(M) -> tuple:
    if isinstance(M, HermitianMatrix):
        if M.field_case:
            raise InputError("only split matrices are supported here")
        return M.y
    rows = tuple(tuple(as_rat(v) for v in r) for r in M)
    if any(len(r) != len(rows) for r in rows):
        raise InputError("matrix must be square")
    return rows


def _det(m) -> Fraction:
    if len(m) == 1:
        return m[0][0]
    if len(m) == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    raise InputError("only n <= 2 is supported")


def _mul(a, b) -> tuple:
    n, k = len(a), len(b[0])
    return tuple(tuple(sum(a[i][l] * b[l][j] for l in range(len(b))) for j in range(k)) for i in range(n))


def _inv(m) -> tuple:
    d = _det(m)
    if d == 0:
        raise InputError("matrix is singular")
    if len(m) == 1:
        return ((1 / d,),)
    return ((m[1][1] / d, -m[0][1] / d), (-m[1][0] / d, m[0][0] / d))


def _blocks(m, k):
    n = len(m) // 2
    rows = m[k[0] * n:(k[0] + 1) * n]
    return tuple(tuple(r[k[1] * n:(k[1] + 1) * n]) for r in rows)


def _flat(m) -> tuple:
    return tuple(v for r in m for v in r)


def _units(p: int, m: int) -> list:
    return [u for u in range(1, p**m) if u % p]


def gl_order(p: int, n: int, t: int) -> int:
    """``|GL_n(Z/p^t)|``."""
    base = 1
    for i in range(n):
        base *= p**n - p**i
    return base * p ** (n * n * (t - 1))


# ---------------------------------------------------------------------------
# cell functions


class CellFunction:
    """Function on ``M_n(Q_p)`` supported on ``p^-R M``, constant mod ``p^L M``.

    ``values`` maps integer keys ``p^R X mod p^(R+L)`` (row-major tuples)
    to nonzero :class:`CycloNum` values.
    """

    def __init__(self, p: int, n: int, R: int, L: int, values: dict):
        if R + L < 0:
            raise InputError("need R + L >= 0")
        self.p, self.n, self.R, self.L = p, n, R, L
        self.values = {tuple(int(x) for x in k): CycloNum.coerce(v)
                       for k, v in values.items() if not (v == 0)}

    @property
    def modulus(self) -> int:
        return self.p ** (self.R + self.L)

    def key_of(self, X):
        flat = _flat(_as_matrix(X)) if not isinstance(X, (int, Fraction)) else (as_rat(X),)
        scaled = [v * Fraction(self.p) ** self.R for v in flat]
        if any(padic_val(v, self.p) < 0 for v in scaled if v != 0):
            return None
        P = self.modulus
        return tuple(rat_mod(v, self.p, self.R + self.L) if P > 1 else 0 for v in scaled)

    def __call__(self, X) -> CycloNum:
        k = self.key_of(X)
        if k is None:
            return CycloNum.from_rational(0)
        return self.values.get(k, CycloNum.from_rational(0))

    def scale(self, c) -> "CellFunction":
        return CellFunction(self.p, self.n, self.R, self.L, {k: v * c for k, v in self.values.items()})

    def refine(self, R: int, L: int) -> "CellFunction":
        """The same function described on the finer grid ``(R, L)``."""
        if R < self.R or L < self.L:
            raise InputError("refinement must not coarsen")
        p, m = self.p, self.n * self.n
        lift = p ** (R - self.R)
        step = p ** (R + self.L)
        P = p ** (R + L)
        extra = list(product(range(p ** (L - self.L)), repeat=m))
        out = {}
        for k, v in self.values.items():
            base = [x * lift for x in k]
            for e in extra:
                out[tuple((b + step * x) % P for b, x in zip(base, e))] = v
        return CellFunction(p, self.n, R, L, out)

    def same_as(self, o: "CellFunction") -> bool:
        R, L = max(self.R, o.R), max(self.L, o.L)
        a, b = self.refine(R, L).values, o.refine(R, L).values
        return a.keys() == b.keys() and all(a[k] == b[k] for k in a)

    def __repr__(self):
        return f"CellFunction(p={self.p}, n={self.n}, R={self.R}, L={self.L}, cells={len(self.values)})"

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "R": self.R, "L": self.L,
                "cells": {",".join(map(str, k)): exact_str(v) for k, v in sorted(self.values.items())}}


def fourier_transform(phi: CellFunction, budget: Budget | None = None) -> CellFunction:
    """``Phi^(X) = int Phi(Y) psi(tr(Y^t X)) dY`` by exact cell sums.

    The result lives on the grid ``(R, L) = (phi.L, phi.R)``; compact
    support makes it exact, so no truncation ever happens.

    >>> one = CellFunction(3, 1, 0, 0, {(0,): 1})
    >>> fourier_transform(one).same_as(one)
    True
    """
    budget = budget or default_budget()
    p, n, R, L = phi.p, phi.n, phi.R, phi.L
    m = n * n
    P = p ** (R + L)
    n_out = P**m
    if n_out > budget.max_cells or n_out * max(1, len(phi.values)) > budget.max_cosets * 8:
        raise ResourceError("Fourier transform grid", n_out * max(1, len(phi.values)))
    vol = Fraction(1, p ** (m * L)) if L >= 0 else Fraction(p ** (-m * L))
    out_keys = np.indices((P,) * m).reshape(m, -1).T.astype(np.int64) if m else np.zeros((1, 0), np.int64)
    by_value: dict = {}
    for k, v in phi.values.items():
        by_value.setdefault(v, []).append(k)
    totals = [CycloNum.from_rational(0)] * n_out
    for v, keys in by_value.items():
        K = np.array(keys, dtype=np.int64)
        E = (K @ out_keys.T) % P
        idx = E + (np.arange(n_out, dtype=np.int64) * P)[None, :]
        counts = np.bincount(idx.ravel(), minlength=n_out * P).reshape(n_out, P)
        for o in range(n_out):
            row = counts[o]
            if row.any():
                totals[o] = totals[o] + v * CycloNum.from_power_counts(P, row.tolist())
    values = {tuple(int(x) for x in out_keys[o]): totals[o] * vol for o in range(n_out)}
    return CellFunction(p, n, L, R, values)


# ---------------------------------------------------------------------------
# principal series data and the standard Schwartz functions


@dataclass(frozen=True)
class SplitPairChar:
    """``chi = (chi_1, chi_2)`` on ``F_v x F_v``."""

    chi1: LocalMultChar
    chi2: LocalMultChar

    @property
    def p(self) -> int:
        return self.chi1.p


@dataclass(frozen=True)
class PrincipalSeriesDatum:
    n: int
    partition: tuple
    nus: tuple

    def __post_init__(self):
        if sum(self.partition) != self.n or any(k <= 0 for k in self.partition):
            raise InputError("partition must consist of positive parts summing to n")
        if len(self.nus) != len(self.partition):
            raise InputError("need one character per block")
        if self.n > 2:
            raise InputError("only n <= 2 is supported")
        if len({c.p for c in self.nus}) > 1:
            raise InputError("characters at different primes")

    @property
    def p(self) -> int:
        return self.nus[0].p

    def mus(self, pair: SplitPairChar) -> tuple:
        """``mu_j = nu_j^-1 chi_2^-1``."""
        return tuple(nu.inverse() * pair.chi2.inverse() for nu in self.nus)

    def nu_inv_chi1(self, pair: SplitPairChar) -> tuple:
        return tuple(nu.inverse() * pair.chi1 for nu in self.nus)


def group_elements(p: int, n: int, partition: Sequence[int], t: int, support: str = "iwahori") -> list:
    """Residues mod ``p^t`` (row-major) of the compact open group.

    ``iwahori``: lower blocks in ``p``; ``gamma0``: lower blocks in ``p^t``;
    ``gamma``: all off-diagonal blocks in ``p^t``.  Diagonal blocks are
    invertible.
    """
    if support not in SUPPORTS:
        raise InputError(f"support must be one of {SUPPORTS}")
    if t < 1:
        raise InputError("level t must be at least 1")
    P = p**t
    if n == 1:
        return [(u,) for u in _units(p, t)]
    if tuple(partition) == (2,):
        return [m for m in product(range(P), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % p]
    units = _units(p, t)
    upper = [0] if support == "gamma" else list(range(P))
    lower = list(range(0, P, p)) if support == "iwahori" else [0]
    return [(a, b, c, d) for a in units for b in upper for c in lower for d in units]


def in_group(M, p: int, partition: Sequence[int], t: int, support: str = "iwahori") -> bool:
    m = _as_matrix(M)
    if any(padic_val(v, p) < 0 for v in _flat(m) if v != 0):
        return False
    n = len(m)
    if n == 1:
        return padic_val(m[0][0], p) == 0
    if tuple(partition) == (2,):
        return padic_val(_det(m), p) == 0
    a, b, c, d = _flat(m)

    def v(x):
        return padic_val(x, p) if x != 0 else 10**9
    low = 1 if support == "iwahori" else t
    up = t if support == "gamma" else 0
    return v(a) == 0 and v(d) == 0 and v(c) >= low and v(b) >= up


def block_value(chars: Sequence[LocalMultChar], key: Sequence[int], n: int, partition) -> CycloNum:
    """``prod_j chi_j(det Z_jj)`` on a unit-diagonal residue matrix."""
    if n == 1:
        return chars[0].unit_value(key[0])
    if tuple(partition) == (2,):
        return chars[0].unit_value(key[0] * key[3] - key[1] * key[2])
    return chars[0].unit_value(key[0]) * chars[1].unit_value(key[3])


def _check_level(chars, t: int) -> None:
    for c in chars:
        if c.conductor > t:
            raise PreconditionError(f"level t={t} is below a conductor {c.conductor}")


def phi_from_chars(p: int, n: int, partition, chars, t: int, support: str = "iwahori") -> CellFunction:
    """``Phi(Z) = prod chi_j(det Z_jj)`` on the group, 0 elsewhere."""
    _check_level(chars, t)
    vals = {k: block_value(chars, k, n, partition) for k in group_elements(p, n, partition, t, support)}
    return CellFunction(p, n, 0, t, vals)


def group_volume(p: int, n: int, partition, t: int, support: str) -> Fraction:
    """Multiplicative volume by counting residues mod p^t."""
    return Fraction(len(group_elements(p, n, partition, t, support)), gl_order(p, n, t))


def build_phi(datum: PrincipalSeriesDatum, kind: str, t: int, pair: SplitPairChar | None = None,
              support: str | None = None):
    """The standard Schwartz functions attached to ``datum``.

    ``nu``: ``Phi_nu`` on the Iwahori set; ``mu_tilde``:
    ``vol(Gamma(p^t))^-1 Phi_mu`` on ``Gamma(p^t)`` (support flag
    ``gamma0`` available); ``nu_inv_chi1``: ``Phi_{nu^-1 chi_1}``;
    ``combined``: the pair ``(Phi~_mu, Phi^_{nu^-1 chi_1})``.
    """
    p, n, part = datum.p, datum.n, datum.partition
    if t < 1:
        raise PreconditionError("level t must be at least 1")
    if kind == "nu":
        return phi_from_chars(p, n, part, datum.nus, t, support or "iwahori")
    if pair is None:
        raise InputError(f"kind {kind!r} needs the character pair")
    if kind == "mu_tilde":
        sup = support or "gamma"
        phi = phi_from_chars(p, n, part, datum.mus(pair), t, sup)
        return phi.scale(1 / group_volume(p, n, part, t, sup))
    if kind == "nu_inv_chi1":
        return phi_from_chars(p, n, part, datum.nu_inv_chi1(pair), t, "iwahori")
    if kind == "combined":
        return (build_phi(datum, "mu_tilde", t, pair, support),
                fourier_transform(build_phi(datum, "nu_inv_chi1", t, pair)))
    raise InputError(f"unknown kind {kind!r}")


def phi_hat_chi_closed(chi: LocalMultChar) -> CellFunction:
    """Closed form of the transform of ``Phi_chi = chi 1_{Z_p^x}`` (n = 1).

    Ramified: ``chi^-1(x) tau(chi)`` on ``p^-c Z_p^x``.  Unramified:
    ``1_{Z_p} - p^-1 1_{p^-1 Z_p}``.
    """
    from .characters import gauss_sum
    p, c = chi.p, chi.conductor
    if c == 0:
        vals = {(0,): Fraction(1 - Fraction(1, p))}
        for r in range(1, p):
            vals[(r,)] = Fraction(-1, p)
        return CellFunction(p, 1, 1, 0, vals)
    tau = gauss_sum(chi)
    inv = chi.inverse()
    vals = {}
    for u in _units(p, c):
        # x = u / p^c : chi^-1(x) = chi(p)^c chi^-1(u)
        vals[(u,)] = inv.unit_value(u) * chi.chi_p**c * tau
    return CellFunction(p, 1, c, 0, vals)


# ---------------------------------------------------------------------------
# Tate integrals


def tate_integral(chi: LocalMultChar, phi: CellFunction, D: int) -> LaurentSeries:
    """``int chi(x) Phi(x) |x|^s d^x x`` shell by shell up to ``X^D``.

    >>> chi = LocalMultChar(3, 1, (1,))
    >>> tate_integral(chi, phi_from_chars(3, 1, (1,), [chi.inverse()], 1), 4).to_json()
    {'0': '1'}
    """
    if phi.n != 1:
        raise InputError("Tate integrals need n = 1")
    p = chi.p
    terms = {}
    for k in range(-phi.R, D + 1):
        m = max(1, chi.conductor, phi.L - k)
        us = _units(p, m)
        acc = CycloNum.from_rational(0)
        for u in us:
            val = phi(Fraction(p) ** k * u)
            if not (val == 0):
                acc = acc + chi.unit_value(u) * val
        if not (acc == 0):
            terms[k] = acc * chi.chi_p**k * Fraction(1, len(us))
    return LaurentSeries(terms, D)


def tate_E_series(chi: LocalMultChar, D: int) -> LaurentSeries:
    return tate_E_factor(chi).expand(D)


# ---------------------------------------------------------------------------
# Godement-Jacquet integrals on GL_2


def _check_degree(D: int, budget: Budget | None) -> None:
    budget = budget or default_budget()
    if D > budget.max_degree:
        raise ResourceError(f"X-degree {D} exceeds budget", D)


def gamma0_volume(p: int, t: int) -> Fraction:
    """``vol(Gamma_0(p^t)) = 1/(p^(t-1)(p+1))``."""
    return Fraction(1, p ** (t - 1) * (p + 1))


def gamma_volume(p: int, t: int) -> Fraction:
    """Volume of the group with both off-diagonal entries in ``p^t``."""
    return Fraction(1, p ** (2 * t - 1) * (p + 1))


def gj_lemma_I(nu1: LocalMultChar, nu2: LocalMultChar, chi: LocalMultChar, t: int,
               support: str = "gamma0") -> dict:
    """``Z(s, Phi_{chi^-1 nu^-1}, pi, chi)`` as a cell sum over the group mod p^t."""
    if nu2.ramified:
        raise PreconditionError("nu_2 must be unramified")
    if support not in ("gamma0", "gamma"):
        raise InputError("support must be gamma0 or gamma")
    _check_level([nu1, chi], t)
    p = chi.p
    c1 = (nu1 * chi).inverse()
    c2 = (nu2 * chi).inverse()
    total = CycloNum.from_rational(0)
    for a, b, c, d in group_elements(p, 2, (1, 1), t, support):
        phi = c1.unit_value(a) * c2.unit_value(d)
        total = total + phi * chi.unit_value(a * d - b * c) * nu1.unit_value(a)
    value = total * Fraction(1, gl_order(p, 2, t))
    expected = gamma0_volume(p, t) if support == "gamma0" else gamma_volume(p, t)
    return {"mode": "lemmaI", "support": support, "value": value, "expected": expected,
            "match": value == expected}


def gj_lemma_II(nu1: LocalMultChar, nu2: LocalMultChar, chi: LocalMultChar, t: int, D: int = 4,
                budget: Budget | None = None) -> dict:
    """Borel part of ``Z(s, Phi^, pi, chi)`` with ``Phi = Phi_{nu chi}`` on ``Gamma_0(p^t)``.

    Shell sum over ``b = [[p^i u1, y], [0, p^j u2]]`` of
    ``Phi^(b) chi(ad) nu1(a) nu2(d) |ad|^s |a|^-1``.  The factorization
    through ``K`` is taken as given; the comparison constant is
    ``vol(I_3) = p^-t``, the volume of the lower-left support.
    """
    _check_degree(D, budget)
    if nu1.ramified or nu2.ramified:
        raise PreconditionError("lemma II needs unramified nu_1, nu_2")
    _check_level([chi], t)
    p = chi.p
    a1, a2 = nu1 * chi, nu2 * chi
    phi = phi_from_chars(p, 2, (1, 1), [a1, a2], t, "gamma0")
    hat = fourier_transform(phi, budget)
    P = p**t
    terms: dict = {}
    for i in range(-t, D + t + 1):
        m1 = max(1, chi.conductor, -i)
        U1 = _units(p, m1)
        for j in range(-t, D - i + 1):
            m2 = max(1, chi.conductor, -j)
            U2 = _units(p, m2)
            acc = CycloNum.from_rational(0)
            for u1 in U1:
                for u2 in U2:
                    w = chi.unit_value(u1 * u2)
                    for r in range(P):
                        # p^t * b, reduced mod p^t (R = t, L = 0)
                        key = ((u1 * p ** (i + t)) % P if i + t >= 0 else None,
                               r, 0, (u2 * p ** (j + t)) % P if j + t >= 0 else None)
                        v = hat.values.get(key)
                        if v is not None:
                            acc = acc + w * v
            if not (acc == 0):
                coef = acc * Fraction(1, len(U1) * len(U2)) * Fraction(p) ** i * a1.chi_p**i * a2.chi_p**j
                terms[i + j] = terms.get(i + j, 0) + coef
    series = LaurentSeries(terms, D)
    const = Fraction(1, p**t)
    top = D + 2 * t + 2
    E1 = tate_E_factor(a1).expand(top).substitute_scale(p)
    E2 = tate_E_factor(a2).expand(top)
    expected = (E1 * E2).scale(const)
    return {"mode": "lemmaII", "series": series, "expected": expected, "constant": const,
            "match": series.equal_to(expected, D)}


def gj_spherical(nu1: LocalMultChar, nu2: LocalMultChar, chi: LocalMultChar, D: int = 4,
                 budget: Budget | None = None) -> dict:
    """``Z(s, 1_{M_2(Z_p)}, omega, chi)`` by counting right K-cosets.

    ``omega(bk) = nu1(a) nu2(d)`` (unnormalized induction).  Integral
    matrices of determinant valuation ``i+j`` split into Hermite normal
    forms ``[[p^i, y], [0, p^j]]`` with ``y mod p^i``.  Under this
    normalization the closed form is ``L(s-1, nu1 chi) L(s, nu2 chi)``.
    """
    _check_degree(D, budget)
    if nu1.ramified or nu2.ramified or chi.ramified:
        raise PreconditionError("spherical mode needs unramified characters")
    p = chi.p
    b1, b2 = (nu1 * chi).chi_p, (nu2 * chi).chi_p
    terms: dict = {}
    for i in range(D + 1):
        for j in range(D - i + 1):
            for y in range(p**i):
                b = ((Fraction(p**i), Fraction(y)), (Fraction(0), Fraction(p**j)))
                if all(padic_val(v, p) >= 0 for v in _flat(b) if v != 0):
                    terms[i + j] = terms.get(i + j, 0) + b1**i * b2**j
    series = LaurentSeries(terms, D)
    closed: dict = {}
    for i in range(D + 1):
        for j in range(D - i + 1):
            closed[i + j] = closed.get(i + j, 0) + (b1 * p) ** i * b2**j
    expected = LaurentSeries(closed, D)
    return {"mode": "spherical", "shift": "L(s-1, nu1 chi) L(s, nu2 chi)", "series": series,
            "expected": expected, "match": series.equal_to(expected, D)}


def gj_integral(datum: PrincipalSeriesDatum, chi: LocalMultChar, mode: str, D: int = 4,
                t: int = 1, support: str = "gamma0", budget: Budget | None = None) -> dict:
    if datum.n != 2 or datum.partition != (1, 1):
        raise PreconditionError("Godement-Jacquet checks need n = 2 with partition (1, 1)")
    nu1, nu2 = datum.nus
    if mode == "lemmaI":
        return gj_lemma_I(nu1, nu2, chi, t, support)
    if mode == "lemmaII":
        return gj_lemma_II(nu1, nu2, chi, t, D, budget)
    if mode == "spherical":
        return gj_spherical(nu1, nu2, chi, D, budget)
    raise InputError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Whittaker coefficient at p


@dataclass(frozen=True)
class LocalValue:
    """``coeff * X^exp``, tagged with how a zero arose."""

    coeff: CycloNum
    exp: int = 0
    tag: str = "value"

    def to_json(self) -> dict:
        return {"coeff": exact_str(self.coeff), "exp": self.exp, "tag": self.tag}

    def __eq__(self, o):
        if not isinstance(o, LocalValue):
            return NotImplemented
        if self.coeff == 0 and o.coeff == 0:
            return True
        return self.coeff == o.coeff and self.exp == o.exp


def _zero(tag: str) -> LocalValue:
    return LocalValue(CycloNum.from_rational(0), 0, tag)


def _levels(datum, pair, t):
    _check_level(list(datum.mus(pair)) + list(datum.nu_inv_chi1(pair)) + [pair.chi1 * pair.chi2], t)


def whittaker_closed(beta, pair: SplitPairChar, datum: PrincipalSeriesDatum,
                     orientation: str = "stated") -> LocalValue:
    """``chi_2 chi_1(det b) |det b|^(2s-n) Phi_mu(b)``.

    ``orientation="derived"`` evaluates ``Phi_mu`` at the transpose of b,
    which is what the Fourier inversion step produces
    (``Phi(Z^-t b^t)``).  The two agree unless exactly one off-diagonal
    entry of b is a unit; the oracle follows the derived form.
    """
    if orientation not in ("stated", "derived"):
        raise InputError("orientation must be 'stated' or 'derived'")
    b = _as_matrix(beta)
    if orientation == "derived":
        b = tuple(zip(*b))
    n, p = len(b), datum.p
    if n != datum.n:
        raise InputError("beta has the wrong size")
    det = _det(b)
    if det == 0:
        return _zero("support")
    if not in_group(b, p, datum.partition, 1, "iwahori"):
        return _zero("support")
    mus = datum.mus(pair)
    key = tuple(rat_mod(x, p, 1 + max(c.level for c in mus)) for x in _flat(b))
    phi_mu = block_value(mus, key, n, datum.partition)
    val, v = (pair.chi2 * pair.chi1).char_value(det)
    return LocalValue(val * phi_mu * Fraction(p) ** (n * v), 2 * v)


def section_core(M0, pair: SplitPairChar, datum: PrincipalSeriesDatum, t: int,
                 support: str = "gamma", hat: CellFunction | None = None) -> CycloNum:
    """``avg_{W in Gamma mod p^t} Phi_mu(W) Phi^_{nu^-1 chi1}(W M0) chi_2 chi_1(det W)``."""
    p, n = datum.p, datum.n
    hat = hat or build_phi(datum, "combined", t, pair, support)[1]
    m = _as_matrix(M0)
    mus = datum.mus(pair)
    cc = pair.chi2 * pair.chi1
    elems = group_elements(p, n, datum.partition, t, support)
    acc = CycloNum.from_rational(0)
    for w in elems:
        W = tuple(tuple(Fraction(w[i * n + j]) for j in range(n)) for i in range(n))
        h = hat(_mul(W, m))
        if h == 0:
            continue
        acc = acc + block_value(mus, w, n, datum.partition) * h * cc.unit_value(_det(W))
    return acc * Fraction(1, len(elems))


def whittaker_oracle(beta, pair: SplitPairChar, datum: PrincipalSeriesDatum, t: int = 1,
                     support: str = "gamma", budget: Budget | None = None) -> LocalValue:
    """``int_{M_n} f(w n(X)) psi(-tr(beta X)) dX`` by exact cell sums.

    ``f(w n(X))`` is constant on ``X + M_n(Z_p)`` and vanishes off
    ``p^-t M_n(Z_p)``, so the integral is a finite sum with unit cell
    volume.  A non-integral beta gives 0.
    """
    budget = budget or default_budget()
    b = _as_matrix(beta)
    n, p = len(b), datum.p
    _levels(datum, pair, t)
    if _det(b) == 0:
        return _zero("support")
    if any(padic_val(v, p) < 0 for v in _flat(b) if v != 0):
        return _zero("nonintegral")
    P = p**t
    if P ** (n * n) > budget.max_cells:
        raise ResourceError("Whittaker oracle grid", P ** (n * n))
    hat = build_phi(datum, "combined", t, pair, support)[1]
    bm = [rat_mod(v, p, t) for v in _flat(b)]
    acc = CycloNum.from_rational(0)
    for x in product(range(P), repeat=n * n):
        X0 = tuple(tuple(Fraction(x[i * n + j], P) for j in range(n)) for i in range(n))
        f = section_core(X0, pair, datum, t, support, hat)
        if f == 0:
            continue
        # tr(beta X) = sum_ij beta_ij X_ji
        e = sum(bm[i * n + j] * x[j * n + i] for i in range(n) for j in range(n))
        acc = acc + f * CycloNum.zeta(P, -e)
    return LocalValue(acc, 0)


def section_value(h, pair: SplitPairChar, datum: PrincipalSeriesDatum, t: int = 1,
                  support: str = "gamma") -> LocalValue:
    """``f_Phi(h, s)`` for an invertible ``2n x 2n`` matrix ``h``.

    ``(0, Z) h = (Z h21, Z h22)``; the first argument must lie in the
    support group, so ``Z = W h21^-1`` with W in the group.  A singular
    ``h21`` gives 0.
    """
    H = _as_matrix(h)
    n = datum.n
    if len(H) != 2 * n:
        raise InputError("h must be 2n x 2n")
    _levels(datum, pair, t)
    dh = _det_big(H)
    if dh == 0:
        raise InputError("h must be invertible")
    h21, h22 = _blocks(H, (1, 0)), _blocks(H, (1, 1))
    d21 = _det(h21)
    if d21 == 0:
        return _zero("support")
    core = section_core(_mul(_inv(h21), h22), pair, datum, t, support)
    if core == 0:
        return _zero("support")
    c2, v = pair.chi2.char_value(dh)
    cc, w = (pair.chi2 * pair.chi1).char_value(d21)
    return LocalValue(c2 * cc.inverse() * core, v - 2 * w)


def _det_big(m) -> Fraction:
    """Determinant by fraction-exact elimination."""
    a = [list(r) for r in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def w_n_of(S) -> tuple:
    """``w_n n(S) = [[0, -1], [1, S]]``."""
    s = _as_matrix(S)
    n = len(s)
    rows = []
    for i in range(n):
        rows.append(tuple([Fraction(0)] * n + [Fraction(-1 if i == j else 0) for j in range(n)]))
    for i in range(n):
        rows.append(tuple([Fraction(1 if i == j else 0) for j in range(n)] + list(s[i])))
    return tuple(rows)


def parabolic_factor(A, D, pair: SplitPairChar) -> LocalValue:
    """``chi_2(det A) chi_1^-1(det D) |det A / det D|^s``."""
    va, ea = pair.chi2.char_value(_det(_as_matrix(A)))
    vd, ed = pair.chi1.char_value(_det(_as_matrix(D)))
    return LocalValue(va * vd.inverse(), ea - ed)


def alpha_const(pair: SplitPairChar, detS, det_kappa_theta) -> Monomial:
    """``chi_2^-1(det S) |det S|^-s chi_2 chi_1(det k.theta) |det k.theta|^2s``.

    With ``X = p^-s``, ``|det S|^-s = X^-v(det S)``.
    """
    a, v1 = pair.chi2.char_value(detS)
    b, v2 = (pair.chi2 * pair.chi1).char_value(det_kappa_theta)
    return Monomial(a.inverse() * b, -v1 + 2 * v2)


# ---------------------------------------------------------------------------
# spherical vectors and base change


@dataclass(frozen=True)
class HalfPowerValue:
    """``coeff * p^(half_exp/2)``."""

    coeff: CycloNum
    half_exp: int
    p: int

    def __mul__(self, o: "HalfPowerValue") -> "HalfPowerValue":
        return HalfPowerValue(self.coeff * o.coeff, self.half_exp + o.half_exp, self.p)

    def __pow__(self, k: int) -> "HalfPowerValue":
        return HalfPowerValue(self.coeff**k, self.half_exp * k, self.p)

    def normalized(self) -> tuple:
        """Absorb even powers of p into the coefficient."""
        q, r = divmod(self.half_exp, 2)
        return self.coeff * Fraction(self.p) ** q, r

    def __eq__(self, o):
        if not isinstance(o, HalfPowerValue):
            return NotImplemented
        a, r = self.normalized()
        b, s = o.normalized()
        return self.p == o.p and r == s and a == b

    def __hash__(self):
        return hash((self.p, self.normalized()[1]))

    def to_json(self) -> dict:
        return {"coeff": exact_str(self.coeff), "p_half_exponent": self.half_exp}


def iwasawa_decompose(g, p: int) -> tuple:
    """Valuations ``(v(y1), v(y2))`` of the Borel part of ``g = b k``.

    The bottom row of ``g`` is ``y2`` times a primitive row of ``k``, so
    ``v(y2) = min(v(c), v(d))`` and ``v(y1) = v(det g) - v(y2)``.
    """
    m = _as_matrix(g)
    if len(m) != 2:
        raise InputError("need a 2 x 2 matrix")
    det = _det(m)
    if det == 0:
        raise InputError("g must be invertible")
    c, d = m[1]
    v2 = min(padic_val(x, p) for x in (c, d) if x != 0)
    return padic_val(det, p) - v2, v2


def iwasawa_spherical(g, chi1: LocalMultChar, chi2: LocalMultChar) -> HalfPowerValue:
    """``phi(bk) = delta_B(b)^(1/2) chi(b)`` with ``delta_B(b) = |y2/y1|``.

    >>> t = LocalMultChar.trivial(3)
    >>> iwasawa_spherical([[3, 0], [0, 1]], t, t).half_exp
    1
    """
    if chi1.ramified or chi2.ramified:
        raise PreconditionError("spherical vectors need unramified characters")
    p = chi1.p
    v1, v2 = iwasawa_decompose(g, p)
    # |y2/y1| = p^(v1 - v2)
    return HalfPowerValue(chi1.chi_p**v1 * chi2.chi_p**v2, v1 - v2, p)


def base_change_check(gs: Sequence, chi1: LocalMultChar, chi2: LocalMultChar) -> dict:
    """Split degree-p model: ``phi'(g_1..g_p) = prod phi(g_i)``.

    Checks invariance under cyclic relabeling and, for fixed tuples,
    ``phi'(g, ..., g) = phi(g)^p``.
    """
    from .hermitian import galois_act
    deg = len(gs)
    mats = tuple(_as_matrix(g) for g in gs)

    def phi_prime(tup):
        out = HalfPowerValue(CycloNum.from_rational(1), 0, chi1.p)
        for g in tup:
            out = out * iwasawa_spherical(g, chi1, chi2)
        return out

    base = phi_prime(mats)
    witnesses = []
    for s in range(1, deg):
        gamma = tuple((i + s) % deg for i in range(deg))
        if phi_prime(galois_act(mats, gamma)) != base:
            witnesses.append({"check": "gamma-invariance", "shift": s})
    fixed = all(m == mats[0] for m in mats)
    if fixed and base != iwasawa_spherical(mats[0], chi1, chi2) ** deg:
        witnesses.append({"check": "fixed-tuple power"})
    return {"pass": not witnesses, "fixed": fixed, "value": base.to_json(), "witnesses": witnesses}


def tate_identities(chi: LocalMultChar, D: int = 4, budget: Budget | None = None) -> dict:
    """Both Tate identities for one character, with the transform computed two ways.

    ``Z(chi, Phi_{chi^-1}) = 1`` (unit volume on the units) and
    ``Z(chi, Phi^_chi) = E(chi)``, the transform taken by cell summation and
    also from the closed form.
    """
    _check_degree(D, budget)
    p = chi.p
    t = max(1, chi.conductor)
    vol = tate_integral(chi, phi_from_chars(p, 1, (1,), [chi.inverse()], t), D)
    hat = fourier_transform(phi_from_chars(p, 1, (1,), [chi], t), budget)
    closed = phi_hat_chi_closed(chi)
    E = tate_E_series(chi, D)
    z_hat = tate_integral(chi, hat, D)
    return {"volume": vol, "volume_ok": vol.equal_to(LaurentSeries({0: 1}, D), D),
            "transform_agrees": hat.same_as(closed),
            "zeta_hat": z_hat, "E": E, "E_ok": z_hat.equal_to(E, D),
            "pass": vol.equal_to(LaurentSeries({0: 1}, D), D) and hat.same_as(closed) and z_hat.equal_to(E, D)}
