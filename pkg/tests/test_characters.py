from fractions import Fraction as F

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from eiscong.arith import CycloNum
from eiscong.characters import (FinAbGroup, LocalMultChar, all_characters, epsilon_factor,
                                functional_equation_holds, gauss_sum, inner_product,
                                local_L_factor, orthogonality_holds, raw_gauss_sum, tate_E_factor,
                                unit_group)
from eiscong.errors import InputError

z3 = CycloNum.zeta(3)


def test_unit_group_shapes():
    assert unit_group(2, 1)[0] == ()
    assert unit_group(2, 2) == ((2,), (3,))
    assert unit_group(2, 3) == ((2, 2), (7, 5))
    assert unit_group(5, 2)[0] == (20,)


@pytest.mark.parametrize("p,t", [(2, 3), (2, 4), (3, 2), (5, 2)])
def test_unit_group_generates(p, t):
    orders, gens = unit_group(p, t)
    m = p**t
    seen = {1}
    for g, d in zip(gens, orders):
        seen = {x * pow(g, k, m) % m for x in seen for k in range(d)}
    assert len(seen) == m - m // p


@pytest.mark.parametrize("orders", [(2, 4), (3,), (2, 2, 3)])
def test_orthogonality(orders):
    G = FinAbGroup(orders)
    assert orthogonality_holds(G)
    chars = G.characters()
    assert inner_product(chars[0], chars[0]) == G.size


def test_quadratic_gauss_sum_mod_3():
    chi = LocalMultChar(3, 1, (1,))
    raw = raw_gauss_sum(chi)
    assert raw == z3 - z3 * z3
    assert raw * raw == -3
    assert gauss_sum(chi) == raw * F(1, 3)
    assert gauss_sum(chi, "multiplicative") == raw * F(1, 2)


@settings(max_examples=20)
@given(st.sampled_from([3, 5]), st.integers(1, 2), st.data())
def test_primitive_gauss_norm(p, level, data):
    orders, _ = unit_group(p, level)
    e = data.draw(st.integers(0, orders[0] - 1))
    chi = LocalMultChar(p, level, (e,))
    if chi.conductor != level:
        return
    g = raw_gauss_sum(chi)
    assert g * g.conj() == p**level


def test_conductor():
    assert LocalMultChar(3, 2, (3,)).conductor == 1
    assert LocalMultChar(3, 2, (1,)).conductor == 2
    assert LocalMultChar.trivial(5).conductor == 0
    assert LocalMultChar(2, 3, (0, 1)).conductor == 3


def test_character_algebra():
    chi = LocalMultChar(5, 1, (1,), (2, 1))
    assert chi.order() == 4
    assert (chi * chi.inverse()).same_as(LocalMultChar.trivial(5))
    assert (chi**4).same_as(LocalMultChar.trivial(5))
    assert LocalMultChar.from_json(chi.to_json()) == chi
    with pytest.raises(InputError):
        LocalMultChar(3, 1, (1, 1))


def test_unramified_L_factor():
    chi = LocalMultChar.unramified(3, 2, 1)       # chi(p) = -1
    L = local_L_factor(chi)
    assert L.den.coeffs == (1, 1)


def test_epsilon_and_E():
    chi = LocalMultChar(3, 1, (1,))
    eps = epsilon_factor(chi)
    assert eps.exp == 1
    assert eps.coeff == gauss_sum(chi).inverse()
    E = tate_E_factor(LocalMultChar.trivial(3))
    assert E.f.num.coeffs == (F(-1, 3), 1) and E.f.den.coeffs == (1, -1)
    assert E.shift == -1


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("level", [0, 1, 2])
def test_functional_equation(p, level):
    for chi in all_characters(p, level, (1, 2)):
        assert functional_equation_holds(chi, 5), chi
