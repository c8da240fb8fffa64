from fractions import Fraction as F

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings
import sympy

from eiscong.arith import CycloNum, Poly, rat_mod
from eiscong.errors import Budget, DepthInsufficient, InputError, PreconditionError, ResourceError
from eiscong.hermitian import HermitianMatrix, LocalQuadData, enumerate_cosets, k_of_sigma
from eiscong.local_series import (A_zeta_truncated, SeriesRequest, UnramifiedExtension,
                                  congruence_suite, default_depth, extension_A_series, f_zeta,
                                  g_series, g_zeta, irreducible_modulus)


def brute_A(zeta, data, D):
    """Coset-by-coset sum with k from elementary divisors and an explicit trace."""
    P = data.p**D
    n = zeta.n
    acc = [CycloNum.from_rational(0) for _ in range(D + 1)]
    for s in enumerate_cosets(data, n, D):
        k = k_of_sigma(s, data)
        if zeta.field_case:
            x = sum(zeta.a[i][j] * s.a[j][i] + data.delta * zeta.b[i][j] * s.b[j][i]
                    for i in range(n) for j in range(n))
        else:
            x = sum(zeta.y[i][j] * s.y[j][i] for i in range(n) for j in range(n))
        acc[k] = acc[k] + CycloNum.zeta(P, rat_mod(x * P, data.p, D))
    return [a.to_rational() for a in acc]


def _zetas(data, n):
    fc = data.field_case
    p = data.p
    out = [HermitianMatrix.scalar(c, n, fc) for c in (1, p, 0)]
    if n == 2:
        out.append(HermitianMatrix.diag([1, p], fc))
        out.append(HermitianMatrix.diag([1, 0], fc))
        if fc:
            out.append(HermitianMatrix.field([[1, 1], [1, p]], [[0, 1], [-1, 0]]))
        else:
            out.append(HermitianMatrix.split([[1, 1], [0, p]]))
    return out


CASES = [(LocalQuadData(p, lab), n) for p in (2, 3) for lab in ("split", "inert") for n in (1, 2)]


@pytest.mark.parametrize("data,n", CASES, ids=lambda v: str(v))
def test_A_matches_brute_force(data, n):
    D = 2 if n == 1 else 1
    for z in _zetas(data, n):
        if z.field_case != data.field_case:
            continue
        fast = A_zeta_truncated(SeriesRequest.make(z, data, D))
        assert list(fast.coeffs) == brute_A(z, data, D), z


def test_frozen_series():
    d = LocalQuadData(3, "split")
    assert A_zeta_truncated(SeriesRequest.make(HermitianMatrix.scalar(1, 1), d, 3)).coeffs == (1, -1, 0, 0)
    assert A_zeta_truncated(SeriesRequest.make(HermitianMatrix.scalar(0, 1), d, 3)).coeffs == (1, 2, 6, 18)
    req = SeriesRequest.make(HermitianMatrix.scalar(3, 1), d, 3)
    assert A_zeta_truncated(req).coeffs == (1, 2, -3, 0)
    assert g_zeta(HermitianMatrix.scalar(3, 1), d) == Poly([1, 3])
    di = LocalQuadData(3, "inert")
    assert f_zeta(SeriesRequest.make(HermitianMatrix.scalar(1, 2, True), di, 3)).num.coeffs == (1, 2, -3)


@pytest.mark.parametrize("p", [2, 3])
def test_frozen_g_two_by_two(p):
    s, i = LocalQuadData(p, "split"), LocalQuadData(p, "inert")
    assert g_zeta(HermitianMatrix.diag([1, p]), s) == Poly([1, p * p])
    assert g_zeta(HermitianMatrix.diag([1, p], True), i) == Poly([1, -p * p])
    expected_split = {2: [1, 12, 16], 3: [1, 36, 81]}[p]
    expected_inert = {2: [1, 4, 16], 3: [1, 18, 81]}[p]
    assert g_zeta(HermitianMatrix.scalar(p, 2), s) == Poly(expected_split)
    assert g_zeta(HermitianMatrix.scalar(p, 2, True), i) == Poly(expected_inert)


def test_default_depth_needed():
    d = LocalQuadData(2, "split")
    z = HermitianMatrix.scalar(2, 2)
    assert default_depth(z, d) == 3
    with pytest.raises(DepthInsufficient) as exc:
        g_zeta(z, d, depth=2)
    assert exc.value.partial is not None


def test_request_validation():
    d = LocalQuadData(3, "split")
    with pytest.raises(PreconditionError):
        SeriesRequest.make(HermitianMatrix.scalar(F(1, 3), 1), d, 2)
    with pytest.raises(InputError):
        SeriesRequest.make(HermitianMatrix.scalar(1, 1, True), d, 2)
    with pytest.raises(InputError):
        SeriesRequest(HermitianMatrix.split([[0, 0], [0, 1]]), d, 2, 1, 2)


def test_budget_refusal():
    with pytest.raises(ResourceError):
        A_zeta_truncated(SeriesRequest.make(HermitianMatrix.scalar(1, 2), LocalQuadData(3, "split"), 3),
                         Budget(max_cosets=10_000))


unit_entries = st.integers(1, 40).filter(lambda x: x % 3 and x % 2)


@settings(max_examples=15)
@given(st.sampled_from(["split", "inert"]), st.sampled_from([2, 3]), unit_entries, st.integers(0, 5))
def test_unit_determinant_gives_one(label, p, u, b):
    # det = u * (b*p... ) chosen to be a unit
    data = LocalQuadData(p, label)
    fc = data.field_case
    off = p * b
    z = (HermitianMatrix.field([[u, off], [off, 1]]) if fc
         else HermitianMatrix.split([[u, off], [off, 1]]))
    assert g_zeta(z, data) == Poly([1])


@settings(max_examples=15)
@given(st.sampled_from([2, 3]), st.sampled_from(["split", "inert"]), st.integers(0, 3), st.integers(0, 3))
def test_g_integral_constant_one(p, label, e1, e2):
    data = LocalQuadData(p, label)
    z = HermitianMatrix.diag([p**e1, p**e2], data.field_case)
    g = g_series(SeriesRequest.make(z, data, 3))
    assert g.coeffs[0] == 1
    assert all(F(c).denominator == 1 for c in g.coeffs)


def test_extension_model():
    f = irreducible_modulus(2, 3)
    assert len(f) == 4 and f[-1] == 1
    E = UnramifiedExtension(3, 2)
    assert int(E.traces[0]) == 2
    # trace form tr(x^(i+j)) is nondegenerate mod l exactly when the extension is unramified
    tr_pow = [int(row @ E.traces) for row in E.reduce_table]
    gram = sympy.Matrix(2, 2, lambda i, j: tr_pow[i + j])
    assert gram.det() % 3 != 0


def test_extension_series_frobenius():
    # A over the degree-3 extension of Q_2 agrees with A over Q_2 mod 3
    data = LocalQuadData(2, "split")
    z = HermitianMatrix.scalar(1, 1)
    base = A_zeta_truncated(SeriesRequest.make(z, data, 2))
    ext = extension_A_series(z, data, 3, 2, None)
    assert all((int(a) - int(b)) % 3 == 0 for a, b in zip(ext.coeffs, base.coeffs))


@pytest.mark.parametrize("ext", ["split", "inert"])
def test_congruence_suite(ext):
    rep = congruence_suite(HermitianMatrix.scalar(1, 1), LocalQuadData(2, "split"), 3, 2, ext)
    assert rep["pass"], rep["witnesses"]


def test_congruence_suite_rank_deficient_refused():
    with pytest.raises(PreconditionError):
        congruence_suite(HermitianMatrix.diag([1, 0]), LocalQuadData(2, "split"), 3, 1, "split")
