"""The ten acceptance criteria, one test each.

Every test records a PASS/FAIL line (printed in the terminal summary and
to stdout) before asserting, so a failing criterion is reported rather
than hidden.
"""

import contextlib
import itertools
import random
import time
from fractions import Fraction as F

from conftest import ACCEPTANCE
from eiscong import qexpansion as Q
from eiscong.arith import ratfunc_taylor
from eiscong.characters import LocalMultChar as C
from eiscong.characters import all_characters
from eiscong.cli import main
from eiscong.hermitian import HermitianMatrix as H
from eiscong.hermitian import LocalQuadData, k_of_sigma
from eiscong.iwasawa import diagonal_model, epsilon_criterion, rw_equivalence
from eiscong.local_series import (A_zeta_truncated, SeriesRequest, congruence_suite, f_zeta,
                                  g_series, g_zeta)
from eiscong.pipeline import induced_measures, shipped_fixtures, torsion_check, witness_matches
from eiscong.zeta_local import (PrincipalSeriesDatum, SplitPairChar, gamma0_volume, gj_lemma_I,
                                gj_lemma_II, gj_spherical, tate_identities, whittaker_closed,
                                whittaker_oracle)


@contextlib.contextmanager
def criterion(k):
    """Record the outcome of criterion k; ``box["detail"]`` is free text."""
    box = {"ok": False, "detail": ""}
    t0 = time.perf_counter()
    try:
        yield box
    except Exception as exc:
        box["ok"] = False
        box["detail"] = f"{box['detail']} error: {exc!r}".strip()
        raise
    finally:
        line = f"{box['detail']} ({time.perf_counter() - t0:.1f}s)"
        ACCEPTANCE[k] = (box["ok"], line)
        print(f"criterion {k}: {'PASS' if box['ok'] else 'FAIL'}  {line}")
    assert box["ok"], box["detail"]


# --- shared zeta grid ------------------------------------------------------

def zeta_grid(data, n):
    """Test zeta with k(zeta) <= 1: integral entries plus entries in p^-1."""
    p, fc = data.p, data.field_case
    out = []
    if n == 1:
        for c in (1, p, p * p, 0, -1, 1 + p):
            out.append(H.scalar(c, 1, fc))
        return out
    diags = [(1, 1), (1, p), (p, p), (1, p * p), (1, 0), (p, 0), (-1, 1 + p)]
    for a, b in diags:
        out.append(H.diag([a, b], fc))
    if fc:
        out.append(H.field([[1, 1], [1, p]], [[0, 1], [-1, 0]]))
        out.append(H.field([[p, 0], [0, p]], [[0, 1], [-1, 0]]))
    else:
        out.append(H.split([[1, 1], [0, p]]))
        out.append(H.split([[p, 1], [1, p]]))
        out.append(H.split([[F(1, p), 0], [0, p]]))
    return out


def grid():
    for p in (2, 3):
        for lab in ("split", "inert"):
            data = LocalQuadData(p, lab)
            for n in (1, 2):
                for z in zeta_grid(data, n):
                    yield data, n, z


def _feasible(data, z):
    from eiscong.errors import PreconditionError
    try:
        SeriesRequest.make(z, data, 0)
        return True
    except PreconditionError:
        return False


def _mul_trunc(a, b, D):
    return [sum(a[i] * b[j - i] for i in range(j + 1)) for j in range(D + 1)]


# --- 1 ------------------------------------------------------------------------

def test_criterion_1_factorization():
    with criterion(1) as box:
        D, count, bad = 3, 0, []
        for data, n, z in grid():
            if not _feasible(data, z) or k_of_sigma(z, data) > 1:
                continue
            req = SeriesRequest.make(z, data, D)
            A = [F(c) for c in A_zeta_truncated(req).coeffs]
            g = [F(c) for c in g_series(req).coeffs]
            fser = [F(c) for c in ratfunc_taylor(f_zeta(req), D).coeffs]
            ok = _mul_trunc(fser, g, D) == A and g[0] == 1 and all(c.denominator == 1 for c in g)
            count += 1
            if not ok:
                bad.append(repr(z))
        box["ok"] = not bad and count >= 40
        box["detail"] = f"{count} zeta checked, {len(bad)} failures {bad[:2]}"


# --- 2 ------------------------------------------------------------------------

def test_criterion_2_unit_case():
    with criterion(2) as box:
        count, bad = 0, []
        for p in (2, 3):
            for lab in ("split", "inert"):
                data = LocalQuadData(p, lab)
                fc = data.field_case
                units = [u for u in range(1, 3 * p * p) if u % p]
                for n in (1, 2):
                    for u in units:
                        for off in range(0, 2 * p + 1):
                            if n == 1:
                                if off:
                                    continue
                                z = H.scalar(u, 1, fc)
                            else:
                                # det = u - off^2 must be a unit
                                if (u - off * off) % p == 0:
                                    continue
                                z = (H.field([[u, off], [off, 1]]) if fc
                                     else H.split([[u, off], [off, 1]]))
                            count += 1
                            if g_zeta(z, data).coeffs != (1,):
                                bad.append(repr(z))
        box["ok"] = not bad
        box["detail"] = f"{count} unit-determinant zeta, {len(bad)} with g != 1"


# --- 3 ------------------------------------------------------------------------

def test_criterion_3_tate():
    with criterion(3) as box:
        count, bad = 0, []
        for p in (2, 3, 5):
            for level in (0, 1, 2):
                for chi in all_characters(p, level, (1, 2)):
                    r = tate_identities(chi, 4)
                    count += 1
                    if not r["pass"]:
                        bad.append(repr(chi))
        box["ok"] = not bad
        box["detail"] = f"{count} characters (value at p of order 1 or 2), {len(bad)} failures"


# --- 4 ------------------------------------------------------------------------

def test_criterion_4_godement_jacquet():
    with criterion(4) as box:
        parts = []
        ok = True
        for p in (2, 3):
            t = C.trivial(p)
            u = C.unramified(p, 2, 1)
            ram = [c for c in all_characters(p, 1, (1,)) if c.conductor == 1] or [t]
            for chi in ram:
                for nu1 in ram:
                    r = gj_lemma_I(nu1, t, chi, 1)
                    ok &= r["match"] and r["value"] == gamma0_volume(p, 1)
            n2 = 0
            for chi in [t, u] + ram:
                for nu1, nu2 in itertools.product((t, u), repeat=2):
                    ok &= gj_lemma_II(nu1, nu2, chi, 1, 4)["match"]
                    n2 += 1
            for nu1, nu2, chi in itertools.product((t, u), repeat=3):
                ok &= gj_spherical(nu1, nu2, chi, 4)["match"]
            parts.append(f"p={p}: lemma II x{n2}")
        box["ok"] = ok
        box["detail"] = "lemma I, lemma II (degree 4, t=1), spherical (degree 4); " + ", ".join(parts)


# --- 5 ------------------------------------------------------------------------

def test_criterion_5_whittaker():
    with criterion(5) as box:
        ok = True
        n1 = 0
        for p in (2, 3):
            chars = all_characters(p, 1, (1, 2))
            for chi1, chi2, nu in itertools.product(chars, repeat=3):
                pair = SplitPairChar(chi1, chi2)
                datum = PrincipalSeriesDatum(1, (1,), (nu,))
                for v in range(-2, 3):
                    for u in range(1, p**3):
                        if u % p == 0:
                            continue
                        beta = [[F(u) * F(p) ** v]]
                        ok &= whittaker_closed(beta, pair, datum) == whittaker_oracle(beta, pair, datum, 1)
                        n1 += 1
        # n = 2, p = 2, t = 1: every integral beta mod 4 and a few non-integral ones
        t2 = C.trivial(2)
        pair = SplitPairChar(t2, C.unramified(2, 2, 1))
        datum = PrincipalSeriesDatum(2, (1, 1), (t2, C.unramified(2, 2, 1)))
        samples = [[[b[0], b[1]], [b[2], b[3]]] for b in itertools.product(range(4), repeat=4)]
        samples += [[[F(1, 2), 0], [0, 1]], [[1, F(1, 2)], [F(1, 2), 1]]]
        derived_ok, stated_agree, witnesses = 0, 0, []
        for beta in samples:
            oracle = whittaker_oracle(beta, pair, datum, 1)
            if whittaker_closed(beta, pair, datum, "derived") == oracle:
                derived_ok += 1
            if whittaker_closed(beta, pair, datum, "stated") == oracle:
                stated_agree += 1
            else:
                witnesses.append(beta)
        # the stated orientation can only fail when exactly one off-diagonal entry is a unit
        def one_unit_off(b):
            return (F(b[0][1]) % 2 == 1) != (F(b[1][0]) % 2 == 1) and F(b[0][0]) * F(b[1][1]) % 2 == 1
        explained = all(one_unit_off(b) for b in witnesses)
        ok &= derived_ok == len(samples) and stated_agree >= 10 and explained
        box["ok"] = ok
        box["detail"] = (f"n=1: {n1} beta; n=2: {len(samples)} beta, derived form {derived_ok} agree, "
                         f"stated form {stated_agree} agree, {len(witnesses)} orientation witnesses "
                         f"e.g. {witnesses[0] if witnesses else None}")


# --- 6 ------------------------------------------------------------------------

def test_criterion_6_coefficient_congruences():
    with criterion(6) as box:
        runs, bad = 0, []
        cases = []
        for ell, deg in ((2, 3), (3, 2), (5, 3), (5, 2)):
            for lab in ("split", "inert"):
                data = LocalQuadData(ell, lab)
                fc = data.field_case
                for c in (1, ell, ell * ell):
                    cases.append((H.scalar(c, 1, fc), data, deg, 2, "split"))
                    cases.append((H.scalar(c, 1, fc), data, deg, 2, "inert"))
                if ell < 5:
                    for z in (H.diag([1, 1], fc), H.diag([1, ell], fc)):
                        cases.append((z, data, deg, 2, "split"))
                        if lab == "split":
                            cases.append((z, data, deg, 1, "inert"))
        for z, data, deg, depth, ext in cases:
            rep = congruence_suite(z, data, deg, depth, ext)
            runs += 1
            if not rep["pass"]:
                bad.append((repr(z), data.p, deg, ext))
        box["ok"] = not bad
        box["detail"] = f"{runs} (zeta, place, p, model) runs at depth <= 2, {len(bad)} failures {bad[:2]}"


# --- 7 ------------------------------------------------------------------------

def test_criterion_7_eisenstein_congruences():
    with criterion(7) as box:
        rng = random.Random(2024)
        free_ok, detected, n_free = 0, 0, 100
        for _ in range(n_free):
            inst = Q.free_instance(rng, d=1, p=3, bound=6)
            if Q.congruence_check(inst)["pass"]:
                free_ok += 1
            hs = sorted(inst.ext.monoid.elements(6))
            inst.ext = inst.ext.perturbed(hs[rng.randrange(len(hs))], 1)
            if not Q.congruence_check(inst)["pass"]:
                detected += 1
        herm = Q.hermitian_instances(5, seed=0, p=3, bound=4)
        herm_ok, herm_det = 0, 0
        for inst in herm:
            if Q.congruence_check(inst)["pass"]:
                herm_ok += 1
            hs = sorted(inst.ext.coeffs, key=repr)
            inst.ext = inst.ext.perturbed(hs[rng.randrange(len(hs))], 1)
            if not Q.congruence_check(inst)["pass"]:
                herm_det += 1
        box["ok"] = free_ok == n_free and detected == n_free and herm_ok == len(herm) == herm_det
        box["detail"] = (f"free rank 3: {free_ok}/{n_free} pass, {detected}/{n_free} perturbations caught; "
                         f"hermitian-pd: {herm_ok}/{len(herm)} pass, {herm_det}/{len(herm)} caught")


# --- 8 ------------------------------------------------------------------------

def test_criterion_8_rw_equivalence():
    with criterion(8) as box:
        pair = diagonal_model(3)
        ex = rw_equivalence(pair, 2)
        rnd = rw_equivalence(pair, None, 10_000, seed=1)
        box["ok"] = ex["pass"] and rnd["pass"] and ex["tested"] == 19 * 243 and rnd["tested"] == 10_000
        box["detail"] = (f"exhaustive {ex['tested']} pairs, {ex['n_discrepancies']} discrepancies; "
                         f"random {rnd['tested']} pairs, {rnd['n_discrepancies']} discrepancies")


# --- 9 ------------------------------------------------------------------------

def test_criterion_9_pipeline():
    with criterion(9) as box:
        fx = shipped_fixtures()
        comp = torsion_check(fx["compliant"])
        mu, mup = induced_measures(fx["compliant"])
        eps = epsilon_criterion(mu, mup)["pass"]
        outcomes = []
        for name in ("perturbed-fixed-pair", "perturbed-free-orbit", "perturbed-form"):
            r = torsion_check(fx[name])
            outcomes.append(not r["pass"] and witness_matches(r, fx[name].witness))
        box["ok"] = comp["pass"] and eps and all(outcomes)
        box["detail"] = (f"compliant pass={comp['pass']}, induced epsilon criterion={eps}; "
                         f"perturbed fail at documented witness: {outcomes}")


# --- 10 -----------------------------------------------------------------------

def test_criterion_10_determinism(tmp_path):
    with criterion(10) as box:
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        ca = main(["suite", "all", "--out", str(a)])
        cb = main(["suite", "all", "--out", str(b)])
        same = a.read_bytes() == b.read_bytes()
        box["ok"] = ca == cb == 0 and same
        box["detail"] = f"exit codes {ca}, {cb}; byte-identical={same}; {a.stat().st_size} bytes"
