"""Command-line entry point: ``eiscong <verb> ...``.

Exit status: 0 pass, 1 verification failure, 2 input error, 3 budget
exhausted.  Reports are canonical JSON (sorted keys, exact strings) and
are written atomically when ``--out`` is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arith import ArithError, CycloNum, Poly, RatFunc, TruncSeries, exact_str
from .characters import LocalMultChar, all_characters, functional_equation_holds
from .errors import (Budget, DepthInsufficient, EiscongError, InputError, ResourceError,
                     default_budget)
from .hermitian import HermitianMatrix, LocalQuadData

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# canonical JSON


def jsonify(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (Fraction, CycloNum)):
        return exact_str(obj)
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in reports")
    if isinstance(obj, Poly):
        return [exact_str(c) for c in obj.coeffs]
    if isinstance(obj, TruncSeries):
        return [exact_str(c) for c in obj.coeffs]
    if isinstance(obj, RatFunc):
        return {"num": jsonify(obj.num), "den": jsonify(obj.den)}
    if hasattr(obj, "to_json"):
        return jsonify(obj.to_json())
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): jsonify(v)
                for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonify(v) for v in obj)
    if hasattr(obj, "item"):          # numpy scalars
        return obj.item()
    return str(obj)


def dumps(report: dict, fmt: str = "json") -> str:
    data = jsonify(report)
    if fmt == "tsv":
        lines = []
        _flatten(data, "", lines)
        return "\n".join(lines) + "\n"
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _flatten(data, prefix, out):
    if isinstance(data, dict):
        for k in sorted(data):
            _flatten(data[k], f"{prefix}.{k}" if prefix else k, out)
    elif isinstance(data, list) and any(isinstance(v, (dict, list)) for v in data):
        for i, v in enumerate(data):
            _flatten(v, f"{prefix}[{i}]", out)
    else:
        out.append(f"{prefix}\t{json.dumps(data, sort_keys=True)}")


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_char(p: int, spec: str) -> LocalMultChar:
    """``LEVEL[:e1,e2][@m/k]``; e.g. ``1:1`` or ``0@2/1`` (chi(p) = -1)."""
    try:
        at = (1, 0)
        if "@" in spec:
            spec, tail = spec.split("@", 1)
            m, k = tail.split("/")
            at = (int(m), int(k))
        if ":" in spec:
            lv, ex = spec.split(":", 1)
            exps = tuple(int(x) for x in ex.split(",") if x != "")
        else:
            lv, exps = spec, ()
        return LocalMultChar(p, int(lv), exps, at)
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad character spec {spec!r}: {exc}") from None


def parse_json_arg(text: str):
    path = Path(text)
    if not text.lstrip().startswith(("[", "{")) and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        try:
            return json.loads(f"[{text}]") if "," in text else json.loads(text)
        except json.JSONDecodeError:
            raise InputError(f"could not parse {text!r} as JSON") from None


def parse_zeta(args, data: LocalQuadData) -> HermitianMatrix:
    raw = parse_json_arg(args.zeta)
    n = args.n

    def square(v):
        if isinstance(v, (int, str)):
            return [[v if i == j else 0 for j in range(n)] for i in range(n)]
        return v
    if data.field_case:
        b = square(parse_json_arg(args.zeta_b)) if args.zeta_b else None
        return HermitianMatrix.field(square(raw), b)
    return HermitianMatrix.split(square(raw))


# ---------------------------------------------------------------------------
# verbs


def cmd_series(args, budget: Budget) -> dict:
    from .local_series import SeriesRequest, A_zeta_truncated, f_zeta, g_zeta, default_depth
    data = LocalQuadData(args.p, args.label)
    zeta = parse_zeta(args, data)
    if args.verb == "gzeta":
        D = args.depth if args.depth is not None else default_depth(zeta, data)
        try:
            g = g_zeta(zeta, data, D, budget)
        except DepthInsufficient as exc:
            return {"pass": False, "verb": "gzeta", "error": str(exc), "partial": exc.partial}
        return {"pass": True, "verb": "gzeta", "zeta": zeta, "local": data, "depth": D, "g": g}
    D = args.depth if args.depth is not None else 3
    req = SeriesRequest.make(zeta, data, D)
    if args.verb == "fzeta":
        return {"pass": True, "verb": "fzeta", "zeta": zeta, "local": data, "f": f_zeta(req)}
    return {"pass": True, "verb": "azeta", "zeta": zeta, "local": data, "depth": D,
            "A": A_zeta_truncated(req, budget)}


def cmd_congr(args, budget: Budget) -> dict:
    from .local_series import congruence_suite
    data = LocalQuadData(args.ell, args.label)
    zeta = parse_zeta(args, data)
    rep = congruence_suite(zeta, data, args.p, args.depth, args.extension, budget=budget)
    return {"verb": "congr-coeff", **rep}


def cmd_tate(args, budget: Budget) -> dict:
    from .zeta_local import tate_identities
    chars = [parse_char(args.p, args.chi)] if args.chi else all_characters(args.p, args.level, (1, 2))
    rows = []
    for chi in chars:
        r = tate_identities(chi, args.degree, budget)
        rows.append({"chi": chi, "pass": r["pass"], "volume": r["volume"], "zeta_hat": r["zeta_hat"],
                     "E": r["E"], "transform_agrees": r["transform_agrees"],
                     "functional_equation": functional_equation_holds(chi, args.degree)})
    return {"verb": "tate", "pass": all(r["pass"] and r["functional_equation"] for r in rows),
            "checked": rows}


def cmd_gj(args, budget: Budget) -> dict:
    from .zeta_local import gj_lemma_I, gj_lemma_II, gj_spherical
    p = args.p
    nu1, nu2, chi = (parse_char(p, s) for s in (args.nu1, args.nu2, args.chi))
    if args.mode == "lemmaI":
        r = gj_lemma_I(nu1, nu2, chi, args.t, args.support)
    elif args.mode == "lemmaII":
        r = gj_lemma_II(nu1, nu2, chi, args.t, args.degree, budget)
    else:
        r = gj_spherical(nu1, nu2, chi, args.degree, budget)
    return {"verb": "gj", "pass": r["match"], **r}


def _pair_datum(args):
    from .zeta_local import PrincipalSeriesDatum, SplitPairChar
    p = args.p
    pair = SplitPairChar(parse_char(p, args.chi1), parse_char(p, args.chi2))
    nus = tuple(parse_char(p, s) for s in args.nus.split(";"))
    part = tuple(int(x) for x in args.partition.split(","))
    return pair, PrincipalSeriesDatum(args.n, part, nus)


def cmd_whittaker(args, budget: Budget) -> dict:
    from .zeta_local import whittaker_closed, whittaker_oracle
    pair, datum = _pair_datum(args)
    beta = parse_json_arg(args.beta)
    if isinstance(beta, (int, str)):
        beta = [[beta]]
    closed = whittaker_closed(beta, pair, datum, args.orientation)
    oracle = whittaker_oracle(beta, pair, datum, args.t, args.support, budget)
    return {"verb": "whittaker", "beta": beta, "orientation": args.orientation,
            "closed": closed, "oracle": oracle, "pass": closed == oracle}


def cmd_section(args, budget: Budget) -> dict:
    from .zeta_local import section_value
    pair, datum = _pair_datum(args)
    h = parse_json_arg(args.h)
    val = section_value(h, pair, datum, args.t, args.support)
    return {"verb": "section", "h": h, "value": val, "pass": True}


def cmd_qexp(args, budget: Budget) -> dict:
    import random
    from . import qexpansion as Q
    if args.bound is None:
        args.bound = 4 if args.model == "hermitian" else 6
    if args.bound > budget.max_height:
        raise ResourceError("height bound", args.bound)
    if args.action in ("pullback", "frob"):
        base = Q.FreeMonoid(args.rank)
        if args.coeffs:
            raw = parse_json_arg(args.coeffs)
            coeffs = {tuple(e["index"]): int(e["value"]) for e in raw}
        else:
            coeffs = None
        if args.action == "pullback":
            src = Q.TupleMonoid(base, args.p)
            if coeffs is None:
                coeffs = {h: 1 for h in src.elements(args.bound)}
            else:
                coeffs = {tuple(tuple(x) for x in h): v for h, v in coeffs.items()}
            g = Q.pullback_trace(Q.QExpansion(src, args.bound, coeffs), Q.TraceMap(src))
            return {"verb": "qexp pullback", "pass": True, "result": g}
        if coeffs is None:
            coeffs = {h: 1 for h in base.elements(args.bound)}
        f = Q.frobenius_twist(Q.QExpansion(base, args.bound, coeffs), args.p)
        return {"verb": "qexp frob", "pass": True, "result": f}
    rng = random.Random(args.seed)
    if args.model == "free":
        insts = [Q.free_instance(rng, d=args.rank, p=args.p, bound=args.bound) for _ in range(args.count)]
    else:
        insts = Q.hermitian_instances(args.count, args.seed, args.p, args.bound)
    reps = []
    for inst in insts:
        r = Q.congruence_check(inst, budget=budget)
        reps.append({"meta": inst.meta, "pass": r["pass"], "fixed_matches": r["fixed_matches"],
                     "checked": r["checked"], "first_witness": r["first_witness"]})
    return {"verb": "qexp congruence", "model": args.model, "pass": all(r["pass"] for r in reps),
            "instances": reps}


def _load_pair(args):
    from .iwasawa import GammaGroupPair, diagonal_model, unipotent_model
    if getattr(args, "model_file", None):
        return GammaGroupPair.from_json(parse_json_arg(args.model_file))
    return diagonal_model(args.p) if args.model == "diagonal" else unipotent_model(args.p)


def cmd_iwasawa(args, budget: Budget) -> dict:
    from . import iwasawa as I
    from .characters import FinAbGroup
    if args.action == "rw-check":
        pair = _load_pair(args)
        r = I.rw_equivalence(pair, 2 if args.exhaustive else None, args.random, args.seed)
        return {"verb": "iwasawa rw-check", "pair": pair, **r}
    if args.action == "trace-test":
        pair = _load_pair(args)
        coeffs = parse_json_arg(args.x)
        x = I.GroupRingElem(pair, "Gp", pair.p ** args.j, tuple(coeffs))
        r = I.trace_ideal_test(x, args.j)
        return {"verb": "iwasawa trace-test", "pass": True, **r}
    if args.action == "m":
        grp = FinAbGroup([int(x) for x in args.orders.split(",")])
        data = I.AdmissibleData(grp, tuple(int(x) for x in args.images.split(",")), args.p, args.M)
        gens = parse_json_arg(args.U) if args.U else []
        return {"verb": "iwasawa m", "pass": True, **I.admissible_m(gens, data)}
    grp = FinAbGroup([int(x) for x in args.orders.split(",")])
    x = tuple(int(v) for v in args.x.split(","))
    return {"verb": "iwasawa delta", "pass": True, "terms": I.delta_to_json(I.delta_decompose(grp, x))}


def cmd_pipeline(args, budget: Budget) -> dict:
    from . import pipeline as P
    inst = P.load_instance(args.instance)
    r = P.torsion_check(inst)
    return {"verb": "pipeline torsion", **r}


# ---------------------------------------------------------------------------
# suites


def _suite_local_series(budget, fixtures):
    from .local_series import (SeriesRequest, A_zeta_truncated, congruence_suite, f_zeta, g_zeta)
    from .arith import ratfunc_taylor
    checks = []
    D = min(3, budget.max_depth)
    grid = [(2, "split"), (3, "split"), (3, "inert"), (2, "inert")]
    for p, label in grid:
        data = LocalQuadData(p, label)
        for c in (1, p, 0):
            z = HermitianMatrix.scalar(c, 1, data.field_case)
            req = SeriesRequest.make(z, data, D)
            A = A_zeta_truncated(req, budget)
            g = g_zeta(z, data, budget=budget) if c != 0 else Poly([1])
            prod = [sum(ratfunc_taylor(f_zeta(req), D).coeffs[i] * (g.coeffs[j - i] if j - i < len(g.coeffs) else 0)
                        for i in range(j + 1)) for j in range(D + 1)]
            checks.append({"name": f"factorization n=1 p={p} {label} zeta={c}",
                           "pass": [int(x) for x in prod] == [int(x) for x in A.coeffs],
                           "detail": {"A": A, "g": g}})
        g = g_zeta(HermitianMatrix.scalar(1, 2, data.field_case), data, budget=budget)
        checks.append({"name": f"unit case n=2 p={p} {label}", "pass": g.coeffs == (1,), "detail": g})
    for ext in ("split", "inert"):
        data = LocalQuadData(2, "split")
        rep = congruence_suite(HermitianMatrix.scalar(1, 1), data, 3, 2, ext, budget=budget)
        checks.append({"name": f"coefficient congruence {ext}", "pass": rep["pass"],
                       "detail": rep["witnesses"]})
    return checks


def _suite_zeta(budget, fixtures):
    from .zeta_local import (PrincipalSeriesDatum, SplitPairChar, gj_lemma_I, gj_lemma_II,
                             gj_spherical, tate_identities, whittaker_closed, whittaker_oracle)
    D = min(4, budget.max_degree)
    checks = []
    for p in (2, 3):
        for L in (0, 1):
            ok = all(tate_identities(c, D, budget)["pass"] for c in all_characters(p, L, (1, 2)))
            checks.append({"name": f"tate p={p} level={L}", "pass": ok, "detail": None})
    for p in (2, 3):
        t = LocalMultChar.trivial(p)
        chi = LocalMultChar(p, 1, ()) if p == 2 else LocalMultChar(p, 1, (1,))
        r = gj_lemma_I(chi, t, chi, 1)
        checks.append({"name": f"gj lemma I p={p}", "pass": r["match"], "detail": r["value"]})
        r = gj_spherical(t, LocalMultChar.unramified(p, 2, 1), t, D, budget)
        checks.append({"name": f"gj spherical p={p}", "pass": r["match"], "detail": r["series"]})
    r = gj_lemma_II(LocalMultChar.trivial(2), LocalMultChar.trivial(2), LocalMultChar.trivial(2), 1,
                    min(D, 3), budget)
    checks.append({"name": "gj lemma II p=2", "pass": r["match"], "detail": r["series"]})
    p = 3
    chi = LocalMultChar(p, 1, (1,))
    pair = SplitPairChar(chi, LocalMultChar.trivial(p))
    datum = PrincipalSeriesDatum(1, (1,), (LocalMultChar.trivial(p),))
    ok = True
    for v in range(-1, 3):
        for u in (1, 2):
            beta = [[Fraction(u) * Fraction(p) ** v]]
            ok &= whittaker_closed(beta, pair, datum) == whittaker_oracle(beta, pair, datum, 1, budget=budget)
    checks.append({"name": "whittaker n=1 p=3", "pass": ok, "detail": None})
    return checks


def _suite_qexp(budget, fixtures):
    import random
    from . import qexpansion as Q
    checks = []
    rng = random.Random(11)
    ok, det = True, True
    for _ in range(10):
        inst = Q.free_instance(rng)
        ok &= Q.congruence_check(inst)["pass"]
        h = next(iter(inst.ext.coeffs))
        inst.ext = inst.ext.perturbed(h)
        det &= not Q.congruence_check(inst)["pass"]
    checks.append({"name": "free model congruences", "pass": ok, "detail": None})
    checks.append({"name": "free model perturbation detected", "pass": det, "detail": None})
    src = Q.TupleMonoid(Q.FreeMonoid(1), 3)
    g = Q.pullback_trace(Q.QExpansion(src, 3, {h: 1 for h in src.elements(3)}), Q.TraceMap(src))
    checks.append({"name": "pullback count at h=3", "pass": g[(3,)] == 10, "detail": g[(3,)]})
    for inst in Q.hermitian_instances(2, seed=1):
        r = Q.congruence_check(inst, budget=budget)
        checks.append({"name": f"hermitian {inst.meta['chi']}", "pass": r["pass"], "detail": r["first_witness"]})
    return checks


def _suite_iwasawa(budget, fixtures):
    from . import iwasawa as I
    from .characters import FinAbGroup
    checks = []
    for name, pair in (("unipotent", I.unipotent_model()), ("diagonal", I.diagonal_model())):
        r = I.rw_equivalence(pair, 2)
        checks.append({"name": f"rw exhaustive {name}", "pass": r["pass"], "detail": r["tested"]})
    pair = I.diagonal_model()
    x = I.GroupRingElem.basis(pair, "Gp", 3, (1, 1, 1))
    checks.append({"name": "fixed basis vector not in T", "pass": not I.trace_ideal_test(x, 1)["member"],
                   "detail": None})
    x9 = I.GroupRingElem.basis(pair, "Gp", 9, (1, 1, 1)).scale(3)
    checks.append({"name": "p times fixed vector in T mod 9", "pass": I.trace_ideal_test(x9, 2)["member"],
                   "detail": None})
    r = I.admissible_m([(1,)], I.AdmissibleData(FinAbGroup([3]), (4,), 3, 3))
    checks.append({"name": "admissible m", "pass": r["m"] == 1, "detail": r})
    terms = I.delta_decompose(FinAbGroup([3]), (1,))
    checks.append({"name": "delta decomposition", "pass": len(terms) == 3, "detail": I.delta_to_json(terms)})
    return checks


def _suite_pipeline(budget, fixtures):
    from . import pipeline as P
    checks = []
    fx = Path(fixtures) if fixtures else P.FIXTURE_DIR
    files = sorted(fx.glob("*.json")) if fx.is_dir() else []
    insts = [P.load_instance(f) for f in files]
    insts = [i for i in insts if i.name]
    if not insts:
        raise InputError(f"no pipeline fixtures in {fx}")
    for inst in insts:
        r = P.torsion_check(inst)
        expect_pass = inst.witness is None
        ok = r["pass"] == expect_pass and P.witness_matches(r, inst.witness)
        if expect_pass:
            ok = ok and r["cross_check"]
        checks.append({"name": f"torsion {inst.name}", "pass": ok, "detail": r["witness"]})
    return checks


SUITES = {"local-series": _suite_local_series, "zeta": _suite_zeta, "qexp": _suite_qexp,
          "iwasawa": _suite_iwasawa, "pipeline": _suite_pipeline}


def run_suite(name: str, budget: Budget | None = None, fixtures=None, timing: bool = False) -> dict:
    budget = budget or default_budget()
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise InputError(f"unknown suite {name!r}")
    out = []
    for n in names:
        t0 = time.perf_counter()
        checks = SUITES[n](budget, fixtures)
        entry = {"suite": n, "pass": all(c["pass"] for c in checks), "checks": checks}
        if timing:
            entry["seconds"] = f"{time.perf_counter() - t0:.2f}"
        out.append(entry)
    return {"verb": "suite", "name": name, "version": __version__, "schema": SCHEMA_VERSION,
            "pass": all(e["pass"] for e in out), "suites": out}


def cmd_suite(args, budget: Budget) -> dict:
    if args.budget_degree:
        budget = budget.with_overrides(f"degree={args.budget_degree}")
    return run_suite(args.name, budget, args.fixtures, args.timing)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eiscong", description="Exact local and congruence checks.")
    ap.add_argument("--version", action="version", version=__version__)
    # global options are accepted before or after the verb
    common = argparse.ArgumentParser(add_help=False)
    for parser, default in ((ap, None), (common, argparse.SUPPRESS)):
        parser.add_argument("--out", default=default,
                            help="write the report here (atomically) instead of stdout")
        parser.add_argument("--format", choices=["json", "tsv"],
                            default="json" if default is None else default)
        parser.add_argument("--budget", default=default, help="overrides such as cosets=100000,degree=4")
    sub = ap.add_subparsers(dest="verb", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)
    sub.add_parser = add_parser

    for verb in ("azeta", "gzeta", "fzeta"):
        s = sub.add_parser(verb)
        s.add_argument("--p", type=int, required=True)
        s.add_argument("--label", choices=["split", "inert", "ramified"], required=True)
        s.add_argument("--n", type=int, required=True)
        s.add_argument("--zeta", required=True, help="scalar or JSON matrix (split: y; field: a)")
        s.add_argument("--zeta-b", help="field case: the sqrt(delta) part as a JSON matrix")
        s.add_argument("--depth", type=int)
        s.set_defaults(func=cmd_series)

    s = sub.add_parser("congr-coeff")
    s.add_argument("--ell", type=int, required=True, help="residue characteristic of the base place")
    s.add_argument("--label", choices=["split", "inert"], required=True)
    s.add_argument("--p", type=int, required=True, help="degree of the extension")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--zeta", required=True)
    s.add_argument("--zeta-b")
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--extension", choices=["split", "inert"], default="split")
    s.set_defaults(func=cmd_congr)

    s = sub.add_parser("tate")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--level", type=int, default=1)
    s.add_argument("--chi", help="single character LEVEL[:exps][@m/k]")
    s.add_argument("--degree", type=int, default=4)
    s.set_defaults(func=cmd_tate)

    s = sub.add_parser("gj")
    s.add_argument("--mode", choices=["lemmaI", "lemmaII", "spherical"], required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--nu1", default="0")
    s.add_argument("--nu2", default="0")
    s.add_argument("--chi", default="0")
    s.add_argument("--t", type=int, default=1)
    s.add_argument("--support", choices=["gamma0", "gamma"], default="gamma0")
    s.add_argument("--degree", type=int, default=4)
    s.set_defaults(func=cmd_gj)

    for verb, fn in (("whittaker", cmd_whittaker), ("section", cmd_section)):
        s = sub.add_parser(verb)
        s.add_argument("--p", type=int, required=True)
        s.add_argument("--n", type=int, default=1)
        s.add_argument("--partition", default=None)
        s.add_argument("--nus", default=None, help="semicolon separated characters, one per block")
        s.add_argument("--chi1", default="0")
        s.add_argument("--chi2", default="0")
        s.add_argument("--t", type=int, default=1)
        s.add_argument("--support", choices=["gamma", "gamma0"], default="gamma")
        if verb == "whittaker":
            s.add_argument("--beta", required=True)
            s.add_argument("--orientation", choices=["stated", "derived"], default="derived")
        else:
            s.add_argument("--h", required=True)
        s.set_defaults(func=fn)

    s = sub.add_parser("qexp")
    s.add_argument("action", choices=["pullback", "frob", "congruence"])
    s.add_argument("--p", type=int, default=3)
    s.add_argument("--rank", type=int, default=1, help="rank of the base free monoid")
    s.add_argument("--bound", type=int, help="height bound (default 6, or 4 for the hermitian model)")
    s.add_argument("--coeffs", help="JSON list of {index, value}; default all ones")
    s.add_argument("--model", choices=["free", "hermitian"], default="free")
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_qexp)

    s = sub.add_parser("iwasawa")
    s.add_argument("action", choices=["rw-check", "trace-test", "m", "delta"])
    s.add_argument("model_file", nargs="?", help="GammaGroupPair JSON (default: built-in model)")
    s.add_argument("--model", choices=["diagonal", "unipotent"], default="diagonal")
    s.add_argument("--p", type=int, default=3)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--random", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--x", help="trace-test: JSON coefficient list; delta: comma separated element")
    s.add_argument("--j", type=int, default=1)
    s.add_argument("--orders", default="3")
    s.add_argument("--images", default="1")
    s.add_argument("--M", type=int, default=3)
    s.add_argument("--U", help="JSON list of generators")
    s.set_defaults(func=cmd_iwasawa)

    s = sub.add_parser("pipeline")
    s.add_argument("action", choices=["torsion"])
    s.add_argument("instance")
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("suite")
    s.add_argument("name")
    s.add_argument("--fixtures", help="pipeline fixture directory")
    s.add_argument("--budget-degree", type=int)
    s.add_argument("--timing", action="store_true", help="add wall-clock seconds (not deterministic)")
    s.set_defaults(func=cmd_suite)
    return ap


def _fill_defaults(args):
    if getattr(args, "verb", None) in ("whittaker", "section"):
        if args.partition is None:
            args.partition = ",".join(["1"] * args.n) if args.n <= 2 else str(args.n)
        if args.nus is None:
            args.nus = ";".join(["0"] * len(args.partition.split(",")))


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args, extra = ap.parse_known_args(argv)
        # a trailing model file after flags (``iwasawa rw-check --exhaustive m.json``)
        if extra and len(extra) == 1 and getattr(args, "model_file", "") is None \
                and not extra[0].startswith("-"):
            args.model_file, extra = extra[0], []
        if extra:
            ap.error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as exc:
        return int(exc.code or 0)
    _fill_defaults(args)
    try:
        budget = default_budget()
        if args.budget:
            budget = budget.with_overrides(args.budget)
        report = args.func(args, budget)
        code = 0 if report.get("pass", True) else 1
    except ResourceError as exc:
        report, code = {"pass": False, "error": str(exc), "kind": "budget"}, 3
    except DepthInsufficient as exc:
        report, code = {"pass": False, "error": str(exc), "kind": "depth"}, 3
    except (InputError, ArithError, ValueError, KeyError, json.JSONDecodeError) as exc:
        report, code = {"pass": False, "error": str(exc), "kind": type(exc).__name__}, 2
    except EiscongError as exc:
        report, code = {"pass": False, "error": str(exc), "kind": type(exc).__name__}, 1
    text = dumps(report, args.format)
    if args.out:
        write_atomic(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return code


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
