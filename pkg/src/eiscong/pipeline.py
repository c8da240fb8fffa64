"""Toy measure pipeline: class sets, the fixed-point embedding, and the torsion check.

An instance has a base class set ``B``, an extension class set ``B'`` with a
Gamma permutation, an injection ``iota: B -> B'`` onto the fixed points,
form vectors ``f, fc`` on ``B`` and ``f', fc'`` on ``B'``, and Eisenstein
oracle tables ``E[g][(a, b)]`` (one per base group element g) and
``E'[y][(a', b')]`` (one per extension group element y), all mod ``p^m``.

The measures are ``mu(g) = Omega * sum_{a,b} E[g](a,b) f(b) fc(a)`` and
``mu'(y) = Omega^p * sum_{a',b'} E'[y](a',b') f'(b') fc'(a')``; the Petersson
pairing ``(f, fc)`` is carried as a tag and divided out only when the
unit flag is set.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import InputError
from .iwasawa import (GammaGroupPair, GroupRingElem, diagonal_model, epsilon_criterion,
                      trace_ideal_test, ver_apply)

FIXTURE_DIR = Path(__file__).with_name("fixtures")


@dataclass
class PipelineInstance:
    pair: GammaGroupPair
    m: int
    B: list
    Bp: list
    gamma_B: dict           # permutation of B'
    iota: dict              # B -> B'
    f: dict
    fc: dict
    fp: dict
    fcp: dict
    E: dict                 # g-tuple -> {(a, b): value}
    Ep: dict                # y-tuple -> {(a', b'): value}
    omega: int = 1
    pairing_unit: bool = True
    name: str = ""
    witness: dict | None = None   # documented failure point, for perturbed fixtures

    @property
    def p(self) -> int:
        return self.pair.p

    @property
    def modulus(self) -> int:
        return self.p**self.m

    def gam(self, b, s: int = 1):
        for _ in range(s % self.p):
            b = self.gamma_B[b]
        return b

    # serialization -----------------------------------------------------
    def to_json(self) -> dict:
        def table(T):
            return [{"elem": list(k), "values": [[a, b, v] for (a, b), v in sorted(T[k].items())]}
                    for k in sorted(T)]
        return {"name": self.name, "pair": self.pair.to_json(), "m": self.m, "B": self.B, "Bp": self.Bp,
                "gamma_B": [[k, v] for k, v in sorted(self.gamma_B.items())],
                "iota": [[k, v] for k, v in sorted(self.iota.items())],
                "f": [self.f[b] for b in self.B], "fc": [self.fc[b] for b in self.B],
                "fp": [self.fp[b] for b in self.Bp], "fcp": [self.fcp[b] for b in self.Bp],
                "E": table(self.E), "Ep": table(self.Ep), "omega": self.omega,
                "pairing_unit": self.pairing_unit, "witness": self.witness}

    @classmethod
    def from_json(cls, d) -> "PipelineInstance":
        try:
            def table(T):
                return {tuple(e["elem"]): {(a, b): v for a, b, v in e["values"]} for e in T}
            B, Bp = list(d["B"]), list(d["Bp"])
            return cls(GammaGroupPair.from_json(d["pair"]), d["m"], B, Bp,
                       {k: v for k, v in d["gamma_B"]}, {k: v for k, v in d["iota"]},
                       dict(zip(B, d["f"])), dict(zip(B, d["fc"])),
                       dict(zip(Bp, d["fp"])), dict(zip(Bp, d["fcp"])),
                       table(d["E"]), table(d["Ep"]), d.get("omega", 1), d.get("pairing_unit", True),
                       d.get("name", ""), d.get("witness"))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed pipeline instance: {exc}") from None


def load_instance(path) -> PipelineInstance:
    return PipelineInstance.from_json(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------


def fixed_point_check(inst: PipelineInstance) -> dict:
    """Validate iota, Gamma on B', and the form-vector contracts."""
    p = inst.p
    problems = []
    if sorted(inst.gamma_B) != sorted(inst.Bp) or sorted(inst.gamma_B.values()) != sorted(inst.Bp):
        problems.append({"kind": "gamma-not-permutation"})
    elif any(inst.gam(b, p) != b for b in inst.Bp):
        problems.append({"kind": "gamma-order"})
    fixed = [b for b in inst.Bp if inst.gamma_B.get(b) == b]
    image = [inst.iota.get(a) for a in inst.B]
    if len(set(image)) != len(image):
        problems.append({"kind": "iota-not-injective"})
    for a in inst.B:
        if inst.iota.get(a) not in fixed:
            problems.append({"kind": "iota-not-fixed", "element": a})
    for b in fixed:
        if b not in image:
            problems.append({"kind": "fixed-point-missed", "element": b})
    for vec, name in ((inst.fp, "f'"), (inst.fcp, "fc'")):
        for b in inst.Bp:
            if vec[b] % inst.modulus != vec[inst.gam(b)] % inst.modulus:
                problems.append({"kind": f"{name}-not-invariant", "element": b})
    for a in inst.B:
        if a in inst.iota:
            if (inst.fp[inst.iota[a]] - inst.f[a]) % p:
                problems.append({"kind": "f'(iota(a)) != f(a) mod p", "element": a})
            if (inst.fcp[inst.iota[a]] - inst.fc[a]) % p:
                problems.append({"kind": "fc'(iota(a)) != fc(a) mod p", "element": a})
    free = []
    seen = set(fixed)
    for b in inst.Bp:
        if b not in seen:
            orb = [inst.gam(b, s) for s in range(p)]
            seen.update(orb)
            free.append(orb)
    return {"pass": not problems, "fixed": fixed, "free_orbits": free,
            "iota_image": image, "problems": problems}


def assemble_measure(inst: PipelineInstance, side: str = "G") -> GroupRingElem:
    """``mu(g) = Omega^(1 or p) sum_{a,b} E_g(a,b) f(b) fc(a)`` as a group-ring element."""
    mod = inst.modulus
    if side == "G":
        els, T, Bs, f, fc, w = inst.pair.elements, inst.E, inst.B, inst.f, inst.fc, inst.omega
    else:
        els, T, Bs, f, fc = inst.pair.elements_p, inst.Ep, inst.Bp, inst.fp, inst.fcp
        w = pow(inst.omega, inst.p, mod)
    out = []
    for g in els:
        tab = T.get(tuple(g))
        if tab is None:
            raise InputError(f"oracle gap: no table for group element {list(g)}")
        s = 0
        for a in Bs:
            for b in Bs:
                if (a, b) not in tab:
                    raise InputError(f"oracle gap at {list(g)}, pair {(a, b)}")
                s += tab[(a, b)] * f[b] * fc[a]
        out.append(s * w)
    return GroupRingElem(inst.pair, side, mod, tuple(out))


def pairing(inst: PipelineInstance, side: str = "G") -> int:
    if side == "G":
        return sum(inst.f[b] * inst.fc[b] for b in inst.B) % inst.modulus
    return sum(inst.fp[b] * inst.fcp[b] for b in inst.Bp) % inst.modulus


def _orbit_E(inst, orb, a, b):
    """``E'(a', b', 1_O) = sum_{y in O} E'_y(a', b')``."""
    els = inst.pair.elements_p
    return sum(inst.Ep[tuple(els[i])][(a, b)] for i in orb)


def _base_E(inst, orb, a, b):
    """``E(a, b, 1_O o ver)``."""
    s_orb = set(orb)
    vm = inst.pair.ver_map
    return sum(inst.E[tuple(g)][(a, b)] for i, g in enumerate(inst.pair.elements) if vm[i] in s_orb)


def torsion_check(inst: PipelineInstance) -> dict:
    """Double-sum congruence for every Gamma-orbit indicator epsilon, mod p.

    Pairs in ``B' x B'`` are split into Gamma-orbits (diagonal action).
    Free orbits must sum to 0 mod p; fixed pairs ``(iota a, iota b)`` must
    match the base term.  The first failing item is the witness.
    """
    p = inst.p
    fpc = fixed_point_check(inst)
    report = {"name": inst.name, "fixed_point_check": fpc, "orbits": [], "witness": None}
    if not fpc["pass"]:
        prob = fpc["problems"][0]
        report.update({"pass": False, "witness": {"stage": "fixed-point", **prob}})
        return report
    inv_iota = {v: k for k, v in inst.iota.items()}
    pairs_seen = set()
    pair_orbits = []
    for a in inst.Bp:
        for b in inst.Bp:
            if (a, b) in pairs_seen:
                continue
            orb = [(inst.gam(a, s), inst.gam(b, s)) for s in range(p)]
            orb = list(dict.fromkeys(orb))
            pairs_seen.update(orb)
            pair_orbits.append(orb)
    omega_p = pow(inst.omega, p, inst.modulus)
    # the period bookkeeping: (u^Phi / u)^p == u^Phi / u mod p with Phi the p-power map
    u = inst.omega % inst.modulus
    ratio = omega_p * pow(u, -1, inst.modulus) % inst.modulus
    omega_ok = (pow(ratio, p, inst.modulus) - ratio) % p == 0
    ok = omega_ok
    witness = None
    for orbO in inst.pair.orbits:
        entry = {"orbit": [list(inst.pair.elements_p[i]) for i in orbO], "free_pairs": 0,
                 "fixed_pairs": 0, "ok": True}
        lhs = 0
        for porb in pair_orbits:
            terms = [_orbit_E(inst, orbO, a, b) * inst.fp[b] * inst.fcp[a] for a, b in porb]
            contrib = sum(terms) * omega_p
            lhs += contrib
            if len(porb) > 1:
                entry["free_pairs"] += 1
                if contrib % p:
                    entry["ok"] = False
                    witness = witness or {"stage": "free-orbit", "orbit": entry["orbit"],
                                          "pair": list(porb[0])}
            else:
                a, b = porb[0]
                entry["fixed_pairs"] += 1
                base = _base_E(inst, orbO, inv_iota[a], inv_iota[b]) * inst.f[inv_iota[b]] * inst.fc[inv_iota[a]]
                if (contrib - base * inst.omega) % p:
                    entry["ok"] = False
                    witness = witness or {"stage": "fixed-pair", "orbit": entry["orbit"],
                                          "pair": [inv_iota[a], inv_iota[b]]}
        rhs = sum(_base_E(inst, orbO, a, b) * inst.f[b] * inst.fc[a] for a in inst.B for b in inst.B) * inst.omega
        entry["lhs"] = lhs % p
        entry["rhs"] = rhs % p
        entry["ok"] = entry["ok"] and (lhs - rhs) % p == 0
        ok &= entry["ok"]
        report["orbits"].append(entry)
    mu, mup = assemble_measure(inst, "G"), assemble_measure(inst, "Gp")
    report["omega_identity"] = omega_ok
    report["pairing"] = {"base": pairing(inst, "G"), "ext": pairing(inst, "Gp"),
                         "unit": inst.pairing_unit}
    if mup.is_invariant():
        crit = epsilon_criterion(mu.reduce(p), mup.reduce(p))
        memb = trace_ideal_test((ver_apply(mu) - mup).reduce(p), 1)["member"]
        report["epsilon_criterion"] = crit["pass"]
        report["trace_membership"] = memb
        report["cross_check"] = crit["pass"] == memb == ok
    else:
        report["epsilon_criterion"] = None
        report["cross_check"] = False
        ok = False
        witness = witness or {"stage": "mu'-not-invariant"}
    report["pass"] = bool(ok)
    report["witness"] = witness
    return report


def induced_measures(inst: PipelineInstance) -> tuple:
    p = inst.p
    return assemble_measure(inst, "G").reduce(p), assemble_measure(inst, "Gp").reduce(p)


# ---------------------------------------------------------------------------
# synthetic instances


def synthetic_instance(seed: int = 0, m: int = 2, n_base: int = 2, n_free: int = 1,
                       pair: GammaGroupPair | None = None) -> PipelineInstance:
    """A compliant instance on the diagonal model.

    ``B' = iota(B)`` plus ``n_free`` free Gamma-orbits.  ``E'`` is built to be
    invariant under simultaneous Gamma on ``(y, a', b')`` and to reduce to
    the base values on fixed pairs, with the p-power map as Frobenius.
    """
    rng = random.Random(seed)
    pair = pair or diagonal_model(3)
    p = pair.p
    mod = p**m
    B = list(range(n_base))
    Bp = list(range(n_base + p * n_free))
    gamma_B = {b: b for b in range(n_base)}
    for k in range(n_free):
        start = n_base + p * k
        for s in range(p):
            gamma_B[start + s] = start + (s + 1) % p
    iota = {a: a for a in B}

    def unit():
        return rng.choice([x for x in range(1, mod) if x % p])
    f = {a: unit() for a in B}
    fc = {a: unit() for a in B}
    fp, fcp = {}, {}
    for a in B:
        fp[a] = (f[a] + p * rng.randrange(p ** (m - 1))) % mod
        fcp[a] = (fc[a] + p * rng.randrange(p ** (m - 1))) % mod
    for k in range(n_free):
        v, w = unit(), unit()
        for s in range(p):
            fp[n_base + p * k + s] = v
            fcp[n_base + p * k + s] = w
    E = {tuple(g): {(a, b): rng.randrange(mod) for a in B for b in B} for g in pair.elements}
    els = pair.elements_p
    Ep = {tuple(y): {} for y in els}
    ver_inv = {}
    for i, g in enumerate(pair.elements):
        ver_inv.setdefault(int(pair.ver_map[i]), []).append(tuple(g))

    def gam_b(b, s):
        for _ in range(s % p):
            b = gamma_B[b]
        return b
    for yi, y in enumerate(els):
        for a in Bp:
            for b in Bp:
                if (a, b) in Ep[tuple(y)]:
                    continue
                fixed_pair = gamma_B[a] == a and gamma_B[b] == b
                if fixed_pair and pair.gamma(tuple(y)) == tuple(y):
                    # Frobenius on the base datum: sum of E_g over ver^-1(y), raised to p
                    base = sum(E[g][(a, b)] for g in ver_inv.get(yi, []))
                    v = pow(base, p, mod) if ver_inv.get(yi) else p * rng.randrange(p ** (m - 1))
                else:
                    v = rng.randrange(mod)
                z, aa, bb = tuple(y), a, b
                for s in range(p):
                    Ep[z][(aa, bb)] = v
                    z, aa, bb = pair.gamma(z), gam_b(aa, 1), gam_b(bb, 1)
    omega = unit()
    return PipelineInstance(pair, m, B, Bp, gamma_B, iota, f, fc, fp, fcp, E, Ep, omega,
                            True, name=f"compliant-{seed}")


def perturb_fixed_pair(inst: PipelineInstance, a=0, b=0, y=None) -> PipelineInstance:
    """Shift ``E'_y(iota a, iota b)`` by 1 at a Gamma-fixed y."""
    new = PipelineInstance.from_json(inst.to_json())
    y = tuple(y) if y is not None else tuple(new.pair.elements_p[new.pair.fixed[0]])
    new.Ep[y][(new.iota[a], new.iota[b])] += 1
    new.name = "perturbed-fixed-pair"
    new.witness = {"stage": "fixed-pair", "pair": [a, b]}
    return new


def perturb_free_orbit(inst: PipelineInstance, compensate: bool = False) -> PipelineInstance:
    """Shift ``E'`` at a pair in a free orbit; optionally undo it on the Gamma-image.

    Compensation is taken on the same y so that ``mu'`` stays invariant and
    only the pair-orbit sum is probed.
    """
    new = PipelineInstance.from_json(inst.to_json())
    fc = fixed_point_check(new)
    orb = fc["free_orbits"][0]
    y = tuple(new.pair.elements_p[new.pair.fixed[0]])
    a, b = orb[0], new.B[0]
    new.Ep[y][(a, new.iota[b])] += 1
    if compensate:
        new.Ep[y][(new.gam(a), new.iota[b])] -= 1
        new.name = "compensated-free-orbit"
        new.witness = None
    else:
        new.name = "perturbed-free-orbit"
        new.witness = {"stage": "free-orbit", "pair": [a, new.iota[b]]}
    return new


def perturb_form(inst: PipelineInstance, a=0) -> PipelineInstance:
    """Break ``f'(iota a) == f(a) mod p``."""
    new = PipelineInstance.from_json(inst.to_json())
    new.fp[new.iota[a]] += 1
    new.name = "perturbed-form"
    new.witness = {"stage": "fixed-point", "element": a}
    return new


def shipped_fixtures() -> dict:
    """The four shipped instances: one compliant, three perturbed."""
    out = {}
    for name in ("compliant", "perturbed-fixed-pair", "perturbed-free-orbit", "perturbed-form"):
        path = FIXTURE_DIR / f"{name}.json"
        if not path.exists():
            raise InputError(f"missing fixture {path}")
        out[name] = load_instance(path)
    return out


def regenerate_fixtures(directory: Path = FIXTURE_DIR) -> list:
    directory.mkdir(parents=True, exist_ok=True)
    base = synthetic_instance(seed=7)
    base.name = "compliant"
    items = [base, perturb_fixed_pair(base), perturb_free_orbit(base), perturb_form(base)]
    paths = []
    for inst in items:
        path = directory / f"{inst.name}.json"
        path.write_text(json.dumps(inst.to_json(), sort_keys=True, indent=1) + "\n")
        paths.append(path)
    return paths


def witness_matches(report: dict, documented: dict | None) -> bool:
    if documented is None:
        return report["witness"] is None
    w = report["witness"] or {}
    return all(w.get(k) == v for k, v in documented.items())
