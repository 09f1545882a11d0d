"""Command-line entry point: build the cached group data and run verifications."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import gmpy2
import numpy as np

from . import gram, hsgraph, nortsak, permcore, shapes

SCHEMA = "majorana-u35/report/1"
CACHE_SCHEMA = "majorana-u35/cache/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CACHE = 0, 1, 2, 3

TARGETS = ("norton-sakuma", "shape", "gram525", "gram-full", "a7", "lemma15", "lemma16", "lemma17",
           "resurrection", "all")

T_RHO_COUNTS = [3, 18, 36, 108, 36, 108, 216]
RHO_SIGMA_COUNTS = [1, 12, 36, 144, 18, 72, 54, 9, 108, 216, 216, 216, 216, 432]
SUBORBITS = sorted([(1, 1), (20, 2), (120, 3), (120, 4), (120, 6), (48, 5), (48, 5), (48, 5)])
SHAPE = {2: "2A", 3: "3A", 4: "4B", 5: "5A", 6: "6A"}


def ratio(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def jsonable(obj):
    if isinstance(obj, Fraction):
        return ratio(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class Check:
    criterion: int
    name: str
    passed: bool
    witness: dict = field(default_factory=dict)

    def to_json(self):
        return {"criterion": self.criterion, "name": self.name, "passed": bool(self.passed),
                "witness": jsonable(self.witness)}


# -- cache ---------------------------------------------------------------------

def _sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def build_cache(cache_dir: Path) -> tuple[dict, bool]:
    """Build (or validate) the cache; returns the manifest and whether work was done."""
    cache_dir.mkdir(parents=True, exist_ok=True)
    mpath = cache_dir / "manifest.json"
    if mpath.exists():
        manifest = json.loads(mpath.read_text())
        validate_cache(cache_dir, manifest)
        return manifest, False
    g, aut, G = hsgraph.build_groups()
    files = {
        "aut.grp": permcore.write_cache(cache_dir / "aut.grp", aut),
        "u35.grp": permcore.write_cache(cache_dir / "u35.grp", G),
    }
    reg = shapes.AxisRegistry(G)
    labels = gram.pair_labels(reg)
    lpath = cache_dir / "labels.npz"
    with open(lpath, "wb") as fh:
        np.savez(fh, product_orders=labels.product_orders, t_rho=labels.t_rho,
                 rho_sigma=labels.rho_sigma, conjugators=labels.conjugators, base=np.array(labels.base))
    files["labels.npz"] = _sha(lpath)
    tab = shapes.suborbit_table(G, reg)
    spath = cache_dir / "suborbits.json"
    spath.write_text(json.dumps({"base": tab.base, "suborbits": [[s.size, s.product_order, s.representative]
                                                                  for s in tab.suborbits]}, sort_keys=True))
    files["suborbits.json"] = _sha(spath)
    gpath = cache_dir / "hs_graph.json"
    gpath.write_text(g.to_json())
    files["hs_graph.json"] = _sha(gpath)
    manifest = {"schema": CACHE_SCHEMA, "files": files, "aut_order": aut.order, "group_order": G.order,
                "involutions": reg.n_involutions, "order3_subgroups": reg.n_sub3}
    mpath.write_text(json.dumps(manifest, sort_keys=True, indent=1))
    return manifest, True


def validate_cache(cache_dir: Path, manifest: dict):
    if manifest.get("schema") != CACHE_SCHEMA:
        raise permcore.CacheError("unrecognised cache manifest")
    for name, digest in manifest["files"].items():
        p = cache_dir / name
        if not p.exists():
            raise permcore.CacheError(f"missing cache file {name}")
        if _sha(p) != digest:
            raise permcore.CacheError(f"checksum mismatch for {name}")


class Session:
    """Lazily loaded group data for one cache directory."""

    def __init__(self, cache_dir: Path | None, primes=gram.DEFAULT_PRIMES, exact=False, seed=0):
        self.cache_dir = cache_dir
        self.primes = tuple(primes)
        self.exact = exact
        self.seed = seed
        self._memo: dict = {}
        self.manifest = None
        if cache_dir is not None:
            mpath = cache_dir / "manifest.json"
            if not mpath.exists():
                raise permcore.CacheError(f"no cache at {cache_dir}; run 'build' first")
            self.manifest = json.loads(mpath.read_text())
            validate_cache(cache_dir, self.manifest)

    def _get(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    @property
    def aut(self):
        return self._get("aut", lambda: permcore.read_cache(self.cache_dir / "aut.grp",
                                                            sha256=self.manifest["files"]["aut.grp"]))

    @property
    def G(self):
        return self._get("G", lambda: permcore.read_cache(self.cache_dir / "u35.grp",
                                                          sha256=self.manifest["files"]["u35.grp"]))

    @property
    def reg(self):
        return self._get("reg", lambda: shapes.AxisRegistry(self.G))

    @property
    def graph(self):
        return self._get("graph", hsgraph.build_hs_graph)

    @property
    def shape(self):
        return self._get("shape", lambda: shapes.shape_of_group(self.G, self.reg))

    @property
    def labels(self):
        def load():
            with np.load(self.cache_dir / "labels.npz") as z:
                return gram.PairLabels(int(z["base"]), z["product_orders"], z["t_rho"], z["rho_sigma"],
                                       z["conjugators"])
        return self._get("labels", load)

    @property
    def M(self):
        return self._get("M", lambda: gram.assemble_gram(self.G, self.shape, True, self.reg, self.labels))

    @property
    def rels(self):
        return self._get("rels", lambda: gram.pasechnik_vectors(self.G, self.reg))

    @property
    def orbits(self):
        return self._get("od", lambda: gram.gamma_minus_orbits(0, self.reg, self.labels))


# -- checks --------------------------------------------------------------------

def check_graph(s: Session) -> list[Check]:
    g = s.graph
    cert = hsgraph.verify_srg(g, 50, 7, 0, 1)
    ok = cert.passed and g.edge_count() == 175 and g.girth() == 5
    return [Check(1, "hs-graph", ok, {"edges": g.edge_count(), "girth": g.girth(), "srg": cert.passed})]


def check_group(s: Session) -> list[Check]:
    G, reg = s.G, s.reg
    classes = shapes.involution_classes(reg)
    w = {"aut_order": s.aut.order, "group_order": G.order, "involutions": reg.n_involutions,
         "involution_classes": classes, "order3_subgroups": reg.n_sub3}
    ok = (s.aut.order == 252000 and G.order == 126000 and reg.n_involutions == 525 and classes == 1
          and reg.n_sub3 == 1750)
    return [Check(2, "group", ok, w)]


def check_suborbits(s: Session) -> list[Check]:
    tab = shapes.suborbit_table(s.G, s.reg)
    d6 = shapes.dihedral_count(s.G, 3, s.reg)
    d6b = shapes.d6_count_via_sub3(s.G, s.reg)
    ok = sorted(tab.pairs()) == SUBORBITS and d6 == d6b == 10500
    return [Check(3, "suborbits", ok, {"suborbits": tab.pairs(), "d6": d6, "d6_via_order3": d6b})]


def check_petersen(s: Session) -> list[Check]:
    G, reg = s.G, s.reg
    bad = [i for i in range(reg.n_involutions)
           if not hsgraph.verify_srg(hsgraph.fixed_subgraph(reg.involution(i), s.graph), 10, 3, 0, 1).passed]
    C = permcore.centralizer(reg.involution(0), G)
    inv_in_c = sum(1 for h in C if h.order() == 2)
    ok = not bad and C.order == 240 and inv_in_c == 21
    return [Check(4, "petersen", ok, {"failures": bad, "centraliser_order": C.order,
                                      "involutions_in_centraliser": inv_in_c})]


def check_norton_sakuma(s: Session) -> list[Check]:
    reports = {t: nortsak.verify_algebra(t, seed=s.seed) for t in nortsak.TYPES}
    w = {t: {"passed": r.passed, "dim": r.dim, "eigen_dims": r.eigen_dims["a0"]} for t, r in reports.items()}
    return [Check(5, "norton-sakuma", all(r.passed for r in reports.values()), w)]


def check_shape(s: Session) -> list[Check]:
    try:
        shape = s.shape
    except shapes.ShapeError as exc:
        return [Check(6, "shape", False, {"error": str(exc)})]
    return [Check(6, "shape", shape.types == SHAPE, {"shape": shape.types})]


def check_censuses(s: Session) -> list[Check]:
    rng = np.random.default_rng(s.seed)
    bases = sorted(int(b) for b in rng.choice(s.reg.n_sub3, size=5, replace=False))
    tr = {b: shapes.t_rho_census(s.reg, b).counts() for b in bases}
    rs = {b: shapes.rho_sigma_census(s.reg, b).counts() for b in bases}
    ok = all(c == T_RHO_COUNTS for c in tr.values()) and all(c == RHO_SIGMA_COUNTS for c in rs.values())
    return [Check(7, "pair-censuses", ok, {"bases": bases, "t_rho": tr, "rho_sigma": rs})]


def check_gram525(s: Session) -> list[Check]:
    M = gram.assemble_gram(s.G, s.shape, False, s.reg, s.labels)
    cert = gram.certified_rank(M, s.primes)
    pd, exact_rank = gram.positive_definite(M)
    ok = all(r == 525 for r in cert.ranks.values()) and exact_rank == 525 and pd
    return [Check(8, "gram525", ok, {"ranks_mod_p": cert.ranks, "exact_rank": exact_rank,
                                     "positive_definite": pd})]


def check_pasechnik(s: Session) -> list[Check]:
    M, rels = s.M, s.rels
    norms = {gram.gram_norm(M, r.vector) for r in rels}
    vanish = gram.relations_vanish(M, rels)
    ok = norms == {Fraction(0)} and vanish and len(rels) > 0
    return [Check(9, "pasechnik", ok, {"relations": len(rels), "norms": sorted(norms),
                                       "pair_zero_with_all_columns": vanish})]


def check_solve_x(s: Session) -> list[Check]:
    try:
        x = gram.solve_x(s.M, s.rels)
    except gram.InconsistentSystem as exc:
        return [Check(10, "solve-x", False, {"error": str(exc)})]
    return [Check(10, "solve-x", x == gram.X_VALUE, {"x": x})]


def check_resurrection(s: Session) -> list[Check]:
    od = s.orbits
    roots, rows = [], []
    for orb in od.orbits:
        sigma = int(orb[0])
        t, count = gram.find_s3_s4_involution(s.reg.sub3_generator(od.base), s.reg.sub3_generator(sigma), s.reg)
        res = gram.resurrection_inner_check(od.base, sigma, t, s.M, s.reg)
        roots.append(res.x)
        rows.append({"sigma": sigma, "t": t, "x": res.x, "x_coefficient": res.coefficient})
    ok = len(roots) == 6 and all(r == gram.X_VALUE for r in roots)
    return [Check(10, "resurrection", ok, {"orbits": rows})]


def check_dimension(s: Session) -> list[Check]:
    cert = gram.certified_rank(s.M, s.primes, exact=s.exact)
    ok = all(r == 798 for r in cert.ranks.values()) and cert.consensus == 798
    return [Check(11, "dimension", ok, {"ranks_mod_p": cert.ranks, "exact": cert.exact,
                                        "kernel": s.M.n - (cert.consensus or 0)})]


def check_v_split(s: Session) -> list[Check]:
    vd = gram.v_decomposition(s.orbits, s.M, s.primes)
    plus_ok = all(r == 796 for r in vd.v_plus_rank.values())
    ok = plus_ok and vd.orbit_pairing is not None and vd.complement_rank == 2
    w = {"v_plus_ranks": vd.v_plus_rank, "orbit_pairing_vector": vd.orbit_pairing_vector,
         "orbit_pairing_functional": vd.orbit_pairing_functional, "pairings_tried": vd.pairings_tried,
         "orbit_sum_complement_dim": len(vd.orbit_sum_complement), "complement_rank": vd.complement_rank,
         "level_set_sizes": [len(x) for x in vd.level_sets], "level_pairing": vd.level_pairing,
         "level_combinations": vd.level_combinations, "level_combination_rank": vd.level_rank,
         "orbit_level_meets": vd.meets}
    return [Check(12, "v-plus-minus", ok, w)]


def check_gamma_minus(s: Session) -> list[Check]:
    od = s.orbits
    sizes = [int(o.size) for o in od.orbits]
    ok = (od.gamma_minus.size == 432 and od.normalizer_order == 72 and sizes == [72] * 6 and od.regular
          and od.common_normalising == 0)
    return [Check(13, "gamma-minus", ok, {"size": od.gamma_minus.size, "normaliser_order": od.normalizer_order,
                                          "orbit_sizes": sizes, "common_normalising": od.common_normalising})]


def check_linking_involution(s: Session) -> list[Check]:
    od = s.orbits
    found = {}
    for orb in od.orbits:
        sigma = int(orb[0])
        try:
            t, count = gram.find_s3_s4_involution(s.reg.sub3_generator(od.base), s.reg.sub3_generator(sigma),
                                                  s.reg)
            found[sigma] = {"t": t, "count": count}
        except gram.NotFound:
            found[sigma] = None
    return [Check(14, "s3-s4-involution", all(v is not None for v in found.values()), {"representatives": found})]


def check_a7(s: Session) -> list[Check]:
    rep = gram.a7_restriction_rank(s.G, s.M, s.reg, s.rels)
    ok = (rep.rank == 196 and rep.kernel == 49 and rep.majorana_rank == 105 and rep.pasechnik_span == 35
          and rep.pasechnik_in_kernel and rep.x_free)
    return [Check(15, "a7-restriction", ok, {
        "involutions": rep.involutions.size, "order3_double": rep.sub3_double.size,
        "order3_single": rep.sub3_single.size, "rank": rep.rank, "kernel": rep.kernel,
        "majorana_rank": rep.majorana_rank, "rank_with_3cycle_axes": rep.rank_with_3cycles,
        "internal_pasechnik": rep.internal_pasechnik, "pasechnik_span": rep.pasechnik_span,
        "pasechnik_in_kernel": rep.pasechnik_in_kernel})]


SUITES = {
    "norton-sakuma": [check_norton_sakuma],
    "shape": [check_suborbits, check_petersen, check_shape, check_censuses],
    "gram525": [check_gram525],
    "gram-full": [check_pasechnik, check_dimension],
    "a7": [check_a7],
    "lemma15": [check_gamma_minus],
    "lemma16": [check_linking_involution],
    "lemma17": [check_solve_x, check_v_split],
    "resurrection": [check_resurrection],
}
ALL = [check_graph, check_group] + [c for t in TARGETS[:-1] for c in SUITES[t]]


def run_checks(session: Session, target: str, timing: bool = False) -> tuple[list[Check], dict]:
    suite = ALL if target == "all" else SUITES[target]
    out, times = [], {}
    for fn in suite:
        t0 = time.perf_counter()
        out.extend(fn(session))
        times[fn.__name__] = round(time.perf_counter() - t0, 3)
    return out, times


# -- reports -------------------------------------------------------------------

def make_report(command: str, config: dict, checks: list[Check], extra: dict | None = None,
                timing: dict | None = None) -> dict:
    body = {"schema": SCHEMA, "command": command, "config": jsonable(config),
            "config_hash": hashlib.sha256(json.dumps(jsonable(config), sort_keys=True).encode()).hexdigest(),
            "checks": [c.to_json() for c in checks], "passed": all(c.passed for c in checks)}
    if extra:
        body.update(jsonable(extra))
    body["manifest_hash"] = hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()
    if timing is not None:
        body["timing"] = timing
    return body


def _emit(report: dict, json_path: str | None):
    text = json.dumps(report, sort_keys=True, indent=1)
    if json_path:
        Path(json_path).write_text(text + "\n")
    for c in report["checks"]:
        print(f"[{'PASS' if c['passed'] else 'FAIL'}] criterion {c['criterion']:>2} {c['name']}")
    print("overall:", "PASS" if report["passed"] else "FAIL")


def _primes(text: str) -> tuple[int, ...]:
    try:
        ps = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("primes must be a comma-separated list of integers")
    for p in ps:
        if p < 7 or not gmpy2.is_prime(p):
            raise argparse.ArgumentTypeError(f"{p} is not a usable prime")
    return ps


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="majorana-u35",
                                 description="Verify the Majorana representation of U3(5).")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--cache", default="cache", help="cache directory (default: ./cache)")
        p.add_argument("--json", help="write the JSON report here")
        p.add_argument("--timing", action="store_true", help="add wall-clock timings to the report")

    b = sub.add_parser("build", help="build and certify the group data cache")
    common(b)
    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("target", choices=TARGETS)
    common(v)
    v.add_argument("--primes", type=_primes, default=gram.DEFAULT_PRIMES,
                   help="comma-separated primes for modular ranks")
    v.add_argument("--exact", action="store_true", help="also compute exact ranks (slow)")
    v.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    e = sub.add_parser("export", help="export the 2275 x 2275 Gram matrix as 'i j value' lines")
    e.add_argument("--cache", default="cache")
    e.add_argument("--out", required=True)
    e.add_argument("--x", default="4/81", help="value of x, or 'symbolic' to export the indicator separately")
    return ap


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    cache = Path(args.cache)
    try:
        if args.command == "build":
            t0 = time.perf_counter()
            manifest, built = build_cache(cache)
            s = Session(cache)
            checks = check_graph(s) + check_group(s)
            timing = {"build": round(time.perf_counter() - t0, 3)} if args.timing else None
            report = make_report("build", {"cache": str(cache)}, checks, {"cache_manifest": manifest}, timing)
            _emit(report, args.json)
            return EXIT_OK if report["passed"] else EXIT_FAIL
        if args.command == "export":
            s = Session(cache)
            x = None if args.x == "symbolic" else Fraction(args.x)
            info = gram.export_matrix(s.M, Path(args.out), x)
            print(json.dumps(jsonable(info), sort_keys=True))
            return EXIT_OK
        needs_cache = args.target != "norton-sakuma"
        s = Session(cache if needs_cache else None, args.primes, args.exact, args.seed)
        checks, times = run_checks(s, args.target)
        config = {"target": args.target, "primes": list(args.primes), "exact": args.exact, "seed": args.seed,
                  "cache_manifest": s.manifest["files"] if s.manifest else None}
        report = make_report("verify", config, checks, None, times if args.timing else None)
        _emit(report, args.json)
        return EXIT_OK if report["passed"] else EXIT_FAIL
    except (permcore.CacheError, OSError) as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return EXIT_CACHE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
