"""Command-line front end: solve, check, bounds, uniset, repfam, gen, bench.

Exit codes: 0 accept/valid, 1 reject/invalid, 2 usage error, 3 budget
exceeded.  Randomized behavior always takes an explicit --seed; omitting it
for a randomized mode is an error.  FPTMIX_BUDGET overrides enumeration caps
globally.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import bounds as bounds_mod
from . import kiob as kiob_mod
from . import kpath as kpath_mod
from . import matching as matching_mod
from . import oracles
from . import p2pack as p2_mod
from . import repsets
from . import unisets
from . import wsp as wsp_mod
from .core import (
    BudgetExceededError,
    Digraph,
    FptMixError,
    Graph,
    InstanceError,
    OrderedUniverse,
    ParameterError,
    WeightedSetFamily,
    parse_instance,
    serialize_instance,
)

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _default_budget() -> int:
    value = os.environ.get("FPTMIX_BUDGET")
    return int(value) if value else 200_000


def _fraction(text: str) -> Fraction:
    return Fraction(text)


def _load(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _report(args, verdict: str, witness=None, timings=None, trace=None, seed=None) -> dict:
    report = {
        "command": " ".join(args),
        "verdict": verdict,
        "accept": verdict in ("accept", "valid"),
        "witness": witness,
        "timings": timings or {},
        "peakFamilySize": (trace or {}).get("peak_family"),
        "seed": seed,
    }
    print(json.dumps(report, sort_keys=True))
    return report


def _verdict_exit(verdict: str) -> int:
    return {"accept": EXIT_ACCEPT, "valid": EXIT_ACCEPT,
            "reject": EXIT_REJECT, "invalid": EXIT_REJECT,
            "budget-exceeded": EXIT_BUDGET}[verdict]


# ------------------------------------------------------------------ solve

def _cmd_solve(args, argv) -> int:
    trace: dict = {}
    timings: dict = {}
    t0 = time.perf_counter()
    doc = _load(args.instance)
    if args.problem == "kcwp":
        inst = kpath_mod.kcwp_instance_from_document(doc)
        timings["parse"] = time.perf_counter() - t0
        t1 = time.perf_counter()
        res = kpath_mod.solve_kcwp(inst, _tradeoffs(args), trace=trace)
        timings["solve"] = time.perf_counter() - t1
        witness = None
        if res.accept:
            kpath_mod.verify_kcwp_witness(inst, res)
            witness = {"pieces": [list(p) for p in res.pieces], "weight": res.weight,
                       "chained": res.chained}
        _report(argv, "accept" if res.accept else "reject", witness, timings, trace)
        return EXIT_ACCEPT if res.accept else EXIT_REJECT

    parsed = parse_instance(doc)
    k = args.k if args.k is not None else parsed.k
    if k is None:
        raise ParameterError("k is required (flag or instance field)")
    W = args.W if args.W is not None else parsed.W
    timings["parse"] = time.perf_counter() - t0
    t1 = time.perf_counter()

    if args.problem == "kiob":
        res = kiob_mod.solve_kiob(parsed.value, k, args.c)
        timings["solve"] = time.perf_counter() - t1
        witness = {"root": res.root, "branching": [list(a) for a in res.branching]} \
            if res.accept else None
        _report(argv, "accept" if res.accept else "reject", witness, timings, trace)
        return EXIT_ACCEPT if res.accept else EXIT_REJECT

    if args.problem == "kpath":
        if W is None:
            raise ParameterError("W is required for weighted problems")
        res = kpath_mod.path_alg(parsed.value, W, k, args.inv_eps, args.delta,
                                 args.gamma, _tradeoffs(args), args.budget)
        timings["solve"] = time.perf_counter() - t1
        witness = {"path": list(res.path), "weight": res.weight} \
            if res.status == "accept" else None
        _report(argv, res.status, witness, timings, trace)
        return _verdict_exit(res.status)

    if args.problem == "wsp":
        if W is None:
            raise ParameterError("W is required for weighted problems")
        fam: WeightedSetFamily = parsed.value
        res = wsp_mod.wsp_alg(fam.universe, fam, W, k, args.inv_eps, args.c, args.budget,
                              trace=trace)
        timings["solve"] = time.perf_counter() - t1
        witness = None
        if res.status == "accept":
            labels = fam.universe.elements
            witness = {"sets": [[labels[e] for e in fam.members(p)] for p in res.packing],
                       "weight": res.weight}
        _report(argv, res.status, witness, timings, trace)
        return _verdict_exit(res.status)

    if args.problem == "p2p":
        res = p2_mod.solve_p2packing(parsed.value, k, args.inv_eps, args.c, args.budget)
        timings["solve"] = time.perf_counter() - t1
        witness = {"paths": [list(p) for p in res.packing.paths]} \
            if res.status == "accept" else None
        _report(argv, res.status, witness, timings, trace)
        return _verdict_exit(res.status)

    raise ParameterError(f"unknown problem {args.problem!r}")


def _tradeoffs(args) -> kpath_mod.KcwpTradeoffs:
    return kpath_mod.KcwpTradeoffs(args.c1, args.c2, args.cl, args.cr)


# ------------------------------------------------------------------ check

def _cmd_check(args, argv) -> int:
    doc = _load(args.instance)
    parsed = parse_instance(doc)
    k = args.k if args.k is not None else parsed.k
    W = args.W if args.W is not None else parsed.W
    budget = oracles.OracleBudget(args.budget)
    if args.problem == "kpath":
        opt = oracles.oracle_kpath(parsed.value, k, budget)
        verdict = "accept" if opt is not None and (W is None or opt <= W) else "reject"
        _report(argv, verdict, {"optimum": opt})
    elif args.problem == "kiob":
        ok = oracles.oracle_kiob(parsed.value, k, budget)
        verdict = "accept" if ok else "reject"
        _report(argv, verdict)
    elif args.problem == "wsp":
        opt = oracles.oracle_wsp(parsed.value, k, budget)
        verdict = "accept" if opt is not None and (W is None or opt >= W) else "reject"
        _report(argv, verdict, {"optimum": opt})
    elif args.problem == "p2p":
        ok = oracles.oracle_p2p(parsed.value, k, budget)
        verdict = "accept" if ok else "reject"
        _report(argv, verdict)
    else:
        raise ParameterError(f"unknown problem {args.problem!r}")
    return _verdict_exit(verdict)


# ------------------------------------------------------------------ bounds

def _print_table(rows, header):
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    for r in [header] + rows:
        print("  ".join(str(x).ljust(w) for x, w in zip(r, widths)))


def _cmd_bounds(args, argv) -> int:
    name = args.table
    if name == "table1":
        rows = []
        for c, ref in bounds_mod.REFERENCE_TABLE1.items():
            r = bounds_mod.alpha_beta_table([c])[0]
            rows.append([c, f"{r['alpha']:.5f}", f"{r['branch1']:.4f}",
                         f"{r['threshold']:.5f}", f"{r['beta']:.5f}", f"{r['branch2']:.5f}",
                         f"{abs(r['alpha'] - ref[0]):.1e}", f"{abs(r['beta'] - ref[3]):.1e}"])
        _print_table(rows, ["c", "alpha", "value1", "(3-a)/(3+a)", "beta", "value2",
                            "d(alpha)", "d(beta)"])
    elif name == "table2":
        rows = []
        for c, ref in bounds_mod.REFERENCE_TABLE2.items():
            got = bounds_mod.kiob_det_bound(c)["base"]
            rows.append([c, f"{got:.5f}", ref, f"{abs(got - ref):.1e}"])
        _print_table(rows, ["c", "base", "reference", "delta"])
    elif name == "table3":
        rows = []
        for (c, gamma), ref in bounds_mod.REFERENCE_TABLE3.items():
            got = bounds_mod.kiob_rand_bound(c, gamma)["base"]
            rows.append([c, gamma, f"{got:.9f}", ref, f"{abs(got - ref):.1e}"])
        _print_table(rows, ["c", "gamma", "base", "reference", "delta"])
    elif name == "table4":
        rows = []
        for params, (z, z1, z2) in bounds_mod.REFERENCE_TABLE4.items():
            got = bounds_mod.kpath_bound(*params)
            rows.append([params, f"{got['base']:.7f}", z, f"{abs(got['base'] - z):.1e}",
                         f"{abs(got['Z1'] - z1):.1e}", f"{abs(got['Z2'] - z2):.1e}"])
        _print_table(rows, ["(delta,gamma,c1,c2,cl,cr)", "Z", "reference",
                            "d(Z)", "d(Z1)", "d(Z2)"])
    elif name == "table5":
        rows = []
        for c, (y, i, t) in bounds_mod.REFERENCE_TABLE5.items():
            got = bounds_mod.wsp_bound(c)
            rows.append([c, f"{got['base']:.6f}", y, got["argmax"]["i"], i,
                         f"{got['argmax']['T']:.7f}", t])
        _print_table(rows, ["c", "base", "ref", "i", "ref i", "T(i-1)", "ref T"])
    elif name == "p2p":
        got = bounds_mod.p2p_bound()
        ref = bounds_mod.REFERENCE_P2P
        _print_table([[f"{got['base']:.5f}", ref[0], got["argmax"]["i"], ref[1],
                       f"{got['argmax']['T']:.5f}", ref[2]]],
                     ["base", "ref", "i", "ref i", "T(i-1)", "ref T"])
    else:
        raise ParameterError(f"unknown table {name!r}")
    return EXIT_ACCEPT


# ------------------------------------------------------------------ unisets

def _cmd_uniset(args, argv) -> int:
    u = unisets.build_universal(args.n, args.k, args.p, args.mode, args.seed)
    for line in u.lines():
        print(line)
    return EXIT_ACCEPT


def _cmd_check_uniset(args, argv) -> int:
    lines = _load(args.file).splitlines()
    u = unisets.UniversalSet.from_lines(args.n, args.k, args.p, lines)
    result = unisets.verify_universal(u, jobs=args.jobs)
    if result.valid:
        print("valid")
        return EXIT_ACCEPT
    print(f"invalid: I={result.violation[0]} ones={result.violation[1]}")
    return EXIT_REJECT


# ------------------------------------------------------------------ repfam

def _cmd_repfam(args, argv) -> int:
    fam_parsed = parse_instance(_load(args.family), objective=args.objective)
    if fam_parsed.kind != "setfamily":
        raise ParameterError("--family must be a setfamily document")
    fam: WeightedSetFamily = fam_parsed.value
    spec_doc = json.loads(_load(args.spec))
    index = {label: i for i, label in enumerate(fam.universe.elements)}
    parts = []
    for part in spec_doc["parts"]:
        parts.append(repsets.PartitionPart(
            tuple(index[str(e)] for e in part["elements"]),
            part["k"], part["p"], part.get("c", 1.0)))
    spec = repsets.PartitionSpec(tuple(parts))
    positions, product_size = repsets.select_representative_positions(
        spec, fam, args.objective)
    labels = fam.universe.elements
    out = {
        "family": [{"members": [labels[e] for e in fam.members(i)],
                    "weight": fam.weight(i)} for i in positions],
        "stats": {"inputSize": len(fam), "outputSize": len(positions),
                  "productFamilySize": product_size},
    }
    print(json.dumps(out, sort_keys=True))
    return EXIT_ACCEPT


# ------------------------------------------------------------------ matching

def _cmd_matching(args, argv) -> int:
    parsed = parse_instance(_load(args.instance))
    if parsed.kind != "graph":
        raise ParameterError("matching needs an undirected graph document")
    m = matching_mod.max_matching(parsed.value)
    print(json.dumps({"size": len(m), "edges": [list(e) for e in m.edges]}))
    return EXIT_ACCEPT


# ------------------------------------------------------------------ gen

def gen_instance(kind: str, params: dict, seed: int) -> tuple[dict, dict | None]:
    """Reproducible random instance; an optional planted structure comes with
    a sidecar certificate that names it."""
    rng = random.Random(seed)
    n = params.get("n", 0)
    if n <= 0:
        raise ParameterError("n must be positive")
    density = params.get("density", 0.3)
    lo, hi = params.get("weightRange", (1, 9))
    plant = params.get("plant")
    if kind == "digraph":
        arcs: dict[tuple[int, int], int] = {}
        cert = None
        if plant:
            k = plant["k"]
            if k > n:
                raise ParameterError("cannot plant a path longer than n")
            nodes = rng.sample(range(n), k)
            for a, b in zip(nodes, nodes[1:]):
                arcs[(a, b)] = rng.randint(lo, hi)
            cert = {"kind": "kpath", "nodes": nodes}
        for a in range(n):
            for b in range(n):
                if a != b and (a, b) not in arcs and rng.random() < density:
                    arcs[(a, b)] = rng.randint(lo, hi)
        doc = {"nodes": n, "arcs": [[a, b, w] for (a, b), w in sorted(arcs.items())]}
        if cert:
            cert["weight"] = sum(arcs[(a, b)] for a, b in zip(cert["nodes"], cert["nodes"][1:]))
        return doc, cert
    if kind == "graph":
        edges: set[tuple[int, int]] = set()
        cert = None
        if plant:
            k = plant["k"]
            if 3 * k > n:
                raise ParameterError("cannot plant a packing needing more than n nodes")
            nodes = rng.sample(range(n), 3 * k)
            triples = [tuple(nodes[3 * i: 3 * i + 3]) for i in range(k)]
            for a, b, c in triples:
                edges.add((min(a, b), max(a, b)))
                edges.add((min(b, c), max(b, c)))
            cert = {"kind": "p2p", "paths": [list(t) for t in triples]}
        for a in range(n):
            for b in range(a + 1, n):
                if (a, b) not in edges and rng.random() < density:
                    edges.add((a, b))
        return {"nodes": n, "edges": [[a, b] for a, b in sorted(edges)]}, cert
    if kind == "setfamily":
        count = params.get("sets", 2 * n)
        labels = [f"u{i}" for i in range(n)]
        sets = []
        cert = None
        if plant:
            k = plant["k"]
            if 3 * k > n:
                raise ParameterError("cannot plant more disjoint sets than fit")
            chosen = rng.sample(range(n), 3 * k)
            planted = [sorted(chosen[3 * i: 3 * i + 3]) for i in range(k)]
            for s in planted:
                sets.append({"members": [labels[i] for i in s], "weight": rng.randint(lo, hi)})
            cert = {"kind": "wsp", "sets": [[labels[i] for i in s] for s in planted]}
        while len(sets) < count:
            members = sorted(rng.sample(range(n), 3))
            sets.append({"members": [labels[i] for i in members],
                         "weight": rng.randint(lo, hi)})
        if cert:
            cert["weight"] = sum(s["weight"] for s in sets[: len(cert["sets"])])
        return {"universe": labels, "sets": sets}, cert
    raise ParameterError(f"unknown kind {kind!r}")


def _cmd_gen(args, argv) -> int:
    if args.seed is None:
        raise ParameterError("gen requires an explicit --seed")
    params = {"n": args.n, "density": args.density,
              "weightRange": (args.wmin, args.wmax)}
    if args.sets is not None:
        params["sets"] = args.sets
    if args.plant is not None:
        params["plant"] = {"k": args.plant}
    doc, cert = gen_instance(args.kind, params, args.seed)
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        if cert is not None:
            with open(args.out + ".cert.json", "w", encoding="utf-8") as fh:
                json.dump(cert, fh, sort_keys=True)
        print(args.out)
    elif cert is not None:
        print(json.dumps({"instance": doc, "certificate": cert},
                         sort_keys=True, separators=(",", ":")))
    else:
        print(text)
    return EXIT_ACCEPT


# ------------------------------------------------------------------ bench

def bench_rows(suite: dict, jobs: int = 1, budget: int | None = None) -> list[dict]:
    budget = budget or _default_budget()

    def run(item):
        name, row = item
        problem = row["problem"]
        doc = json.dumps(row["instance"])
        parsed = parse_instance(doc)
        k = row.get("k")
        W = row.get("W")
        trace: dict = {}
        t0 = time.perf_counter()
        try:
            if problem == "kiob":
                verdict = "accept" if kiob_mod.solve_kiob(parsed.value, k).accept else "reject"
                oracle = "accept" if oracles.oracle_kiob(parsed.value, k) else "reject"
            elif problem == "kpath":
                res = kpath_mod.path_alg(parsed.value, W, k, budget=budget)
                verdict = res.status
                opt = oracles.oracle_kpath(parsed.value, k)
                oracle = "accept" if opt is not None and opt <= W else "reject"
            elif problem == "wsp":
                fam = parsed.value
                res = wsp_mod.wsp_alg(fam.universe, fam, W, k, budget=budget)
                verdict = res.status
                opt = oracles.oracle_wsp(fam, k)
                oracle = "accept" if opt is not None and opt >= W else "reject"
            elif problem == "p2p":
                res = p2_mod.solve_p2packing(parsed.value, k, budget=budget)
                verdict = res.status
                oracle = "accept" if oracles.oracle_p2p(parsed.value, k) else "reject"
            else:
                raise ParameterError(f"unknown problem {problem!r}")
        except BudgetExceededError:
            verdict = "budget-exceeded"
            oracle = None
        elapsed = time.perf_counter() - t0
        return {"instance": name, "problem": problem, "verdict": verdict,
                "oracle": oracle, "seconds": round(elapsed, 6),
                "peakFamilySize": trace.get("peak_family"),
                "match": (verdict == oracle) if oracle is not None
                         and verdict != "budget-exceeded" else None}

    items = [(row.get("name", f"row{i}"), row) for i, row in enumerate(suite.get("rows", []))]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, items))  # map preserves submission order
    return [run(item) for item in items]


def _cmd_bench(args, argv) -> int:
    try:
        suite = json.loads(_load(args.suite))
    except FileNotFoundError:
        raise ParameterError(f"missing suite {args.suite!r}")
    rows = bench_rows(suite, args.jobs, args.budget)
    if args.format == "json":
        print(json.dumps(rows, sort_keys=True))
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["instance", "problem", "verdict",
                                                 "oracle", "match", "seconds",
                                                 "peakFamilySize"])
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        sys.stdout.write(buf.getvalue())
    return EXIT_ACCEPT


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="fpt-mix")
    sub = top.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run an exact solver")
    solve.add_argument("problem", choices=["kpath", "kcwp", "kiob", "wsp", "p2p"])
    solve.add_argument("instance")
    solve.add_argument("--k", type=int)
    solve.add_argument("--W", type=int)
    solve.add_argument("--c", type=float, default=None)
    solve.add_argument("--inv-eps", dest="inv_eps", type=int, default=None)
    solve.add_argument("--delta", type=_fraction, default=Fraction(1, 12))
    solve.add_argument("--gamma", type=_fraction, default=Fraction(84, 1000))
    solve.add_argument("--c1", type=float, default=1.504)
    solve.add_argument("--c2", type=float, default=1.398)
    solve.add_argument("--cl", type=float, default=1.092)
    solve.add_argument("--cr", type=float, default=1.876)
    solve.add_argument("--budget", type=int, default=_default_budget())
    solve.set_defaults(func=_cmd_solve)

    check = sub.add_parser("check", help="brute-force oracle verdict")
    check.add_argument("problem", choices=["kpath", "kiob", "wsp", "p2p"])
    check.add_argument("instance")
    check.add_argument("--k", type=int)
    check.add_argument("--W", type=int)
    check.add_argument("--budget", type=int, default=2_000_000)
    check.set_defaults(func=_cmd_check)

    bnd = sub.add_parser("bounds", help="reproduce the running-time tables")
    bnd.add_argument("table", choices=["table1", "table2", "table3", "table4",
                                       "table5", "p2p"])
    bnd.set_defaults(func=_cmd_bounds)

    uni = sub.add_parser("uniset", help="emit a universal set, one 0/1 line per function")
    uni.add_argument("--n", type=int, required=True)
    uni.add_argument("--k", type=int, required=True)
    uni.add_argument("--p", type=int, required=True)
    uni.add_argument("--mode", choices=["greedy", "rand"], default="greedy")
    uni.add_argument("--seed", type=int)
    uni.set_defaults(func=_cmd_uniset)

    chk = sub.add_parser("check-uniset", help="verify a universal set file")
    chk.add_argument("file")
    chk.add_argument("--n", type=int, required=True)
    chk.add_argument("--k", type=int, required=True)
    chk.add_argument("--p", type=int, required=True)
    chk.add_argument("--jobs", type=int, default=1)
    chk.set_defaults(func=_cmd_check_uniset)

    rep = sub.add_parser("repfam", help="compute a representative subfamily")
    rep.add_argument("--spec", required=True)
    rep.add_argument("--family", required=True)
    rep.add_argument("--objective", choices=["max", "min"], default="max")
    rep.set_defaults(func=_cmd_repfam)

    mat = sub.add_parser("matching", help="maximum matching of a graph document")
    mat.add_argument("instance")
    mat.set_defaults(func=_cmd_matching)

    gen = sub.add_parser("gen", help="generate a reproducible instance")
    gen.add_argument("kind", choices=["digraph", "graph", "setfamily"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--density", type=float, default=0.3)
    gen.add_argument("--sets", type=int)
    gen.add_argument("--wmin", type=int, default=1)
    gen.add_argument("--wmax", type=int, default=9)
    gen.add_argument("--plant", type=int, help="plant a k-structure and emit its certificate")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out")
    gen.set_defaults(func=_cmd_gen)

    ben = sub.add_parser("bench", help="run a suite and cross-check oracles")
    ben.add_argument("suite")
    ben.add_argument("--jobs", type=int, default=1)
    ben.add_argument("--format", choices=["csv", "json"], default="csv")
    ben.add_argument("--budget", type=int, default=_default_budget())
    ben.set_defaults(func=_cmd_bench)

    return top


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "inv_eps", None) is None and hasattr(args, "inv_eps"):
        args.inv_eps = {"kpath": 13, "kcwp": 13}.get(getattr(args, "problem", ""), 2)
    if getattr(args, "c", 0) is None:
        args.c = {"kiob": 1.497, "wsp": 1.591}.get(args.problem, 1.0)
    try:
        return args.func(args, ["fpt-mix"] + argv)
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParameterError, InstanceError, FptMixError, FileNotFoundError,
            json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
