"""Command-line interface: solve, oracle, cvd, gen-hard, check."""
from __future__ import annotations

import argparse
import json
import sys
import warnings

from .cvd import find_modulator_min
from .graph import GraphFormatError, ModulatorError, fair_cost, load_graph, validate_modulator
from .hardness import binpack_to_dtuple, read_binpack, read_dtuple, write_instance
from .ilp import NO_FILTER
from .logic import (FormulaError, NatSet, derive_params, evaluate, metrics, parse_formula,
                    preset_formula)
from .oracle import OracleLimitError, oracle_decision, oracle_min
from .shapes import is_compliant
from .solver import ShapeLimitError, SolveConfig, preset_pattern_filter, solve_decision, solve_min

EXIT_OK, EXIT_ERROR, EXIT_ABSENT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt_set(X):
    return "{" + ",".join(map(str, sorted(X))) + "}"


def _read(path):
    with open(path) as fh:
        return fh.read()


def _add_problem_args(p):
    p.add_argument("--graph", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--formula", help="file holding an s-expression formula")
    g.add_argument("--problem", choices=["vc", "fvs", "oct", "ds", "sigma-rho"])
    p.add_argument("--sigma", help="comma list or N")
    p.add_argument("--rho", help="comma list, N or coN:GAP")
    p.add_argument("--json", action="store_true")


def _load_problem(args):
    G, file_mod = load_graph(_read(args.graph))
    if args.formula:
        phi = parse_formula(_read(args.formula))
        flt = NO_FILTER
    else:
        sigma = rho = None
        if args.problem == "sigma-rho":
            if args.sigma is None or args.rho is None:
                raise UsageError("--problem sigma-rho needs --sigma and --rho")
            sigma, rho = NatSet.parse(args.sigma), NatSet.parse(args.rho)
        phi = preset_formula(args.problem, sigma, rho)
        flt = preset_pattern_filter(args.problem, sigma, rho)
    return G, file_mod, phi, flt


def _resolve_modulator(args, G, file_mod):
    if getattr(args, "modulator", None) is not None:
        text = args.modulator.replace(",", " ").split()
        return [int(t) for t in text], "flag"
    if file_mod is not None:
        return list(file_mod), "file"
    return list(find_modulator_min(G).modulator), "computed"


def _emit(args, data, lines):
    if args.json:
        print(json.dumps(data, sort_keys=True))
    else:
        print("\n".join(lines))


def cmd_solve(args):
    G, file_mod, phi, flt = _load_problem(args)
    D, source = _resolve_modulator(args, G, file_mod)
    MG = validate_modulator(G, D)
    if args.alpha is not None and args.alpha % 2 == 0:
        raise UsageError("--alpha must be odd")
    cfg = SolveConfig(alpha=args.alpha, gamma=args.gamma, pattern_filter=flt, jobs=args.jobs,
                      record_shapes=args.dump_shapes, max_shapes=args.max_shapes)
    rep = solve_min(MG, phi, cfg) if args.k is None else solve_decision(MG, phi, args.k, cfg)
    params = derive_params(metrics(phi), MG.d, args.alpha, args.gamma)
    data = {
        "modulator": list(MG.modulator),
        "modulator_source": source,
        "alpha": rep.alpha,
        "gamma": str(rep.gamma),
        "theoretical_alpha": params.theoretical_alpha,
        "theoretical_gamma": str(params.theoretical_gamma),
        "heuristic_parameters": rep.heuristic,
        "k": args.k,
        "k_star": rep.k_star,
        "X": sorted(rep.answer.X) if rep.answer else None,
        "fair_cost": rep.answer.fair_cost if rep.answer else None,
        "shapes_enumerated": rep.shapes_enumerated,
        "shapes_satisfying": rep.shapes_satisfying,
        "shapes_incoherent_skipped": rep.shapes_incoherent_skipped,
    }
    lines = [f"modulator: {' '.join(map(str, MG.modulator))} ({source})"]
    if rep.answer is None:
        lines.append("no solution" + ("" if args.k is None else f" with fair cost <= {args.k}"))
    elif args.k is None:
        lines.append(f"k*={rep.k_star} X={_fmt_set(rep.answer.X)}")
    else:
        lines.append(f"fair_cost={rep.answer.fair_cost} X={_fmt_set(rep.answer.X)}")
    lines.append(f"shapes: enumerated={rep.shapes_enumerated} satisfying={rep.shapes_satisfying} "
                 f"incoherent_skipped={rep.shapes_incoherent_skipped}")
    if rep.heuristic:
        lines.append(f"heuristic-parameters: alpha={rep.alpha} gamma={rep.gamma} "
                     f"(theoretical alpha={params.theoretical_alpha} gamma={params.theoretical_gamma})")
    if args.dump_shapes:
        dumps = []
        for shp, ok in rep.shapes:
            status = "infeasible" if ok is None else ("satisfies" if ok else "fails")
            dumps.append({"shape": shp.dump(MG.d), "status": status})
            lines += [f"# {status}", shp.dump(MG.d)]
        data["shapes"] = dumps
    _emit(args, data, lines)
    return EXIT_OK if rep.answer is not None else EXIT_ABSENT


def cmd_oracle(args):
    G, _, phi, _ = _load_problem(args)
    if args.k is not None:
        X = oracle_decision(G, phi, args.k)
        data = {"k": args.k, "X": None if X is None else sorted(X)}
        line = "no set" if X is None else f"X={_fmt_set(X)} fair_cost={fair_cost(G, X)}"
        _emit(args, data, [line])
        return EXIT_OK if X is not None else EXIT_ABSENT
    res = oracle_min(G, phi)
    wit = sorted(res.witnesses, key=lambda W: (len(W), sorted(W)))
    data = {"k_star": None if res.k_star is None else int(res.k_star),
            "witnesses": [sorted(W) for W in wit], "subsets_checked": int(res.subsets_checked)}
    if res.k_star is None:
        lines = ["no solution"]
    else:
        lines = [f"k*={res.k_star} X={_fmt_set(wit[0])}"]
    lines.append(f"subsets checked: {res.subsets_checked}")
    _emit(args, data, lines)
    return EXIT_OK if res.k_star is not None else EXIT_ABSENT


def cmd_cvd(args):
    G, _ = load_graph(_read(args.graph))
    res = find_modulator_min(G)
    data = {"cvd": len(res.modulator), "modulator": list(res.modulator)}
    _emit(args, data, [f"cvd={len(res.modulator)} modulator: {' '.join(map(str, res.modulator))}"])
    return EXIT_OK


def cmd_gen_hard(args):
    bp = None
    if args.binpack:
        bp = read_binpack(_read(args.binpack))
        dt = binpack_to_dtuple(bp)
    else:
        dt = read_dtuple(_read(args.dtuple))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        inst = write_instance(args.out, dt, bp, pad=args.pad)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    data = {"prefix": args.out, "n": inst.graph.n, "m": inst.graph.m, "d": dt.d, "k": inst.k,
            "tuples": len(inst.tuples)}
    _emit(args, data, [f"wrote {args.out}.graph {args.out}.mso {args.out}.meta",
                       f"n={inst.graph.n} m={inst.graph.m} d={dt.d} k={inst.k} "
                       f"tuples={len(inst.tuples)}"])
    return EXIT_OK


def cmd_check(args):
    G, file_mod, phi, _ = _load_problem(args)
    X = {int(t) for t in args.set.replace(",", " ").split()}
    if any(not 0 <= v < G.n for v in X):
        raise UsageError(f"--set has a vertex outside 0..{G.n - 1}")
    sat = evaluate(G, X, phi)
    fc = fair_cost(G, X)
    D, source = _resolve_modulator(args, G, file_mod)
    MG = validate_modulator(G, D)
    params = derive_params(metrics(phi), MG.d, args.alpha)
    compliant = is_compliant(MG, X, params.alpha)
    ok = sat and (args.k is None or fc <= args.k)
    data = {"X": sorted(X), "satisfies": sat, "fair_cost": fc, "k": args.k,
            "compliant": compliant, "alpha": params.alpha, "ok": ok}
    lines = [f"satisfies={sat} fair_cost={fc} compliant(alpha={params.alpha})={compliant}",
             "ok" if ok else "rejected"]
    _emit(args, data, lines)
    return EXIT_OK if ok else EXIT_ABSENT


def build_parser():
    p = _Parser(prog="fairmso", description="Fair vertex problems on graphs of small cluster deletion number.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="minimum fair cost (or decision with --k)")
    _add_problem_args(s)
    s.add_argument("--k", type=int)
    s.add_argument("--alpha", type=int)
    s.add_argument("--gamma", type=int)
    s.add_argument("--modulator")
    s.add_argument("--dump-shapes", action="store_true")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--max-shapes", type=int)
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="brute force over all vertex subsets")
    _add_problem_args(o)
    o.add_argument("--k", type=int)
    o.set_defaults(func=cmd_oracle)

    c = sub.add_parser("cvd", help="minimum cluster vertex deletion set")
    c.add_argument("--graph", required=True)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_cvd)

    h = sub.add_parser("gen-hard", help="hardness instance from bin packing or d-tuple input")
    src = h.add_mutually_exclusive_group(required=True)
    src.add_argument("--binpack")
    src.add_argument("--dtuple")
    h.add_argument("--out", required=True)
    h.add_argument("--pad", action="store_true",
                   help="add forced tuples (and budget) until at least 3 tuples remain")
    h.add_argument("--json", action="store_true")
    h.set_defaults(func=cmd_gen_hard)

    k = sub.add_parser("check", help="verify a claimed witness")
    _add_problem_args(k)
    k.add_argument("--set", required=True)
    k.add_argument("--k", type=int)
    k.add_argument("--alpha", type=int)
    k.add_argument("--modulator")
    k.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be positive")
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (GraphFormatError, ModulatorError, FormulaError, OracleLimitError, ShapeLimitError,
            OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
