"""Time the numeric kernels with numba and as plain Python.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each mode runs in its own process, since ``FAIRMSO_NO_JIT`` is read at import.
The first call (which includes compilation or cache loading) is reported
separately from the best of the timed calls.
"""
import argparse
import json
import os
import random
import subprocess
import sys
import time


def workloads():
    import numpy as np

    from fairmso.cvd import find_modulator_min
    from fairmso.graph import Graph, validate_modulator
    from fairmso.ilp import SENSE_EQ, SENSE_GE, SENSE_LE, ILPModel, solve_ilp
    from fairmso.logic import evaluate_masks, preset_formula
    from fairmso.oracle import _nbr_masks, all_fair_costs
    from fairmso.shapes import compute_shapes

    r = random.Random(0)

    def gnp(n, p):
        return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if r.random() < p])

    G12 = gnp(12, 0.4)
    nbr = _nbr_masks(G12)
    masks = np.asarray([[r.random() < 0.5 for _ in range(12)] for _ in range(2000)], dtype=np.uint8)
    ds = preset_formula("ds")

    # three triangles and an edge hanging off a two-vertex modulator
    edges = [(0, 1)]
    for base in (2, 5, 8):
        edges += [(base, base + 1), (base + 1, base + 2), (base, base + 2), (0, base), (1, base + 1)]
    edges += [(11, 12), (1, 11)]
    MG = validate_modulator(Graph(13, edges), [0, 1])
    shape_masks = np.asarray([[r.random() < 0.5 for _ in range(13)] for _ in range(2000)], dtype=np.uint8)

    model = ILPModel()
    for i in range(6):
        model.add_var(f"x{i}", None, 0, 10)
    model.add_row("sum", {i: 1 for i in range(6)}, SENSE_EQ, 31)
    model.add_row("odd", {0: 2, 1: -3, 2: 5}, SENSE_EQ, 17)
    model.add_row("cap", {3: 3, 4: 3, 5: 3}, SENSE_LE, 40)
    model.add_row("low", {0: 1, 5: 1}, SENSE_GE, 12)

    cvd_graphs = [gnp(14, 0.5) for _ in range(5)]

    return {
        "all_fair_costs (n=12)": lambda: all_fair_costs(nbr, 12),
        "evaluate_masks (ds, 2000 sets, n=12)": lambda: evaluate_masks(G12, masks, ds),
        "compute_shapes (2000 sets, n=13)": lambda: compute_shapes(MG, shape_masks, 5, 6),
        "solve_ilp (6 vars)": lambda: solve_ilp(model),
        "find_modulator_min (5 graphs, n=14)": lambda: [find_modulator_min(H) for H in cvd_graphs],
    }


def worker(repeat):
    out = {}
    for name, fn in workloads().items():
        t = time.perf_counter()
        fn()
        first = time.perf_counter() - t
        best = float("inf")
        for _ in range(repeat):
            t = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t)
        out[name] = {"first": first, "best": best}
    print(json.dumps(out))


def run_mode(no_jit, repeat):
    env = dict(os.environ)
    env.pop("FAIRMSO_NO_JIT", None)
    if no_jit:
        env["FAIRMSO_NO_JIT"] = "1"
    proc = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        worker(args.repeat)
        return
    jit = run_mode(False, args.repeat)
    py = run_mode(True, args.repeat)
    print(f"{'kernel':40s} {'numba':>10s} {'python':>10s} {'speedup':>8s} {'numba 1st':>10s}")
    for name in jit:
        a, b = jit[name]["best"], py[name]["best"]
        print(f"{name:40s} {a * 1e3:9.2f}ms {b * 1e3:9.2f}ms {b / a:7.1f}x {jit[name]['first'] * 1e3:9.1f}ms")


if __name__ == "__main__":
    main()
