"""Time the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py --n 100000 --repeat 3

Both backends consume the same random stream, so the script also checks
that their outputs agree.
"""
import argparse
import time
from fractions import Fraction as F

import numpy as np

from multigiant import _kernels
from multigiant.branching import _tables, build_offspring_law
from multigiant.configuration import sample_configuration
from multigiant.degrees import DegreeSpec, realize_sequence
from multigiant.rng import child

SPEC = DegreeSpec(2, {(1, (0, 1)): F(1, 4), (1, (0, 3)): F(1, 4), (2, (2, 0)): F(1, 2)})


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000, help="vertices in the sampled graph")
    ap.add_argument("--bp-trials", type=int, default=2000)
    ap.add_argument("--cap", type=int, default=10_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _kernels.compiled is None:
        raise SystemExit("compiled kernels are not available; build with "
                         "`pip install -e . --no-build-isolation` first")
    backends = {"cython": _kernels.compiled, "python": _kernels.python}

    g = sample_configuration(realize_sequence(SPEC, args.n), child(args.seed, "graph/0"))
    edges = g.edges()
    us, vs = np.ascontiguousarray(edges[:, 0]), np.ascontiguousarray(edges[:, 1])
    law = build_offspring_law(SPEC)
    tb = _tables(law)

    def bp(k):
        return sum(k.simulate_bp(child(args.seed, f"bp/{t}"), args.cap, tb.root_cdf, tb.root_children,
                                 tb.type_ptr, tb.type_cdf, tb.type_children, tb.max_children)[0]
                   for t in range(args.bp_trials))

    jobs = {
        f"explore (n={g.n}, {g.num_clones} clones)":
            lambda k: k.explore(child(args.seed, "explore"), g.vertex_ptr, g.partner, 0)[0],
        f"union_find (n={g.n}, {len(us)} edges)": lambda k: k.union_find(g.n, us, vs),
        f"simulate_bp ({args.bp_trials} runs, cap {args.cap})": bp,
    }

    print(f"{'kernel':<44}{'cython s':>10}{'python s':>10}{'speedup':>9}  match")
    for name, job in jobs.items():
        res = {b: best_of(lambda: job(k), args.repeat) for b, k in backends.items()}
        (tc, oc), (tp, op) = res["cython"], res["python"]
        match = np.array_equal(oc, op) if isinstance(oc, np.ndarray) else oc == op
        print(f"{name:<44}{tc:>10.4f}{tp:>10.4f}{tp / tc:>8.1f}x  {match}")


if __name__ == "__main__":
    main()
