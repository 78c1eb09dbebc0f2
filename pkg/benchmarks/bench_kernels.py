"""Compare the compiled kernels with their pure-Python twins.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Times one exact elimination (a windowed classification system) and one
trilinear checker sweep per backend, and checks both backends agree.
"""

import argparse
import time
from fractions import Fraction

from gdforge import _accel, _elim_py, _triple_py, linear
from gdforge.checks import check_gd_compat, check_novikov_super, cube
from gdforge.classifier import Window, build_system, solve_and_project
from gdforge.families import novikov_A
from gdforge.graded import BasisSpec, GDStructure, commutator_rule, window


def best_of(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


_SYSTEM = []


def solve_case():
    if not _SYSTEM:
        _SYSTEM.append(build_system("gammaN-bnotin", Fraction(1, 2), Window(3, 2, 1)))
    ps = solve_and_project(_SYSTEM[0])
    return ps.solution.rank, ps.dimension


def sweep_case():
    spec = BasisSpec(levels=True)
    circ = novikov_A(Fraction(1, 2), spec)
    triples = cube(window(spec, 4, 3))
    gd = GDStructure(commutator_rule(circ), circ, spec)
    return check_novikov_super(circ, triples).passed, check_gd_compat(gd, triples).passed


def run(label, elim, triple, repeat):
    linear.elim, _accel.triple = elim, triple
    solve_case()  # system construction is backend independent; keep it out of the timing
    t_solve, solved = best_of(solve_case, repeat)
    t_sweep, swept = best_of(sweep_case, repeat)
    print(f"{label:8s} elimination {t_solve:8.3f}s   triple sweep {t_sweep:8.3f}s")
    return (t_solve, t_sweep), (solved, swept)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    elim_c, triple_c = linear.elim, _accel.triple
    if _accel.BACKEND != "cython":
        print("compiled kernels are not built; timing the pure-Python backend only")
        run("python", _elim_py, _triple_py, args.repeat)
        return
    fast, r_fast = run("cython", elim_c, triple_c, args.repeat)
    slow, r_slow = run("python", _elim_py, _triple_py, args.repeat)
    linear.elim, _accel.triple = elim_c, triple_c
    if r_fast != r_slow:
        raise SystemExit(f"backends disagree: {r_fast} vs {r_slow}")
    print(f"speedup  elimination {slow[0] / fast[0]:7.2f}x    triple sweep {slow[1] / fast[1]:7.2f}x")


if __name__ == "__main__":
    main()
