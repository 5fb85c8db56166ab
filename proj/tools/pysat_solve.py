#!/usr/bin/env python3
"""DIMACS front end for the CaDiCaL binding shipped with python-sat.

Prints "s SATISFIABLE" plus "v" lines and exits 10, or prints
"s UNSATISFIABLE" and exits 20. Anything else exits 1.
"""

import argparse
import sys


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("cnf", help="DIMACS CNF file")
    parser.add_argument("--solver", default="cadical153", help="python-sat solver name")
    args = parser.parse_args()

    try:
        from pysat.formula import CNF
        from pysat.solvers import Solver
    except ImportError:
        print("c python-sat is not installed (pip install python-sat)", file=sys.stderr)
        return 1

    formula = CNF(from_file=args.cnf)
    with Solver(name=args.solver, bootstrap_with=formula.clauses) as solver:
        sat = solver.solve()
        if not sat:
            print("s UNSATISFIABLE")
            return 20
        model = solver.get_model() or []

    print("s SATISFIABLE")
    line = ["v"]
    for lit in model:
        line.append(str(lit))
        if len(line) > 20:
            print(" ".join(line))
            line = ["v"]
    line.append("0")
    print(" ".join(line))
    return 10


if __name__ == "__main__":
    sys.exit(main())
