#!/usr/bin/env python3
"""DIMACS front end for a python-sat backend, printing SAT-competition output.

Usage: pysat_solver.py [--solver NAME] FILE.cnf
"""
import argparse
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--solver", default="cadical195")
    ap.add_argument("cnf")
    args = ap.parse_args()

    formula = CNF(from_file=args.cnf)
    with Solver(name=args.solver, bootstrap_with=formula.clauses) as s:
        if s.solve():
            print("s SATISFIABLE")
            model = s.get_model() or []
            known = {abs(v) for v in model}
            model += [-v for v in range(1, formula.nv + 1) if v not in known]
            for i in range(0, len(model), 20):
                print("v " + " ".join(str(v) for v in model[i:i + 20]))
            print("v 0")
            return 10
        print("s UNSATISFIABLE")
        return 20


if __name__ == "__main__":
    sys.exit(main())
