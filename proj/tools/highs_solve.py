#!/usr/bin/env python3
"""Solves an LP/MILP file with HiGHS and writes an srte solution listing.

Listing format, one "<name> <value>" pair per line:

    objective <value>
    status optimal|gap-limit|time-limit|infeasible|error
    gap <relative mip gap>
    <column> <value>        (every column of the model)
"""

import argparse
import sys


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("model")
    parser.add_argument("solution")
    parser.add_argument("--gap", type=float, default=1e-4)
    parser.add_argument("--time-limit", type=float, default=3600.0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args()

    try:
        import highspy
    except ImportError:
        print("highspy is not installed (pip install highspy)", file=sys.stderr)
        return 127

    h = highspy.Highs()
    h.setOptionValue("output_flag", args.verbose)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("time_limit", args.time_limit)
    h.setOptionValue("threads", args.threads)
    if h.readModel(args.model) == highspy.HighsStatus.kError:
        print("HiGHS could not read " + args.model, file=sys.stderr)
        return 2
    h.run()

    model_status = h.getModelStatus()
    info = h.getInfo()
    has_solution = info.primal_solution_status == 2  # kSolutionStatusFeasible
    ms = highspy.HighsModelStatus
    if model_status == ms.kOptimal:
        status = "optimal"
    elif model_status == ms.kTimeLimit:
        status = "time-limit"
    elif model_status in (ms.kInfeasible, ms.kUnboundedOrInfeasible):
        status = "infeasible"
    elif has_solution:
        status = "gap-limit"
    else:
        status = "error"

    with open(args.solution, "w") as out:
        if not has_solution:
            out.write("objective nan\nstatus %s\n" % status)
            return 0
        out.write("objective %r\n" % info.objective_function_value)
        out.write("status %s\n" % status)
        out.write("gap %r\n" % max(0.0, info.mip_gap))
        lp = h.getLp()
        values = h.getSolution().col_value
        for name, value in zip(lp.col_names_, values):
            out.write("%s %r\n" % (name, value))
    return 0


if __name__ == "__main__":
    sys.exit(main())
