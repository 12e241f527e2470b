"""Solve an LP/MPS file with HiGHS and write `status`, `objective`, `bound`
and `<name> <value>` lines.

usage: highs_runner.py MODEL SOLUTION TIME_LIMIT THREADS MIP_GAP
"""
import sys

import highspy


def main():
    model, solution, time_limit, threads, gap = sys.argv[1:6]
    h = highspy.Highs()
    h.setOptionValue("time_limit", float(time_limit))
    h.setOptionValue("threads", int(threads))
    h.setOptionValue("mip_rel_gap", float(gap))
    h.setOptionValue("random_seed", 0)
    if h.readModel(model) != highspy.HighsStatus.kOk:
        sys.stderr.write("could not read %s\n" % model)
        sys.exit(2)
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kUnboundedOrInfeasible:
        h.setOptionValue("presolve", "off")
        h.run()
        status = h.getModelStatus()

    info = h.getInfo()
    has_primal = info.primal_solution_status == 2
    S = highspy.HighsModelStatus
    if status == S.kOptimal:
        word = "optimal"
    elif status == S.kInfeasible:
        word = "infeasible"
    elif status in (S.kUnbounded, S.kUnboundedOrInfeasible):
        word = "unbounded"
    elif status in (S.kTimeLimit, S.kIterationLimit, S.kSolutionLimit, S.kInterrupt, S.kObjectiveBound, S.kObjectiveTarget):
        word = "feasible" if has_primal else "limit"
    else:
        sys.stderr.write("HiGHS finished with status %s\n" % h.modelStatusToString(status))
        sys.exit(3)

    with open(solution, "w") as out:
        out.write("status %s\n" % word)
        if has_primal and word in ("optimal", "feasible"):
            out.write("objective %r\n" % info.objective_function_value)
            lp = h.getLp()
            if lp.integrality_:
                out.write("bound %r\n" % info.mip_dual_bound)
                out.write("nodes %d\n" % info.mip_node_count)
            values = h.getSolution().col_value
            for name, value in zip(lp.col_names_, values):
                out.write("%s %r\n" % (name, value))


if __name__ == "__main__":
    main()
