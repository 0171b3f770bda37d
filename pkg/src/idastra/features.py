"""Problem characterisation by shallow lookahead.

A short, node-budgeted run of iterative deepening yields a trace from
which five features are measured: branching factor (b), lookahead
heuristic error (herror), tree imbalance (imb), goal location (loc) and
the heuristic branching factor (hbf).  These drive strategy selection.
"""

import math
from dataclasses import dataclass, field

from idastra.core import cost_bounded_dfs, make_root, next_threshold
from idastra.errors import DataError, DegenerateTrace, InsufficientData

DEFAULT_BUDGET = 200000


@dataclass(slots=True)
class ShallowTrace:
    iterations: list                 # {threshold, nodes_expanded, complete}
    root_h: int
    root_children: int
    subtree_expanded: dict
    subtree_min_leaf_f: dict
    subtree_min_leaf_h: dict
    min_leaf_f: int | None
    leaf_samples: list
    total_expanded: int
    total_generated: int
    fertile_expanded: int
    truncated: bool
    goal_found: tuple | None         # (path, cost)


@dataclass(frozen=True)
class ProblemFeatures:
    b: float
    herror: float
    imb: float
    loc: float
    hbf: float

    def csv_row(self):
        return ",".join(repr(float(v)) for v in
                        (self.b, self.herror, self.imb, self.loc, self.hbf))

    @staticmethod
    def csv_header():
        return "b,herror,imb,loc,hbf"

    @staticmethod
    def from_csv_row(row):
        parts = row.split(",")
        if len(parts) != 5:
            raise DataError(f"expected 5 feature fields, got {len(parts)}")
        return ProblemFeatures(*(float(p) for p in parts))

    def as_dict(self):
        return {"b": self.b, "herror": self.herror, "imb": self.imb,
                "loc": self.loc, "hbf": self.hbf}


def shallow_search(problem, budget=DEFAULT_BUDGET, order=None):
    """Run serial iterative deepening under a cross-iteration node budget.

    Stops at the goal or when the budget runs out, whichever first.  The
    in-progress expansion always completes, so generated counts may pass
    the budget but expanded never does.  Subtree statistics come from the
    final iteration unless the budget truncated it and a completed one
    exists (a partial sweep would bias the imbalance measurement).
    """
    if budget < 1:
        raise DataError(f"budget must be >= 1, got {budget}")
    root = make_root(problem)
    threshold = root.f
    iterations = []
    per_iter_stats = []
    total = 0
    total_gen = 0
    goal_found = None
    truncated = False
    while True:
        res = cost_bounded_dfs(problem, root, threshold, order=order,
                               budget=budget - total, collect_stats=True)
        total += res.nodes_expanded
        total_gen += res.nodes_generated
        complete = not res.truncated and res.solution is None
        iterations.append({"threshold": threshold,
                           "nodes_expanded": res.nodes_expanded,
                           "complete": complete})
        per_iter_stats.append(res.stats)
        if res.solution is not None:
            goal_found = res.solution
            break
        if res.truncated or total >= budget:
            truncated = True
            break
        threshold = next_threshold(res)

    pick = len(per_iter_stats) - 1
    if truncated and pick > 0:
        for i in range(len(per_iter_stats) - 1, -1, -1):
            if iterations[i]["complete"]:
                pick = i
                break
        else:
            pick = len(per_iter_stats) - 1
    stats = per_iter_stats[pick]

    root_children = max(s.root_children for s in per_iter_stats)
    fertile = sum(s.fertile_expanded for s in per_iter_stats)
    return ShallowTrace(
        iterations=iterations,
        root_h=root.h,
        root_children=root_children,
        subtree_expanded=dict(stats.subtree_expanded),
        subtree_min_leaf_f=dict(stats.subtree_min_leaf_f),
        subtree_min_leaf_h=dict(stats.subtree_min_leaf_h),
        min_leaf_f=stats.min_leaf_f,
        leaf_samples=list(stats.leaf_samples),
        total_expanded=total,
        total_generated=total_gen,
        fertile_expanded=fertile,
        truncated=truncated,
        goal_found=goal_found,
    )


def extract_features(trace):
    """Measure the five features from a shallow trace."""
    if trace.total_expanded == 0:
        raise DegenerateTrace("trace holds no expansions")

    # b: children generated per expansion that produced any; dead ends
    # and the goal would otherwise drag the estimate down
    if trace.fertile_expanded:
        b = trace.total_generated / trace.fertile_expanded
    else:
        b = 0.0

    # herror: how far the deepest lookahead pushed past the root estimate
    if trace.min_leaf_f is None:
        herror = 0.0
    else:
        herror = float(max(0, trace.min_leaf_f - trace.root_h))

    k = trace.root_children
    imb = _imbalance(trace, k)
    loc = _location(trace, k)
    hbf = _heuristic_branching(trace, b)
    return ProblemFeatures(b=b, herror=herror, imb=imb, loc=loc, hbf=hbf)


def _imbalance(trace, k):
    """Population coefficient of variation of root-subtree expansion
    counts, scaled by its maximum sqrt(k-1) and clamped to [0, 1]."""
    if k < 2:
        return 0.0
    counts = [trace.subtree_expanded.get(i, 0) for i in range(k)]
    mean = sum(counts) / k
    if mean == 0:
        return 0.0
    var = sum((c - mean) ** 2 for c in counts) / k
    cov = math.sqrt(var) / mean
    return min(1.0, max(0.0, cov / math.sqrt(k - 1)))


def _location(trace, k):
    """Centre of the root subtree holding the most promising leaf
    (lowest min leaf h), as a fraction of the root's children."""
    if k < 1:
        return 0.5
    best = None
    best_h = None
    for i in range(k):
        h = trace.subtree_min_leaf_h.get(i)
        if h is not None and (best_h is None or h < best_h):
            best, best_h = i, h
    if best is None:
        return 0.5
    return (best + 0.5) / k


def _heuristic_branching(trace, fallback):
    """Geometric mean growth between consecutive completed iterations;
    falls back to plain b when fewer than two completed."""
    done = [it["nodes_expanded"] for it in trace.iterations
            if it["complete"] and it["nodes_expanded"] > 0]
    if len(done) < 2:
        return fallback
    ratios = [done[i + 1] / done[i] for i in range(len(done) - 1)]
    log_sum = sum(math.log(r) for r in ratios)
    return math.exp(log_sum / len(ratios))


def stability_report(samples):
    """Within- vs between-problem feature variation.

    samples: one list of ProblemFeatures per problem, measured at
    different lookahead budgets.  Returns {"within": {...}, "between":
    {...}} mapping each feature to a standard deviation.
    """
    if len(samples) < 2:
        raise InsufficientData("need at least 2 problems")
    for group in samples:
        if len(group) < 2:
            raise InsufficientData("need at least 2 budget levels per problem")
    names = ("b", "herror", "imb", "loc", "hbf")
    within = {}
    between = {}
    for name in names:
        per_problem_sd = []
        per_problem_mean = []
        for group in samples:
            vals = [getattr(fs, name) for fs in group]
            m = sum(vals) / len(vals)
            sd = math.sqrt(sum((v - m) ** 2 for v in vals) / (len(vals) - 1))
            per_problem_sd.append(sd)
            per_problem_mean.append(m)
        within[name] = sum(per_problem_sd) / len(per_problem_sd)
        mm = sum(per_problem_mean) / len(per_problem_mean)
        between[name] = math.sqrt(
            sum((v - mm) ** 2 for v in per_problem_mean)
            / (len(per_problem_mean) - 1))
    return {"within": within, "between": between}
