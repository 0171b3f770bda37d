"""Independent reference implementations used to pin expected values.

Everything here is deliberately written from the domain contracts, not
from the package's internals: a heap-based A*, a recursive bounded DFS
with the same counting conventions, a from-scratch tree enumerator for
the artificial space, and a table-free Manhattan distance.
"""

import heapq
import math
from fractions import Fraction

from idastra import _kernels_py

_TAG_ERROR = 1
_TAG_GOAL = 2
_TWO64 = 1 << 64


def manhattan_reference(tiles):
    """Manhattan distance without the precomputed table."""
    total = 0
    for pos, tile in enumerate(tiles):
        if tile == 0:
            continue
        total += abs(pos // 4 - tile // 4) + abs(pos % 4 - tile % 4)
    return total


def astar_cost(problem, limit=2_000_000):
    """Optimal solution cost by best-first search; None if the space is
    exhausted, raises if the node limit trips (test sizing guard)."""
    start = problem.initial_state()
    open_heap = [(problem.initial_h(), 0, 0, start, -1)]
    best_g = {start: 0}
    counter = 0
    popped = 0
    while open_heap:
        f, _, g, state, prev_op = heapq.heappop(open_heap)
        popped += 1
        if popped > limit:
            raise RuntimeError("astar oracle exceeded its node limit")
        if g > best_g.get(state, math.inf):
            continue
        if problem.is_goal(state):
            return g
        for child, _op, cost, h in problem.expand(state, prev_op,
                                                  f - g):
            cg = g + cost
            if cg < best_g.get(child, math.inf):
                best_g[child] = cg
                counter += 1
                heapq.heappush(open_heap, (cg + h, counter, cg, child, _op))
    return None


def bounded_dfs_reference(problem, threshold):
    """Recursive twin of the engine's cost-bounded pass.

    Counting conventions: visiting a node counts it as expanded (the
    goal node included); children over the bound are pruned where they
    are generated and feed the minimum-exceeding-f value.
    Returns (expanded, generated, min_exceed, solution).
    """
    h0 = problem.initial_h()
    if h0 > threshold:
        return 0, 0, h0, None
    tally = {"expanded": 0, "generated": 0, "min_exceed": None}

    def visit(state, g, h, prev_op, path):
        tally["expanded"] += 1
        if problem.is_goal(state):
            return (path, g)
        children = problem.expand(state, prev_op, h)
        # a whole sibling list comes into existence when its parent is
        # expanded, even if the pass stops at a goal among them
        tally["generated"] += len(children)
        for child, op, cost, ch in children:
            cg = g + cost
            cf = cg + ch
            if cf > threshold:
                me = tally["min_exceed"]
                if me is None or cf < me:
                    tally["min_exceed"] = cf
            else:
                found = visit(child, cg, ch, op, path + (op,))
                if found is not None:
                    return found
        return None

    solution = visit(problem.initial_state(), 0, h0, -1, ())
    return (tally["expanded"], tally["generated"], tally["min_exceed"],
            solution)


def ida_reference(problem):
    """Serial iterative deepening built on the recursive pass.

    Returns (cost, path, thresholds, per-pass expansions, total).
    """
    threshold = problem.initial_h()
    thresholds = []
    per_pass = []
    total = 0
    while True:
        expanded, _gen, min_exceed, solution = bounded_dfs_reference(
            problem, threshold)
        thresholds.append(threshold)
        per_pass.append(expanded)
        total += expanded
        if solution is not None:
            path, cost = solution
            return cost, path, thresholds, per_pass, total
        if min_exceed is None:
            return None, None, thresholds, per_pass, total
        threshold = min_exceed


# ------------------------------------------------- artificial space

def goal_digits_reference(g, b, d):
    """First d base-b digits of the fraction g (g = 1 -> all b-1)."""
    if g >= 1.0:
        return tuple([b - 1] * d)
    digits = []
    x = g
    for _ in range(d):
        digit = min(int(x * b), b - 1)
        digits.append(digit)
        x = x * b - digit
    return tuple(digits)


class SpaceModel:
    """From-scratch enumerator for an artificial instance.

    Rebuilds the generator's conventions directly from its parameter
    contract: per-child-index depth limits ceil(d*(1 - imb*i/(b-1)))
    with the designated goal path exempt, density goals drawn from the
    hash stream, the exact-distance heuristic with the remaining-depth
    cap active only when density goals are possible, and hash-derived
    error subtraction.  Only the hash primitive is shared (its own
    parity suite covers it).
    """

    def __init__(self, spec):
        self.spec = spec
        self.goal = goal_digits_reference(spec.g, spec.b, spec.d)
        self.limits = [math.ceil(spec.d * (1.0 - spec.imbalance * i
                                           / (spec.b - 1)))
                       for i in range(spec.b)]
        self.density_threshold = int(spec.density * _TWO64)

    def children(self, path):
        k = len(path)
        if k >= self.spec.d:
            return []
        on_goal = tuple(path) == self.goal[:k]
        out = []
        for i in range(self.spec.b):
            if k < self.limits[i] or (on_goal and i == self.goal[k]):
                out.append(path + (i,))
        return out

    def is_goal(self, path):
        if len(path) != self.spec.d:
            return False
        if tuple(path) == self.goal:
            return True
        if self.density_threshold == 0:
            return False
        key = _kernels_py.path_hash(self.spec.seed, _TAG_GOAL, bytes(path))
        return key < self.density_threshold

    def heuristic(self, path):
        if self.is_goal(path):
            return 0
        shared = 0
        for a, g in zip(path, self.goal):
            if a != g:
                break
            shared += 1
        dist = (len(path) - shared) + (self.spec.d - shared)
        if self.density_threshold > 0:
            dist = min(dist, self.spec.d - len(path))
        err = 0
        if self.spec.herror > 0:
            err = _kernels_py.path_hash(self.spec.seed, _TAG_ERROR,
                                        bytes(path)) % (self.spec.herror + 1)
        return max(0, dist - err)

    def all_nodes(self):
        nodes = []
        frontier = [()]
        while frontier:
            nodes.extend(frontier)
            frontier = [c for p in frontier for c in self.children(p)]
        return nodes

    def goal_nodes(self):
        return [p for p in self.all_nodes() if self.is_goal(p)]

    def true_remaining_cost(self, path):
        """Exact cheapest path-to-goal cost below `path` by DFS, or None
        when no goal is reachable from it (tree: no revisits)."""
        best = None
        stack = [(path, 0)]
        while stack:
            p, depth = stack.pop()
            if best is not None and depth >= best:
                continue
            if self.is_goal(p):
                best = depth if best is None else min(best, depth)
                continue
            for c in self.children(p):
                stack.append((c, depth + 1))
        return best


def uniform_tree_size(b, depth):
    """Nodes in a complete b-ary tree of the given depth, root included."""
    return (b ** (depth + 1) - 1) // (b - 1)


def geometric_sum(b, lo, hi):
    """Sum of b**i for lo <= i <= hi as an exact integer (0 if empty)."""
    return sum(b ** i for i in range(lo, hi + 1))


def eq1_brute(P, b, d, x):
    """Eq. 1 by literal term-by-term summation with exact rationals."""
    num = Fraction(sum(b ** i for i in range(1, d + 1)))
    den = Fraction(sum(b ** i for i in range(x + 1, d + 1)))
    return float(P * num / den + Fraction(1, 2 * b ** x))


def spearman(xs, ys):
    """Spearman rank correlation with average ranks for ties."""
    def ranks(vals):
        order = sorted(range(len(vals)), key=lambda i: vals[i])
        out = [0.0] * len(vals)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and \
                    vals[order[j + 1]] == vals[order[i]]:
                j += 1
            avg = (i + j) / 2 + 1
            for k in range(i, j + 1):
                out[order[k]] = avg
            i = j + 1
        return out

    rx, ry = ranks(xs), ranks(ys)
    n = len(xs)
    mx = sum(rx) / n
    my = sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        return 0.0
    return cov / math.sqrt(vx * vy)
