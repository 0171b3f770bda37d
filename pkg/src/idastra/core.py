"""Cost-bounded depth-first search and serial iterative deepening.

A search problem is any object with:

    initial_state() -> state
    initial_h() -> int
    is_goal(state) -> bool
    expand(state, prev_op, h) -> list of (state, op, cost, h) tuples

Expansion handles operator pruning (e.g. not undoing the parent move)
internally; prev_op is -1 at the root.  Children come back in the
problem's natural operator order and may be reordered by an ordering
policy before being pushed.
"""

from dataclasses import dataclass, field

from idastra.errors import SpaceExhausted

LEAF_SAMPLE_CAP = 1024


@dataclass(slots=True)
class SearchNode:
    state: object
    g: int
    h: int
    f: int
    prev_op: int
    path: tuple


def make_root(problem):
    h = problem.initial_h()
    return SearchNode(problem.initial_state(), 0, h, h, -1, ())


@dataclass(slots=True)
class PassStats:
    """Leaf and subtree bookkeeping for one cost-bounded pass.

    A leaf is a node the pass actually disposed of: a pruned child, a
    dead-end expansion, or the goal.  Nodes left on the stack when a
    budget truncates the pass are not leaves.  Subtrees are keyed by the
    first operator on a node's path.
    """

    subtree_expanded: dict = field(default_factory=dict)
    subtree_min_leaf_f: dict = field(default_factory=dict)
    subtree_min_leaf_h: dict = field(default_factory=dict)
    min_leaf_f: int | None = None
    leaf_samples: list = field(default_factory=list)
    fertile_expanded: int = 0
    root_children: int = 0

    def record_leaf(self, path, g, h):
        f = g + h
        if self.min_leaf_f is None or f < self.min_leaf_f:
            self.min_leaf_f = f
        if path:
            sub = path[0]
            if f < self.subtree_min_leaf_f.get(sub, f + 1):
                self.subtree_min_leaf_f[sub] = f
            if h < self.subtree_min_leaf_h.get(sub, h + 1):
                self.subtree_min_leaf_h[sub] = h
        if len(self.leaf_samples) < LEAF_SAMPLE_CAP:
            self.leaf_samples.append((g, h))

    def record_expansion(self, path, n_children):
        if path:
            sub = path[0]
            self.subtree_expanded[sub] = self.subtree_expanded.get(sub, 0) + 1
        if n_children:
            self.fertile_expanded += 1


@dataclass(slots=True)
class PassResult:
    threshold: int
    solution: tuple | None          # (path, cost) or None
    min_exceeding_f: int | None
    nodes_expanded: int
    nodes_generated: int
    truncated: bool
    stats: PassStats | None = None


def cost_bounded_dfs(problem, root, threshold, order=None, budget=None,
                     collect_stats=False):
    """One depth-first pass expanding only nodes with f <= threshold.

    Children over the threshold are recorded (their minimum f feeds the
    next threshold) but never pushed.  The goal test runs when a node is
    popped, so finding the goal counts as expanding it.  With a budget,
    the pass stops once nodes_expanded reaches it and reports truncated
    when work remained on the stack.
    """
    stats = PassStats() if collect_stats else None
    expanded = 0
    generated = 0
    min_exceed = None
    solution = None
    truncated = False

    if root.f > threshold:
        min_exceed = root.f
        if stats is not None:
            stats.record_leaf(root.path, root.g, root.h)
        return PassResult(threshold, None, min_exceed, 0, 0, False, stats)

    stack = [root]
    while stack:
        if budget is not None and expanded >= budget:
            truncated = True
            break
        node = stack.pop()
        expanded += 1
        if problem.is_goal(node.state):
            solution = (node.path, node.g)
            if stats is not None:
                stats.record_expansion(node.path, 0)
                stats.record_leaf(node.path, node.g, node.h)
            break
        raw = problem.expand(node.state, node.prev_op, node.h)
        if order is not None:
            raw = order.arrange(raw, node)
        generated += len(raw)
        if stats is not None:
            stats.record_expansion(node.path, len(raw))
            if not node.path:
                stats.root_children = len(raw)
        kept = []
        g = node.g
        path = node.path
        for child_state, op, cost, h in raw:
            cg = g + cost
            cf = cg + h
            if cf > threshold:
                if min_exceed is None or cf < min_exceed:
                    min_exceed = cf
                if stats is not None:
                    stats.record_leaf(path + (op,), cg, h)
            else:
                kept.append(SearchNode(child_state, cg, h, cf, op,
                                       path + (op,)))
        if kept:
            # push reversed so the first child is popped first
            stack.extend(reversed(kept))
        elif not raw and stats is not None:
            stats.record_leaf(path, node.g, node.h)

    return PassResult(threshold, solution, min_exceed, expanded, generated,
                      truncated, stats)


def next_threshold(result):
    """Smallest f that exceeded the previous threshold.

    Raises SpaceExhausted when the pass covered everything and pruned
    nothing, since no deeper pass can ever succeed.
    """
    if result.min_exceeding_f is None:
        raise SpaceExhausted(
            f"no node exceeded threshold {result.threshold}; the space "
            "holds no goal")
    return result.min_exceeding_f


@dataclass(slots=True)
class SearchOutcome:
    path: tuple
    cost: int
    iterations: list          # (threshold, nodes_expanded) per pass
    total_expanded: int
    total_generated: int


def serial_idastar(problem, order=None):
    """Iterative deepening: repeat cost-bounded passes, raising the
    threshold to the minimum exceeding f, until the goal is found."""
    root = make_root(problem)
    threshold = root.f
    iterations = []
    total = 0
    total_gen = 0
    while True:
        res = cost_bounded_dfs(problem, root, threshold, order=order)
        iterations.append((threshold, res.nodes_expanded))
        total += res.nodes_expanded
        total_gen += res.nodes_generated
        if res.solution is not None:
            path, cost = res.solution
            return SearchOutcome(path, cost, iterations, total, total_gen)
        threshold = next_threshold(res)
