"""Deterministic discrete-event parallel search engine.

Virtual time advances in ticks; each worker performs at most one node
expansion per tick, and workers are stepped round-robin by id.  Work
messages (requests, donations, refusals) arrive message_latency_ticks
after sending; coordination (threshold grants, pass reports, solution
gating) is centralised in the coordinator and modelled as instantaneous.
The whole run is a pure function of (problem, config, workers, latency,
seed), so reports are bit-identical across repetitions.
"""

import random
from bisect import insort
from collections import deque

from idastra.core import SearchNode, make_root, serial_idastar
from idastra.engine.config import plan_clusters, validate_config
from idastra.engine.parts import anticipatory_check, donate, poll_target
from idastra.engine.report import EngineReport, WorkerStats
from idastra.errors import EngineStall, SpaceExhausted

_NO_PROGRESS_CAP = 20000


class _Worker:
    __slots__ = ("wid", "cluster", "open", "inbox", "stats", "outstanding",
                 "flip", "rng", "pass_expanded", "position")

    def __init__(self, wid, seed):
        self.wid = wid
        self.cluster = None
        self.position = 0               # index within the cluster
        self.open = deque()
        self.inbox = deque()            # (due_tick, seq, epoch, kind, payload)
        self.stats = WorkerStats()
        self.outstanding = False
        self.flip = True                # next neighbor poll goes right
        self.rng = random.Random((seed * 0x9E3779B1 + wid * 2654435761)
                                 & 0xFFFFFFFF)
        self.pass_expanded = 0


class _Cluster:
    __slots__ = ("cid", "members", "threshold", "epoch", "phase",
                 "live_nodes", "min_exceed", "bf_level", "bf_next",
                 "bf_cursor", "last_pass_expansions")

    def __init__(self, cid, members):
        self.cid = cid
        self.members = members
        self.threshold = None
        self.epoch = 0
        self.phase = "pending"   # pending|distributing|searching|holding|done
        self.live_nodes = 0
        self.min_exceed = None
        self.bf_level = []
        self.bf_next = []
        self.bf_cursor = 0
        self.last_pass_expansions = [0] * len(members)

    def snapshot_pass(self):
        self.last_pass_expansions = [w.pass_expanded for w in self.members]


class _Coordinator:
    """Threshold pool, grants, and the optimality gate.

    Candidate thresholds are the pruned f values every running pass
    reports.  A finishing cluster is granted the smallest candidate not
    yet claimed; with no unclaimed candidate it extrapolates by the mean
    granted increment.  A found solution is held until every candidate
    value below its cost has been searched to completion, which keeps
    the accepted cost optimal even when earlier grants raced ahead of
    candidate discovery (admissibility puts a pruned witness below any
    cheaper goal in the pool).
    """

    def __init__(self, root_f):
        self.pool = []                  # sorted candidate f values
        self.pool_set = set()
        self.done = set()               # thresholds of completed empty passes
        self.max_done = None
        self.claimed = set()
        self.granted_order = []
        self.solutions = []             # (cost, path, finder_threshold, cid)
        self.accepted = None
        self.root_f = root_f

    def add_candidate(self, f):
        if f not in self.pool_set:
            self.pool_set.add(f)
            insort(self.pool, f)

    def claim(self, value):
        self.claimed.add(value)
        self.granted_order.append(value)

    def next_unclaimed(self, below=None):
        for v in self.pool:
            if below is not None and v >= below:
                return None
            if v in self.claimed:
                continue
            if self.max_done is not None and v <= self.max_done:
                continue                # already proven empty
            return v
        return None

    def extrapolate(self):
        g = self.granted_order
        if not g:
            return self.root_f
        if len(g) >= 2:
            step = max(1, round((g[-1] - g[0]) / (len(g) - 1)))
        else:
            step = 1
        value = g[-1] + step
        # an earlier extrapolation may have leapfrogged this value
        while value in self.claimed:
            value += step
        return value

    def mark_done(self, threshold):
        self.done.add(threshold)
        if self.max_done is None or threshold > self.max_done:
            self.max_done = threshold

    def holding_cost(self):
        return min(s[0] for s in self.solutions) if self.solutions else None

    def best_solution(self):
        return min(self.solutions, key=lambda s: (s[0], s[1]))

    def reevaluate(self):
        """Accept the best held solution once nothing cheaper can exist."""
        if not self.solutions or self.accepted is not None:
            return
        cost, path, _thr, _cid = self.best_solution()
        for v in self.pool:
            if v >= cost:
                break
            if self.max_done is not None and v <= self.max_done:
                continue
            if v not in self.done:
                return                  # unswept candidate below the cost
        self.accepted = (cost, path)


class _SimEngine:
    def __init__(self, problem, config, workers, latency, seed,
                 serial_outcome=None):
        validate_config(config, workers)
        self.problem = problem
        self.config = config
        self.P = workers
        self.latency = latency
        self.order = (None if config.ordering.is_identity()
                      else config.ordering)
        if serial_outcome is None:
            serial_outcome = serial_idastar(problem, order=self.order)
        self.serial = serial_outcome

        self.workers = [_Worker(w, seed) for w in range(workers)]
        self.clusters = []
        for cid, block in enumerate(plan_clusters(workers, config.clusters)):
            members = [self.workers[w] for w in block]
            cl = _Cluster(cid, members)
            for pos, w in enumerate(members):
                w.cluster = cl
                w.position = pos
            self.clusters.append(cl)

        self.root = make_root(problem)
        self.coord = _Coordinator(self.root.f)
        self.tick = 0
        self.seq = 0
        self.donated_sent = 0
        self.donated_delivered = 0
        self.donated_dropped = 0
        self.in_flight = 0
        self.over_threshold = 0
        self.accepting_cluster = 0
        self.last_progress = 0
        self.space_exhausted = False

    # -- messaging ------------------------------------------------------

    def _send(self, sender, target, kind, payload):
        self.seq += 1
        sender.stats.messages_sent += 1
        self.in_flight += 1
        target.inbox.append((self.tick + self.latency, self.seq,
                             sender.cluster.epoch, kind, payload))

    def _deliver(self, w):
        while w.inbox and w.inbox[0][0] <= self.tick:
            _due, _seq, epoch, kind, payload = w.inbox.popleft()
            self.in_flight -= 1
            cl = w.cluster
            if epoch != cl.epoch:       # stale: sent during an ended pass
                if kind == "don":
                    self.donated_dropped += len(payload)
                continue
            if kind == "req":
                self._answer_request(w, payload)
            elif kind == "don":
                self.donated_delivered += len(payload)
                w.open.extend(payload)
                w.outstanding = False
            else:                       # refusal
                w.outstanding = False

    def _answer_request(self, donor, requester_wid):
        requester = self.workers[requester_wid]
        kept, batch = donate(donor.open, self.config.donation_fraction,
                             self.config.donate_from)
        if batch and donor.cluster.phase == "searching":
            donor.open = deque(kept)
            self.donated_sent += len(batch)
            self._send(donor, requester, "don", batch)
        else:
            self._send(donor, requester, "ref", None)

    # -- pass/threshold management ----------------------------------------

    def _start_pass(self, cl, threshold):
        self.coord.claim(threshold)
        cl.threshold = threshold
        cl.epoch += 1
        cl.min_exceed = None
        cl.live_nodes = 0
        for w in cl.members:
            w.open.clear()
            w.outstanding = False
            w.pass_expanded = 0
        root = SearchNode(self.root.state, self.root.g, self.root.h,
                          self.root.f, -1, ())
        if self.config.distribution == "BreadthFirst":
            if len(cl.members) == 1:
                self._bf_assign(cl, [root])
            else:
                cl.bf_level = [root]
                cl.bf_next = []
                cl.bf_cursor = 0
                cl.phase = "distributing"
        else:                           # KumarRao: lead starts, others beg
            lead = cl.members[0]
            lead.open.append(root)
            cl.live_nodes = 1
            cl.phase = "searching"

    def _bf_assign(self, cl, frontier):
        k = len(cl.members)
        for j, w in enumerate(cl.members):
            w.open.extend(frontier[j::k])
        cl.live_nodes = len(frontier)
        cl.bf_level = []
        cl.bf_next = []
        cl.bf_cursor = 0
        cl.phase = "searching"

    def _bf_level_done(self, cl):
        """Current level fully expanded: assign, descend, or finish."""
        frontier = cl.bf_next
        if not frontier:
            self._pass_complete(cl)
            return
        if len(frontier) >= len(cl.members):
            self._bf_assign(cl, frontier)
        else:
            cl.bf_level = frontier
            cl.bf_next = []
            cl.bf_cursor = 0

    def _grant_pending(self):
        hold = self.coord.holding_cost()
        for cl in self.clusters:
            if cl.phase != "pending":
                continue
            if not self.coord.granted_order:
                self._start_pass(cl, self.root.f)
                continue
            v = self.coord.next_unclaimed(below=hold)
            if v is not None:
                self._start_pass(cl, v)

    def _pass_complete(self, cl):
        cl.snapshot_pass()
        if cl.min_exceed is None and not self.coord.solutions:
            # nothing exceeded the threshold: the whole space was swept
            self.space_exhausted = True
            return
        self.coord.mark_done(cl.threshold)
        self.coord.reevaluate()
        if self.coord.accepted is not None:
            self.accepting_cluster = self.coord.best_solution()[3]
            return
        hold = self.coord.holding_cost()
        if hold is not None:
            # only thresholds that could hide a cheaper goal matter now
            v = self.coord.next_unclaimed(below=hold)
            if v is None:
                cl.phase = "done"
            else:
                self._start_pass(cl, v)
            return
        v = self.coord.next_unclaimed()
        if v is None:
            v = self.coord.extrapolate()
        self._start_pass(cl, v)

    def _report_solution(self, cl, node):
        cl.snapshot_pass()
        self.coord.solutions.append((node.g, node.path, cl.threshold, cl.cid))
        cl.phase = "holding"
        for w in cl.members:
            w.open.clear()
            w.outstanding = False
        cl.live_nodes = 0
        cl.epoch += 1                   # invalidate in-flight work messages
        self.coord.reevaluate()
        if self.coord.accepted is not None:
            self.accepting_cluster = self.coord.best_solution()[3]

    # -- worker stepping --------------------------------------------------

    def _expand(self, w, cl, node):
        """One node expansion on worker w; returns surviving children,
        or None when the node was a goal."""
        w.stats.nodes_expanded += 1
        w.pass_expanded += 1
        self.last_progress = self.tick
        if node.f > cl.threshold:
            self.over_threshold += 1
        if self.problem.is_goal(node.state):
            self._report_solution(cl, node)
            return None
        raw = self.problem.expand(node.state, node.prev_op, node.h)
        if self.order is not None:
            raw = self.order.arrange(raw, node)
        w.stats.nodes_generated += len(raw)
        kept = []
        for child_state, op, cost, h in raw:
            cg = node.g + cost
            cf = cg + h
            if cf > cl.threshold:
                self.coord.add_candidate(cf)
                if cl.min_exceed is None or cf < cl.min_exceed:
                    cl.min_exceed = cf
            else:
                kept.append(SearchNode(child_state, cg, h, cf, op,
                                       node.path + (op,)))
        return kept

    def _step(self, w):
        self._deliver(w)
        if self.coord.accepted is not None or self.space_exhausted:
            return
        cl = w.cluster
        if cl.phase == "distributing":
            if w is cl.members[0]:
                node = cl.bf_level[cl.bf_cursor]
                cl.bf_cursor += 1
                kept = self._expand(w, cl, node)
                if kept is None:
                    return              # goal reported
                cl.bf_next.extend(kept)
                if cl.bf_cursor == len(cl.bf_level):
                    self._bf_level_done(cl)
            else:
                w.stats.idle_ticks += 1
            return
        if cl.phase != "searching":
            w.stats.idle_ticks += 1
            return
        if w.open:
            node = w.open.popleft()
            cl.live_nodes -= 1
            kept = self._expand(w, cl, node)
            if kept is None:
                return
            if kept:
                w.open.extendleft(reversed(kept))
                cl.live_nodes += len(kept)
            if cl.live_nodes == 0 and cl.phase == "searching":
                self._pass_complete(cl)
                return
            if self.config.load_balancing and len(cl.members) > 1 \
                    and anticipatory_check(len(w.open),
                                           self.config.anticipation_trigger,
                                           w.outstanding):
                self._request_work(w)
        else:
            w.stats.idle_ticks += 1
            if self.config.load_balancing and len(cl.members) > 1 \
                    and not w.outstanding:
                self._request_work(w)

    def _request_work(self, w):
        members = [m.wid for m in w.cluster.members]
        target, w.flip = poll_target(w.position, members, w.flip, w.rng,
                                     self.config.polling)
        if target is None:
            return
        w.outstanding = True
        self._send(w, self.workers[target], "req", w.wid)

    # -- main loop ----------------------------------------------------------

    def run(self):
        cap = max(100000, 50 * self.serial.total_expanded)
        while True:
            self._grant_pending()
            for w in self.workers:
                self._step(w)
                if self.coord.accepted is not None:
                    break
            if self.space_exhausted:
                raise SpaceExhausted(
                    "a pass completed without pruning or solving")
            if self.coord.accepted is not None:
                break
            self.tick += 1
            if self.tick > cap or \
                    self.tick - self.last_progress > _NO_PROGRESS_CAP:
                raise EngineStall(
                    f"no acceptance after {self.tick} ticks "
                    f"(last progress at tick {self.last_progress})")
        return self._finish()

    def _finish(self):
        makespan = self.tick + 1
        cost, path = self.coord.accepted
        # undelivered donations count as returned work
        for w in self.workers:
            for _due, _seq, _epoch, kind, payload in w.inbox:
                if kind == "don":
                    self.donated_dropped += len(payload)
        balanced = (self.donated_sent
                    == self.donated_delivered + self.donated_dropped)
        finder = self.clusters[self.accepting_cluster]
        final_pass = [0] * self.P
        for pos, w in enumerate(finder.members):
            final_pass[w.wid] = finder.last_pass_expansions[pos]
        max_per_worker = max(w.stats.nodes_expanded for w in self.workers)
        return EngineReport(
            solution_path=path,
            solution_cost=cost,
            per_worker=[w.stats for w in self.workers],
            makespan=float(makespan),
            serial_equivalent_nodes=self.serial.total_expanded,
            speedup=self.serial.total_expanded / makespan,
            mode="sim",
            workers=self.P,
            clusters=self.config.clusters,
            thresholds_granted=list(self.coord.granted_order),
            final_pass_expansions=final_pass,
            tokens_balanced=balanced,
            over_threshold_expansions=self.over_threshold,
            max_worker_expansions=max_per_worker,
        )


def run_sim(problem, config, workers, latency=1, seed=0, serial_outcome=None):
    """Run the parallel engine in deterministic simulation mode."""
    return _SimEngine(problem, config, workers, latency, seed,
                      serial_outcome).run()
