"""Pure load-balancing and termination primitives.

These are the unit-testable pieces the engine composes: donation
slicing, poll-target selection, the anticipatory trigger, and the
termination predicate.
"""

import math


def donate(open_list, fraction, end):
    """Split an open list into (kept, donated).

    Donates ceil(fraction * n) nodes from the chosen end ("HeadOfList" =
    deep nodes, "TailOfList" = near-root nodes), but a donor with two or
    more nodes always keeps at least one; the only way to give away a
    last node is fraction = 1 with exactly one node.  An empty donation
    means refusal (the requester re-polls).
    """
    n = len(open_list)
    if n == 0 or fraction <= 0.0:
        return list(open_list), []
    want = math.ceil(fraction * n)
    if n == 1:
        want = 1 if fraction >= 1.0 else 0
    else:
        want = min(want, n - 1)
    if want == 0:
        return list(open_list), []
    items = list(open_list)
    if end == "HeadOfList":
        return items[want:], items[:want]
    return items[:-want], items[-want:]


def poll_target(position, members, flip, rng, policy):
    """Pick the worker to beg for work.

    position: index of the requester within members.  Neighbor polling
    alternates right then left on the cluster ring (flip carries the
    alternation state; returns the new value).  Random polling draws
    uniformly from the other members.  Returns (target id or None, flip).
    """
    k = len(members)
    if k < 2:
        return None, flip
    if policy == "Random":
        others = [m for i, m in enumerate(members) if i != position]
        return rng.choice(others), flip
    if flip:
        target = members[(position + 1) % k]
    else:
        target = members[(position - 1) % k]
    return target, not flip


def anticipatory_check(open_size, trigger, outstanding):
    """Fire a pre-emptive work request when the list is at or below the
    trigger and no request is already out."""
    return open_size <= trigger and not outstanding


def detect_termination(accepted, all_idle, in_flight):
    """The run is over: a solution was accepted, every worker is idle,
    and no message (work token) remains in flight."""
    return accepted is not None and all_idle and in_flight == 0
