"""Fifteen puzzle with Manhattan distance.

States are (tiles, blank) pairs where tiles is bytes(16) in row-major
order, 0 marks the blank, and the goal places tile t at index t.
Operators move the blank: 0=Up, 1=Left, 2=Right, 3=Down; the reverse of
op is 3 - op.
"""

import random

from idastra._backend import kernels
from idastra.errors import MalformedLine, UnsolvableInstance

GOAL_TILES = bytes(range(16))
IDENTITY_ORDER = bytes((0, 1, 2, 3))

_DELTA = (-4, -1, 1, 4)


def _legal_ops(blank):
    ops = []
    if blank >= 4:
        ops.append(0)
    if blank % 4 != 0:
        ops.append(1)
    if blank % 4 != 3:
        ops.append(2)
    if blank < 12:
        ops.append(3)
    return ops


def manhattan(tiles):
    return kernels.manhattan(bytes(tiles))


def apply_op(state, op):
    tiles, blank = state
    dest = blank + _DELTA[op]
    child = bytearray(tiles)
    child[blank] = tiles[dest]
    child[dest] = 0
    return (bytes(child), dest)


def puzzle_successors(state, operator_order=IDENTITY_ORDER, prev_op=None):
    """Legal moves in operator order as (state, op, cost) triples.

    When prev_op is given, the move that would undo it is skipped.
    """
    tiles, blank = state
    skip = 3 - prev_op if prev_op is not None and prev_op >= 0 else -1
    out = []
    for op in operator_order:
        if op == skip:
            continue
        dest = blank + _DELTA[op]
        if dest < 0 or dest > 15:
            continue
        if op == 1 and blank % 4 == 0:
            continue
        if op == 2 and blank % 4 == 3:
            continue
        child = bytearray(tiles)
        child[blank] = tiles[dest]
        child[dest] = 0
        out.append(((bytes(child), dest), op, 1))
    return out


def is_solvable(tiles):
    """Parity test against the blank-first goal.

    Every blank move is a transposition and changes the blank's taxicab
    parity, so (permutation parity == blank displacement parity) is
    invariant and holds at the goal.
    """
    inversions = 0
    for i in range(16):
        for j in range(i + 1, 16):
            if tiles[i] > tiles[j]:
                inversions += 1
    blank = tiles.index(0)
    blank_parity = (blank // 4 + blank % 4) % 2
    return inversions % 2 == blank_parity


def scramble(depth, seed):
    """Random walk from the goal without immediate backtracking."""
    rng = random.Random(seed)
    state = (GOAL_TILES, 0)
    prev = -1
    for _ in range(depth):
        ops = [op for op in _legal_ops(state[1])
               if prev < 0 or op != 3 - prev]
        op = rng.choice(ops)
        state = apply_op(state, op)
        prev = op
    return state


def parse_korf_set(text):
    """Parse instances given as 16 whitespace-separated tile numbers per
    line (0 is the blank).  Blank lines and #-comments are skipped."""
    states = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 16:
            raise MalformedLine(lineno, f"expected 16 fields, got {len(parts)}")
        try:
            values = [int(p) for p in parts]
        except ValueError:
            raise MalformedLine(lineno, "non-integer field") from None
        if sorted(values) != list(range(16)):
            raise MalformedLine(lineno, "not a permutation of 0..15")
        tiles = bytes(values)
        if not is_solvable(tiles):
            inv = sum(1 for i in range(16) for j in range(i + 1, 16)
                      if tiles[i] > tiles[j])
            blank = tiles.index(0)
            report = (f"inversion parity {inv % 2} != blank parity "
                      f"{(blank // 4 + blank % 4) % 2}")
            raise UnsolvableInstance(lineno, report)
        states.append((tiles, tiles.index(0)))
    return states


class PuzzleProblem:
    """Search-problem adapter for one puzzle instance."""

    def __init__(self, state, operator_order=IDENTITY_ORDER):
        tiles, blank = state
        self.start = (bytes(tiles), blank)
        self.operator_order = bytes(operator_order)
        self.operator_count = 4

    def initial_state(self):
        return self.start

    def initial_h(self):
        return kernels.manhattan(self.start[0])

    def is_goal(self, state):
        return state[0] == GOAL_TILES

    def heuristic(self, state):
        return kernels.manhattan(state[0])

    def successors(self, state):
        return puzzle_successors(state, self.operator_order)

    def expand(self, state, prev_op, h):
        tiles, blank = state
        return [((ct, cb), op, 1, ch) for ct, cb, op, ch in
                kernels.puzzle_expand(tiles, blank, h, prev_op,
                                      self.operator_order)]
