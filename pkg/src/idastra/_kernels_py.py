"""Pure-Python hot kernels.

Mirrors idastra._kernels (the compiled extension) exactly: every function
here must produce bit-identical results, so all arithmetic is done on
64-bit masked integers and byte strings.
"""

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

BACKEND = "python"

# Fifteen puzzle: goal places tile t at index t, blank (0) at index 0.
GOAL_TILES = bytes(range(16))

# Manhattan distance of tile t at position p from its goal cell t.
_MD = [
    [abs(p // 4 - t // 4) + abs(p % 4 - t % 4) for p in range(16)]
    for t in range(16)
]

# Blank displacement per operator: 0=Up, 1=Left, 2=Right, 3=Down.
_DELTA = (-4, -1, 1, 4)


def _legal(blank, op):
    if op == 0:
        return blank >= 4
    if op == 1:
        return blank % 4 != 0
    if op == 2:
        return blank % 4 != 3
    return blank < 12


def manhattan(tiles):
    """Sum of tile distances from home; the blank does not count."""
    total = 0
    for pos in range(16):
        t = tiles[pos]
        if t:
            total += _MD[t][pos]
    return total


def puzzle_expand(tiles, blank, h, prev_op, order):
    """Expand a puzzle state.

    tiles: bytes(16); blank: index of the 0 tile; h: Manhattan distance of
    tiles; prev_op: operator that produced this state (-1 at the root);
    order: bytes giving the operator expansion order.  The operator
    reversing prev_op is skipped.  Returns a list of
    (tiles, blank, op, h) tuples with h maintained incrementally.
    """
    out = []
    skip = 3 - prev_op if prev_op >= 0 else -1
    for op in order:
        if op == skip or not _legal(blank, op):
            continue
        dest = blank + _DELTA[op]
        t = tiles[dest]
        child = bytearray(tiles)
        child[blank] = t
        child[dest] = 0
        out.append((bytes(child), dest, op, h - _MD[t][dest] + _MD[t][blank]))
    return out


def _mix(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def path_hash(seed, tag, path):
    """Seeded 64-bit hash of a byte path, with independent tag streams."""
    h = _mix((seed + _GAMMA * (tag + 1)) & _MASK)
    for c in path:
        h = _mix((h + _GAMMA * (c + 1)) & _MASK)
    return h
