# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels.

Must stay bit-identical to idastra._kernels_py; the test suite compares
the two backends call for call.
"""

from libc.stdint cimport int64_t, uint64_t

BACKEND = "compiled"

GOAL_TILES = bytes(range(16))

cdef int _MD_FLAT[256]
cdef int _DELTA[4]

_DELTA[0] = -4
_DELTA[1] = -1
_DELTA[2] = 1
_DELTA[3] = 4

cdef int _t, _p
for _t in range(16):
    for _p in range(16):
        _MD_FLAT[_t * 16 + _p] = (abs(_p // 4 - _t // 4)
                                  + abs(_p % 4 - _t % 4))

cdef uint64_t _GAMMA = 0x9E3779B97F4A7C15U


cdef inline bint _legal(int blank, int op):
    if op == 0:
        return blank >= 4
    if op == 1:
        return blank % 4 != 0
    if op == 2:
        return blank % 4 != 3
    return blank < 12


def manhattan(bytes tiles):
    """Sum of tile distances from home; the blank does not count."""
    cdef int total = 0
    cdef int pos, t
    cdef const unsigned char* p = tiles
    for pos in range(16):
        t = p[pos]
        if t:
            total += _MD_FLAT[t * 16 + pos]
    return total


def puzzle_expand(bytes tiles, int blank, int h, int prev_op, bytes order):
    """Expand a puzzle state; see the pure-Python twin for the contract."""
    cdef int skip = 3 - prev_op if prev_op >= 0 else -1
    cdef int i, op, dest, t
    cdef const unsigned char* po = order
    cdef unsigned char buf[16]
    cdef const unsigned char* pt = tiles
    out = []
    for i in range(len(order)):
        op = po[i]
        if op == skip or not _legal(blank, op):
            continue
        dest = blank + _DELTA[op]
        t = pt[dest]
        for i2 in range(16):
            buf[i2] = pt[i2]
        buf[blank] = <unsigned char>t
        buf[dest] = 0
        out.append((bytes(buf[:16]), dest, op,
                    h - _MD_FLAT[t * 16 + dest] + _MD_FLAT[t * 16 + blank]))
    return out


cdef inline uint64_t _mix(uint64_t z):
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9U
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBU
    return z ^ (z >> 31)


def path_hash(seed, tag, bytes path):
    """Seeded 64-bit hash of a byte path, with independent tag streams."""
    cdef uint64_t h = _mix(<uint64_t>(<int64_t>seed) + _GAMMA * (<uint64_t>(<int64_t>tag) + 1))
    cdef const unsigned char* p = path
    cdef Py_ssize_t i
    for i in range(len(path)):
        h = _mix(h + _GAMMA * (<uint64_t>p[i] + 1))
    return h
