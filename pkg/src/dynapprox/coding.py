"""Mixed-radix codes and saturating int64 cost arithmetic."""

import numpy as np

INF_COST = 1 << 61    # +inf sentinel: absorbs under saturating add, dominates min
NEG_INF = -(1 << 61)


def strides(ms):
    """Strides for mixed-radix encoding; coordinate 0 is least significant."""
    out = []
    acc = 1
    for m in ms:
        out.append(acc)
        acc *= m
    return out


def table_size(ms):
    acc = 1
    for m in ms:
        acc *= m
    return acc


def encode(digits, strs):
    return sum(d * s for d, s in zip(digits, strs))


def digit_of(codes, stride, m):
    """Extract one mixed-radix digit from an integer or numpy code array."""
    return (codes // stride) % m


def decode(code, ms):
    out = []
    for m in ms:
        out.append(code % m)
        code //= m
    return tuple(out)


def add_sat(a, b):
    """Saturating add for int64 cost arrays/scalars holding INF_COST sentinels."""
    return np.minimum(np.add(a, b), INF_COST)
