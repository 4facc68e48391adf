"""Layered approximation: delete every k-th breadth-first layer (or clear a
sliding pair of layers, for domination), solve each residual exactly over a
small-width decomposition, and keep the best answer."""

import math
from fractions import Fraction

from .coding import INF_COST, add_sat
from .errors import InvalidEpsilon
from .exactdp import solve_csp, solve_domination
from .gendom import clear
from .graph import bfs_layers


def layers_for(eps):
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise InvalidEpsilon("accuracy parameter must be in (0, 1)")
    return math.ceil(1 / eps)


def baker_csp(inst, eps, width_cap=None, budget=1 << 26):
    """Revenue within (1 - eps) of optimal: the best residual after deleting
    every k-th layer, k = ceil(1/eps).  Never exceeds the true optimum."""
    k = layers_for(eps)
    if inst.n == 0:
        return 0
    la = bfs_layers(inst.gaifman, k)
    best = 0
    for i in range(k):
        keep = set(inst.vertices()) - la.layer_set(i)
        sub = inst.induced(keep)
        best = max(best, solve_csp(sub, width_cap=width_cap, budget=budget))
    return best


def baker_domination(inst, eps, width_cap=None, budget=1 << 26):
    """Cost within (1 - eps) of optimal from below: layer the graph mod 4k,
    clear each window of two consecutive layers (indices 4i+1, 4i+2), solve
    the cleared instances exactly, and return the costliest answer."""
    k = layers_for(eps)
    if inst.n == 0:
        return 0
    la = bfs_layers(inst.gaifman, 4 * k)
    best = 0
    for i in range(k):
        blanket = la.layer_set(4 * i + 1) | la.layer_set(4 * i + 2)
        sub = clear(inst, blanket)
        best = max(best, solve_domination(sub, width_cap=width_cap, budget=budget))
    return min(best, INF_COST)
