"""Exact enumeration of self-avoiding walks and connective-constant bounds.

sigma(k) is the number of nearest-neighbour self-avoiding paths of length k
from the origin of Z^d.  Enumeration is an iterative depth-first search with
non-reversal pruning in front of the visited-set check; counts are exact
Python integers.  By submultiplicativity sigma(m+n) <= sigma(m) sigma(n)
(concatenation), sigma(k)^(1/k) is a rigorous upper bound on the connective
constant mu_d = lim sigma(k)^(1/k), so the finite-k estimates reported here
only ever overestimate mu_d.

A symmetry-folded fast path (count walks whose first step is +e_0, multiply
by 2d) is optional and must match the plain enumeration exactly; the plain
path is the default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_K_MAX = {2: 16, 3: 12}

_NODE_BUDGET = 5 * 10**7  # node budget behind default_k_max for d >= 4


class EnumerationCapExceeded(ValueError):
    """Requested walk length is beyond the feasibility guard."""


@dataclass(frozen=True)
class SawCount:
    d: int
    k: int
    count: int


def saw_upper_bound(d: int, k: int) -> int:
    """Non-reversing-walk bound 2d (2d-1)^(k-1), valid for k >= 1."""
    if k < 1:
        raise ValueError("bound defined for k >= 1")
    return 2 * d * (2 * d - 1) ** (k - 1)


def default_k_max(d: int) -> int:
    """Feasibility guard on walk length for exact enumeration."""
    if d in DEFAULT_K_MAX:
        return DEFAULT_K_MAX[d]
    k = 1
    while saw_upper_bound(d, k + 1) <= _NODE_BUDGET:
        k += 1
    return k


def _check_args(d: int, k: int, cap: int | None) -> None:
    if d < 2:
        raise ValueError("dimension must be >= 2")
    if k < 0:
        raise ValueError("walk length must be >= 0")
    limit = default_k_max(d) if cap is None else cap
    if k > limit:
        raise EnumerationCapExceeded(
            f"k={k} exceeds the enumeration cap {limit} for d={d}")


def _unit_steps(d: int) -> list[tuple[int, ...]]:
    # index 2i is -e_i, index 2i+1 is +e_i; reverse of step j is step j^1
    steps = []
    for i in range(d):
        for delta in (-1, 1):
            e = [0] * d
            e[i] = delta
            steps.append(tuple(e))
    return steps


_COUNTS_CACHE: dict[tuple[int, bool], list[int]] = {}


def saw_counts_upto(d: int, k_max: int, cap: int | None = None,
                    folded: bool = False) -> list[int]:
    """[sigma(0), sigma(1), ..., sigma(k_max)], exact."""
    _check_args(d, k_max, cap)
    cached = _COUNTS_CACHE.get((d, folded))
    if cached is not None and len(cached) > k_max:
        return cached[:k_max + 1]
    counts = [0] * (k_max + 1)
    counts[0] = 1
    if k_max == 0:
        return counts
    steps = _unit_steps(d)
    n_steps = len(steps)
    origin = (0,) * d

    def run(first_indices: list[int]) -> None:
        for j0 in first_indices:
            first = steps[j0]
            visited = {origin, first}
            # frames: [site, incoming step index, next candidate step index]
            frame = [[first, j0, 0]]
            counts[1] += 1
            while frame:
                top = frame[-1]
                site, inc, j = top
                depth = len(frame)
                if depth == k_max:
                    visited.discard(site)
                    frame.pop()
                    continue
                advanced = False
                while j < n_steps:
                    if j == inc ^ 1:   # non-reversal
                        j += 1
                        continue
                    st = steps[j]
                    nxt = tuple(a + b for a, b in zip(site, st))
                    j += 1
                    if nxt in visited:
                        continue
                    top[2] = j
                    visited.add(nxt)
                    frame.append([nxt, j - 1, 0])
                    counts[depth + 1] += 1
                    advanced = True
                    break
                if not advanced:
                    visited.discard(site)
                    frame.pop()

    if folded:
        run([1])   # +e_0 only; lattice symmetries act transitively on steps
        for k in range(1, k_max + 1):
            counts[k] *= 2 * d
    else:
        run(list(range(n_steps)))
    _COUNTS_CACHE[(d, folded)] = counts
    return counts


def count_saw(d: int, k: int, cap: int | None = None,
              folded: bool = False) -> SawCount:
    """sigma(k): exact count of length-k self-avoiding walks from the origin."""
    return SawCount(d, k, saw_counts_upto(d, k, cap=cap, folded=folded)[k])


def mu_upper_estimate(d: int, k: int, cap: int | None = None,
                      folded: bool = False) -> float:
    """sigma(k)^(1/k): a rigorous upper bound on the connective constant."""
    if k < 1:
        raise ValueError("k must be >= 1")
    count = count_saw(d, k, cap=cap, folded=folded).count
    return math.exp(math.log(count) / k)
