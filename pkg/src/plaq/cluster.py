"""The good-path cluster at the origin.

A path is good when every step that increases the l1 norm uses an occupied
bond; steps toward the origin are unconditional.  The cluster K is the set of
sites reachable from 0 by good paths.  Growth uses the per-step relation
(toward-steps free, away-steps over occupied bonds) rather than path
enumeration: any walk whose norm-increasing steps are all occupied
loop-erases to a good self-avoiding path over a subset of its steps, so the
breadth-first closure of the step relation equals K.  That equivalence is the
load-bearing algorithmic fact here and is oracle-tested against exhaustive
path enumeration.

Growth is truncated once a site of norm >= r_max is reached: away-steps stop
there (escaped is flagged) while toward-steps keep expanding, which preserves
downward closure of the returned site set.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .lattice import Bond, Site, l1_norm, precedes
from .saw import EnumerationCapExceeded, default_k_max, saw_counts_upto


@dataclass(frozen=True)
class ClusterResult:
    d: int
    sites: frozenset[Site]
    escaped: bool
    radius: int
    r_max: int


def _step_bond(x: Site, y: Site, axis: int) -> Bond:
    return Bond(x, axis) if x[axis] < y[axis] else Bond(y, axis)


def is_good_path(cfg, path: list[Site]) -> bool:
    """True iff the (self-avoiding, nearest-neighbour) path is good."""
    if not path:
        raise ValueError("empty path")
    if len(set(path)) != len(path):
        raise ValueError("path revisits a site")
    for v, w in zip(path, path[1:]):
        diffs = [i for i in range(len(v)) if v[i] != w[i]]
        if len(diffs) != 1 or abs(v[diffs[0]] - w[diffs[0]]) != 1:
            raise ValueError(f"consecutive sites {v}, {w} are not adjacent")
        if l1_norm(w) > l1_norm(v):
            if not cfg.bond_state(_step_bond(v, w, diffs[0])):
                return False
    return True


def grow_good_cluster(cfg, r_max: int) -> ClusterResult:
    """Breadth-first closure of the good-step relation from the origin.

    Expansion order is (l1 norm, site) ascending; the order is irrelevant to
    the result but fixed for reproducible traces.
    """
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    d = cfg.d
    origin: Site = (0,) * d
    bond_state = cfg.bond_state
    sites = {origin}
    escaped = False
    radius = 0
    heap: list[tuple[int, Site]] = [(0, origin)]
    while heap:
        norm, x = heapq.heappop(heap)
        if norm > radius:
            radius = norm
        at_cutoff = norm >= r_max
        if at_cutoff:
            escaped = True
        for axis in range(d):
            c = x[axis]
            for delta in (-1, 1):
                y = x[:axis] + (c + delta,) + x[axis + 1:]
                if y in sites:
                    continue
                away = abs(c + delta) > abs(c)
                if away:
                    if at_cutoff:
                        continue
                    bond = Bond(x, axis) if delta == 1 else Bond(y, axis)
                    if not bond_state(bond):
                        continue
                sites.add(y)
                heapq.heappush(heap, (norm + (1 if away else -1), y))
    return ClusterResult(d, frozenset(sites), escaped, radius, r_max)


def check_downward_closed(res: ClusterResult) -> bool:
    """Every single-coordinate step toward 0 from a cluster site stays inside."""
    sites = res.sites
    for x in sites:
        for axis, c in enumerate(x):
            if c == 0:
                continue
            y = x[:axis] + (c - (1 if c > 0 else -1),) + x[axis + 1:]
            if y not in sites:
                return False
    return True


def count_good_paths(cfg, r: int, k_max: int) -> int:
    """Exact count of good self-avoiding paths from 0, of length <= k_max,
    ending at a site of l1 norm exactly r (intermediate norms unrestricted)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if k_max < r:
        raise ValueError("k_max must be >= r")
    d = cfg.d
    bond_state = cfg.bond_state
    origin: Site = (0,) * d
    count = 0
    visited = {origin}

    def extend(x: Site, norm: int, depth: int) -> None:
        nonlocal count
        if norm == r:
            count += 1
        if depth == k_max:
            return
        for axis in range(d):
            c = x[axis]
            for delta in (-1, 1):
                y = x[:axis] + (c + delta,) + x[axis + 1:]
                if y in visited:
                    continue
                away = abs(c + delta) > abs(c)
                if away:
                    bond = Bond(x, axis) if delta == 1 else Bond(y, axis)
                    if not bond_state(bond):
                        continue
                visited.add(y)
                extend(y, norm + (1 if away else -1), depth + 1)
                visited.discard(y)

    extend(origin, 0, 0)
    return count


def expected_good_paths_truncated(p: float, d: int, r: int, k_max: int,
                                  cap: int | None = None) -> float:
    """Exact expectation of the truncated endpoint-norm-r good-path count:
    the sum of p^(number of away steps) over all self-avoiding paths of
    length <= k_max whose endpoint has l1 norm exactly r."""
    if r < 1 or k_max < r:
        raise ValueError("need r >= 1 and k_max >= r")
    limit = default_k_max(d) if cap is None else cap
    if k_max > limit:
        raise EnumerationCapExceeded(
            f"k_max={k_max} exceeds the enumeration cap {limit} for d={d}")
    origin: Site = (0,) * d
    total = 0.0
    visited = {origin}

    def extend(x: Site, norm: int, depth: int, p_pow: float) -> None:
        nonlocal total
        if norm == r:
            total += p_pow
        if depth == k_max:
            return
        for axis in range(d):
            c = x[axis]
            for delta in (-1, 1):
                y = x[:axis] + (c + delta,) + x[axis + 1:]
                if y in visited:
                    continue
                away = abs(c + delta) > abs(c)
                visited.add(y)
                extend(y, norm + (1 if away else -1), depth + 1,
                       p_pow * p if away else p_pow)
                visited.discard(y)

    extend(origin, 0, 0, 1.0)
    return total


def good_path_expectation_table(p: float, d: int, k_max: int,
                                cap: int | None = None) -> list[list[float]]:
    """table[r][k] = total p^(away steps) over self-avoiding paths of length
    exactly k with endpoint norm exactly r, for 0 <= r, k <= k_max.  One
    enumeration pass serves every (r <= k_max, length cap <= k_max) query:
    expected_good_paths_truncated(p, d, r, K) == sum(table[r][:K+1])."""
    limit = default_k_max(d) if cap is None else cap
    if k_max > limit:
        raise EnumerationCapExceeded(
            f"k_max={k_max} exceeds the enumeration cap {limit} for d={d}")
    table = [[0.0] * (k_max + 1) for _ in range(k_max + 1)]
    origin: Site = (0,) * d
    visited = {origin}

    def extend(x: Site, norm: int, depth: int, p_pow: float) -> None:
        table[norm][depth] += p_pow
        if depth == k_max:
            return
        for axis in range(d):
            c = x[axis]
            for delta in (-1, 1):
                y = x[:axis] + (c + delta,) + x[axis + 1:]
                if y in visited:
                    continue
                away = abs(c + delta) > abs(c)
                visited.add(y)
                extend(y, norm + (1 if away else -1), depth + 1,
                       p_pow * p if away else p_pow)
                visited.discard(y)

    extend(origin, 0, 0, 1.0)
    return table


def path_count_bound(p: float, d: int, r: int, k_max: int,
                     cap: int | None = None) -> float:
    """Geometric-series bound on the truncated expectation: the sum over
    B = 0 .. floor((k_max - r)/2) of sigma(2B + r) p^(B + r), with exact
    sigma.  Dominates expected_good_paths_truncated term by term: paths with
    A away and B toward steps number at most sigma(A + B) and have weight
    p^A with A = B + r."""
    if r < 1 or k_max < r:
        raise ValueError("need r >= 1 and k_max >= r")
    b_top = (k_max - r) // 2
    sigma = saw_counts_upto(d, 2 * b_top + r, cap=cap)
    return sum(sigma[2 * b + r] * p ** (b + r) for b in range(b_top + 1))
