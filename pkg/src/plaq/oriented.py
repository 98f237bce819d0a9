"""Oriented and admissible reachability, critical-point estimation, the
two-dimensional directed duality, annulus circuits, and the renormalization
skeleton.

Admissible paths relax good paths by ranking sites with the coordinate sum
s(x) instead of the l1 norm: s-increasing steps need occupied bonds,
s-decreasing steps are free (on the nearest-neighbour lattice every step
changes s by exactly 1, so there are no level steps).  Reachability is again
the breadth-first closure of the per-step relation, exact by loop erasure,
and is oracle-tested against exhaustive path enumeration on small windows.

Infinite-volume quantities get finite-size proxies: escape to (or targets
on) a size-L box, with the pseudo-critical point defined as the p where the
crossing probability passes 1/2.  Trial seeds feed the same uniforms at
every p, so crossing indicators are monotone-coupled in p and bisection is
well behaved.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .cluster import grow_good_cluster
from .lattice import Bond, Cone, Site, in_cone, s_sum
from .mc import wilson_interval
from .sampler import derive_trial_config

VARIANTS = ("good", "adm", "admH", "admK", "oriented")


# -- regions -----------------------------------------------------------------

@dataclass(frozen=True)
class RegionSpec:
    """Site-membership predicate for restricted reachability.

    kinds: "all"; "hplus" (s(x) >= 1, with the designated start exempt);
    "orthant" (all coordinates >= 0); "cone" (K_{a,b}, d=2 and up with the
    first axis as the cone axis); "box" (componentwise lo <= x <= hi).
    """

    kind: str
    cone: Cone | None = None
    lo: Site | None = None
    hi: Site | None = None

    def contains(self, x: Site, is_start: bool = False) -> bool:
        k = self.kind
        if k == "all":
            return True
        if k == "hplus":
            return is_start or s_sum(x) >= 1
        if k == "orthant":
            return all(c >= 0 for c in x)
        if k == "cone":
            return in_cone(x, self.cone)
        if k == "box":
            return all(a <= c <= b for a, c, b in zip(self.lo, x, self.hi))
        raise ValueError(f"unknown region kind {k!r}")


def region_all() -> RegionSpec:
    return RegionSpec("all")


def region_hplus() -> RegionSpec:
    return RegionSpec("hplus")


def region_orthant() -> RegionSpec:
    return RegionSpec("orthant")


def region_cone(a, b) -> RegionSpec:
    return RegionSpec("cone", cone=Cone(Fraction(a), None if b is None else Fraction(b)))


def region_box(lo: Site, hi: Site) -> RegionSpec:
    return RegionSpec("box", lo=tuple(lo), hi=tuple(hi))


# -- reachability closures ----------------------------------------------------

def _linf(x: Site) -> int:
    return max(abs(c) for c in x)


def admissible_closure(cfg, source: Site, region: RegionSpec, step_cap: int,
                       targets=None) -> tuple[set[Site], bool]:
    """Breadth-first closure of the admissible step relation from source.

    Exploration is clipped to the l-infinity ball of radius step_cap around
    the origin (the finite-proxy truncation) and to the region; the source is
    exempt from the region test.  Returns (reached set, target hit); with a
    target predicate the search stops at the first hit.
    """
    d = cfg.d
    bond_state = cfg.bond_state
    contains = region.contains
    reached = {source}
    if targets is not None and targets(source):
        return reached, True
    stack = [source]
    while stack:
        x = stack.pop()
        for axis in range(d):
            c = x[axis]
            for delta in (-1, 1):
                y = x[:axis] + (c + delta,) + x[axis + 1:]
                if y in reached or _linf(y) > step_cap or not contains(y):
                    continue
                if delta == 1:   # s-increasing step needs an occupied bond
                    if not bond_state(Bond(x, axis)):
                        continue
                reached.add(y)
                if targets is not None and targets(y):
                    return reached, True
                stack.append(y)
    return reached, False


def oriented_closure(cfg, source: Site, region: RegionSpec, step_cap: int,
                     targets=None) -> tuple[set[Site], bool]:
    """Closure under +axis steps over occupied bonds only."""
    d = cfg.d
    bond_state = cfg.bond_state
    contains = region.contains
    reached = {source}
    if targets is not None and targets(source):
        return reached, True
    stack = [source]
    while stack:
        x = stack.pop()
        for axis in range(d):
            y = x[:axis] + (x[axis] + 1,) + x[axis + 1:]
            if y in reached or _linf(y) > step_cap or not contains(y):
                continue
            if not bond_state(Bond(x, axis)):
                continue
            reached.add(y)
            if targets is not None and targets(y):
                return reached, True
            stack.append(y)
    return reached, False


def admissible_reach(cfg, source: Site, region: RegionSpec, targets,
                     step_cap: int) -> bool:
    return admissible_closure(cfg, source, region, step_cap, targets)[1]


def oriented_reach(cfg, source: Site, region: RegionSpec, targets,
                   step_cap: int) -> bool:
    return oriented_closure(cfg, source, region, step_cap, targets)[1]


@dataclass(frozen=True)
class REstimate:
    value: int
    censored: bool


def estimate_R(cfg, n_max: int, region: RegionSpec | None = None) -> REstimate:
    """Largest n <= n_max with an admissible path from 0 to n*(1,...,1),
    exploring within the l-infinity box of radius n_max (or a caller-supplied
    region); censored means n_max itself was reached."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    d = cfg.d
    origin: Site = (0,) * d
    if region is None:
        region = region_box((-n_max,) * d, (n_max,) * d)
    reached, _ = admissible_closure(cfg, origin, region, n_max)
    best = 0
    for n in range(n_max, 0, -1):
        if (n,) * d in reached:
            best = n
            break
    return REstimate(best, best == n_max)


# -- crossing probabilities and pseudo-critical points -------------------------

def crossing_indicator(variant: str, d: int, L: int, cfg) -> bool:
    """One trial of the variant's finite-size escape event on a size-L box.

    good:      the good cluster escapes the l1 ball of radius L;
    adm/admH/admK: an admissible path from 0 reaches the box corner L*(1,..,1)
               within the respective region (all / H_+ / orthant);
    oriented:  an oriented occupied path from 0 reaches coordinate sum L.
    """
    origin: Site = (0,) * d
    if variant == "good":
        return grow_good_cluster(cfg, L).escaped
    if variant in ("adm", "admH", "admK"):
        corner = (L,) * d
        region = {"adm": region_all(), "admH": region_hplus(),
                  "admK": region_orthant()}[variant]
        return admissible_reach(cfg, origin, region,
                                lambda y: y == corner, L)
    if variant == "oriented":
        return oriented_reach(cfg, origin, region_all(),
                              lambda y: s_sum(y) >= L, L)
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class CrossingResult:
    variant: str
    d: int
    p: float
    L: int
    trials: int
    hits: int

    @property
    def estimate(self) -> float:
        return self.hits / self.trials

    def wilson(self, confidence: float = 0.99):
        return wilson_interval(self.hits, self.trials, confidence)


def _crossing_worker(args) -> int:
    variant, d, p, L, master_seed, start, stop = args
    hits = 0
    for trial in range(start, stop):
        cfg = derive_trial_config(d, p, master_seed, trial)
        if crossing_indicator(variant, d, L, cfg):
            hits += 1
    return hits


def crossing_probability(variant: str, d: int, p: float, L: int, trials: int,
                         master_seed: int, threads: int = 1) -> CrossingResult:
    """Fraction of trials whose variant event crosses the size-L box."""
    if L < 4:
        raise ValueError("L must be >= 4")
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    from .mc import _chunks, _run_chunked
    args = [(variant, d, p, L, master_seed, s, e)
            for s, e in _chunks(trials, threads)]
    hits = sum(_run_chunked(_crossing_worker, args, threads))
    return CrossingResult(variant, d, p, L, trials, hits)


def crossing_threshold(variant: str, d: int, L: int, cfg) -> float:
    """The exact smallest p at which this trial's crossing event holds.

    Bottleneck shortest path on the variant's step relation: free steps keep
    a path's level, steps that need occupation raise it to that bond's
    uniform deviate, and the returned value is the min over paths of the max
    required uniform.  Since a bond is occupied iff its uniform is < p, the
    crossing indicator at any p equals [threshold < p] exactly (every
    variant's targets need at least one occupied step, so the p = 0 edge
    case agrees too).  math.inf means the target is structurally
    unreachable.
    """
    import heapq
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    origin: Site = (0,) * d
    uniform = cfg.uniform
    corner = (L,) * d
    if variant == "good":
        def edges(x):
            for axis in range(d):
                c = x[axis]
                for delta in (-1, 1):
                    y = x[:axis] + (c + delta,) + x[axis + 1:]
                    away = abs(c + delta) > abs(c)
                    bond = (Bond(x, axis) if delta == 1 else Bond(y, axis)) \
                        if away else None
                    yield y, bond

        def is_target(x):
            return sum(abs(c) for c in x) >= L

        def in_play(x):
            return sum(abs(c) for c in x) <= L
    elif variant == "oriented":
        def edges(x):
            for axis in range(d):
                y = x[:axis] + (x[axis] + 1,) + x[axis + 1:]
                yield y, Bond(x, axis)

        def is_target(x):
            return s_sum(x) >= L

        def in_play(x):
            return _linf(x) <= L
    else:
        region = {"adm": region_all(), "admH": region_hplus(),
                  "admK": region_orthant()}[variant]
        contains = region.contains

        def edges(x):
            for axis in range(d):
                c = x[axis]
                yield x[:axis] + (c + 1,) + x[axis + 1:], Bond(x, axis)
                yield x[:axis] + (c - 1,) + x[axis + 1:], None

        def is_target(x):
            return x == corner

        def in_play(x):
            return _linf(x) <= L and contains(x)

    best = {origin: 0.0}
    heap = [(0.0, origin)]
    while heap:
        t, x = heapq.heappop(heap)
        if t > best.get(x, math.inf):
            continue
        if is_target(x):
            return t
        for y, bond in edges(x):
            if not in_play(y):
                continue
            cand = t if bond is None else max(t, uniform(bond))
            if cand < best.get(y, math.inf):
                best[y] = cand
                heapq.heappush(heap, (cand, y))
    return math.inf


def _threshold_worker(args) -> list[float]:
    variant, d, L, master_seed, start, stop = args
    # thresholds read only the uniforms, so the config's p is immaterial
    return [crossing_threshold(variant, d, L,
                               derive_trial_config(d, 0.0, master_seed, t))
            for t in range(start, stop)]


def crossing_thresholds(variant: str, d: int, L: int, trials: int,
                        master_seed: int, threads: int = 1) -> list[float]:
    """Per-trial crossing thresholds; [threshold < p] replays the crossing
    indicator of the same (seed, trial) at any p."""
    from .mc import _chunks, _run_chunked
    args = [(variant, d, L, master_seed, s, e)
            for s, e in _chunks(trials, threads)]
    out: list[float] = []
    for part in _run_chunked(_threshold_worker, args, threads):
        out.extend(part)
    return out


@dataclass(frozen=True)
class CriticalEstimate:
    variant: str
    d: int
    L_list: tuple[int, ...]
    trials: int
    tolerance: float
    master_seed: int
    p_hat: dict[int, float]
    bracket: dict[int, tuple[float, float]]
    evaluations: dict[int, tuple[tuple[float, float], ...]]
    monotone_ok: bool


def estimate_critical(variant: str, d: int, L_list, trials: int, tol: float,
                      master_seed: int, threads: int = 1,
                      method: str = "threshold") -> CriticalEstimate:
    """Bisection on p until the crossing probability straddles 1/2 within tol.

    All evaluations share the same trial seeds, so the empirical crossing
    curve is non-decreasing in p configuration by configuration and the
    bisection target is well defined; any non-monotone pair of evaluations is
    flagged (it would indicate a coupling bug), never fatal.

    method "threshold" computes each trial's exact crossing threshold once
    and reads every bisection evaluation off the threshold counts; this gives
    the same estimates, point for point, as rerunning the coupled trials at
    each probed p (method "bfs"), at a fraction of the cost.
    """
    if tol < 1e-3:
        raise ValueError("tolerance below 1e-3 is not supported")
    if method not in ("threshold", "bfs"):
        raise ValueError(f"unknown method {method!r}")
    p_hat: dict[int, float] = {}
    bracket: dict[int, tuple[float, float]] = {}
    evaluations: dict[int, tuple] = {}
    monotone_ok = True
    for L in L_list:
        if method == "threshold":
            thresholds = crossing_thresholds(variant, d, L, trials,
                                             master_seed, threads)

            def evaluate(p: float) -> float:
                return sum(1 for t in thresholds if t < p) / trials
        else:
            def evaluate(p: float) -> float:
                return crossing_probability(variant, d, p, L, trials,
                                            master_seed, threads).estimate
        lo, hi = 0.0, 1.0
        evals = []
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            est = evaluate(mid)
            evals.append((mid, est))
            if est < 0.5:
                lo = mid
            else:
                hi = mid
        p_hat[L] = 0.5 * (lo + hi)
        bracket[L] = (lo, hi)
        evaluations[L] = tuple(sorted(evals))
        for (p1, e1), (p2, e2) in zip(evaluations[L], evaluations[L][1:]):
            if e1 > e2:
                monotone_ok = False
    return CriticalEstimate(variant, d, tuple(L_list), trials, tol,
                            master_seed, p_hat, bracket, evaluations,
                            monotone_ok)


# -- two-dimensional directed duality ------------------------------------------

@dataclass(frozen=True)
class DualityWindow:
    """Finite window certifying the escape/blocking dichotomy at d=2.

    Primal side: the diamond {0 <= s(x) <= height, |x1 - x2| <= half_width};
    escape means an admissible path from 0 within H_+ (except the start)
    reaches coordinate sum ``height`` inside the window.

    Dual side: a dual site (i, j) stands for the point (i+1/2, j+1/2);
    horizontal dual bonds are directed left to right and vertical ones top to
    bottom, and a dual bond is open iff the primal bond it crosses is
    unoccupied.  Blocking means a directed open dual path from a source on
    the upper-left diagonals to a sink on the lower-right ones.  The terminal
    sets take both the coordinate-sum-0 diagonal (i + j = -1) and the
    adjacent sum-1 diagonal (i + j = 0, the site straddling the origin
    excluded): that is the operational reading of "dual paths of the
    half-space" at its boundary line, and it is exactly what the exhaustive
    certification validates.
    """

    height: int
    half_width: int
    sites: frozenset[Site]
    bonds: tuple[Bond, ...]
    dplus: frozenset[tuple[int, int]]
    dminus: frozenset[tuple[int, int]]

    @property
    def escape_targets(self) -> frozenset[Site]:
        return frozenset(x for x in self.sites if s_sum(x) == self.height)


def make_window(height: int, half_width: int) -> DualityWindow:
    span = height + half_width + 2
    sites = set()
    for x1 in range(-span, span + 1):
        for x2 in range(-span, span + 1):
            if 0 <= x1 + x2 <= height and abs(x1 - x2) <= half_width:
                sites.add((x1, x2))
    bonds = []
    for (x1, x2) in sorted(sites):
        if (x1 + 1, x2) in sites:
            bonds.append(Bond((x1, x2), 0))
        if (x1, x2 + 1) in sites:
            bonds.append(Bond((x1, x2), 1))
    dual_sites = set()
    for b in bonds:
        dual_sites.update(_dual_edge(b))
    dplus = {w for w in dual_sites
             if (w[0] + w[1] == -1 and w[0] <= -1)
             or (w[0] + w[1] == 0 and w[0] <= -1)}
    dminus = {w for w in dual_sites
              if (w[0] + w[1] == -1 and w[0] >= 0)
              or (w[0] + w[1] == 0 and w[0] >= 1)}
    return DualityWindow(height, half_width, frozenset(sites), tuple(bonds),
                         frozenset(dplus), frozenset(dminus))


def certified_window() -> DualityWindow:
    """The frozen window geometry validated by the exhaustive dichotomy check
    (16 bonds, 65536 configurations)."""
    return make_window(2, 4)


def _dual_edge(bond: Bond) -> tuple[tuple[int, int], tuple[int, int]]:
    """Directed dual edge (from, to) crossing the given primal bond."""
    (x, y), axis = bond.base, bond.axis
    if axis == 0:
        return (x, y), (x, y - 1)        # vertical dual bond, top to bottom
    return (x - 1, y), (x, y)            # horizontal dual bond, left to right


def hplus_escape(cfg, window: DualityWindow) -> bool:
    """Admissible escape from 0 to the window's top level inside H_+."""
    targets = window.escape_targets
    sites = window.sites
    bond_set = set(window.bonds)
    origin: Site = (0, 0)
    seen = {origin}
    stack = [origin]
    while stack:
        x = stack.pop()
        if x in targets:
            return True
        for axis in range(2):
            c = x[axis]
            for delta in (-1, 1):
                y = x[:axis] + (c + delta,) + x[axis + 1:]
                if y in seen or y not in sites or s_sum(y) < 1:
                    continue
                bond = Bond(x, axis) if delta == 1 else Bond(y, axis)
                if bond not in bond_set:
                    continue
                if delta == 1 and not cfg.bond_state(bond):
                    continue
                seen.add(y)
                stack.append(y)
    return False


def dual2d_blocking(cfg, window: DualityWindow) -> bool:
    """Directed open dual path from the window's D+ sources to D- sinks."""
    adj: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for bond in window.bonds:
        if cfg.bond_state(bond):
            continue                      # dual bond open iff primal unoccupied
        frm, to = _dual_edge(bond)
        adj.setdefault(frm, []).append(to)
    seen = set(window.dplus)
    stack = list(seen)
    dminus = window.dminus
    while stack:
        v = stack.pop()
        if v in dminus:
            return True
        for w in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


@dataclass(frozen=True)
class DualityReport:
    window_height: int
    window_half_width: int
    n_bonds: int
    configs: int
    escapes: int
    blockings: int
    mismatches: tuple[int, ...]   # bond-set bitmasks violating the dichotomy


def duality_exhaustive_report(window: DualityWindow,
                              max_mismatches: int = 16) -> DualityReport:
    """Check escape XOR blocking over every configuration of the window."""
    from .sampler import ExplicitConfig
    bonds = window.bonds
    n = len(bonds)
    if n > 24:
        raise ValueError(f"window has {n} bonds; exhaustive check is capped at 24")
    escapes = blockings = 0
    mismatches = []
    for mask in range(1 << n):
        states = {bonds[i]: bool((mask >> i) & 1) for i in range(n)}
        cfg = ExplicitConfig(2, states)
        esc = hplus_escape(cfg, window)
        blk = dual2d_blocking(cfg, window)
        escapes += esc
        blockings += blk
        if esc == blk and len(mismatches) < max_mismatches:
            mismatches.append(mask)
    return DualityReport(window.height, window.half_width, n, 1 << n,
                         escapes, blockings, tuple(mismatches))


# -- annulus circuits ----------------------------------------------------------

def annulus_circuit(cfg, n: int) -> bool:
    """Directed open dual path from (0,n)+(1/2,1/2) to (n,0)+(1/2,1/2) inside
    the quarter-annulus of dual sites in B(n) but not B(n/3)."""
    if cfg.d != 2:
        raise ValueError("annulus circuits are a d=2 construction")
    if n < 3:
        raise ValueError("n must be >= 3")

    def allowed(w: tuple[int, int]) -> bool:
        i, j = w
        if not (0 <= i <= n and 0 <= j <= n):
            return False
        return not (3 * i <= n and 3 * j <= n)

    start, goal = (0, n), (n, 0)
    if not (allowed(start) and allowed(goal)):
        raise ValueError("annulus endpoints fall outside the region")
    bond_state = cfg.bond_state
    seen = {start}
    stack = [start]
    while stack:
        i, j = stack.pop()
        if (i, j) == goal:
            return True
        nxt = (i + 1, j)
        if nxt not in seen and allowed(nxt) \
                and not bond_state(Bond((i + 1, j), 1)):
            seen.add(nxt)
            stack.append(nxt)
        nxt = (i, j - 1)
        if nxt not in seen and allowed(nxt) \
                and not bond_state(Bond((i, j), 0)):
            seen.add(nxt)
            stack.append(nxt)
    return False


# -- renormalization skeleton ---------------------------------------------------

@dataclass(frozen=True)
class Skeleton:
    cone: Cone
    v: Site
    R: Site
    S: Site
    pi_bonds: tuple[Bond, ...]
    extent: int
    base_sites: tuple[tuple[Site, ...], ...]   # [i][j] -> v + i R + j S

    def translated_bonds(self, i: int, j: int) -> tuple[Bond, ...]:
        base = self.base_sites[i][j]
        return tuple(Bond((b.base[0] + base[0], b.base[1] + base[1]), b.axis)
                     for b in self.pi_bonds)

    def is_black(self, cfg, i: int, j: int) -> bool:
        """Black means every bond of the translated subgraph is occupied."""
        return all(cfg.bond_state(b) for b in self.translated_bonds(i, j))


def _horizontal_bonds(x0: int, x1: int, y: int) -> list[Bond]:
    return [Bond((x, y), 0) for x in range(x0, x1)]


def _vertical_bonds(x: int, y0: int, y1: int) -> list[Bond]:
    return [Bond((x, y), 1) for y in range(y0, y1)]


def renormalization_skeleton(a, b, r, s, alpha: int, beta: int,
                             extent: int) -> Skeleton:
    """Build the oriented three-segment subgraph and its translate grid.

    Requires rationals a < r < s < b (b may be None for +infinity) and
    integers alpha, beta with s1/r1 < beta/alpha < s2/r2, where r = r2/r1 and
    s = s2/s1 in lowest terms.  Returns the grid v + i R + j S of translates
    with R = (beta r1, beta r2) and S = (alpha s1, alpha s2), each verified
    inside the cone; distinct translates have disjoint bond sets, which the
    caller can re-verify for independence arguments.
    """
    if extent < 1:
        raise ValueError("extent must be >= 1")
    if alpha < 1 or beta < 1:
        raise ValueError("alpha and beta must be positive integers")
    a = Fraction(a)
    b_frac = None if b is None else Fraction(b)
    r = Fraction(r)
    s = Fraction(s)
    if not (0 <= a < r < s and (b_frac is None or s < b_frac)):
        raise ValueError("need 0 <= a < r < s < b")
    cone = Cone(a, b_frac)
    r1, r2 = r.denominator, r.numerator
    s1, s2 = s.denominator, s.numerator
    ratio = Fraction(beta, alpha)
    if not Fraction(s1, r1) < ratio < Fraction(s2, r2):
        raise ValueError("need s1/r1 < beta/alpha < s2/r2")
    R: Site = (beta * r1, beta * r2)
    S: Site = (alpha * s1, alpha * s2)
    assert R[0] > S[0] and R[1] < S[1]
    pi_bonds = tuple(_horizontal_bonds(0, alpha * s1, 0)
                     + _vertical_bonds(alpha * s1, 0, alpha * s2)
                     + _horizontal_bonds(alpha * s1, beta * r1, beta * r2))
    pi_sites = {(0, 0)}
    for bond in pi_bonds:
        pi_sites.add(bond.base)
        pi_sites.add(bond.other)

    def translate_ok(base: Site) -> bool:
        return all(in_cone((x + base[0], y + base[1]), cone)
                   for (x, y) in pi_sites)

    v = _find_base_site(cone, translate_ok, R, S, extent, pi_sites)
    base_sites = tuple(tuple((v[0] + i * R[0] + j * S[0],
                              v[1] + i * R[1] + j * S[1])
                             for j in range(extent))
                       for i in range(extent))
    skel = Skeleton(cone, v, R, S, pi_bonds, extent, base_sites)
    for i in range(extent):
        for j in range(extent):
            base = base_sites[i][j]
            for (x, y) in pi_sites:
                if not in_cone((x + base[0], y + base[1]), cone):
                    raise RuntimeError(
                        f"translate ({i},{j}) leaves the cone at {(x + base[0], y + base[1])}")
    return skel


def _find_base_site(cone: Cone, translate_ok, R: Site, S: Site, extent: int,
                    pi_sites, search_limit: int = 512) -> Site:
    """Smallest-x base site whose translate sits in the cone's bulk, certified
    connected (within the cone) out to beyond the whole translate grid."""
    pi_w = max(x for x, _ in pi_sites)
    pi_h = max(y for _, y in pi_sites)
    for x0 in range(0, search_limit):
        y_candidates = sorted({(cone.a * x0).__ceil__(), 0, x0})
        for y0 in y_candidates:
            v = (x0, y0)
            if not in_cone(v, cone):
                continue
            if not translate_ok(v):
                continue
            far_x = v[0] + (extent - 1) * (R[0] + S[0]) + pi_w + 2
            if _connected_in_cone(cone, v, far_x, v[1] + (extent - 1) * (R[1] + S[1]) + pi_h + 2):
                return v
    raise RuntimeError("no valid base site found within the search limit")


def _connected_in_cone(cone: Cone, v: Site, far_x: int, y_cap: int) -> bool:
    """True if v reaches the slab x = far_x inside the cone-induced subgraph
    (certifies membership in the cone's unbounded component out to far_x)."""
    cap = max(far_x, y_cap) + 2
    seen = {v}
    stack = [v]
    while stack:
        x, y = stack.pop()
        if x >= far_x:
            return True
        for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if (nx, ny) in seen or nx < 0 or nx > cap or abs(ny) > cap:
                continue
            if not in_cone((nx, ny), cone):
                continue
            seen.add((nx, ny))
            stack.append((nx, ny))
    return False
