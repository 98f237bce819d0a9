"""Monte Carlo harness: radius-tail curves, explicit geometric bound curves,
and batched sphere-verification runs.

Per-trial work is a pure function of (dimension, p, master seed, trial
index), so results are independent of how trials are scheduled; the process
pool only changes wall time, never output.  Escaped trials are scored as
radius = +infinity and count toward every tail event, keeping the estimator
conservative (censoring never undercounts a tail).

Confidence intervals are Wilson score intervals (99% by default): tail
probabilities sit near zero, where Wald intervals collapse.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

from .cluster import grow_good_cluster
from .sampler import derive_trial_config
from .sphere import build_boundary, full_report, sphere_radius

CLUSTER = "cluster"
SPHERE = "sphere"

_Z99 = NormalDist().inv_cdf(0.995)


def wilson_interval(hits: int, trials: int, confidence: float = 0.99):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be >= 1")
    if not 0 <= hits <= trials:
        raise ValueError("hits out of range")
    z = _Z99 if confidence == 0.99 else NormalDist().inv_cdf((1 + confidence) / 2)
    n = trials
    phat = hits / n
    denom = 1 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class TailCurve:
    d: int
    p: float
    target: str
    r_values: tuple[int, ...]
    trials: int
    hits: tuple[int, ...]
    estimate: tuple[float, ...]
    wilson_lo: tuple[float, ...]
    wilson_hi: tuple[float, ...]
    escapes: int
    master_seed: int
    r_max: int


@dataclass(frozen=True)
class BoundCurve:
    d: int
    p: float
    alpha: float
    c_prime: float
    r_values: tuple[int, ...]
    values: tuple[float, ...]


def explicit_bound_threshold(d: int) -> float:
    """The explicit-constant regime requires p < (2d-1)^-2."""
    return (2 * d - 1) ** -2


def theoretical_bound(d: int, p: float, r_values) -> BoundCurve:
    """Explicit tail bound C' alpha^r with alpha = p(2d-1) and
    C' = 2/[1 - p(2d-1)^2], valid for p < (2d-1)^-2."""
    if not 0 <= p < explicit_bound_threshold(d):
        raise ValueError(
            f"explicit bound requires p < (2d-1)^-2 = {explicit_bound_threshold(d):.6g}")
    alpha = p * (2 * d - 1)
    c_prime = 2.0 / (1.0 - p * (2 * d - 1) ** 2)
    rv = tuple(r_values)
    return BoundCurve(d, p, alpha, c_prime, rv,
                      tuple(c_prime * alpha ** r for r in rv))


def _trial_radius(d: int, p: float, master_seed: int, trial: int,
                  target: str, r_max: int) -> float:
    cfg = derive_trial_config(d, p, master_seed, trial)
    res = grow_good_cluster(cfg, r_max)
    if res.escaped:
        return math.inf
    if target == CLUSTER:
        return float(res.radius)
    return sphere_radius(build_boundary(res))


def _tail_worker(args) -> tuple[list[int], int]:
    d, p, master_seed, target, r_max, r_values, start, stop = args
    hits = [0] * len(r_values)
    escapes = 0
    for trial in range(start, stop):
        radius = _trial_radius(d, p, master_seed, trial, target, r_max)
        if radius == math.inf:
            escapes += 1
        for i, r in enumerate(r_values):
            if radius >= r:
                hits[i] += 1
    return hits, escapes


def _chunks(trials: int, threads: int):
    step = max(1, math.ceil(trials / (max(1, threads) * 4)))
    return [(s, min(s + step, trials)) for s in range(0, trials, step)]


def _run_chunked(worker, arg_list, threads: int):
    if threads <= 1:
        return [worker(a) for a in arg_list]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, arg_list))


def tail_curve(d: int, p: float, r_values, trials: int, master_seed: int,
               target: str = CLUSTER, r_max: int | None = None,
               threads: int = 1) -> TailCurve:
    """Empirical tail of the cluster (or boundary-sphere) radius.

    hits[r] counts trials with radius >= r; escaped trials count for every r.
    The result is bit-identical for any thread count: per-trial radii depend
    only on (seed, trial index) and hit counts add associatively.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0, 1]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if target not in (CLUSTER, SPHERE):
        raise ValueError(f"unknown target {target!r}")
    rv = tuple(r_values)
    if r_max is None:
        r_max = 4 * max(rv)
    if r_max <= max(rv):
        raise ValueError("r_max must exceed max(r_values)")
    args = [(d, p, master_seed, target, r_max, rv, s, e)
            for s, e in _chunks(trials, threads)]
    hits = [0] * len(rv)
    escapes = 0
    for part_hits, part_esc in _run_chunked(_tail_worker, args, threads):
        escapes += part_esc
        for i, h in enumerate(part_hits):
            hits[i] += h
    los, his = [], []
    for h in hits:
        lo, hi = wilson_interval(h, trials)
        los.append(lo)
        his.append(hi)
    return TailCurve(d, p, target, rv, trials, tuple(hits),
                     tuple(h / trials for h in hits), tuple(los), tuple(his),
                     escapes, master_seed, r_max)


def entanglement_radius_tail(p: float, r_values, trials: int, master_seed: int,
                             r_max: int | None = None,
                             threads: int = 1) -> TailCurve:
    """Sphere-radius tail at d=3, read as a stochastic upper bound for the
    radius tail of the 1-entanglement cluster at the origin: the boundary
    sphere intersects no occupied bond and has the origin inside, so that
    cluster lies inside it and its radius is dominated by rad[S]."""
    return tail_curve(3, p, r_values, trials, master_seed, target=SPHERE,
                      r_max=r_max, threads=threads)


def compare_tail(tail: TailCurve, bound: BoundCurve) -> list[int]:
    """r values where the Wilson lower bound exceeds the proven bound (any
    entry is a statistically significant violation, i.e. an implementation
    bug, not a near miss)."""
    if (tail.d, tail.p, tail.r_values) != (bound.d, bound.p, bound.r_values):
        raise ValueError("tail and bound curves are not comparable")
    return [r for r, lo, v in zip(tail.r_values, tail.wilson_lo, bound.values)
            if lo > v]


def fit_log_slope(tail: TailCurve) -> float | None:
    """Least-squares slope of log(estimate) against r over nonzero entries;
    None when fewer than two points survive."""
    pts = [(r, math.log(e)) for r, e in zip(tail.r_values, tail.estimate)
           if e > 0]
    if len(pts) < 2:
        return None
    n = len(pts)
    sx = sum(r for r, _ in pts)
    sy = sum(y for _, y in pts)
    sxx = sum(r * r for r, _ in pts)
    sxy = sum(r * y for r, y in pts)
    return (n * sxy - sx * sy) / (n * sxx - sx * sx)


# -- batched sphere verification ---------------------------------------------

@dataclass(frozen=True)
class SphereTrialRow:
    trial: int
    escaped: bool
    sites: int
    cluster_radius: int
    boundary_radius: float
    facets: int
    euler_characteristic: int
    is_closed_manifold: bool
    is_connected: bool
    origin_inside: bool
    all_unoccupied: bool
    star_shaped: bool
    verdict: str

    def as_csv(self) -> str:
        return ",".join(str(v) for v in (
            self.trial, int(self.escaped), self.sites, self.cluster_radius,
            self.boundary_radius, self.facets, self.euler_characteristic,
            int(self.is_closed_manifold), int(self.is_connected),
            int(self.origin_inside), int(self.all_unoccupied),
            int(self.star_shaped), self.verdict))


@dataclass(frozen=True)
class SphereRun:
    d: int
    p: float
    r_max: int
    trials: int
    master_seed: int
    n_rays: int
    rows: tuple[SphereTrialRow, ...]
    escapes: int
    failures: tuple[int, ...]   # trial indices with any failed check


def _sphere_worker(args) -> list[SphereTrialRow]:
    d, p, master_seed, r_max, n_rays, start, stop = args
    rows = []
    for trial in range(start, stop):
        cfg = derive_trial_config(d, p, master_seed, trial)
        res = grow_good_cluster(cfg, r_max)
        if res.escaped:
            rows.append(SphereTrialRow(trial, True, len(res.sites), res.radius,
                                       math.nan, 0, 0, False, False, False,
                                       False, False, "escaped"))
            continue
        S = build_boundary(res)
        rep = full_report(S, cfg, n_rays=n_rays,
                          ray_seed=master_seed ^ (trial * 2 + 1))
        rows.append(SphereTrialRow(
            trial, False, len(res.sites), res.radius, sphere_radius(S),
            len(S.plaquettes), rep.euler_characteristic,
            rep.is_closed_manifold, rep.is_connected,
            bool(rep.origin_inside), bool(rep.all_unoccupied),
            bool(rep.star_shaped_ray_checks_passed), rep.verdict_sphere))
    return rows


def sphere_run(d: int, p: float, r_max: int, trials: int, master_seed: int,
               n_rays: int = 1000, threads: int = 1) -> SphereRun:
    """Verify the boundary complex of every trial; escaped trials are logged
    and carry no verdict.  Row order is by trial index for any thread count."""
    args = [(d, p, master_seed, r_max, n_rays, s, e)
            for s, e in _chunks(trials, threads)]
    rows: list[SphereTrialRow] = []
    for part in _run_chunked(_sphere_worker, args, threads):
        rows.extend(part)
    escapes = sum(1 for row in rows if row.escaped)
    failures = tuple(row.trial for row in rows
                     if not row.escaped and row.verdict != "verified")
    return SphereRun(d, p, r_max, trials, master_seed, n_rays,
                     tuple(rows), escapes, failures)
