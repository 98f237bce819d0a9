"""Seeded, lazy Bernoulli(p) occupancy of lattice bonds.

The state of a bond is a pure function of (seed, canonical bond): the bond key
is folded into a 64-bit hash (splitmix64 finalizer rounds), the top 53 bits
become a uniform deviate in [0, 1), and the bond is occupied iff that deviate
is < p.  This gives O(1) access to an "infinite" product-measure configuration
with no stored state; per-config caches only amortize repeated queries.

Plaquette occupancy is defined by the coupling: a plaquette is occupied iff
the bond crossing it is occupied.

The same hash is exposed in a numpy-vectorized form (uint64 wrap-around
arithmetic matches the scalar path bit for bit) for grid-based fast paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import Bond, Plaquette, dual_bond

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_COORD_OFFSET = 1 << 31   # site coordinates are bounded 32-bit integers
_AXIS_TAG = 0xD6E8FEB86659FD93
_TRIAL_TAG = 0xA3EC647659359ACD
_INV_2_53 = 2.0 ** -53


def _mix64(x: int) -> int:
    x &= _MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK
    x ^= x >> 31
    return x


def bond_uniform(seed: int, bond: Bond) -> float:
    """Uniform deviate in [0,1) attached to (seed, bond); 53-bit resolution."""
    h = seed & _MASK
    for c in bond.base:
        h = _mix64(h ^ (c + _COORD_OFFSET))
    h = _mix64(h ^ (_AXIS_TAG + bond.axis))
    return (h >> 11) * _INV_2_53


def _mix64_array(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= np.uint64(0xBF58476D1CE4E5B9)
    x ^= x >> np.uint64(27)
    x *= np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(31)
    return x


def bond_uniform_grid(seed: int, base_coords: list[np.ndarray], axis: int) -> np.ndarray:
    """Vectorized bond_uniform over arrays of base coordinates.

    base_coords holds one integer array per dimension (broadcastable shapes);
    returns the array of uniforms, bit-identical to the scalar path.
    """
    shape = np.broadcast_shapes(*(np.shape(c) for c in base_coords))
    h = np.full(shape, seed & _MASK, dtype=np.uint64)
    for c in base_coords:
        h = _mix64_array(h ^ (np.asarray(c, dtype=np.int64).astype(np.uint64)
                              + np.uint64(_COORD_OFFSET)))
    h = _mix64_array(h ^ np.uint64((_AXIS_TAG + axis) & _MASK))
    return (h >> np.uint64(11)).astype(np.float64) * _INV_2_53


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """Seed for an independent per-trial stream, reproducible from inputs."""
    if trial_index < 0:
        raise ValueError("trial_index must be >= 0")
    return _mix64(_mix64((master_seed & _MASK) ^ _TRIAL_TAG)
                  ^ ((trial_index + 1) * _GOLDEN))


@dataclass
class BondConfig:
    """One realization of Bernoulli(p) bond percolation on Z^d.

    The trial seeds of ``derive_trial_config`` feed the same uniforms for
    every p, so configs at p1 < p2 with equal seed are monotone-coupled.
    """

    d: int
    p: float
    master_seed: int
    _cache: dict = field(default_factory=dict, repr=False)

    def uniform(self, bond: Bond) -> float:
        u = self._cache.get(bond)
        if u is None:
            u = bond_uniform(self.master_seed, bond)
            self._cache[bond] = u
        return u

    def bond_state(self, bond: Bond) -> bool:
        """True iff the bond is occupied."""
        return self.uniform(bond) < self.p

    def plaquette_state(self, plq: Plaquette) -> bool:
        """True iff the plaquette is occupied (== its crossing bond)."""
        return self.bond_state(dual_bond(plq))


def derive_trial_config(d: int, p: float, master_seed: int, trial_index: int) -> BondConfig:
    """Config for one trial of an experiment; independent streams across trials."""
    return BondConfig(d, p, derive_trial_seed(master_seed, trial_index))


@dataclass
class ExplicitConfig:
    """Configuration backed by an explicit bond->state map (for exhaustive
    enumeration and hand-built fixtures); unlisted bonds get ``default``."""

    d: int
    states: dict
    default: bool = False
    p: float = float("nan")

    def bond_state(self, bond: Bond) -> bool:
        return self.states.get(bond, self.default)

    def plaquette_state(self, plq: Plaquette) -> bool:
        return self.bond_state(dual_bond(plq))
