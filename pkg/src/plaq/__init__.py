"""plaq: lattice percolation engine.

Good-path cluster growth, enclosing plaquette-sphere construction and
combinatorial verification, Monte Carlo radius-tail estimation against
explicit geometric bounds, and oriented/admissible critical-point machinery
with two-dimensional duality checks.
"""

__version__ = "0.1.0"
