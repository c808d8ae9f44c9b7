"""Shared numerical knobs.

Every tolerance that several modules must agree on lives here, so a
reproducibility audit has a single place to look.
"""

# Geometric predicates (containment, orthogonality, unit-norm checks,
# cone/polygon contact bisection).  One knob for all of them.
GEOM_TOL: float = 1e-9

# Adaptive quadrature targets for the special-function integrals.
QUAD_ABS_TOL: float = 1e-11
QUAD_REL_TOL: float = 1e-11

# Log-slope regression: fraction of the tau grid (measured in log tau,
# counted from the top) used as the fit window.
FIT_WINDOW_FRACTION: float = 0.5

# Growth/decay classification threshold: slope of log|I| per unit tau
# beyond which a curve counts as growing (+) or decaying (-).  Curves in
# between are reported as grazing/ambiguous rather than guessed.
CLASSIFY_SIGMA: float = 0.05

# Default geometric ratio between consecutive tau samples.
TAU_GRID_RATIO: float = 1.12
