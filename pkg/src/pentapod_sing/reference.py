"""Reference pentapod instance used by the examples, tests and CLI defaults."""
from __future__ import annotations

from fractions import Fraction

from .pentapod import Architecture, Configuration

# Base points with a_2 on the unit x-axis; the reference singular poses and
# stationary points belong to this design.
REFERENCE_ARCHITECTURE = Architecture(
    ((0, 0, 0), (1, 0, 0), (-4, -3, 0), (3, 7, -6), (9, -5, 4)),
    (0, 2, 4, 5, 10),
)

# The design before frame normalization, with a_2 = (5, 0, 0).
UNNORMALIZED_ARCHITECTURE = Architecture(
    ((0, 0, 0), (5, 0, 0), (-4, -3, 0), (3, 7, -6), (9, -5, 4)),
    (0, 2, 4, 5, 10),
)

REFERENCE_POSE = Configuration((Fraction(3, 5), Fraction(4, 5), 0), (2, 3, 4))
