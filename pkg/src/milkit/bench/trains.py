"""Twenty east-west trains (10 eastbound, 10 westbound).

The published 20-train set is not reproduced verbatim here.  These trains
were drawn once from the attribute table in :mod:`milkit.bk` (fixed seed
"trains", 2-4 cars each) and labelled by the classic concept "has a short
closed car", then frozen as data.  A car is
``(shape, length, wall, roof, wheels, load_shape, load_count)``.
"""
from ..bk import car

EASTBOUND = (
    (
        ('bucket', 'long', 'single', 'flat', 2, 'rectangle', 3),
        ('bucket', 'short', 'single', 'arc', 2, 'hexagon', 3),
        ('u_shaped', 'long', 'double', 'none', 2, 'rectangle', 2),
    ),
    (
        ('rectangle', 'long', 'single', 'flat', 3, 'rectangle', 1),
        ('bucket', 'short', 'double', 'peaked', 2, 'diamond', 1),
    ),
    (
        ('ellipse', 'short', 'double', 'peaked', 2, 'hexagon', 3),
        ('rectangle', 'short', 'double', 'flat', 2, 'triangle', 3),
        ('u_shaped', 'long', 'single', 'flat', 3, 'triangle', 3),
        ('hexagon', 'long', 'double', 'arc', 3, 'hexagon', 2),
    ),
    (
        ('ellipse', 'long', 'double', 'jagged', 2, 'triangle', 1),
        ('bucket', 'short', 'single', 'none', 2, 'hexagon', 3),
        ('ellipse', 'short', 'single', 'jagged', 2, 'utriangle', 3),
        ('rectangle', 'short', 'single', 'peaked', 2, 'triangle', 2),
    ),
    (
        ('u_shaped', 'short', 'single', 'none', 2, 'triangle', 2),
        ('rectangle', 'long', 'double', 'jagged', 2, 'utriangle', 1),
        ('bucket', 'long', 'single', 'none', 3, 'circle', 3),
        ('u_shaped', 'short', 'single', 'flat', 2, 'triangle', 1),
    ),
    (
        ('rectangle', 'short', 'double', 'jagged', 2, 'circle', 2),
        ('rectangle', 'short', 'single', 'flat', 2, 'rectangle', 3),
        ('hexagon', 'short', 'double', 'flat', 2, 'utriangle', 2),
    ),
    (
        ('bucket', 'long', 'double', 'flat', 3, 'triangle', 2),
        ('u_shaped', 'short', 'single', 'arc', 2, 'utriangle', 2),
        ('u_shaped', 'long', 'double', 'arc', 3, 'triangle', 3),
    ),
    (
        ('bucket', 'short', 'double', 'jagged', 2, 'utriangle', 2),
        ('hexagon', 'short', 'single', 'jagged', 2, 'rectangle', 2),
        ('rectangle', 'short', 'single', 'jagged', 2, 'circle', 3),
    ),
    (
        ('bucket', 'short', 'double', 'peaked', 2, 'circle', 2),
        ('bucket', 'long', 'single', 'none', 2, 'rectangle', 3),
        ('rectangle', 'short', 'double', 'jagged', 2, 'diamond', 1),
        ('hexagon', 'long', 'single', 'arc', 2, 'hexagon', 3),
    ),
    (
        ('rectangle', 'long', 'single', 'jagged', 3, 'hexagon', 3),
        ('hexagon', 'short', 'single', 'flat', 2, 'diamond', 3),
        ('hexagon', 'long', 'single', 'none', 2, 'circle', 1),
    ),
)
WESTBOUND = (
    (
        ('u_shaped', 'long', 'double', 'jagged', 3, 'triangle', 2),
        ('rectangle', 'long', 'double', 'jagged', 2, 'utriangle', 2),
    ),
    (
        ('hexagon', 'long', 'double', 'none', 2, 'diamond', 3),
        ('rectangle', 'long', 'single', 'peaked', 2, 'circle', 3),
        ('u_shaped', 'short', 'single', 'none', 2, 'rectangle', 2),
    ),
    (
        ('bucket', 'short', 'double', 'none', 2, 'triangle', 2),
        ('rectangle', 'long', 'single', 'arc', 3, 'circle', 2),
    ),
    (
        ('rectangle', 'long', 'single', 'flat', 2, 'triangle', 2),
        ('u_shaped', 'long', 'single', 'jagged', 3, 'hexagon', 2),
    ),
    (
        ('bucket', 'short', 'double', 'none', 2, 'rectangle', 2),
        ('rectangle', 'long', 'double', 'flat', 3, 'diamond', 1),
    ),
    (
        ('ellipse', 'long', 'double', 'flat', 2, 'utriangle', 3),
        ('bucket', 'long', 'single', 'none', 3, 'diamond', 3),
        ('rectangle', 'long', 'single', 'flat', 3, 'rectangle', 3),
    ),
    (
        ('hexagon', 'long', 'double', 'none', 2, 'triangle', 3),
        ('rectangle', 'long', 'single', 'arc', 3, 'triangle', 2),
    ),
    (
        ('rectangle', 'long', 'single', 'arc', 2, 'hexagon', 1),
        ('hexagon', 'long', 'double', 'peaked', 3, 'rectangle', 3),
        ('rectangle', 'long', 'double', 'peaked', 3, 'triangle', 2),
    ),
    (
        ('bucket', 'short', 'double', 'none', 2, 'circle', 3),
        ('rectangle', 'short', 'single', 'none', 2, 'diamond', 1),
        ('rectangle', 'long', 'double', 'none', 3, 'triangle', 2),
        ('ellipse', 'long', 'double', 'none', 2, 'utriangle', 2),
    ),
    (
        ('ellipse', 'long', 'double', 'peaked', 2, 'utriangle', 3),
        ('ellipse', 'short', 'double', 'none', 2, 'triangle', 1),
    ),
)


def train_term(cars) -> tuple:
    """A train as a list of ``car/6`` terms."""
    return tuple(car(*c) for c in cars)


def eastbound(cars) -> bool:
    return any(c[1] == "short" and c[3] != "none" for c in cars)
