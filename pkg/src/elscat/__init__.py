"""2D elastic-wave scattering lab.

Synthesizes phaseless far-field data for rigid obstacles and compactly
supported sources, retrieves lost phase by trilateration, and localizes
scatterers and source supports with direct sampling indicators.
"""

from elscat.core import (
    WaveParameters,
    PolarizationSet,
    StrengthSet,
    direction,
    direction_grid,
    perp,
    plane_wave,
    green_tensor,
    green_far_field,
    arc_select,
    strip_hull,
)

__version__ = "0.1.0"

__all__ = [
    "WaveParameters",
    "PolarizationSet",
    "StrengthSet",
    "direction",
    "direction_grid",
    "perp",
    "plane_wave",
    "green_tensor",
    "green_far_field",
    "arc_select",
    "strip_hull",
    "__version__",
]
