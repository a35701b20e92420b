"""heegnerlab: lattice-point counting over the modular group and averages over Heegner points."""

__version__ = "0.1.0"

from .halfplane import ModularMatrix, Point, apply, distance, ppinv, reduce_to_fundamental  # noqa: E402
from .qforms import QuadForm, class_group, heegner_points, is_fundamental, kronecker  # noqa: E402
from .counting import CountQuery, CountResult, brute_force_count, count, heegner_error_average  # noqa: E402

__all__ = [
    "ModularMatrix", "Point", "apply", "distance", "ppinv", "reduce_to_fundamental",
    "QuadForm", "class_group", "heegner_points", "is_fundamental", "kronecker",
    "CountQuery", "CountResult", "brute_force_count", "count", "heegner_error_average",
]
