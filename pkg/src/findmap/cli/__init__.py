from .main import main, main_entry
from .placement import Placement, PlacementResult, PlacementWitness, check_placement, grid_refutation
from .svg import emit_locus_svg

__all__ = ["main", "main_entry", "check_placement", "grid_refutation", "emit_locus_svg", "Placement", "PlacementResult",
           "PlacementWitness"]
