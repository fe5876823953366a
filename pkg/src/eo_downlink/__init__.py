"""Capacity-aware downlink of changed multi-spectral pixels from a LEO satellite."""

from .imaging import ImagePair, MultiSpectralImage, load_raster, normalize_zscore, save_raster, synth_pair
from .link import LinkBudget, ModcodTable, default_modcod_table, orbit_capacity, rate_profile
from .orbit import OrbitGeometry, max_slant_range, pass_distance_profile, visibility_duration
from .selection import SelectionResult, solve_p2_exact, solve_p2_greedy, solve_random_baseline

__version__ = "0.1.0"

__all__ = [
    "ImagePair", "MultiSpectralImage", "load_raster", "normalize_zscore", "save_raster", "synth_pair",
    "LinkBudget", "ModcodTable", "default_modcod_table", "orbit_capacity", "rate_profile",
    "OrbitGeometry", "max_slant_range", "pass_distance_profile", "visibility_duration",
    "SelectionResult", "solve_p2_exact", "solve_p2_greedy", "solve_random_baseline",
]
