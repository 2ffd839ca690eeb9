"""Numerical companion to the fractal dimension of St. Petersburg limit paths.

Modules: :mod:`.game` (simulation and block paths), :mod:`.steinhaus`
(the deterministic gain sequence and xi), :mod:`.ifs` (the self-affine
attractor and its singular-value series), :mod:`.fracdim` (box counting and
sojourn times), :mod:`.cli` (command line).
"""

from .game import CoinParams, GainPath, SampledPath, simulate_partial_sums, x_path_approx, y_path_approx
from .steinhaus import f_value, gamma_of, steinhaus_partial_sum, steinhaus_term, xi, xi_left_limit
from .ifs import affinity_dimension, chaos_game, hausdorff_lower_bound_dim
from .fracdim import box_count, box_dimension_estimate

__version__ = "0.1.0"
