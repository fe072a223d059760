"""Path functionals: modulus, Skorokhod and weak-ball metrics, Aldous tables, tightness"""

from .paths import StatePath, RealCadlagPath, as_state_path, weak_projection_path, candidate_times, state_coordinates
from .modulus import ModulusCurve, modulus, modulus_bruteforce, modulus_curve, oscillation_table
from .skorokhod import (
    skorokhod_distance,
    skorokhod_bruteforce,
    uniform_distance,
    weak_ball_metric,
    q_r,
    q_r_matrix,
)
from .aldous import (
    StoppingRule,
    AldousTable,
    aldous_estimate,
    aldous_moment_estimate,
    poisson_test_paths,
    wilson_interval,
)
from .tightness import TightnessReport, tightness_report, compactness_statistics

__all__ = [
    'StatePath', 'RealCadlagPath', 'as_state_path', 'weak_projection_path', 'candidate_times', 'state_coordinates',
    'ModulusCurve', 'modulus', 'modulus_bruteforce', 'modulus_curve', 'oscillation_table',
    'skorokhod_distance', 'skorokhod_bruteforce', 'uniform_distance', 'weak_ball_metric', 'q_r', 'q_r_matrix',
    'StoppingRule', 'AldousTable', 'aldous_estimate', 'aldous_moment_estimate', 'poisson_test_paths',
    'wilson_interval',
    'TightnessReport', 'tightness_report', 'compactness_statistics',
]
