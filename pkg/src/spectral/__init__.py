"""Function spaces on the periodic box: basis, fields, transforms, U-weights"""

from .basis import BasisTable, Mode, WaveVector, build_basis
from .field import SpectralField, project_Pn
from .grid import SpectralGrid, evaluate_on_grid, evaluate_at_points, dealiased_resolution
from .weights import HollyWiciakWeights, holly_wiciak_weights, embedding_norm_search
from .subdomains import SubdomainFamily, local_seminorm

__all__ = [
    'BasisTable', 'Mode', 'WaveVector', 'build_basis',
    'SpectralField', 'project_Pn',
    'SpectralGrid', 'evaluate_on_grid', 'evaluate_at_points', 'dealiased_resolution',
    'HollyWiciakWeights', 'holly_wiciak_weights', 'embedding_norm_search',
    'SubdomainFamily', 'local_seminorm',
]
