"""Poisson random measures, Wiener increments, noise presets and assumption audits"""

from .marks import MarkSpaceSpec, AtomicMarks, BoxMarks, PowerLawMarks, mark_space_from_dict
from .poisson import JumpStream, sample_jumps, compensated_integral, stream_rng
from .wiener import WienerConfig, wiener_increments, BrownianBridge, time_grid
from .coefficients import (
    DeclaredConstants,
    NoiseCoefficients,
    NoNoise,
    AdditiveNoise,
    LinearMultiplicativeNoise,
    GradientMultiplicativeNoise,
    PRESETS,
    build_noise,
    moment_orders,
    coercivity_floor,
)
from .validator import (
    AssumptionRule,
    AssumptionValidator,
    default_samples,
    validate_F,
    validate_G_coercivity,
    validate_G_lipschitz,
    validate_forcing,
)

__all__ = [
    'MarkSpaceSpec', 'AtomicMarks', 'BoxMarks', 'PowerLawMarks', 'mark_space_from_dict',
    'JumpStream', 'sample_jumps', 'compensated_integral', 'stream_rng',
    'WienerConfig', 'wiener_increments', 'BrownianBridge', 'time_grid',
    'DeclaredConstants', 'NoiseCoefficients', 'NoNoise', 'AdditiveNoise',
    'LinearMultiplicativeNoise', 'GradientMultiplicativeNoise', 'PRESETS', 'build_noise',
    'moment_orders', 'coercivity_floor',
    'AssumptionRule', 'AssumptionValidator', 'default_samples', 'validate_F',
    'validate_G_coercivity', 'validate_G_lipschitz', 'validate_forcing',
]
