"""Monte Carlo checks of the a priori estimates"""

from .moments import MomentEstimate, MomentReport, bootstrap_mean, moment_estimates
from .taylor import taylor_ratio, taylor_inequality_audit
from .energy import EnergyBalance, energy_balance
from .scan import StatisticTrend, ScanResult, constant_scan, run_level_scan

__all__ = [
    'MomentEstimate', 'MomentReport', 'bootstrap_mean', 'moment_estimates',
    'taylor_ratio', 'taylor_inequality_audit',
    'EnergyBalance', 'energy_balance',
    'StatisticTrend', 'ScanResult', 'constant_scan', 'run_level_scan',
]
