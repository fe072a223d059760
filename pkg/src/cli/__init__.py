"""Experiment configuration, command implementations and the sns-levy entry point"""

from .models import ExperimentConfig, RunReport, LevelSection, mode_count
from .commands import cmd_validate, cmd_simulate, cmd_analyze, cmd_report, summary_text

__all__ = [
    'ExperimentConfig', 'RunReport', 'LevelSection', 'mode_count',
    'cmd_validate', 'cmd_simulate', 'cmd_analyze', 'cmd_report', 'summary_text',
]
