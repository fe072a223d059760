"""Runtime settings for the stochastic Navier-Stokes simulator"""

import os
import yaml
from typing import Dict, Any, Optional
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


class Config:
    """Runtime settings: logging, output locations, worker count, tolerances"""

    def __init__(self, config_path: Optional[str] = None):
        """Initialize configuration

        Args:
            config_path: Optional path to config file. If None, uses default.
        """
        self.config_path = config_path or self._get_default_config_path()
        self._config = self._load_config()

    def _get_default_config_path(self) -> str:
        """Get default configuration file path"""
        current_dir = Path(__file__).parent.parent.parent
        return str(current_dir / "config" / "config.yaml")

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file"""
        try:
            if os.path.exists(self.config_path):
                with open(self.config_path, 'r', encoding='utf-8') as file:
                    return yaml.safe_load(file) or {}
        except Exception as e:
            print(f"Warning: Could not load config file {self.config_path}: {e}")

        # Return default configuration if file loading fails
        return self._get_default_config()

    def _get_default_config(self) -> Dict[str, Any]:
        """Return default configuration"""
        return {
            'run': {
                'output_root': 'runs',
                'workers': 1,
            },
            'numerics': {
                'gram_tolerance': 1e-12,
                'cancellation_tolerance': 1e-10,
                'residual_tolerance': 1e-12,
                'debug_checks': False,
            },
            'logging': {
                'level': 'INFO',
                'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
                'file_path': None
            }
        }

    # Run Configuration Properties
    @property
    def output_root(self) -> str:
        """Default output root for the command surface"""
        return os.getenv('SNS_OUTPUT_ROOT',
                         self._config.get('run', {}).get('output_root', 'runs'))

    @property
    def default_workers(self) -> int:
        """Default number of per-path workers"""
        return int(os.getenv('SNS_WORKERS', self._config.get('run', {}).get('workers', 1)))

    # Numerics Configuration Properties
    @property
    def debug_checks(self) -> bool:
        """Whether per-call operator checks are enabled"""
        env_debug = os.getenv('SNS_DEBUG', '').lower()
        if env_debug in ('true', '1', 'yes'):
            return True
        elif env_debug in ('false', '0', 'no'):
            return False
        return bool(self._config.get('numerics', {}).get('debug_checks', False))

    @property
    def gram_tolerance(self) -> float:
        """Tolerance on the H-Gram matrix of the basis"""
        return float(self._config.get('numerics', {}).get('gram_tolerance', 1e-12))

    @property
    def cancellation_tolerance(self) -> float:
        """Relative tolerance for b(u,v,v) = 0 and antisymmetry"""
        return float(self._config.get('numerics', {}).get('cancellation_tolerance', 1e-10))

    @property
    def residual_tolerance(self) -> float:
        """Tolerance for the discrete weak-form identity"""
        return float(self._config.get('numerics', {}).get('residual_tolerance', 1e-12))

    # Logging Configuration Properties
    @property
    def log_level(self) -> str:
        """Get logging level"""
        return os.getenv('LOG_LEVEL', self._config.get('logging', {}).get('level', 'INFO'))

    @property
    def log_format(self) -> str:
        """Get logging format"""
        return self._config.get('logging', {}).get('format',
                               '%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    @property
    def log_file_path(self) -> Optional[str]:
        """Get logging file path (None disables the file handler)"""
        return os.getenv('SNS_LOG_FILE', self._config.get('logging', {}).get('file_path'))


# Global configuration instance
config = Config()
