import json
import os
from pathlib import Path
from typing import Dict, Optional

from dotenv import load_dotenv

from core.utils.logger import setup_logger
from .solver_config import HomotopyConfig

logger = setup_logger('settings')

DEFAULT_CONFIG_DIR = Path(__file__).resolve().parent


class Settings:
    """Global settings management"""

    def __init__(self, config_dir: Optional[Path] = None):
        load_dotenv()
        self.config_dir = Path(config_dir) if config_dir else DEFAULT_CONFIG_DIR
        self.loaded_configs: Dict[str, Dict] = {}

    def load_config(self, config_name: str = 'solver_config') -> Dict:
        """Load and validate a JSON configuration file (cached)"""
        try:
            if config_name in self.loaded_configs:
                return dict(self.loaded_configs[config_name])

            config_path = self.config_dir / f"{config_name}.json"
            with open(config_path, 'r') as f:
                config = json.load(f)

            errors = HomotopyConfig.from_dict(config).validate()
            if errors:
                error_msg = f"Configuration validation failed: {', '.join(errors)}"
                logger.error(error_msg)
                raise ValueError(error_msg)

            self.loaded_configs[config_name] = config
            return dict(config)

        except Exception as e:
            logger.error(f"Error loading config {config_name}: {e}")
            raise

    def get_solver_config(self, **overrides) -> HomotopyConfig:
        """Defaults from solver_config.json with explicit overrides applied"""
        config = self.load_config('solver_config')
        config.update({key: value for key, value in overrides.items() if value is not None})
        return HomotopyConfig.from_dict(config).check()

    def save_config(self, config: HomotopyConfig, config_name: str = 'solver_config'):
        """Validate and save configuration to file"""
        try:
            config.check()
            config_path = self.config_dir / f"{config_name}.json"
            with open(config_path, 'w') as f:
                json.dump(config.to_dict(), f, indent=4)
            self.loaded_configs.pop(config_name, None)

        except Exception as e:
            logger.error(f"Error saving config {config_name}: {e}")
            raise

    @property
    def threads(self) -> int:
        """Parallelism cap from LP_HOMOTOPY_THREADS, default machine cores"""
        value = os.getenv('LP_HOMOTOPY_THREADS')
        if value:
            try:
                return max(int(value), 1)
            except ValueError:
                logger.warning(f"Ignoring non-integer LP_HOMOTOPY_THREADS={value!r}")
        return os.cpu_count() or 1

    def workers(self, requested: Optional[int] = None) -> int:
        """Requested parallelism, capped by LP_HOMOTOPY_THREADS"""
        cap = self.threads
        return min(requested or cap, cap)

    @property
    def log_level(self) -> str:
        return os.getenv('LP_HOMOTOPY_LOG_LEVEL', 'WARNING')

    @property
    def log_dir(self) -> Optional[str]:
        return os.getenv('LP_HOMOTOPY_LOG_DIR')


# Global settings instance
settings = Settings()
