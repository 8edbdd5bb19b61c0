from .settings import Settings, settings
from .solver_config import HomotopyConfig

__all__ = ['Settings', 'settings', 'HomotopyConfig']
