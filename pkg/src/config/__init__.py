from .settings import Settings, get_settings, load_settings
from .log_setup import configure_logging

__all__ = ["Settings", "get_settings", "load_settings", "configure_logging"]
