from .app import API_PREFIX, create_app, load_model
from .config import ApiConfig, load_api_config

__all__ = ["API_PREFIX", "ApiConfig", "create_app", "load_api_config", "load_model"]
