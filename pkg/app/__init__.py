# app/__init__.py
from app.core.config import settings

__version__ = settings.VERSION
__all__ = ["settings", "__version__"]
