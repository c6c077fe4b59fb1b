"""
Service lifecycle base class.

A service owns resources that outlive a single call; it is set up by
``initialize`` and released by ``shutdown``, or used as a context manager.
"""
import abc
from typing import Any, Dict, Optional

from src.plgroup.utils.logging import get_logger


class BaseService(abc.ABC):
    """Abstract base class for plgroup services."""

    def __init__(self, config: Optional[Dict[str, Any]] = None) -> None:
        """
        Args:
            config: Service settings, overriding the configuration files
        """
        self.config = config or {}
        self.logger = get_logger(self.__class__.__name__)
        self.initialized = False

    @abc.abstractmethod
    def initialize(self) -> None:
        """Acquire the resources of the service."""

    @abc.abstractmethod
    def shutdown(self) -> None:
        """Release the resources of the service."""

    def is_initialized(self) -> bool:
        return self.initialized

    def __enter__(self) -> "BaseService":
        self.initialize()
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        self.shutdown()
