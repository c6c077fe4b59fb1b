"""
Logging module for plgroup.

Log records go to stderr; stdout carries command output only.
"""
import logging
import os
import sys
from pathlib import Path
from typing import Dict, Optional, Union

from src.plgroup.utils.config import config_manager

DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class LoggingManager:
    """
    Logging manager for plgroup.

    Configures the root logger once from the ``logging`` configuration
    section and hands out named loggers.
    """

    def __init__(self) -> None:
        """Initialize the logging manager."""
        self.loggers: Dict[str, logging.Logger] = {}
        self.initialized = False

    def init_logging(self, config: Optional[Dict] = None, force: bool = False) -> None:
        """
        Initialize logging with the given configuration.

        Args:
            config: Logging configuration dictionary (optional)
            force: Reconfigure even if logging was already initialized
        """
        if self.initialized and not force:
            return

        if config is None:
            config = config_manager.section("logging")

        # --log-level travels through PLGROUP_LOG_LEVEL
        level_name = config_manager.get("log_level") or config.get("level", "INFO")
        log_level = self._get_log_level(level_name)
        log_format = config.get("format", DEFAULT_FORMAT)
        log_to_file = config.get("log_to_file", False)
        log_file = config.get("log_file", "logs/plgroup.log")

        root_logger = logging.getLogger()
        root_logger.setLevel(log_level)

        for handler in root_logger.handlers[:]:
            root_logger.removeHandler(handler)

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(log_level)
        console_handler.setFormatter(logging.Formatter(log_format))
        root_logger.addHandler(console_handler)

        if log_to_file and log_file:
            os.makedirs(Path(log_file).parent, exist_ok=True)
            file_handler = logging.FileHandler(log_file)
            file_handler.setLevel(log_level)
            file_handler.setFormatter(logging.Formatter(log_format))
            root_logger.addHandler(file_handler)

        self.initialized = True

    def get_logger(self, name: str) -> logging.Logger:
        """
        Get a named logger.

        Handlers are attached to the root logger by ``init_logging``; asking
        for a logger never configures anything.

        Args:
            name: Logger name

        Returns:
            Logger instance
        """
        if name not in self.loggers:
            self.loggers[name] = logging.getLogger(name)
        return self.loggers[name]

    @staticmethod
    def _get_log_level(level: Union[str, int]) -> int:
        """
        Convert a log level string to a logging level constant.

        Args:
            level: Log level string or integer

        Returns:
            Logging level constant, INFO for unknown names
        """
        if isinstance(level, int):
            return level
        value = logging.getLevelName(str(level).upper())
        return value if isinstance(value, int) else logging.INFO


# Create a singleton instance of the logging manager
logging_manager = LoggingManager()


def get_logger(name: str) -> logging.Logger:
    """
    Get a named logger.

    Args:
        name: Logger name

    Returns:
        Logger instance
    """
    return logging_manager.get_logger(name)
