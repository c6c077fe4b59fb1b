"""
Configuration management for plgroup.

Configuration is layered: ``config/default.yaml``, then the environment
specific file, then ``PLGROUP_*`` environment variables.
"""
import json
import os
from pathlib import Path
from typing import Any, Dict, Union

import yaml

from src.plgroup.core.errors import MalformedInputError

_TRUE_WORDS = ("true", "yes", "on")
_FALSE_WORDS = ("false", "no", "off")


class ConfigurationManager:
    """
    Configuration manager for plgroup.

    Holds a flat dictionary of top-level keys; sections such as
    ``construction`` or ``suite`` are nested dictionaries.
    """

    def __init__(self, env_prefix: str = "PLGROUP_") -> None:
        """
        Initialize the configuration manager.

        Args:
            env_prefix: Prefix for environment variables (default: "PLGROUP_")
        """
        self.env_prefix = env_prefix
        self.config: Dict[str, Any] = {}

    @staticmethod
    def _coerce(value: str) -> Any:
        lowered = value.lower()
        if value.isdigit():
            return int(value)
        if lowered in _TRUE_WORDS:
            return True
        if lowered in _FALSE_WORDS:
            return False
        if value.replace(".", "", 1).isdigit() and value.count(".") == 1:
            return float(value)
        return value

    def load_from_env(self) -> Dict[str, Any]:
        """
        Load configuration from environment variables.

        ``PLGROUP_THREADS=4`` becomes ``{"threads": 4}``.

        Returns:
            Dictionary containing configuration loaded from environment variables
        """
        env_config = {
            key[len(self.env_prefix):].lower(): self._coerce(value)
            for key, value in os.environ.items()
            if key.startswith(self.env_prefix)
        }
        self.config.update(env_config)
        return env_config

    def load_from_file(self, file_path: Union[str, Path]) -> Dict[str, Any]:
        """
        Load configuration from a file (JSON or YAML).

        Args:
            file_path: Path to the configuration file

        Returns:
            Dictionary containing configuration loaded from the file

        Raises:
            FileNotFoundError: If the configuration file does not exist
            MalformedInputError: If the file format is not supported or invalid
        """
        file_path = Path(file_path)

        if not file_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {file_path}")

        try:
            with open(file_path, "r") as file:
                if file_path.suffix.lower() in (".yaml", ".yml"):
                    file_config = yaml.safe_load(file)
                elif file_path.suffix.lower() == ".json":
                    file_config = json.load(file)
                else:
                    raise MalformedInputError(
                        f"Unsupported configuration file format: {file_path.suffix}"
                    )
        except (yaml.YAMLError, json.JSONDecodeError) as e:
            raise MalformedInputError(f"Failed to load configuration file: {e}") from e

        if not file_config:
            return {}
        if not isinstance(file_config, dict):
            raise MalformedInputError(f"Configuration root must be a mapping: {file_path}")

        # Sections merge key by key so an environment file can override one setting
        for key, value in file_config.items():
            current = self.config.get(key)
            if isinstance(current, dict) and isinstance(value, dict):
                merged = dict(current)
                merged.update(value)
                self.config[key] = merged
            else:
                self.config[key] = value
        return file_config

    def load_hierarchical_config(self, base_dir: Union[str, Path], env: str) -> Dict[str, Any]:
        """
        Load hierarchical configuration for a specific environment.

        Args:
            base_dir: Base directory containing configuration files
            env: Environment name (e.g., development, testing, production)

        Returns:
            Dictionary containing merged configuration from all loaded files
        """
        base_dir = Path(base_dir)

        for file_path in (base_dir / "default.yaml", base_dir / f"{env}.yaml"):
            if file_path.exists():
                self.load_from_file(file_path)

        return self.config

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a configuration value by key.

        Args:
            key: Configuration key
            default: Default value if the key is not found

        Returns:
            Configuration value or default value if not found
        """
        return self.config.get(key, default)

    def section(self, name: str) -> Dict[str, Any]:
        """Return a configuration section as a dictionary (empty when missing)."""
        value = self.config.get(name)
        return value if isinstance(value, dict) else {}

    def set(self, key: str, value: Any) -> None:
        """
        Set a configuration value.

        Args:
            key: Configuration key
            value: Configuration value
        """
        self.config[key] = value


# Create a singleton instance of the configuration manager
config_manager = ConfigurationManager()
