"""
Utility module for loading and accessing configuration files.
"""

import os
import yaml
from pathlib import Path
from typing import Dict, Any, Optional
from dotenv import load_dotenv

OUTPUT_DIR_ENV = "COXPERC_OUTPUT_DIR"

DEFAULT_CONFIG_DIR = Path(__file__).resolve().parents[2] / "config"


class ConfigLoader:
    """Loads and manages configuration from YAML files."""

    def __init__(self, config_dir: Optional[str] = None):
        """
        Initialize the configuration loader.

        Args:
            config_dir: Directory containing ``config.yaml`` and optionally
                ``presets.yaml``; defaults to the repository's ``config/``
        """
        self.config_dir = Path(config_dir) if config_dir else DEFAULT_CONFIG_DIR
        self.config: Dict[str, Any] = {}

        # Load environment variables
        load_dotenv()

        self._load_main_config()
        self._load_presets()

    def _load_main_config(self):
        """Load the main configuration file."""
        config_path = self.config_dir / "config.yaml"
        if config_path.exists():
            with open(config_path, 'r', encoding='utf-8') as f:
                self.config = yaml.safe_load(f) or {}
        else:
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

    def _load_presets(self):
        """Merge named parameter presets into the main configuration."""
        presets_path = self.config_dir / "presets.yaml"
        if presets_path.exists():
            with open(presets_path, 'r', encoding='utf-8') as f:
                additional = yaml.safe_load(f) or {}
                if 'presets' in additional:
                    if 'presets' not in self.config:
                        self.config['presets'] = {}
                    self.config['presets'].update(additional['presets'])

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a configuration value using dot notation.

        Args:
            key: Configuration key (supports dot notation, e.g., 'model.M')
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        keys = key.split('.')
        value = self.config

        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    return default
            else:
                return default

        return value

    def get_model_config(self) -> Dict[str, Any]:
        """Get default model parameters."""
        return dict(self.config.get('model', {}))

    def get_run_config(self) -> Dict[str, Any]:
        """Get default run (command) parameters."""
        return dict(self.config.get('run', {}))

    def get_simulation_config(self) -> Dict[str, Any]:
        """Get simulation settings (progress cadence)."""
        return dict(self.config.get('simulation', {}))

    def get_environment_config(self) -> Dict[str, Any]:
        """Get environment construction settings."""
        return dict(self.config.get('environment', {}))

    def get_logging_config(self) -> Dict[str, Any]:
        """Get logging configuration."""
        return dict(self.config.get('logging', {}))

    def get_preset(self, name: str) -> Optional[Dict[str, Any]]:
        """
        Get a named parameter preset.

        Args:
            name: Preset name

        Returns:
            Preset mapping or None
        """
        presets = self.config.get('presets', {})
        preset = presets.get(name)
        return dict(preset) if preset is not None else None

    def get_output_dir(self) -> str:
        """
        Default output directory; the environment variable wins over the file.

        Returns:
            Output directory path
        """
        return os.getenv(OUTPUT_DIR_ENV) or self.get('output.dir', 'results')


# Global configuration instance
_config_instance: Optional[ConfigLoader] = None


def get_config() -> ConfigLoader:
    """
    Get the global configuration instance.

    Returns:
        ConfigLoader instance
    """
    global _config_instance
    if _config_instance is None:
        _config_instance = ConfigLoader()
    return _config_instance

