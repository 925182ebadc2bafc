"""
Settings Manager

Handles loading and saving synthesis defaults to a JSON file.

Format: {"version": 2, "defaults": {...}}. Unknown keys are dropped and
invalid values fall back to the defaults.
"""

import json
import logging
import os
from typing import Mapping, Optional

from .constants import DEFAULT_SETTINGS, MODES, SEED_ENV, SETTINGS_FILENAME

logger = logging.getLogger(__name__)

SETTINGS_VERSION = 2


class SettingsManager:
    """Manages persistent synthesis defaults."""

    def __init__(self, settings_dir: str = '.'):
        self.settings = dict(DEFAULT_SETTINGS)
        self._settings_file = os.path.join(settings_dir, SETTINGS_FILENAME)

    @property
    def path(self) -> str:
        return self._settings_file

    def load(self) -> dict:
        """Load settings from file; never raises."""
        try:
            if not os.path.exists(self._settings_file):
                return self.settings
            with open(self._settings_file, 'r') as f:
                saved = json.load(f)

            version = saved.get('version')
            if version != SETTINGS_VERSION:
                logger.warning("Ignoring %s: unsupported settings version %r",
                               self._settings_file, version)
                return self.settings
            self.update(saved.get('defaults', {}))
        except Exception as e:
            logger.warning("Failed to load settings from %s: %s", self._settings_file, e)
        return self.settings

    def update(self, values: Mapping) -> list[str]:
        """Apply known, valid values; returns the keys that were rejected."""
        rejected = []
        for key, value in values.items():
            if key not in DEFAULT_SETTINGS:
                logger.warning("Ignoring unknown setting %r", key)
                rejected.append(key)
            elif not _valid(key, value):
                logger.warning("Ignoring invalid %s=%r in settings", key, value)
                rejected.append(key)
            else:
                self.settings[key] = value
        return rejected

    def save(self):
        """Write settings to file. Raises on failure."""
        output = {
            'version': SETTINGS_VERSION,
            'defaults': {key: self.settings[key] for key in DEFAULT_SETTINGS},
        }
        with open(self._settings_file, 'w') as f:
            json.dump(output, f, indent=2)
        logger.info("Saved settings to %s", self._settings_file)

    def get(self, key: str):
        return self.settings[key]


def _valid(key: str, value) -> bool:
    default = DEFAULT_SETTINGS[key]
    if key == 'mode':
        return value in MODES
    if isinstance(default, bool):
        return isinstance(value, bool)
    return isinstance(value, int) and not isinstance(value, bool) and value >= 0


def resolve_seed(explicit: Optional[int] = None, settings: Optional[dict] = None) -> int:
    """Explicit value, then the environment, then the settings file, then 0."""
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            logger.warning("Ignoring non-integer %s=%r", SEED_ENV, env)
    if settings is not None and settings.get('seed') is not None:
        return int(settings['seed'])
    return 0
