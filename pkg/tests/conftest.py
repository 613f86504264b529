"""Shared fixtures for the test suite."""
from __future__ import annotations

import pytest

from tagbot.rflink import LinkConfig, default_link_config


@pytest.fixture()
def link() -> LinkConfig:
    """Calibrated link configuration with shadowing disabled."""
    return default_link_config()
