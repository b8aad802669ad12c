import os

import pytest


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    """Keep CLI runs in tests away from the user's cache directory."""
    monkeypatch.setenv("IWASAWA_CACHE_DIR", str(tmp_path / "cache"))
    yield
