"""
Tests for settings loading and validation.
"""
import pytest
from pydantic import ValidationError

from src import config
from src.config import Settings


def test_module_exposes_only_the_settings_object():
    public = {name for name in vars(config) if not name.startswith("_")}
    assert "settings" in public
    assert "settings_dict" not in public


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("WORKERS", "3")
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1088640000")
    loaded = Settings()
    assert loaded.WORKERS == 3
    assert loaded.SOURCE_DATE_EPOCH == 1_088_640_000


@pytest.mark.parametrize(
    "name, value",
    [("GAMMA_BOUNDS", "[5.0, 0.5]"), ("IPF_TOLERANCE", "0"), ("WORKERS", "0")],
)
def test_invalid_values_rejected(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValidationError):
        Settings()
