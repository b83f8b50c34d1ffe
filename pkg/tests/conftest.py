"""Shared fixtures: preset loading and canonical design builders."""

import json
from pathlib import Path

import pytest

from bayespower.approx import DesignSpec

PRESETS = Path(__file__).resolve().parent.parent / "presets"


def load_preset(name: str, **overrides) -> DesignSpec:
    doc = json.loads((PRESETS / f"{name}.json").read_text())
    doc.update(overrides)
    return DesignSpec.from_dict(doc)


def preset_dict(name: str, **overrides) -> dict:
    doc = json.loads((PRESETS / f"{name}.json").read_text())
    doc.update(overrides)
    return doc


@pytest.fixture
def bernoulli_1a() -> DesignSpec:
    return load_preset("bernoulli-setting-1a")


@pytest.fixture
def bernoulli_2a() -> DesignSpec:
    return load_preset("bernoulli-setting-2a")


@pytest.fixture
def gamma_1a() -> DesignSpec:
    return load_preset("gamma-setting-1a")


@pytest.fixture
def gamma_1c() -> DesignSpec:
    return load_preset("gamma-setting-1c")


@pytest.fixture
def weibull_1a() -> DesignSpec:
    return load_preset("weibull-setting-1a")
