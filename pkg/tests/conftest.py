import json
from dataclasses import replace
from pathlib import Path

import pytest

from crossdock_sim import ModelConfig

CONFIG_PATH = Path(__file__).resolve().parent.parent / "configs" / "paper-base.json"


@pytest.fixture(scope="session")
def paper_config() -> ModelConfig:
    return ModelConfig.from_dict(json.loads(CONFIG_PATH.read_text()))


@pytest.fixture(scope="session")
def fast_config(paper_config) -> ModelConfig:
    """Paper config at a 48-hour horizon: same structure, ~10x faster."""
    return replace(paper_config, horizon=2880.0)
