import json
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from mdsx.builder import build
from mdsx.code_model import vandermonde_code
from mdsx.field_linalg import Field
from mdsx.transform import TransformSpec

settings.register_profile("default", max_examples=30, deadline=None)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"
SEED = int(os.environ.get("MDSX_SEED", "20240917"))


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def built_852():
    return build(8, 5, 2)


@pytest.fixture(scope="session")
def code_12_8():
    """The (12,8) code from one delta=3 transformation of a (15,11) Vandermonde base."""
    from mdsx.builder import transform_goal_plans
    base = vandermonde_code(15, 4, Field(19))
    code, plans = transform_goal_plans(base, TransformSpec(3, (0, 1)))
    return base, code, plans


@pytest.fixture(scope="session")
def golden():
    return json.loads((DATA / "golden_8_5_2.json").read_text())
