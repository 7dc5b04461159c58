import pytest
from hypothesis import settings

from gilkit import solver

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _fresh_solver_cache():
    solver.clear_cache()
    yield
