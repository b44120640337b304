import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pentapod_sing.pentapod import extract_F  # noqa: E402
from pentapod_sing.reference import UNNORMALIZED_ARCHITECTURE, REFERENCE_ARCHITECTURE, REFERENCE_POSE  # noqa: E402


@pytest.fixture(scope="session")
def arch():
    return REFERENCE_ARCHITECTURE


@pytest.fixture(scope="session")
def pose_g():
    return REFERENCE_POSE


@pytest.fixture(scope="session")
def model():
    return extract_F(REFERENCE_ARCHITECTURE)


@pytest.fixture(scope="session")
def unnormalized_model():
    return extract_F(UNNORMALIZED_ARCHITECTURE)


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def _timed(fn, *args, **kwargs):
    import time

    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


@pytest.fixture(scope="session")
def fixed_orientation_run(model):
    from pentapod_sing.distance import closest_fixed_orientation

    return _timed(closest_fixed_orientation, model, REFERENCE_ARCHITECTURE, REFERENCE_POSE)


@pytest.fixture(scope="session")
def fixed_position_run(model):
    from pentapod_sing.distance import closest_fixed_position

    return _timed(closest_fixed_position, model, REFERENCE_ARCHITECTURE, REFERENCE_POSE)


@pytest.fixture(scope="session")
def general_run(model):
    from pentapod_sing.distance import closest_general

    return _timed(closest_general, model, REFERENCE_ARCHITECTURE, REFERENCE_POSE)


@pytest.fixture(scope="session")
def equiform_run(model):
    from pentapod_sing.distance import closest_equiform

    return _timed(closest_equiform, model, REFERENCE_ARCHITECTURE, REFERENCE_POSE)
