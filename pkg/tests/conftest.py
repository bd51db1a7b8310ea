from __future__ import annotations

import numpy as np
import pytest

from fptarget.mold import build_mold
from fptarget.patterns import GratingKind, sine_grating
from fptarget.projection import (
    ScaleModel,
    compensated_scale,
    make_smooth_finger,
    map_image_to_surface,
    required_image_size,
)


@pytest.fixture(scope="session")
def finger27():
    return make_smooth_finger(27.0, 30.0, 192, 64)


@pytest.fixture(scope="session")
def default_scale():
    return compensated_scale(ScaleModel())


@pytest.fixture(scope="session")
def circular_print(finger27, default_scale):
    w, h = required_image_size(finger27, default_scale)
    return sine_grating(GratingKind.CIRCULAR, 10, w + 2, h + 2)


@pytest.fixture(scope="session")
def displaced27(finger27, default_scale, circular_print):
    return map_image_to_surface(circular_print, finger27, default_scale)


@pytest.fixture(scope="session")
def mold27(finger27, displaced27):
    return build_mold(displaced27, finger27.height)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
