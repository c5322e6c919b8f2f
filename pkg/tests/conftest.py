import os

import numpy as np
import pytest

from _helpers import graph_fixture, unit_circle_at_height
from hypothesis import HealthCheck, settings

SEED = int(os.environ.get("AFFINE_FOCAL_SEED", "20240601"))

settings.register_profile("affine_focal", deadline=None, derandomize=True, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("affine_focal")


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def latitude_frame():
    from affine_focal.curves import latitude
    from affine_focal.darboux3 import darboux_frame
    from affine_focal.surfaces import on_surface, sphere
    return darboux_frame(on_surface(latitude(0.6), sphere()), samples=256)


@pytest.fixture(scope="session")
def cone_frame():
    from affine_focal.darboux3 import darboux_frame
    from affine_focal.surfaces import Cone, on_surface
    c = unit_circle_at_height()
    return darboux_frame(on_surface(c, Cone([0.0, 0.0, 0.0], c)), samples=256)


@pytest.fixture(scope="session")
def graph_frame():
    from affine_focal.darboux3 import darboux_frame
    return darboux_frame(graph_fixture(), samples=256)


@pytest.fixture(scope="session")
def oval_curve():
    from affine_focal.affine_curves import reparam_affine_planar
    from affine_focal.curves import fourier_oval
    return reparam_affine_planar(fourier_oval([1.0, 0.0, 0.0, 0.05]), samples=256)


def pytest_terminal_summary(terminalreporter):
    from _helpers import ACCEPTANCE
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
