import sys
from pathlib import Path

import pytest


PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))


@pytest.fixture
def rng():
    np = pytest.importorskip("numpy")
    return np.random.default_rng(20240611)


@pytest.fixture
def box_1d():
    from src.grid import make_grid
    return make_grid('periodic-box', 1, 16.0, 128)


@pytest.fixture
def box_2d():
    from src.grid import make_grid
    return make_grid('periodic-box', 2, 8.0, 64)


@pytest.fixture
def radial():
    from src.grid import make_grid
    return make_grid('radial', 5, 20.0, 2048)


@pytest.fixture
def resonant():
    from src.FieldTriple import SystemParams
    return SystemParams(2.0, 2.0, 1.0)


@pytest.fixture
def non_resonant():
    from src.FieldTriple import SystemParams
    return SystemParams(1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def ground_state_112():
    """Ground state for ``kappa = (1, 1, 2)`` on the reference radial grid."""
    pytest.importorskip("scipy")
    from src.FieldTriple import SystemParams
    from src.GroundState import solve_ground_state
    from src.grid import make_grid
    return solve_ground_state(SystemParams(1.0, 1.0, 2.0), make_grid('radial', 5, 20.0, 2048))


@pytest.fixture(scope="session")
def ground_state_221():
    pytest.importorskip("scipy")
    from src.FieldTriple import SystemParams
    from src.GroundState import solve_ground_state
    from src.grid import make_grid
    return solve_ground_state(SystemParams(2.0, 2.0, 1.0), make_grid('radial', 5, 20.0, 2048))


@pytest.fixture(scope="session")
def shooting_profile():
    pytest.importorskip("scipy")
    from src.GroundState import shooting_scalar
    return shooting_scalar()
