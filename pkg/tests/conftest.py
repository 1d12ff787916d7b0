import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from config import Config  # noqa: E402
from services.io_formats import load_fan, load_module, load_potential  # noqa: E402


@pytest.fixture(autouse=True)
def quiet():
    """测试中关闭 stderr 状态输出"""
    previous = Config.VERBOSE
    Config.VERBOSE = False
    yield
    Config.VERBOSE = previous


@pytest.fixture
def fan_path():
    return lambda name: Config.FANS_DIR / f"{name}.fan"


@pytest.fixture
def pot_path():
    return lambda name: Config.POTENTIALS_DIR / f"{name}.pot"


@pytest.fixture
def mod_path():
    return lambda name: Config.MODULES_DIR / f"{name}.mod"


@pytest.fixture
def potential():
    return lambda name, alphas=None: load_potential(Config.POTENTIALS_DIR / f"{name}.pot", alphas=alphas)


@pytest.fixture
def fan():
    return lambda name: load_fan(Config.FANS_DIR / f"{name}.fan")


@pytest.fixture
def module():
    return lambda name, pot: load_module(Config.MODULES_DIR / f"{name}.mod", pot)
