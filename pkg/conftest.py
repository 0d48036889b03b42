"""Fixtures for tests"""
import pytest

from grid_spectral import make_grid
from test_util import async_wrapper


# pylint: disable=redefined-outer-name, unused-argument
@pytest.fixture
def line_grid():
    """One space dimension, 64 points on the unit square"""
    yield make_grid(n=1, nx=64, length=1.0, nt=64, period=1.0)


@pytest.fixture
def small_line_grid():
    """One space dimension, 16 points"""
    yield make_grid(n=1, nx=16, length=1.0, nt=16, period=1.0)


@pytest.fixture
def plane_grid():
    """Two space dimensions, 32 points per axis"""
    yield make_grid(n=2, nx=32, length=1.0, nt=32, period=1.0)


@pytest.fixture
def mocker(mocker):  # pylint: disable=redefined-outer-name
    """Override to add async_patch"""

    def async_patch(*args, **kwargs):
        """Add a helper function to patch with an async wrapped function, which is returned"""
        mocked = mocker.Mock(**kwargs)
        mocker.patch(*args, new_callable=lambda: async_wrapper(mocked))
        return mocked

    mocker.async_patch = async_patch
    return mocker


def _raiser(message, *args, **kwargs):
    """Raise an exception"""
    raise Exception(message)


@pytest.fixture(autouse=True)
def log_exception(mocker):
    """Patch log.error and log.exception to raise an exception so tests do not silence it"""
    mocker.patch("cli.log.exception", side_effect=_raiser)
    mocker.patch("cli.log.error", side_effect=_raiser)
