"""Tests for executor"""
import threading

import pytest
from scipy import fft

from exception import ConfigurationException
from executor import fft_workers, gather_in_threads, run_in_thread


pytestmark = pytest.mark.asyncio


async def test_run_in_thread():
    """run_in_thread should return the function's result"""
    assert await run_in_thread(pow, 2, 10) == 1024


async def test_run_in_thread_off_loop():
    """run_in_thread should not run the function on the event loop thread"""
    main = threading.get_ident()
    assert await run_in_thread(threading.get_ident) != main


@pytest.mark.parametrize("threads", [1, 3])
async def test_gather_in_threads(threads):
    """gather_in_threads should keep the item order regardless of pool size"""
    assert await gather_in_threads(lambda x: x * x, range(10), threads=threads) == [
        x * x for x in range(10)
    ]


async def test_gather_in_threads_empty():
    """gather_in_threads should return an empty list for no items"""
    assert await gather_in_threads(abs, [], threads=2) == []


async def test_gather_in_threads_error():
    """gather_in_threads should propagate an exception from a worker"""

    def fail(item):
        raise ValueError(f"bad item {item}")

    with pytest.raises(ValueError) as ex:
        await gather_in_threads(fail, [1], threads=1)
    assert ex.value.args[0] == "bad item 1"


@pytest.mark.parametrize("threads", [0, -1, 1.5])
async def test_gather_in_threads_bad_threads(threads):
    """gather_in_threads should reject a pool size which is not a positive integer"""
    with pytest.raises(ConfigurationException):
        await gather_in_threads(abs, [1], threads=threads)


async def test_fft_workers():
    """fft_workers should set the scipy.fft worker count inside the block only"""
    before = fft.get_workers()
    with fft_workers(2):
        assert fft.get_workers() == 2
    assert fft.get_workers() == before
