"""asyncio wrappers for running numeric work on a thread pool"""
import asyncio
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

from scipy import fft

from exception import ConfigurationException


def _check_threads(threads):
    if not isinstance(threads, int) or threads < 1:
        raise ConfigurationException(f"threads must be a positive integer, got {threads}")


async def run_in_thread(func, *args, executor=None):
    """
    Similar to calling func(*args) but adapted for asyncio. The call runs on executor, or on the
    loop's default executor when none is given, so the event loop stays free.
    """
    loop = asyncio.get_event_loop()
    return await loop.run_in_executor(executor, func, *args)


async def gather_in_threads(func, items, *, threads=1):
    """
    Apply func to each item on a thread pool and collect the results in item order

    Args:
        func (callable): A function of one argument
        items (iterable): The arguments
        threads (int): Pool size

    Returns:
        list: func(item) for each item
    """
    _check_threads(threads)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(
            await asyncio.gather(
                *[run_in_thread(func, item, executor=executor) for item in items]
            )
        )


@contextmanager
def fft_workers(threads):
    """Let scipy.fft use threads workers inside the block"""
    _check_threads(threads)
    with fft.set_workers(threads):
        yield threads
