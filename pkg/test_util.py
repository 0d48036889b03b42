"""Utility functions for testing"""
import numpy as np

from grid_spectral import convert, make_field


def async_wrapper(mocked):
    """Wrap sync functions with a simple async wrapper"""

    async def async_func(*args, **kwargs):
        return mocked(*args, **kwargs)

    return async_func


def field_from_modes(grid, modes, rep):
    """
    Sum of plane waves given as {(j, k tuple): amplitude}, converted to rep

    Amplitudes are physical, so each mode contributes amplitude·e^{2πi(τt+ξ·x)}.
    """
    t = np.arange(grid.nt) * grid.period / grid.nt
    x = np.arange(grid.nx) * grid.length / grid.nx
    values = np.zeros((grid.nt,) + (grid.nx,) * grid.n, dtype=complex)
    for (j, k), amplitude in modes.items():
        phase = j * t.reshape([grid.nt] + [1] * grid.n) / grid.period
        for axis, k_axis in enumerate(k):
            shape = [1] * (grid.n + 1)
            shape[axis + 1] = grid.nx
            phase = phase + k_axis * x.reshape(shape) / grid.length
        values = values + amplitude * np.exp(2j * np.pi * phase)
    return convert(make_field(grid, values), rep)
