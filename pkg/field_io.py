"""Binary field container and per-slice norm export"""
import csv
import json
import logging

import numpy as np

from constants import PHYSICAL
from exception import ConfigurationException
from grid_spectral import (
    GridSpec,
    SpaceTimeField,
    convert,
    make_field,
    make_spatial_field,
    spacing,
    space_time_shape,
    spatial_shape,
    times,
)


log = logging.getLogger(__name__)

SPACETIME_KIND = "spacetime"
SPATIAL_KIND = "spatial"
CONTAINER_DTYPE = "<c16"


def write_field(path, field):
    """
    Write a field as a JSON header line followed by little-endian interleaved complex doubles

    Args:
        path (str or Path): Where to write
        field (SpaceTimeField or SpatialField): The field
    """
    header = {
        "kind": SPACETIME_KIND if isinstance(field, SpaceTimeField) else SPATIAL_KIND,
        "rep": field.rep,
        "grid": field.grid._asdict(),
        "shape": list(field.coeffs.shape),
        "dtype": CONTAINER_DTYPE,
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        f.write(b"\n")
        f.write(np.ascontiguousarray(field.coeffs, dtype=CONTAINER_DTYPE).tobytes())
    log.info("Wrote field to %s", path)


def read_field(path):
    """
    Read a field written by write_field

    Args:
        path (str or Path): The container

    Returns:
        SpaceTimeField or SpatialField: The field
    """
    with open(path, "rb") as f:
        header_line = f.readline()
        payload = f.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
        grid = GridSpec(**header["grid"])
        kind = header["kind"]
        rep = header["rep"]
    except (KeyError, TypeError, ValueError) as ex:
        raise ConfigurationException(f"Invalid field header in {path}") from ex
    if header.get("dtype") != CONTAINER_DTYPE:
        raise ConfigurationException(f"Unsupported dtype {header.get('dtype')} in {path}")
    shape = space_time_shape(grid) if kind == SPACETIME_KIND else spatial_shape(grid)
    coeffs = np.frombuffer(payload, dtype=CONTAINER_DTYPE)
    if coeffs.size != int(np.prod(shape)):
        raise ConfigurationException(
            f"{path} holds {coeffs.size} values but its header describes shape {shape}"
        )
    coeffs = coeffs.astype(complex).reshape(shape)
    if kind == SPACETIME_KIND:
        return make_field(grid, coeffs, rep)
    return make_spatial_field(grid, coeffs, rep)


def slice_norms(u):
    """
    Per-time L² and L^∞ norms

    Returns:
        list of tuple: (t, l2, linf) per time sample
    """
    physical = convert(u, PHYSICAL)
    _, dx = spacing(u.grid)
    modulus = np.abs(physical.coeffs).reshape(u.grid.nt, -1)
    l2 = np.sqrt(dx**u.grid.n * (modulus**2).sum(axis=1))
    linf = modulus.max(axis=1)
    return [
        (float(t), float(a), float(b)) for t, a, b in zip(times(u.grid), l2, linf)
    ]


def write_slice_norms(path, u):
    """Write per-time L² and L^∞ norms as CSV"""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t", "l2", "linf"])
        for t, l2, linf in slice_norms(u):
            writer.writerow([repr(t), repr(l2), repr(linf)])
    log.info("Wrote slice norms to %s", path)
