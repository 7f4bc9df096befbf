import json

import jax.numpy as jnp
import numpy as np

from hnse.frequency import Field, HorizontalField, SpectralField, grid_from_nodes

MAGIC = b"HNSE"
VERSION = 1
GRID_MODES = {"geometric": 0, "uniform_periodic": 1}

_header = np.dtype([("magic", "S4"), ("version", "<u4"), ("d", "<u4"), ("M", "<u4"), ("n_lambda", "<u4"), ("mode", "u1")])


def field_to_bytes(f: Field) -> bytes:
    """
    HNSE binary layout: magic, u32 version, u32 d, u32 M, u32 n_lambda,
    u8 grid mode, n_lambda f64 nodes, then the coefficients as little-endian
    f64 (re, im) pairs in (component, n, m, lambda) order.
    """
    grid = f.grid
    header = np.array(
        [(MAGIC, VERSION, grid.d, grid.M, grid.n_lambda, GRID_MODES[grid.grid_mode])],
        dtype=_header,
    )
    nodes = np.asarray(grid.lambda_nodes, dtype="<f8")
    coeffs = np.ascontiguousarray(np.asarray(f.coeffs, dtype=np.complex128))
    payload = np.stack([coeffs.real, coeffs.imag], axis=-1).astype("<f8")
    return header.tobytes() + nodes.tobytes() + payload.tobytes()


def field_from_bytes(data: bytes) -> Field:
    header = np.frombuffer(data, dtype=_header, count=1)[0]
    if header["magic"] != MAGIC:
        raise ValueError("Not an HNSE file: bad magic.")
    if int(header["version"]) != VERSION:
        raise ValueError(f"HNSE version {int(header['version'])} not supported.")
    d, M, n_lambda = int(header["d"]), int(header["M"]), int(header["n_lambda"])
    modes = {value: key for key, value in GRID_MODES.items()}
    if int(header["mode"]) not in modes:
        raise ValueError(f"Grid mode byte {int(header['mode'])} not recognized.")
    offset = _header.itemsize
    nodes = np.frombuffer(data, dtype="<f8", count=n_lambda, offset=offset)
    grid = grid_from_nodes(d, M, modes[int(header["mode"])], nodes)
    values = np.frombuffer(data, dtype="<f8", offset=offset + 8 * n_lambda)
    per_component = 2 * int(np.prod(grid.field_shape))
    if values.size % per_component != 0:
        raise ValueError("HNSE payload length does not match the grid.")
    n_components = values.size // per_component
    pairs = values.reshape(-1, 2)
    coeffs = (pairs[:, 0] + 1j * pairs[:, 1]).reshape((n_components,) + grid.field_shape)
    if n_components == 1:
        return SpectralField(grid, jnp.asarray(coeffs[0]))
    if n_components != 2 * d:
        raise ValueError(f"HNSE file holds {n_components} components, expected 1 or {2 * d}.")
    return HorizontalField(grid, jnp.asarray(coeffs))


def save_field(f: Field, path: str):
    with open(path, "wb") as file:
        file.write(field_to_bytes(f))


def load_field(path: str) -> Field:
    with open(path, "rb") as file:
        return field_from_bytes(file.read())


def save_field_json(f: Field, path: str):
    grid = f.grid
    coeffs = np.asarray(f.coeffs)
    if isinstance(f, SpectralField):
        coeffs = coeffs[None]
    document = {
        "format": "HNSE-json",
        "version": VERSION,
        "d": grid.d,
        "M": grid.M,
        "grid_mode": grid.grid_mode,
        "lambda_nodes": np.asarray(grid.lambda_nodes).tolist(),
        "components": int(coeffs.shape[0]),
        "re": coeffs.real.tolist(),
        "im": coeffs.imag.tolist(),
    }
    with open(path, "w") as file:
        json.dump(document, file)


def load_field_json(path: str) -> Field:
    with open(path, "r") as file:
        document = json.load(file)
    grid = grid_from_nodes(
        document["d"], document["M"], document["grid_mode"], np.array(document["lambda_nodes"])
    )
    coeffs = np.array(document["re"]) + 1j * np.array(document["im"])
    if document["components"] == 1:
        return SpectralField(grid, jnp.asarray(coeffs[0]))
    return HorizontalField(grid, jnp.asarray(coeffs))
