"""JSON formats: density matrices ({"dims", "re", "im"}, row-major) and
tagged state-spec records."""

import json
from pathlib import Path

import numpy as np

from .qmat import DensityMatrix
from .states import make_state


def density_matrix_to_dict(rho: DensityMatrix) -> dict:
    return {
        "dims": list(rho.dims),
        "re": rho.matrix.real.tolist(),
        "im": rho.matrix.imag.tolist(),
    }


def density_matrix_from_dict(payload: dict) -> DensityMatrix:
    try:
        dims = tuple(int(d) for d in payload["dims"])
        re = np.asarray(payload["re"], dtype=float)
        im = np.asarray(payload["im"], dtype=float)
    except (KeyError, TypeError) as err:
        raise ValueError(f"malformed density-matrix record: {err}") from None
    if re.shape != im.shape or re.ndim != 2:
        raise ValueError("'re' and 'im' must be equal-shaped square matrices")
    return DensityMatrix(re + 1j * im, dims)


def save_density_matrix(rho: DensityMatrix, path) -> None:
    Path(path).write_text(json.dumps(density_matrix_to_dict(rho)) + "\n")


def load_density_matrix(path) -> DensityMatrix:
    return density_matrix_from_dict(json.loads(Path(path).read_text()))


def load_state(path) -> DensityMatrix:
    """Read either a raw density-matrix file or a tagged state spec."""
    payload = json.loads(Path(path).read_text())
    if not isinstance(payload, dict):
        raise ValueError("state file must hold a JSON object")
    if "re" in payload:
        return density_matrix_from_dict(payload)
    return make_state(payload)
