import json
from typing import Union

import numpy as np

from ..errors import ArgumentError
from ..objects.fields import ScalarField
from ..objects.grid import BallMesh, TorusGrid

__all__ = ("FieldFile", "HEADER_PREFIX", "FORMATS")

HEADER_PREFIX = b"# auxma-field "
FORMATS = ("binary", "csv")


def _grid_from_json(data: dict) -> Union[TorusGrid, BallMesh]:
    kind = data.get("kind")
    if kind == "torus":
        return TorusGrid.from_json(data)
    if kind == "ball":
        return BallMesh.from_json(data)
    raise ArgumentError(f"unknown grid kind {kind!r} in field header")


class FieldFile:
    def __init__(self, field: ScalarField, filename: str, format: str = "binary") -> None:
        """A scalar field and the name it is dumped under.

        The file is one header line ``# auxma-field {json}`` naming the grid,
        followed by the values in row-major order: little-endian float64 for
        ``binary``, one ``repr`` per line for ``csv``.

        :param field: The field to dump.
        :type field: ScalarField
        :param filename: The filename inside the run's output directory.
        :type filename: str
        :param format: ``binary`` or ``csv``.
        :type format: str
        """

        if format not in FORMATS:
            raise ArgumentError(f"unknown field format {format!r}; expected one of {FORMATS}")

        self.field = field
        self.filename = filename
        self.format = format

    def header(self) -> bytes:
        meta = {"grid": self.field.grid.to_json(), "shape": list(self.field.values.shape), "format": self.format}
        return HEADER_PREFIX + json.dumps(meta, sort_keys=True).encode() + b"\n"

    def encode(self) -> bytes:
        values = np.ascontiguousarray(self.field.values)
        if self.format == "binary":
            body = values.astype("<f8").tobytes(order="C")
        else:
            body = "".join(f"{value!r}\n" for value in values.ravel().tolist()).encode()
        return self.header() + body

    @classmethod
    def decode(cls, data: bytes, filename: str = "") -> "FieldFile":
        """Read back bytes written by :meth:`encode`.

        :raises ArgumentError: if the header is missing or the body does not fit the grid.
        """

        if not data.startswith(HEADER_PREFIX):
            raise ArgumentError("missing auxma-field header line")
        end = data.index(b"\n")
        meta = json.loads(data[len(HEADER_PREFIX) : end])
        grid = _grid_from_json(meta["grid"])
        body = data[end + 1 :]

        if meta["format"] == "binary":
            values = np.frombuffer(body, dtype="<f8")
        else:
            values = np.array([float(line) for line in body.decode().split()])
        if values.size != int(np.prod(grid.shape)):
            raise ArgumentError(f"field body holds {values.size} values, grid needs {int(np.prod(grid.shape))}")
        return cls(ScalarField(grid, values.reshape(grid.shape).astype(float)), filename, meta["format"])
