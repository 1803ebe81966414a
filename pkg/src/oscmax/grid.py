"""Cellwise-constant functions on a base domain, and their file formats."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import BaseDomain, DyadicCube, Window


class GridFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GridFunction:
    domain: BaseDomain
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.domain.shape:
            if values.size == self.domain.n_cells:
                values = values.reshape(self.domain.shape)
            else:
                raise GridFormatError(
                    f"{values.size} values do not fit a grid of shape {self.domain.shape}"
                )
        if not np.all(np.isfinite(values)):
            raise GridFormatError("grid values must be finite")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_flat(cls, values, dim: int = 1, level: int = 0) -> GridFunction:
        values = np.asarray(values, dtype=np.float64).ravel()
        m = _resolution_for(values.size, dim)
        return cls(BaseDomain.unit(dim, m, level), values)

    def with_values(self, values) -> GridFunction:
        return GridFunction(self.domain, values)

    def abs(self) -> GridFunction:
        return self.with_values(np.abs(self.values))

    def restrict(self, window: Window) -> np.ndarray:
        return self.values[window.clip_slices(self.domain)]

    def __sub__(self, other: GridFunction) -> GridFunction:
        return self.with_values(self.values - other.values)

    def __add__(self, other: GridFunction) -> GridFunction:
        return self.with_values(self.values + other.values)

    def to_json(self) -> dict:
        return {
            "dim": self.domain.dim,
            "root_level": self.domain.root.level,
            "resolution_m": self.domain.resolution,
            "values": [float(v) for v in self.values.ravel()],
        }

    @classmethod
    def from_json(cls, data: dict) -> GridFunction:
        dim = int(data["dim"])
        values = np.asarray(data["values"], dtype=np.float64)
        m = _resolution_for(values.size, dim)
        if "resolution_m" in data and int(data["resolution_m"]) != m:
            raise GridFormatError(
                f"resolution_m={data['resolution_m']} but {values.size} values imply m={m}"
            )
        offset = tuple(data.get("root_offset", (0,) * dim))
        domain = BaseDomain(dim, DyadicCube(int(data.get("root_level", 0)), offset), m)
        return cls(domain, values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.domain.dim == 1:
            for v in self.values:
                writer.writerow([repr(float(v))])
        elif self.domain.dim == 2:
            for row in self.values:
                writer.writerow([repr(float(v)) for v in row])
        else:
            raise GridFormatError("CSV grids are 1D or 2D")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, level: int = 0) -> GridFunction:
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        if not rows:
            raise GridFormatError("empty CSV grid")
        widths = {len(r) for r in rows}
        if widths == {1}:
            return cls.from_flat([float(r[0]) for r in rows], 1, level)
        if len(widths) != 1 or len(rows) != widths.pop():
            raise GridFormatError("2D CSV grid must be a square matrix")
        return cls.from_flat([float(c) for r in rows for c in r], 2, level)


def _resolution_for(count: int, dim: int) -> int:
    side = round(count ** (1.0 / dim)) if count > 0 else 0
    for s in (side - 1, side, side + 1):
        if s > 0 and s**dim == count and s & (s - 1) == 0:
            return s.bit_length() - 1
    raise GridFormatError(
        f"{count} values is not (2**m)**{dim} for any m: grid side must be a power of two"
    )


def load_grid(path: str | Path) -> GridFunction:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return GridFunction.from_csv(text)
    return GridFunction.from_json(json.loads(text))


def save_grid(f: GridFunction, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(f.to_csv())
    else:
        path.write_text(json.dumps(f.to_json()))
